#include <iostream>
#include <map>
#include <sstream>

#include "tubtilt/cli.hpp"

using namespace tubtilt;

int main() {
    suites::Options opt;
    opt.cli = [](const std::vector<std::string>& args, std::ostream& out, std::ostream& err) { return cli::run(args, out, err); };

    std::map<int, std::vector<suites::Outcome>> by_criterion;
    for (const auto& entry : suites::registry()) {
        if (entry.criterion == 0) continue;
        by_criterion[entry.criterion].push_back(entry.run(opt));
    }
    {
        std::ostringstream out, err;
        const int code = cli::run({"--no-cache", "verify", "--suite", "all", "--trials", "5"}, out, err);
        by_criterion[11].push_back({"cli verify", code == 0, code == 0 ? "all suites pass" : out.str(), 0.0});
    }

    bool all = true;
    for (int c = 1; c <= 11; ++c) {
        const auto it = by_criterion.find(c);
        bool pass = it != by_criterion.end();
        std::string detail = pass ? "" : "no suite";
        if (pass)
            for (const auto& o : it->second) {
                pass = pass && o.pass;
                detail += (detail.empty() ? "" : "; ") + o.name + ": " + o.detail;
            }
        all = all && pass;
        std::cout << "criterion " << c << ": " << (pass ? "PASS" : "FAIL") << " (" << detail << ")\n";
    }
    return all ? 0 : 1;
}
