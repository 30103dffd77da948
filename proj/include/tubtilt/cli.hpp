#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "tubtilt/connect.hpp"
#include "tubtilt/error.hpp"
#include "tubtilt/excalc.hpp"
#include "tubtilt/expr.hpp"
#include "tubtilt/serialize.hpp"
#include "tubtilt/suites.hpp"
#include "tubtilt/tilting.hpp"

/// Command-line front end.
namespace tubtilt::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// A parsed input: an object, a tilting object or a mutation path.
using Input = std::variant<ExcObject, TiltingObject, MutationPath>;

inline std::vector<int> parse_weight_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used > 0 && used == item.size(), ErrorCode::NonTubularWeights, "cannot read weight '" + item + "'");
        out.push_back(v);
    }
    return out;
}

inline std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("TUBTILT_CACHE"); env && *env) return env;
    if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "tubtilt";
    return std::filesystem::path(".tubtilt-cache");
}

/// Reads a JSON file when `src` names one, otherwise parses `src` as an
/// expression.
inline Input load_input(const Workspace& ws, const std::string& src) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(src, ec)) {
        const json j = read_json_file(src);
        if (j.is_object() && j.contains("nodes")) return path_from_json(ws, j);
        if (j.is_object() && j.contains("summands")) return tilting_from_json(ws, j);
        return object_from_json(ws, j);
    }
    ExprValue v = parse_and_evaluate(ws, src);
    if (auto* e = std::get_if<ExcObject>(&v)) return *e;
    return std::get<TiltingObject>(v);
}

inline TiltingObject load_tilting(const Workspace& ws, const std::string& src) {
    Input in = load_input(ws, src);
    auto* t = std::get_if<TiltingObject>(&in);
    require(t != nullptr, ErrorCode::ValidationError, "expected a tilting object, got another kind of input");
    require(is_tilting(ws, *t), ErrorCode::ValidationError, "input is not a tilting object");
    return *t;
}

inline json slope_list(const TiltingObject& t) {
    json a = json::array();
    for (const auto& q : t.slopes()) a.push_back(q.str());
    return a;
}

inline json tilting_report(const Workspace& ws, const TiltingObject& t) {
    json j = tilting_to_json(ws, t);
    const auto [lo, hi] = slope_range(t);
    j["slopes"] = slope_list(t);
    j["slopeRange"] = {lo.str(), hi.str()};
    j["bundle"] = t.is_bundle();
    j["firstObjects"] = first_objects(ws, t);
    j["lastObjects"] = last_objects(ws, t);
    return j;
}

/// Undirected graph of tilting objects explored from T_can.
struct Graph {
    std::vector<TiltingObject> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Breadth-first exploration from T_can; a node is admitted when every
/// summand slope lies in [lo, hi]. Torsion summands are admitted only when
/// hi is infinite.
inline Graph explore(const Workspace& ws, const Slope& lo, const Slope& hi, std::size_t max_nodes) {
    Graph g;
    std::map<IVec, std::size_t> index;
    auto admitted = [&](const TiltingObject& t) {
        for (const auto& q : t.slopes())
            if (q < lo || hi < q) return false;
        return true;
    };
    const TiltingObject can = canonical_tilting(ws);
    if (max_nodes == 0 || !admitted(can)) return g;
    g.nodes.push_back(can);
    index.emplace(can.key(), 0);
    for (std::size_t head = 0; head < g.nodes.size() && g.nodes.size() < max_nodes; ++head)
        for (int k = 0; k < static_cast<int>(g.nodes[head].size()) && g.nodes.size() < max_nodes; ++k) {
            TiltingObject next = mutate(ws, g.nodes[head], k).first;
            if (index.count(next.key()) || !admitted(next)) continue;
            index.emplace(next.key(), g.nodes.size());
            g.nodes.push_back(std::move(next));
        }
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        for (int k = 0; k < static_cast<int>(g.nodes[i].size()); ++k) {
            const auto it = index.find(mutate(ws, g.nodes[i], k).first.key());
            if (it != index.end() && it->second > i) g.edges.emplace_back(i, it->second);
        }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

inline std::string export_dot(const Graph& g) {
    std::ostringstream os;
    os << "graph tilting {\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        std::string label;
        for (const auto& q : g.nodes[i].slopes()) label += (label.empty() ? "" : " ") + q.str();
        os << "  n" << i << " [label=\"" << label << "\"];\n";
    }
    for (const auto& [a, b] : g.edges) os << "  n" << a << " -- n" << b << ";\n";
    os << "}\n";
    return os.str();
}

inline std::pair<Slope, Slope> parse_window(const std::string& text) {
    const auto dots = text.find("..");
    require(dots != std::string::npos, ErrorCode::ValidationError, "slope window must look like LO..HI");
    const auto lo = Slope::parse(text.substr(0, dots));
    const auto hi = Slope::parse(text.substr(dots + 2));
    require(lo && hi && *lo <= *hi, ErrorCode::ValidationError, "invalid slope window '" + text + "'");
    return {*lo, *hi};
}

inline void print_error(std::ostream& err, const Error& e) {
    json j{{"error", std::string(error_name(e.code()))}, {"message", e.message()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
        j["line"] = pe->line();
        j["column"] = pe->column();
    }
    err << j.dump() << '\n';
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace detail {

struct Settings {
    std::string weights = "2,2,2,2";
    bool no_cache = false;
    std::string input;
    std::string to = "canonical";
    std::string slope;
    std::string window = "0..inf";
    std::string dot = "-";
    std::string suite = "all";
    int at = 0;
    int steps = 10;
    long trials = 0;
    std::size_t max_nodes = 50;
    std::uint64_t seed = 1;
    bool bundle_only = false;
};

inline int cmd_info(const Workspace& ws, std::ostream& out) {
    const auto& ctx = ws.ctx();
    const auto& w = ws.weights();
    out << "weights=" << w.str() << '\n';
    out << "p=" << w.p << '\n';
    out << "n=" << w.n << '\n';
    out << "basis=";
    for (std::size_t i = 0; i < ctx.basis_labels().size(); ++i) out << (i ? " " : "") << ctx.basis_labels()[i];
    out << '\n' << "euler=\n";
    for (int r = 0; r < ctx.dim(); ++r) {
        out << ' ';
        for (int c = 0; c < ctx.dim(); ++c) out << ' ' << ctx.euler()(r, c);
        out << '\n';
    }
    return kOk;
}

inline int cmd_check(const Workspace& ws, const Settings& s, std::ostream& out) {
    Input in = load_input(ws, s.input);
    json j;
    bool ok = true;
    if (auto* e = std::get_if<ExcObject>(&in)) {
        j = object_to_json(*e);
        j["kind"] = "object";
        j["expr"] = chart_expr(*e);
    } else if (auto* t = std::get_if<TiltingObject>(&in)) {
        ok = is_tilting(ws, *t);
        j = ok ? tilting_report(ws, *t) : tilting_to_json(ws, *t);
        j["kind"] = "tilting";
        j["tilting"] = ok;
    } else {
        const auto& p = std::get<MutationPath>(in);
        std::string diag;
        ok = verify_path(ws, p, &diag);
        j = json{{"kind", "path"}, {"length", p.length()}, {"bundleOnly", p.bundle_only}, {"valid", ok}};
        if (!ok) j["diagnostic"] = diag;
    }
    out << j.dump(2) << '\n';
    return ok ? kOk : kFailure;
}

inline int cmd_mutate(const Workspace& ws, const Settings& s, std::ostream& out) {
    const TiltingObject t = load_tilting(ws, s.input);
    require(s.at >= 0 && s.at < static_cast<int>(t.size()), ErrorCode::ValidationError, "--at must lie in 0.." + std::to_string(t.size() - 1));
    auto [next, ev] = mutate(ws, t, s.at);
    out << json{{"event", event_to_json(ev)}, {"tilting", tilting_to_json(ws, next)}}.dump(2) << '\n';
    return kOk;
}

inline int cmd_walk(const Workspace& ws, const Settings& s, std::ostream& out) {
    require(s.steps >= 0, ErrorCode::ValidationError, "--steps must be nonnegative");
    Rng rng(s.seed);
    auto [end, events] = random_walk(ws, canonical_tilting(ws), s.steps, rng, s.bundle_only);
    for (const auto& ev : events) out << event_to_json(ev).dump() << '\n';
    out << tilting_to_json(ws, end).dump() << '\n';
    return kOk;
}

inline int cmd_connect(const Workspace& ws, const Settings& s, std::ostream& out) {
    const TiltingObject t = load_tilting(ws, s.input);
    require(t.is_bundle(), ErrorCode::PreconditionViolated, "connect needs a tilting bundle; run purge first");
    SearchBudget budget;
    budget.seed = s.seed;
    MutationPath path = connect_to_canonical(ws, t, budget);
    if (s.to != "canonical") {
        const TiltingObject target = load_tilting(ws, s.to);
        require(target.is_bundle(), ErrorCode::PreconditionViolated, "connect target must be a tilting bundle");
        path.append(reversed(ws, connect_to_canonical(ws, target, budget)));
        path = remove_loops(path);
    }
    std::string diag;
    require(verify_path(ws, path, &diag), ErrorCode::InternalConsistency, "constructed path failed verification: " + diag);
    out << path_to_json(ws, path).dump(2) << '\n';
    return kOk;
}

inline int cmd_purge(const Workspace& ws, const Settings& s, std::ostream& out) {
    const TiltingObject t = load_tilting(ws, s.input);
    auto [res, events] = purge_torsion(ws, t);
    json evs = json::array();
    for (const auto& ev : events) evs.push_back(event_to_json(ev));
    out << json{{"events", evs}, {"tilting", tilting_to_json(ws, res)}}.dump(2) << '\n';
    return kOk;
}

inline int cmd_chart(const Workspace& ws, const Settings& s, std::ostream& out) {
    const auto q = Slope::parse(s.slope);
    require(q.has_value(), ErrorCode::ValidationError, "invalid slope '" + s.slope + "'");
    out << chart_report(ws, *ws.chart(*q)).dump(2) << '\n';
    return kOk;
}

inline int cmd_graph(const Workspace& ws, const Settings& s, std::ostream& out) {
    const auto [lo, hi] = parse_window(s.window);
    const Graph g = explore(ws, lo, hi, s.max_nodes);
    const std::string dot = export_dot(g);
    if (s.dot == "-") {
        out << dot;
        return kOk;
    }
    std::ofstream file(s.dot);
    require(static_cast<bool>(file), ErrorCode::ValidationError, "cannot write '" + s.dot + "'");
    file << dot;
    out << json{{"nodes", g.nodes.size()}, {"edges", g.edges.size()}, {"dot", s.dot}}.dump() << '\n';
    return kOk;
}

inline int cmd_verify(const Settings& s, bool weights_given, std::ostream& out, std::ostream& err) {
    suites::Options opt;
    if (weights_given) opt.types = {make_weights(parse_weight_list(s.weights)).weights};
    if (s.trials > 0) opt.trials = s.trials;
    opt.seed = s.seed;
    opt.cli = [](const std::vector<std::string>& a, std::ostream& o, std::ostream& e) { return run(a, o, e); };
    bool all = true;
    for (const auto& r : suites::run(s.suite, opt)) {
        out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        err << r.name << " took " << r.seconds << "s\n";
        all = all && r.pass;
    }
    return all ? kOk : kFailure;
}

} // namespace detail

/// Runs one command; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    detail::Settings s;
    CLI::App app{"Tilting objects on tubular weighted projective lines", "tubtilt"};
    app.require_subcommand(1);
    auto* weights_opt = app.add_option("--weights", s.weights, "Weight sequence, e.g. 2,2,2,2")->capture_default_str();
    app.add_flag("--no-cache", s.no_cache, "Do not read or write the chart cache");

    auto* info = app.add_subcommand("info", "Print basis and Euler matrix");
    auto* check = app.add_subcommand("check", "Validate an object, tilting object or path");
    check->add_option("input", s.input, "JSON file or expression")->required();
    auto* mutate_cmd = app.add_subcommand("mutate", "Mutate a tilting object at one summand");
    mutate_cmd->add_option("input", s.input, "JSON file or expression")->required();
    mutate_cmd->add_option("--at", s.at, "Summand index")->required();
    auto* walk = app.add_subcommand("walk", "Random mutation walk from T_can");
    walk->add_option("--steps", s.steps, "Number of mutations")->capture_default_str();
    walk->add_option("--seed", s.seed, "Random seed")->capture_default_str();
    walk->add_flag("--bundle-only", s.bundle_only, "Never introduce torsion summands");
    auto* connect_cmd = app.add_subcommand("connect", "Mutation path between tilting bundles");
    connect_cmd->add_option("input", s.input, "JSON file or expression")->required();
    connect_cmd->add_option("--to", s.to, "'canonical' or a JSON file or expression")->capture_default_str();
    auto* purge = app.add_subcommand("purge", "Mutate torsion summands away");
    purge->add_option("input", s.input, "JSON file or expression")->required();
    auto* chart = app.add_subcommand("chart", "Tube chart at a slope");
    chart->add_option("--slope", s.slope, "Slope: integer, a/b or inf")->required();
    auto* graph = app.add_subcommand("graph", "Explore the mutation graph around T_can");
    graph->add_option("--slope-window", s.window, "LO..HI")->capture_default_str();
    graph->add_option("--max-nodes", s.max_nodes, "Node limit")->capture_default_str();
    graph->add_option("--dot", s.dot, "DOT output file, - for stdout")->capture_default_str();
    auto* verify = app.add_subcommand("verify", "Run property suites");
    std::string suite_help = "all";
    for (const auto& n : suites::names()) suite_help += ", " + n;
    verify->add_option("--suite", s.suite, suite_help)->capture_default_str();
    verify->add_option("--trials", s.trials, "Override the sample count of each suite");
    verify->add_option("--seed", s.seed, "Random seed")->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (verify->parsed()) return detail::cmd_verify(s, weights_opt->count() > 0, out, err);
        const Workspace ws(make_weights(parse_weight_list(s.weights)));
        std::optional<ChartCache> cache;
        if (!s.no_cache) {
            cache.emplace(default_cache_dir());
            cache->load(ws);
        }
        int code = kOk;
        if (info->parsed()) code = detail::cmd_info(ws, out);
        else if (check->parsed()) code = detail::cmd_check(ws, s, out);
        else if (mutate_cmd->parsed()) code = detail::cmd_mutate(ws, s, out);
        else if (walk->parsed()) code = detail::cmd_walk(ws, s, out);
        else if (connect_cmd->parsed()) code = detail::cmd_connect(ws, s, out);
        else if (purge->parsed()) code = detail::cmd_purge(ws, s, out);
        else if (chart->parsed()) code = detail::cmd_chart(ws, s, out);
        else if (graph->parsed()) code = detail::cmd_graph(ws, s, out);
        if (cache) cache->save(ws);
        return code;
    } catch (const Error& e) {
        print_error(err, e);
        return e.code() == ErrorCode::NonTubularWeights ? kUsage : kFailure;
    } catch (const json::exception& e) {
        err << json{{"error", "ValidationError"}, {"message", e.what()}}.dump() << '\n';
        return kFailure;
    }
}

} // namespace tubtilt::cli
