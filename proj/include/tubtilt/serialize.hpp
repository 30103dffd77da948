#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tubtilt/connect.hpp"
#include "tubtilt/error.hpp"
#include "tubtilt/excalc.hpp"
#include "tubtilt/tilting.hpp"

namespace tubtilt {

using json = nlohmann::json;

inline json object_to_json(const ExcObject& e) {
    return json{{"class", e.cls}, {"slope", e.slope.str()}, {"orbit", e.orbit}, {"socle", e.socle}, {"len", e.len}};
}

inline IVec class_from_json(const Workspace& ws, const json& j) {
    require(j.is_array(), ErrorCode::ValidationError, "class must be an integer array");
    IVec cls;
    for (const auto& v : j) {
        require(v.is_number_integer(), ErrorCode::ValidationError, "class entries must be integers");
        cls.push_back(v.get<std::int64_t>());
    }
    require(static_cast<int>(cls.size()) == ws.n(), ErrorCode::ValidationError, "class has length " + std::to_string(cls.size()) + ", expected " + std::to_string(ws.n()));
    return cls;
}

/// The class is authoritative; chart fields, when present, must agree with
/// the recomputed ones.
inline ExcObject object_from_json(const Workspace& ws, const json& j) {
    require(j.is_object() && j.contains("class"), ErrorCode::ValidationError, "object needs a \"class\" field");
    ExcObject e;
    try {
        e = ws.object_of_class(class_from_json(ws, j.at("class")));
    } catch (const Error& err) {
        if (err.code() == ErrorCode::NotExceptionalHere || err.code() == ErrorCode::NotSheafLike) fail(ErrorCode::ValidationError, err.what());
        throw;
    }
    if (j.contains("slope")) {
        auto q = j.at("slope").is_string() ? Slope::parse(j.at("slope").get<std::string>()) : std::nullopt;
        require(q && *q == e.slope, ErrorCode::ValidationError, "stored slope disagrees with the class");
    }
    auto check = [&](const char* key, int value) {
        if (j.contains(key)) require(j.at(key).is_number_integer() && j.at(key).get<int>() == value, ErrorCode::ValidationError, std::string("stored ") + key + " disagrees with the class");
    };
    check("orbit", e.orbit);
    check("socle", e.socle);
    check("len", e.len);
    return e;
}

inline json tilting_to_json(const Workspace& ws, const TiltingObject& t) {
    json s = json::array();
    for (const auto& e : t.summands()) s.push_back(object_to_json(e));
    return json{{"weights", ws.weights().weights}, {"summands", s}};
}

inline void check_weights(const Workspace& ws, const json& j) {
    if (!j.contains("weights")) return;
    require(j.at("weights").is_array(), ErrorCode::ValidationError, "weights must be an array");
    std::vector<int> w;
    for (const auto& v : j.at("weights")) {
        require(v.is_number_integer(), ErrorCode::ValidationError, "weights must be integers");
        w.push_back(v.get<int>());
    }
    std::sort(w.begin(), w.end());
    require(w == ws.weights().weights, ErrorCode::ValidationError, "file weights do not match the active context");
}

inline TiltingObject tilting_from_json(const Workspace& ws, const json& j) {
    require(j.is_object() && j.contains("summands") && j.at("summands").is_array(), ErrorCode::ValidationError, "tilting object needs a \"summands\" array");
    check_weights(ws, j);
    std::vector<ExcObject> objs;
    for (const auto& s : j.at("summands")) objs.push_back(object_from_json(ws, s));
    return TiltingObject::from_summands(ws, std::move(objs));
}

inline json event_to_json(const MutationEvent& ev) {
    return json{{"k", ev.k}, {"removed", ev.removed.cls}, {"added", ev.added.cls}, {"dir", ev.direction == ExchangeDirection::Left ? "L" : "R"}};
}

inline json path_to_json(const Workspace& ws, const MutationPath& path) {
    json nodes = json::array(), events = json::array();
    for (const auto& n : path.nodes) nodes.push_back(tilting_to_json(ws, n));
    for (const auto& e : path.events) events.push_back(event_to_json(e));
    return json{{"nodes", nodes}, {"events", events}, {"bundleOnly", path.bundle_only}};
}

/// Events are recomputed from the nodes and must match the stored ones.
inline MutationPath path_from_json(const Workspace& ws, const json& j) {
    require(j.is_object() && j.contains("nodes") && j.at("nodes").is_array(), ErrorCode::ValidationError, "path needs a \"nodes\" array");
    MutationPath p;
    for (const auto& n : j.at("nodes")) {
        TiltingObject t = tilting_from_json(ws, n);
        if (p.nodes.empty()) p = MutationPath::trivial(t);
        else p.push(t, event_between(ws, p.back(), t));
    }
    if (j.contains("events")) {
        const auto& ev = j.at("events");
        require(ev.is_array() && ev.size() == p.events.size(), ErrorCode::ValidationError, "event count does not match the nodes");
        for (std::size_t i = 0; i < p.events.size(); ++i)
            require(ev[i] == event_to_json(p.events[i]), ErrorCode::ValidationError, "stored event " + std::to_string(i) + " disagrees with the nodes");
    }
    if (j.contains("bundleOnly")) require(j.at("bundleOnly") == p.bundle_only, ErrorCode::ValidationError, "stored bundleOnly flag is inaccurate");
    return p;
}

inline json chart_to_json(const Workspace& ws, const TubeChart& chart) {
    return json{{"weights", ws.weights().weights}, {"slope", chart.slope.str()}, {"orbits", chart.orbits}};
}

inline TubeChart chart_from_json(const Workspace& ws, const json& j) {
    require(j.is_object() && j.contains("slope") && j.contains("orbits"), ErrorCode::ValidationError, "chart needs slope and orbits");
    check_weights(ws, j);
    auto q = Slope::parse(j.at("slope").get<std::string>());
    require(q.has_value(), ErrorCode::ValidationError, "bad chart slope");
    TubeChart chart;
    chart.slope = *q;
    for (const auto& o : j.at("orbits")) {
        std::vector<IVec> orbit;
        for (const auto& c : o) orbit.push_back(class_from_json(ws, c));
        chart.orbits.push_back(std::move(orbit));
    }
    return chart;
}

/// Chart description with every rigid window listed.
inline json chart_report(const Workspace& ws, const TubeChart& chart) {
    json orbits = json::array();
    for (int o = 0; o < static_cast<int>(chart.orbits.size()); ++o) {
        json objs = json::array();
        for (int len = 1; len < chart.rank_of(o); ++len)
            for (int s = 0; s < chart.rank_of(o); ++s) objs.push_back(object_to_json(ws.object_at(chart.slope, o, s, len)));
        orbits.push_back(json{{"rank", chart.rank_of(o)}, {"quasiSimples", chart.orbits[o]}, {"objects", objs}});
    }
    return json{{"weights", ws.weights().weights}, {"slope", chart.slope.str()}, {"orbits", orbits}};
}

inline json read_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    require(static_cast<bool>(in), ErrorCode::ValidationError, "cannot open " + file.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::ValidationError, file.string() + ": " + e.what());
    }
}

/// Charts persisted as one JSON file per (weights, slope); entries are
/// re-verified when loaded.
class ChartCache {
public:
    explicit ChartCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const noexcept { return dir_; }

    std::filesystem::path file_for(const Workspace& ws, const Slope& q) const {
        std::string name = "chart_";
        for (std::size_t i = 0; i < ws.weights().weights.size(); ++i) name += (i ? "-" : "") + std::to_string(ws.weights().weights[i]);
        std::string qs = q.str();
        std::replace(qs.begin(), qs.end(), '/', '_');
        return dir_ / (name + "_" + qs + ".json");
    }

    /// Loads every cached chart for the active weights; returns the count.
    /// Files that fail verification are ignored and later overwritten.
    std::size_t load(const Workspace& ws) const {
        std::error_code ec;
        if (!std::filesystem::is_directory(dir_, ec)) return 0;
        const std::string prefix = file_for(ws, Slope(0)).filename().string();
        const std::string stem = prefix.substr(0, prefix.size() - std::string("0.json").size());
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir_, ec))
            if (entry.path().filename().string().rfind(stem, 0) == 0) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        std::size_t loaded = 0;
        for (const auto& f : files) {
            try {
                TubeChart chart = chart_from_json(ws, read_json_file(f));
                const Slope q = chart.slope;
                if (file_for(ws, q) != f) continue;
                ws.insert_chart(std::move(chart));
                on_disk_.insert(q);
                ++loaded;
            } catch (const Error&) {
            } catch (const json::exception&) {
            }
        }
        return loaded;
    }

    /// Writes charts not loaded from disk, replacing stale files.
    void save(const Workspace& ws) const {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) return;
        for (const auto& chart : ws.cached_charts()) {
            if (on_disk_.count(chart->slope)) continue;
            const auto file = file_for(ws, chart->slope);
            const auto tmp = file.string() + ".tmp";
            {
                std::ofstream out(tmp);
                if (!out) continue;
                out << chart_to_json(ws, *chart).dump() << '\n';
            }
            std::filesystem::rename(tmp, file, ec);
            if (!ec) on_disk_.insert(chart->slope);
        }
    }

private:
    std::filesystem::path dir_;
    mutable std::set<Slope> on_disk_;
};

} // namespace tubtilt
