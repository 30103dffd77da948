#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tubtilt/error.hpp"
#include "tubtilt/excalc.hpp"
#include "tubtilt/tilting.hpp"

namespace tubtilt {

struct MutationPath {
    std::vector<TiltingObject> nodes;
    std::vector<MutationEvent> events;
    bool bundle_only = true;

    static MutationPath trivial(const TiltingObject& t) {
        MutationPath p;
        p.nodes.push_back(t);
        p.bundle_only = t.is_bundle();
        return p;
    }

    bool empty() const noexcept { return events.empty(); }
    std::size_t length() const noexcept { return events.size(); }
    const TiltingObject& front() const { return nodes.front(); }
    const TiltingObject& back() const { return nodes.back(); }

    void push(TiltingObject next, MutationEvent ev) {
        bundle_only = bundle_only && next.is_bundle();
        nodes.push_back(std::move(next));
        events.push_back(std::move(ev));
    }

    /// Appends a path starting where this one ends.
    void append(const MutationPath& other) {
        if (nodes.empty()) {
            *this = other;
            return;
        }
        require(!other.nodes.empty() && other.nodes.front() == nodes.back(), ErrorCode::InternalConsistency,
                "appended path does not start at the current endpoint");
        for (std::size_t i = 0; i < other.events.size(); ++i) push(other.nodes[i + 1], other.events[i]);
    }
};

struct FareyStep {
    std::int64_t a, b, c, d;
};

struct SearchBudget {
    std::size_t max_nodes = 4000;
    std::int64_t max_slope_denominator = 65536;
    double max_seconds = 60.0;
    std::uint64_t seed = 0;
};

namespace detail {

class Deadline {
public:
    explicit Deadline(double seconds)
        : end_(std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds))) {}
    void check(const char* what) const {
        if (std::chrono::steady_clock::now() > end_) fail(ErrorCode::BudgetExhausted, std::string("time budget exhausted in ") + what);
    }

private:
    std::chrono::steady_clock::time_point end_;
};

inline bool within_denominator(const TiltingObject& t, std::int64_t max_den) {
    for (const auto& s : t.summands())
        if (!s.is_torsion() && s.slope.den() > max_den) return false;
    return true;
}

} // namespace detail

/// Event for the single mutation taking a to b; recomputed so direction and
/// exchange class are exact.
inline MutationEvent event_between(const Workspace& ws, const TiltingObject& a, const TiltingObject& b) {
    int k = -1;
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
        if (!b.contains(a[i])) {
            require(k < 0, ErrorCode::InternalConsistency, "nodes differ in more than one summand");
            k = i;
        }
    }
    require(k >= 0, ErrorCode::InternalConsistency, "nodes are equal");
    auto [next, ev] = mutate(ws, a, k);
    require(next == b, ErrorCode::InternalConsistency, "nodes are not related by a mutation");
    return ev;
}

inline MutationPath reversed(const Workspace& ws, const MutationPath& path) {
    MutationPath out;
    out.bundle_only = path.bundle_only;
    out.nodes.assign(path.nodes.rbegin(), path.nodes.rend());
    for (std::size_t i = 0; i + 1 < out.nodes.size(); ++i) {
        MutationEvent ev = path.events[path.events.size() - 1 - i].reversed();
        ev.k = out.nodes[i].index_of(ev.removed);
        require(ev.k >= 0, ErrorCode::InternalConsistency, "reversed event does not match its node");
        (void)ws;
        out.events.push_back(std::move(ev));
    }
    return out;
}

/// Cuts every cycle so that no node occurs twice.
inline MutationPath remove_loops(const MutationPath& path) {
    if (path.nodes.empty()) return path;
    MutationPath out = MutationPath::trivial(path.nodes.front());
    std::map<IVec, std::size_t> seen{{path.nodes.front().key(), 0}};
    for (std::size_t i = 0; i < path.events.size(); ++i) {
        const TiltingObject& next = path.nodes[i + 1];
        auto it = seen.find(next.key());
        if (it != seen.end()) {
            const std::size_t keep = it->second;
            for (std::size_t j = keep + 1; j < out.nodes.size(); ++j) seen.erase(out.nodes[j].key());
            out.nodes.resize(keep + 1);
            out.events.resize(keep);
            continue;
        }
        seen.emplace(next.key(), out.nodes.size());
        out.nodes.push_back(next);
        out.events.push_back(path.events[i]);
    }
    out.bundle_only = std::all_of(out.nodes.begin(), out.nodes.end(), [](const TiltingObject& t) { return t.is_bundle(); });
    return out;
}

/// Every node tilting, consecutive nodes one mutation apart with matching
/// events, and the bundle flag accurate.
inline bool verify_path(const Workspace& ws, const MutationPath& path, std::string* diagnostic = nullptr) {
    auto bad = [&](std::string msg) {
        if (diagnostic) *diagnostic = std::move(msg);
        return false;
    };
    if (path.nodes.empty()) return path.events.empty() ? true : bad("events without nodes");
    if (path.events.size() + 1 != path.nodes.size()) return bad("event count does not match node count");
    bool all_bundles = true;
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
        const auto& node = path.nodes[i];
        try {
            if (!is_tilting(ws, node)) return bad("node " + std::to_string(i) + " is not tilting");
        } catch (const Error& e) {
            return bad("node " + std::to_string(i) + ": " + e.what());
        }
        all_bundles = all_bundles && node.is_bundle();
    }
    if (all_bundles != path.bundle_only) return bad("bundleOnly flag is inaccurate");
    for (std::size_t i = 0; i < path.events.size(); ++i) {
        const auto& a = path.nodes[i];
        const auto& b = path.nodes[i + 1];
        const auto& ev = path.events[i];
        int differing = 0;
        for (const auto& s : a.summands())
            if (!b.contains(s)) ++differing;
        if (differing != 1) return bad("nodes " + std::to_string(i) + " and " + std::to_string(i + 1) + " differ in " + std::to_string(differing) + " summands");
        if (ev.k < 0 || ev.k >= static_cast<int>(a.size()) || !(a[ev.k] == ev.removed)) return bad("event " + std::to_string(i) + " removes the wrong summand");
        if (b.contains(ev.removed) || !b.contains(ev.added)) return bad("event " + std::to_string(i) + " does not match the next node");
        IVec sum = ev.removed.cls;
        for (std::size_t r = 0; r < sum.size(); ++r) sum[r] += ev.added.cls[r];
        if (sum != ev.approx_class) return bad("event " + std::to_string(i) + " violates exchange additivity");
    }
    return true;
}

/// The (c, d) with bc − ad = 1, 0 < c ≤ d < b, c ≤ a.
inline FareyStep extend_abcd(std::int64_t a, std::int64_t b) {
    require(0 < a && a < b && std::gcd(a, b) == 1, ErrorCode::PreconditionViolated, "extend_abcd needs coprime 0 < a < b");
    // extended Euclid on (b, a): b·s + a·t = 1, so c = s, d = −t
    std::int64_t r0 = b, r1 = a, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    std::int64_t c = s0, d = -t0;
    // shift along (a, b) so that 0 < d ≤ b
    const std::int64_t shift = (d > 0) ? -((d - 1) / b) : (-d) / b + 1;
    c += shift * a;
    d += shift * b;
    FareyStep st{a, b, c, d};
    require(b * c - a * d == 1 && 0 < c && c <= d && d < b && c <= a, ErrorCode::InternalConsistency,
            "extend_abcd constraints failed for " + std::to_string(a) + "/" + std::to_string(b));
    return st;
}

/// Quasi-simple y of full τ-period at slope q_target forming a rigid pair
/// with x; first in chart order.
inline ExcObject find_companion(const Workspace& ws, const ExcObject& x, const Slope& q_target) {
    require(x.is_quasi_simple() && x.period == ws.weights().p, ErrorCode::PreconditionViolated, "companion search needs a full-period quasi-simple");
    require(!x.slope.is_inf() && !x.slope.is_integer(), ErrorCode::PreconditionViolated, "companion search needs a non-integral slope");
    auto ch = ws.chart(q_target);
    for (int o = 0; o < static_cast<int>(ch->orbits.size()); ++o) {
        if (ch->rank_of(o) != ws.weights().p) continue;
        for (int s = 0; s < ch->rank_of(o); ++s) {
            ExcObject y = ws.object_at(q_target, o, s, 1);
            if (ws.ext_dim(x, y) == 0 && ws.ext_dim(y, x) == 0) return y;
        }
    }
    fail(ErrorCode::CompanionNotFound, "no companion at slope " + q_target.str() + " for " + K0Context::vec_str(x.cls));
}

namespace detail {

inline std::int64_t slope_det(const Slope& u, const Slope& v) {
    return std::llabs(u.num() * v.den() - u.den() * v.num());
}

/// Finite slopes u/v with v ≤ max_den lying within determinant distance
/// max_det of some seed slope, ranked by total determinant distance to the
/// seed slopes, then denominator, then value.
inline std::vector<Slope> ranked_slopes(const std::vector<Slope>& seed, std::int64_t max_den, std::int64_t max_det) {
    std::map<Slope, std::int64_t> found;
    for (const auto& s : seed)
        for (std::int64_t v = 1; v <= max_den; ++v)
            for (std::int64_t dd = -max_det; dd <= max_det; ++dd) {
                // u·b − v·a = dd
                const std::int64_t num = v * s.num() + dd;
                if (num % s.den() != 0) continue;
                const std::int64_t u = num / s.den();
                if (std::gcd(u, v) != 1) continue;
                Slope q(u, v);
                if (found.count(q)) continue;
                std::int64_t key = 0;
                for (const auto& t : seed) key += slope_det(q, t);
                found.emplace(q, key);
            }
    std::vector<std::tuple<std::int64_t, std::int64_t, Slope>> ranked;
    for (const auto& [q, key] : found) ranked.emplace_back(key, q.den(), q);
    std::sort(ranked.begin(), ranked.end());
    std::vector<Slope> out;
    for (const auto& r : ranked) out.push_back(std::get<2>(r));
    return out;
}

} // namespace detail

/// A tilting bundle containing the seed. First-fit extension: summands of
/// the optional reference object first, then chart objects on widening slope
/// pools (bundles before torsion), followed by a torsion purge; seed summands
/// are bundles and so are never mutated.
inline TiltingObject completion_containing(const Workspace& ws, const std::vector<ExcObject>& seed, const SearchBudget& budget,
                                           const TiltingObject* reference = nullptr) {
    require(!seed.empty(), ErrorCode::PreconditionViolated, "empty seed");
    for (std::size_t i = 0; i < seed.size(); ++i) {
        require(!seed[i].is_torsion(), ErrorCode::PreconditionViolated, "seed must consist of bundles");
        for (std::size_t j = 0; j < seed.size(); ++j) {
            if (i != j) require(!(seed[i] == seed[j]), ErrorCode::PreconditionViolated, "duplicate seed object");
            require(ws.ext_dim(seed[i], seed[j]) == 0, ErrorCode::PreconditionViolated, "seed is not rigid");
        }
    }
    const detail::Deadline deadline(budget.max_seconds);
    std::vector<Slope> seed_slopes;
    for (const auto& s : seed) seed_slopes.push_back(s.slope);

    std::vector<ExcObject> chosen = seed;
    auto try_add = [&](const ExcObject& e) {
        for (const auto& c : chosen)
            if (c == e || ws.ext_dim(c, e) != 0 || ws.ext_dim(e, c) != 0) return;
        chosen.push_back(e);
    };
    auto sweep = [&](const Slope& q) {
        auto ch = ws.chart(q);
        for (int o = 0; o < static_cast<int>(ch->orbits.size()); ++o)
            for (int len = 1; len < ch->rank_of(o); ++len)
                for (int s = 0; s < ch->rank_of(o); ++s) {
                    if (static_cast<int>(chosen.size()) == ws.n()) return;
                    try_add(ws.object_at(q, o, s, len));
                }
    };

    if (reference)
        for (const auto& e : reference->summands())
            if (static_cast<int>(chosen.size()) < ws.n()) try_add(e);

    std::int64_t seed_den = 1;
    for (const auto& q : seed_slopes) seed_den = std::max(seed_den, q.den());
    std::int64_t max_det = 1;
    std::set<Slope> swept;
    while (static_cast<int>(chosen.size()) < ws.n()) {
        deadline.check("completion");
        const std::int64_t max_den = std::min(budget.max_slope_denominator, 2 * seed_den + max_det);
        for (const auto& q : detail::ranked_slopes(seed_slopes, max_den, max_det)) {
            if (static_cast<int>(chosen.size()) == ws.n()) break;
            if (swept.insert(q).second) sweep(q);
        }
        if (static_cast<int>(chosen.size()) == ws.n()) break;
        if (max_det >= 64) {
            sweep(Slope::infinity());
            require(static_cast<int>(chosen.size()) == ws.n(), ErrorCode::BudgetExhausted, "completion pool exhausted");
            break;
        }
        max_det *= 2;
    }
    TiltingObject t = TiltingObject::from_summands(ws, chosen);
    require(is_tilting(ws, t), ErrorCode::InternalConsistency, "completion is not tilting");
    if (!t.is_bundle()) t = purge_torsion(ws, t).first;
    for (const auto& s : seed) require(t.contains(s), ErrorCode::InternalConsistency, "completion lost a seed summand");
    return t;
}

inline MutationPath connect_shared(const Workspace& ws, const TiltingObject& t, const TiltingObject& t2, int k, const SearchBudget& budget);

namespace detail {

/// Greedy best-first search over mutations of bundles. Mutations at fixed
/// objects are never taken; nodes with torsion or oversized denominators are
/// discarded. Priority: heuristic, then depth, then discovery order.
inline std::optional<MutationPath> best_first(const Workspace& ws, const TiltingObject& start,
                                              const std::function<bool(const TiltingObject&)>& goal,
                                              const std::function<std::int64_t(const TiltingObject&)>& heuristic,
                                              const std::vector<ExcObject>& fixed, const SearchBudget& budget,
                                              const Deadline& deadline, std::size_t max_nodes) {
    if (goal(start)) return MutationPath::trivial(start);
    struct Entry {
        std::int64_t h;
        std::size_t depth;
        std::size_t id;
        bool operator>(const Entry& o) const { return std::tie(h, depth, id) > std::tie(o.h, o.depth, o.id); }
    };
    std::vector<TiltingObject> nodes{start};
    std::vector<std::size_t> parent{0};
    std::vector<MutationEvent> via(1);
    std::map<IVec, std::size_t> seen{{start.key(), 0}};
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    open.push({heuristic(start), 0, 0});
    auto unwind = [&](std::size_t id) {
        std::vector<std::size_t> chain;
        for (std::size_t v = id; v != 0; v = parent[v]) chain.push_back(v);
        MutationPath p = MutationPath::trivial(start);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) p.push(nodes[*it], via[*it]);
        return p;
    };
    while (!open.empty()) {
        deadline.check("mutation search");
        const Entry cur = open.top();
        open.pop();
        const TiltingObject node = nodes[cur.id];
        for (int k = 0; k < static_cast<int>(node.size()); ++k) {
            if (std::find(fixed.begin(), fixed.end(), node[k]) != fixed.end()) continue;
            auto [next, ev] = mutate(ws, node, k);
            if (!next.is_bundle() || !within_denominator(next, budget.max_slope_denominator)) continue;
            auto key = next.key();
            if (seen.count(key)) continue;
            const std::size_t id = nodes.size();
            seen.emplace(std::move(key), id);
            nodes.push_back(std::move(next));
            parent.push_back(cur.id);
            via.push_back(std::move(ev));
            if (goal(nodes[id])) return unwind(id);
            if (nodes.size() >= max_nodes) return std::nullopt;
            open.push({heuristic(nodes[id]), cur.depth + 1, id});
        }
    }
    return std::nullopt;
}

inline std::int64_t count_missing(const TiltingObject& t, const TiltingObject& target) {
    std::int64_t m = 0;
    for (const auto& s : t.summands())
        if (!target.contains(s)) ++m;
    return m;
}

/// Distance to a target: summands still missing, refined by the gap between
/// the sorted slope profiles (in units of 1/16, torsion-free objects only).
inline std::int64_t target_distance(const TiltingObject& t, const TiltingObject& target) {
    double gap = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Slope& a = t[i].slope;
        const Slope& b = target[i].slope;
        gap += std::abs(static_cast<double>(a.num()) / a.den() - static_cast<double>(b.num()) / b.den());
    }
    return count_missing(t, target) * 16 + static_cast<std::int64_t>(gap * 16);
}

/// Summands other than x at slope ≤ μx (resp. ≥ μx).
inline std::int64_t crowding(const TiltingObject& t, const ExcObject& x, bool minimal) {
    std::int64_t m = 0;
    for (const auto& s : t.summands())
        if (!(s == x) && (minimal ? s.slope <= x.slope : x.slope <= s.slope)) ++m;
    return m;
}

/// The L(p) element y with e ≅ O(y), when e is a line bundle.
inline std::optional<LElement> line_element_of(const Workspace& ws, const ExcObject& e) {
    // line bundles are the rank-one exceptional objects
    if (ws.ctx().rank(e.cls) != 1) return std::nullopt;
    const WeightData& w = ws.weights();
    const std::int64_t d = ws.ctx().deg(e.cls);
    std::vector<std::int64_t> a(w.t, 0);
    // the finitely many normal forms of degree d
    std::function<std::optional<LElement>(int)> rec = [&](int i) -> std::optional<LElement> {
        if (i == w.t) {
            std::int64_t partial = 0;
            for (int j = 0; j < w.t; ++j) partial += a[j] * (w.p / w.weights[j]);
            if ((d - partial) % w.p != 0) return std::nullopt;
            LElement cand = l_normalize(w, a, (d - partial) / w.p);
            if (ws.ctx().line_bundle_class(cand) == e.cls) return cand;
            return std::nullopt;
        }
        for (a[i] = 0; a[i] < w.weights[i]; ++a[i])
            if (auto r = rec(i + 1)) return r;
        return std::nullopt;
    };
    return rec(0);
}

/// A tilting bundle containing the quasi-simple bundle x whose slope range
/// has μx strictly inside: T_can(y − x_t) when x = O(y), otherwise the
/// completion of x with a rigid pair of bundles on either side of μx.
inline TiltingObject bundle_through(const Workspace& ws, const ExcObject& x, const SearchBudget& budget, const Deadline& deadline) {
    const WeightData& w = ws.weights();
    if (auto y = line_element_of(ws, x)) return canonical_tilting(ws, l_sub(w, *y, l_x(w, w.t - 1)));
    for (std::int64_t max_det = 1; max_det <= 64; max_det *= 2) {
        deadline.check("bundle through summand");
        std::vector<ExcObject> above, below;
        const std::int64_t max_den = std::min(budget.max_slope_denominator, 2 * x.slope.den() + max_det);
        for (const auto& q : ranked_slopes({x.slope}, max_den, max_det)) {
            if (q == x.slope) continue;
            auto ch = ws.chart(q);
            for (int o = 0; o < static_cast<int>(ch->orbits.size()); ++o)
                for (int len = 1; len < ch->rank_of(o); ++len)
                    for (int s = 0; s < ch->rank_of(o); ++s) {
                        ExcObject e = ws.object_at(q, o, s, len);
                        if (ws.ext_dim(x, e) == 0 && ws.ext_dim(e, x) == 0) (x.slope < q ? above : below).push_back(std::move(e));
                    }
        }
        for (const auto& a : above)
            for (const auto& b : below) {
                if (ws.ext_dim(a, b) != 0 || ws.ext_dim(b, a) != 0) continue;
                try {
                    return completion_containing(ws, {x, a, b}, budget);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::BudgetExhausted) throw;
                }
            }
    }
    fail(ErrorCode::BudgetExhausted, "no tilting bundle has the summand strictly inside its slope range");
}

inline MutationPath make_only_extremal(const Workspace& ws, const TiltingObject& t, int k, const SearchBudget& budget, bool minimal) {
    require(t.is_bundle(), ErrorCode::PreconditionViolated, "normalization needs a tilting bundle");
    require(k >= 0 && k < static_cast<int>(t.size()), ErrorCode::PreconditionViolated, "summand index out of range");
    require(t[k].is_quasi_simple(), ErrorCode::PreconditionViolated, "normalization needs a quasi-simple summand");
    const ExcObject x = t[k];
    const Deadline deadline(budget.max_seconds);
    const auto [lo, hi] = slope_range(t);
    if (minimal ? x.slope == hi : x.slope == lo) {
        // x sits at the other end: make it extremal there, move inside its
        // stratum to a normalized bundle through x, then normalize that one
        // towards the requested side
        MutationPath path = make_only_extremal(ws, t, k, budget, !minimal);
        const TiltingObject through = bundle_through(ws, x, budget, deadline);
        const int j = through.index_of(x);
        const MutationPath near = make_only_extremal(ws, through, j, budget, !minimal);
        const MutationPath far = make_only_extremal(ws, through, j, budget, minimal);
        path.append(connect_shared(ws, path.back(), near.back(), path.back().index_of(x), budget));
        path.append(reversed(ws, near));
        path.append(far);
        return remove_loops(path);
    }
    MutationPath path = MutationPath::trivial(t);
    std::map<IVec, bool> seen{{t.key(), true}};
    // guided phase: (co-)APR mutations at extremal objects beyond x
    while (crowding(path.back(), x, minimal) > 0) {
        deadline.check("normalization");
        const TiltingObject& cur = path.back();
        const auto ends = minimal ? first_objects(ws, cur) : last_objects(ws, cur);
        std::optional<std::pair<TiltingObject, MutationEvent>> step;
        for (int e : ends) {
            if (cur[e] == x) continue;
            if (minimal ? x.slope < cur[e].slope : cur[e].slope < x.slope) continue;
            auto cand = minimal ? apr_mutate(ws, cur, e) : co_apr_mutate(ws, cur, e);
            if (!cand.first.is_bundle() || seen.count(cand.first.key())) continue;
            if (crowding(cand.first, x, minimal) > crowding(cur, x, minimal)) continue;
            step = std::move(cand);
            break;
        }
        if (!step) break;
        seen.emplace(step->first.key(), true);
        path.push(std::move(step->first), std::move(step->second));
    }
    if (crowding(path.back(), x, minimal) == 0) return path;
    // fallback: best-first over bundle mutations fixing x
    auto rest = best_first(
        ws, path.back(), [&](const TiltingObject& u) { return crowding(u, x, minimal) == 0; },
        [&](const TiltingObject& u) { return crowding(u, x, minimal); }, {x}, budget, deadline, budget.max_nodes);
    if (!rest) fail(ErrorCode::BudgetExhausted, std::string("could not make summand the only ") + (minimal ? "minimal" : "maximal") + " one");
    path.append(*rest);
    return path;
}

} // namespace detail

inline MutationPath make_only_minimal(const Workspace& ws, const TiltingObject& t, int k, const SearchBudget& budget) {
    return detail::make_only_extremal(ws, t, k, budget, true);
}

inline MutationPath make_only_maximal(const Workspace& ws, const TiltingObject& t, int k, const SearchBudget& budget) {
    return detail::make_only_extremal(ws, t, k, budget, false);
}

/// Bundle path from t to t2 whose nodes all contain the shared quasi-simple
/// x = t[k]. Tries a direct search in the stratum first, widening the node
/// cap twice; on failure,
/// normalizes both ends so that x is the only minimal summand (the only
/// maximal one if it already is so in t2) and searches between them.
inline MutationPath connect_shared(const Workspace& ws, const TiltingObject& t, const TiltingObject& t2, int k, const SearchBudget& budget) {
    require(t.is_bundle() && t2.is_bundle(), ErrorCode::PreconditionViolated, "connect_shared needs tilting bundles");
    require(k >= 0 && k < static_cast<int>(t.size()), ErrorCode::PreconditionViolated, "summand index out of range");
    const ExcObject x = t[k];
    require(x.is_quasi_simple() && t2.contains(x), ErrorCode::PreconditionViolated, "shared summand must be a common quasi-simple");
    const detail::Deadline deadline(budget.max_seconds);
    // two guides: summands still missing, and missing plus slope-profile gap
    auto search = [&](const TiltingObject& from, const TiltingObject& to, std::size_t cap) -> std::optional<MutationPath> {
        auto goal = [&](const TiltingObject& u) { return u == to; };
        if (auto p = detail::best_first(ws, from, goal, [&](const TiltingObject& u) { return detail::count_missing(u, to); }, {x}, budget, deadline, cap))
            return p;
        return detail::best_first(ws, from, goal, [&](const TiltingObject& u) { return detail::target_distance(u, to); }, {x}, budget, deadline, cap);
    };
    for (std::size_t cap = budget.max_nodes; cap <= 16 * budget.max_nodes; cap *= 4)
        if (auto direct = search(t, t2, cap)) return *direct;
    const auto top = only_maximal(t2);
    const bool minimal = !(top && t2[*top] == x);
    auto normalize = [&](const TiltingObject& u) {
        return minimal ? make_only_minimal(ws, u, u.index_of(x), budget) : make_only_maximal(ws, u, u.index_of(x), budget);
    };
    MutationPath left = normalize(t);
    MutationPath right = normalize(t2);
    auto mid = search(left.back(), right.back(), budget.max_nodes * 4);
    if (!mid) fail(ErrorCode::BudgetExhausted, "no path found in the stratum of the shared summand");
    left.append(*mid);
    left.append(reversed(ws, right));
    return remove_loops(left);
}

/// Descent through companions with strictly decreasing denominators until
/// the slope range contains an integer.
inline MutationPath integerize(const Workspace& ws, const TiltingObject& t, const SearchBudget& budget) {
    require(t.is_bundle(), ErrorCode::PreconditionViolated, "integerize needs a tilting bundle");
    require(!range_contains_integer(t), ErrorCode::PreconditionViolated, "slope range already contains an integer");
    MutationPath path = MutationPath::trivial(t);
    ExcObject x = t[find_full_period_quasi_simple(ws, t)];
    const std::int64_t m = x.slope.floor();
    Slope frac = x.slope - Slope(m);
    std::int64_t a = frac.num(), b = frac.den();
    while (!range_contains_integer(path.back())) {
        const FareyStep st = extend_abcd(a, b);
        const Slope target = Slope(m) + Slope(st.c, st.d);
        const ExcObject y = find_companion(ws, x, target);
        const TiltingObject next = completion_containing(ws, {x, y}, budget, &path.back());
        path.append(connect_shared(ws, path.back(), next, path.back().index_of(x), budget));
        x = y;
        a = st.c;
        b = st.d;
        if (a == b) break;
    }
    require(range_contains_integer(path.back()), ErrorCode::InternalConsistency, "descent ended without an integral slope");
    return path;
}

/// Twists every node of a path by v.
inline MutationPath twist_path(const Workspace& ws, const MutationPath& path, const LElement& v) {
    MutationPath out;
    for (const auto& node : path.nodes) {
        std::vector<ExcObject> objs;
        for (const auto& s : node.summands()) objs.push_back(ws.twist_obj(s, v));
        TiltingObject t = TiltingObject::from_summands(ws, std::move(objs));
        if (out.nodes.empty()) out = MutationPath::trivial(t);
        else out.push(t, event_between(ws, out.back(), t));
    }
    return out;
}

/// Bundle path T_can(y) → T_can built from the steps ±x⃗_i; consecutive
/// twisted canonical objects share a line bundle.
inline MutationPath twist_chain_to_canonical(const Workspace& ws, const LElement& y, const SearchBudget& budget) {
    const WeightData& w = ws.weights();
    const LElement yn = l_normalize(w, y);
    MutationPath path = MutationPath::trivial(canonical_tilting(ws, yn));
    if (yn == l_zero(w)) return path;
    const TiltingObject can = canonical_tilting(ws);
    // unit steps T_can → T_can(x⃗_i), sharing O(x⃗_i)
    std::map<int, MutationPath> unit;
    auto unit_step = [&](int i) -> const MutationPath& {
        auto it = unit.find(i);
        if (it != unit.end()) return it->second;
        const LElement xi = l_x(w, i);
        const TiltingObject target = canonical_tilting(ws, xi);
        const ExcObject shared = ws.line_bundle(xi);
        return unit.emplace(i, connect_shared(ws, can, target, can.index_of(shared), budget)).first->second;
    };
    // y = Σ a_i x⃗_i + k c⃗ with c⃗ = p_t x⃗_t
    std::vector<std::pair<int, int>> steps; // (i, ±1): move from T_can(z) to T_can(z ∓ x⃗_i)
    LElement z = yn;
    for (int i = 0; i < w.t; ++i)
        for (int j = 0; j < yn.coeffs[i]; ++j) steps.emplace_back(i, +1);
    const int tt = w.t - 1;
    for (std::int64_t j = 0; j < std::llabs(yn.c) * w.weights[tt]; ++j) steps.emplace_back(tt, yn.c > 0 ? +1 : -1);
    for (const auto& [i, sgn] : steps) {
        const LElement xi = l_x(w, i);
        if (sgn > 0) {
            // T_can(z) = T_can(z − x⃗_i) twisted unit step, walked backwards
            const LElement base = l_sub(w, z, xi);
            path.append(reversed(ws, twist_path(ws, unit_step(i), base)));
            z = base;
        } else {
            path.append(twist_path(ws, unit_step(i), z));
            z = l_add(w, z, xi);
        }
    }
    require(path.back() == can, ErrorCode::InternalConsistency, "twist chain did not reach T_can");
    return path;
}

/// Bundle path from a tilting bundle t to T_can.
inline MutationPath connect_to_canonical(const Workspace& ws, const TiltingObject& t, const SearchBudget& budget) {
    require(t.is_bundle(), ErrorCode::PreconditionViolated, "connect_to_canonical needs a tilting bundle");
    require(is_tilting(ws, t), ErrorCode::PreconditionViolated, "input is not tilting");
    const WeightData& w = ws.weights();
    const TiltingObject can = canonical_tilting(ws);
    MutationPath path = MutationPath::trivial(t);
    if (t == can) return path;
    if (!range_contains_integer(t)) path.append(integerize(ws, t, budget));

    // a tilting bundle containing a line bundle O(y)
    const TiltingObject& cur = path.back();
    std::optional<LElement> y;
    for (const auto& s : cur.summands())
        if ((y = detail::line_element_of(ws, s))) break;
    if (!y) {
        auto [lo, hi] = slope_range(cur);
        const std::int64_t m_lo = lo.is_integer() ? lo.floor() : lo.floor() + 1;
        const std::int64_t m_hi = hi.floor();
        const int tt = w.t - 1;
        std::optional<std::pair<int, ExcObject>> pick;
        for (std::int64_t m = m_lo; m <= m_hi && !pick; ++m) {
            // candidates: O(m x⃗_t) and its τ-orbit, first
            const ExcObject base = ws.line_bundle(l_scale(w, l_x(w, tt), m));
            std::vector<ExcObject> cands{base};
            ExcObject e = base;
            for (int j = 1; j < w.p; ++j) {
                e = ws.tau_inverse_obj(e);
                cands.push_back(e);
            }
            for (const auto& l : cands) {
                for (int i = 0; i < static_cast<int>(cur.size()) && !pick; ++i) {
                    const ExcObject& xq = cur[i];
                    if (!xq.is_quasi_simple() || xq == l) continue;
                    if (ws.ext_dim(xq, l) == 0 && ws.ext_dim(l, xq) == 0) pick.emplace(i, l);
                }
                if (pick) break;
            }
        }
        require(pick.has_value(), ErrorCode::InternalConsistency, "no quasi-simple summand pairs rigidly with a line bundle in range");
        const auto& [i, l] = *pick;
        const TiltingObject next = completion_containing(ws, {cur[i], l}, budget, &cur);
        path.append(connect_shared(ws, cur, next, i, budget));
        y = detail::line_element_of(ws, l);
    }
    require(y.has_value(), ErrorCode::InternalConsistency, "line bundle summand not identified");
    // every T_can(y − w⃗), 0 ≤ w⃗ ≤ c⃗, contains O(y⃗); take the one in which
    // O(y⃗) sits most like it does in the current object
    const ExcObject l = ws.line_bundle(*y);
    auto profile = [&](const TiltingObject& u) {
        std::int64_t below = 0, above = 0;
        for (const auto& s : u.summands()) {
            if (s.slope < l.slope) ++below;
            if (l.slope < s.slope) ++above;
        }
        return std::make_pair(below, above);
    };
    const auto here = profile(path.back());
    std::optional<std::tuple<std::int64_t, std::int64_t, LElement>> best;
    for (const auto& s : can.summands()) {
        const LElement wv = *detail::line_element_of(ws, s);
        const LElement z = l_sub(w, *y, wv);
        const TiltingObject cand = canonical_tilting(ws, z);
        const auto there = profile(cand);
        const std::int64_t mismatch = std::llabs(here.first - there.first) + std::llabs(here.second - there.second);
        const std::int64_t missing = detail::count_missing(path.back(), cand);
        if (!best || std::make_pair(mismatch, missing) < std::make_pair(std::get<0>(*best), std::get<1>(*best))) best.emplace(mismatch, missing, z);
    }
    const LElement z = std::get<2>(*best);
    path.append(connect_shared(ws, path.back(), canonical_tilting(ws, z), path.back().index_of(l), budget));
    path.append(twist_chain_to_canonical(ws, z, budget));
    path = remove_loops(path);
    std::string diag;
    require(verify_path(ws, path, &diag), ErrorCode::InternalConsistency, "constructed path failed verification: " + diag);
    require(path.bundle_only && path.back() == can, ErrorCode::InternalConsistency, "constructed path does not end at T_can");
    return path;
}

} // namespace tubtilt
