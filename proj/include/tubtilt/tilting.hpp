#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tubtilt/error.hpp"
#include "tubtilt/excalc.hpp"

namespace tubtilt {

/// A basic tilting object: n pairwise non-isomorphic exceptional summands in
/// sorted order. Construction rejects wrong counts and duplicates; rigidity
/// is checked separately by is_tilting.
class TiltingObject {
public:
    TiltingObject() = default;

    static TiltingObject from_summands(const Workspace& ws, std::vector<ExcObject> summands) {
        require(static_cast<int>(summands.size()) == ws.n(), ErrorCode::WrongSummandCount,
                "expected " + std::to_string(ws.n()) + " summands, got " + std::to_string(summands.size()));
        std::sort(summands.begin(), summands.end());
        for (std::size_t i = 1; i < summands.size(); ++i)
            require(!(summands[i] == summands[i - 1]), ErrorCode::DuplicateSummand,
                    "duplicate summand " + K0Context::vec_str(summands[i].cls));
        TiltingObject t;
        t.summands_ = std::move(summands);
        return t;
    }

    const std::vector<ExcObject>& summands() const noexcept { return summands_; }
    std::size_t size() const noexcept { return summands_.size(); }
    const ExcObject& operator[](std::size_t i) const { return summands_.at(i); }

    bool is_bundle() const {
        return std::none_of(summands_.begin(), summands_.end(), [](const ExcObject& e) { return e.is_torsion(); });
    }

    int index_of(const ExcObject& e) const {
        for (std::size_t i = 0; i < summands_.size(); ++i)
            if (summands_[i] == e) return static_cast<int>(i);
        return -1;
    }

    bool contains(const ExcObject& e) const { return index_of(e) >= 0; }

    /// Concatenated summand classes; equal keys iff equal tilting objects.
    IVec key() const {
        IVec k;
        for (const auto& s : summands_) k.insert(k.end(), s.cls.begin(), s.cls.end());
        return k;
    }

    std::vector<Slope> slopes() const {
        std::vector<Slope> out;
        for (const auto& s : summands_) out.push_back(s.slope);
        return out;
    }

    friend bool operator==(const TiltingObject& a, const TiltingObject& b) { return a.summands_ == b.summands_; }

private:
    std::vector<ExcObject> summands_;
};

enum class ExchangeDirection { Left, Right };

/// One mutation step. Left: 0 → removed → B → added → 0; Right:
/// 0 → added → B' → removed → 0. approx_class is the class of B (or B').
struct MutationEvent {
    int k = 0;
    ExcObject removed;
    ExcObject added;
    ExchangeDirection direction = ExchangeDirection::Left;
    IVec approx_class;

    MutationEvent reversed() const {
        MutationEvent e = *this;
        std::swap(e.removed, e.added);
        e.direction = direction == ExchangeDirection::Left ? ExchangeDirection::Right : ExchangeDirection::Left;
        return e;
    }
};

inline std::vector<std::vector<std::int64_t>> hom_matrix(const Workspace& ws, const std::vector<ExcObject>& objs) {
    std::vector<std::vector<std::int64_t>> h(objs.size(), std::vector<std::int64_t>(objs.size(), 0));
    for (std::size_t i = 0; i < objs.size(); ++i)
        for (std::size_t j = 0; j < objs.size(); ++j) h[i][j] = ws.hom_dim(objs[i], objs[j]);
    return h;
}

/// n pairwise distinct summands with vanishing pairwise and self extensions.
/// An ext-orthogonal n-set whose classes fail to form a Z-basis raises
/// BasisMismatch.
inline bool is_tilting(const Workspace& ws, const std::vector<ExcObject>& objs) {
    if (static_cast<int>(objs.size()) != ws.n()) return false;
    for (std::size_t i = 0; i < objs.size(); ++i)
        for (std::size_t j = 0; j < objs.size(); ++j) {
            if (i != j && objs[i] == objs[j]) return false;
            if (ws.ext_dim(objs[i], objs[j]) != 0) return false;
        }
    std::vector<IVec> cols;
    for (const auto& o : objs) cols.push_back(o.cls);
    const __int128 det = determinant_of_columns(cols);
    require(det == 1 || det == -1, ErrorCode::BasisMismatch, "ext-orthogonal summands do not form a basis of K0");
    return true;
}

inline bool is_tilting(const Workspace& ws, const TiltingObject& t) { return is_tilting(ws, t.summands()); }

inline TiltingObject canonical_tilting(const Workspace& ws, const LElement& twist) {
    const WeightData& w = ws.weights();
    std::vector<ExcObject> objs;
    auto add = [&](const LElement& x) { objs.push_back(ws.line_bundle(l_add(w, x, twist))); };
    add(l_zero(w));
    for (int i = 0; i < w.t; ++i)
        for (int j = 1; j < w.weights[i]; ++j) add(l_scale(w, l_x(w, i), j));
    add(l_c(w));
    return TiltingObject::from_summands(ws, std::move(objs));
}

/// T_can = ⊕_{0 ≤ x⃗ ≤ c⃗} O(x⃗).
inline TiltingObject canonical_tilting(const Workspace& ws) { return canonical_tilting(ws, l_zero(ws.weights())); }

/// Every complement of T \ T_k of the form Σ_{i≠k} b_i [T_i] − [T_k] with
/// 0 ≤ b_i ≤ dim Hom(T_k, T_i) + dim Hom(T_i, T_k). The root condition on such
/// a class reads Σ b_i² + Σ_{i<j} b_i b_j s_ij = Σ b_i s_ik with s the
/// symmetrized hom dimensions, which drives the pruning.
inline std::vector<std::pair<ExcObject, IVec>> complement_search(const Workspace& ws, const TiltingObject& t, int k,
                                                                  const std::vector<std::vector<std::int64_t>>& hom) {
    const int n = static_cast<int>(t.size());
    std::vector<int> vars;
    for (int i = 0; i < n; ++i)
        if (i != k && hom[k][i] + hom[i][k] > 0) vars.push_back(i);
    std::sort(vars.begin(), vars.end(), [&](int x, int y) {
        const auto sx = hom[k][x] + hom[x][k], sy = hom[k][y] + hom[y][k];
        return sx != sy ? sx > sy : x < y;
    });
    auto s = [&](int i, int j) { return hom[i][j] + hom[j][i]; };
    const std::size_t m = vars.size();
    std::vector<std::int64_t> b(m, 0);
    std::vector<std::pair<ExcObject, IVec>> found;
    auto leaf = [&]() {
        bool any = false;
        IVec approx(ws.n(), 0);
        for (std::size_t v = 0; v < m; ++v) {
            if (b[v] == 0) continue;
            any = true;
            const auto& c = t[vars[v]].cls;
            for (int r = 0; r < ws.n(); ++r) approx[r] += b[v] * c[r];
        }
        if (!any) return;
        IVec cls = approx;
        for (int r = 0; r < ws.n(); ++r) cls[r] -= t[k].cls[r];
        if (!ws.ctx().is_sheaf_like(cls)) return;
        ExcObject e;
        try {
            e = ws.object_of_class(cls);
        } catch (const Error& err) {
            if (err.code() == ErrorCode::NotExceptionalHere) return;
            throw;
        }
        if (e == t[k]) return;
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            if (ws.ext_dim(e, t[i]) != 0 || ws.ext_dim(t[i], e) != 0) return;
        }
        found.emplace_back(std::move(e), std::move(approx));
    };
    // slack = RHS − LHS over assigned variables
    std::function<void(std::size_t, std::int64_t)> dfs = [&](std::size_t depth, std::int64_t slack) {
        // optimistic bound for the remaining variables
        std::int64_t bound = 0;
        for (std::size_t v = depth; v < m; ++v) {
            std::int64_t cross = 0;
            for (std::size_t u = 0; u < depth; ++u) cross += b[u] * s(vars[u], vars[v]);
            const std::int64_t room = s(k, vars[v]) - cross;
            if (room > 0) bound += (room * room + 3) / 4;
        }
        if (slack + bound < 0) return;
        if (depth == m) {
            if (slack == 0) leaf();
            return;
        }
        const int i = vars[depth];
        std::int64_t cross = 0;
        for (std::size_t u = 0; u < depth; ++u) cross += b[u] * s(vars[u], i);
        const std::int64_t cap = s(k, i);
        for (std::int64_t val = 0; val <= cap; ++val) {
            b[depth] = val;
            // adding val: RHS += val·s_ik, LHS += val² + val·cross
            const std::int64_t next = slack + val * cap - val * val - val * cross;
            dfs(depth + 1, next);
        }
        b[depth] = 0;
    };
    dfs(0, 0);
    return found;
}

/// Coordinates of v in the basis formed by the summand classes of t.
inline IVec exchange_multiplicities(const TiltingObject& t, const IVec& v) {
    std::vector<IVec> cols;
    for (const auto& s : t.summands()) cols.push_back(s.cls);
    const __int128 det = determinant_of_columns(cols);
    require(det == 1 || det == -1, ErrorCode::BasisMismatch, "summand classes do not form a basis of K0");
    IVec out(cols.size(), 0);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        auto replaced = cols;
        replaced[i] = v;
        out[i] = static_cast<std::int64_t>(determinant_of_columns(replaced) / det);
    }
    return out;
}

/// Replaces T_k by the other complement of T \ T_k.
inline std::pair<TiltingObject, MutationEvent> mutate(const Workspace& ws, const TiltingObject& t, int k) {
    require(k >= 0 && k < static_cast<int>(t.size()), ErrorCode::PreconditionViolated, "mutation index out of range");
    const auto hom = hom_matrix(ws, t.summands());
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(hom[i][j] == 0 || hom[j][i] == 0, ErrorCode::InternalConsistency, "tilting summands with homs in both directions");
    auto found = complement_search(ws, t, k, hom);
    if (found.empty()) fail(ErrorCode::ComplementNotFound, "no complement found for summand " + std::to_string(k));
    if (found.size() > 1) fail(ErrorCode::ComplementNotUnique, std::to_string(found.size()) + " complements found for summand " + std::to_string(k));
    auto& [added, approx] = found.front();

    MutationEvent ev;
    ev.k = k;
    ev.removed = t[k];
    ev.added = added;
    ev.approx_class = approx;
    bool left = false, right = false;
    // direction from the support of B: successors of T_k (left) or predecessors (right)
    const IVec mult = exchange_multiplicities(t, approx);
    for (int i = 0; i < static_cast<int>(t.size()); ++i) {
        if (mult[i] == 0) continue;
        require(i != k && mult[i] > 0, ErrorCode::InternalConsistency, "exchange term is not in add of the remaining summands");
        if (hom[k][i] > 0) left = true;
        if (hom[i][k] > 0) right = true;
    }
    require(left != right, ErrorCode::InternalConsistency, "exchange term has mixed or empty support");
    ev.direction = left ? ExchangeDirection::Left : ExchangeDirection::Right;
    if (t[k].slope < added.slope)
        require(left, ErrorCode::InternalConsistency, "slope increase with a right exchange");
    if (added.slope < t[k].slope)
        require(right, ErrorCode::InternalConsistency, "slope decrease with a left exchange");

    std::vector<ExcObject> objs = t.summands();
    objs[k] = added;
    TiltingObject next = TiltingObject::from_summands(ws, std::move(objs));
    require(is_tilting(ws, next), ErrorCode::InternalConsistency, "mutation result is not tilting");
    return {std::move(next), std::move(ev)};
}

/// Indices k with Hom(T_i, T_k) = 0 for all i ≠ k.
inline std::vector<int> first_objects(const Workspace& ws, const TiltingObject& t) {
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(t.size()); ++k) {
        bool first = true;
        for (int i = 0; i < static_cast<int>(t.size()) && first; ++i)
            if (i != k && ws.hom_dim(t[i], t[k]) != 0) first = false;
        if (first) out.push_back(k);
    }
    return out;
}

/// Indices k with Hom(T_k, T_i) = 0 for all i ≠ k.
inline std::vector<int> last_objects(const Workspace& ws, const TiltingObject& t) {
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(t.size()); ++k) {
        bool last = true;
        for (int i = 0; i < static_cast<int>(t.size()) && last; ++i)
            if (i != k && ws.hom_dim(t[k], t[i]) != 0) last = false;
        if (last) out.push_back(k);
    }
    return out;
}

inline std::pair<Slope, Slope> slope_range(const TiltingObject& t) {
    return {t.summands().front().slope, t.summands().back().slope};
}

inline bool range_contains_integer(const TiltingObject& t) {
    auto [lo, hi] = slope_range(t);
    if (lo.is_inf()) return false;
    if (lo.is_integer() || hi.is_inf()) return true;
    return Slope(lo.floor() + 1) <= hi;
}

inline std::optional<int> only_minimal(const TiltingObject& t) {
    if (t.size() >= 2 && t[0].slope == t[1].slope) return std::nullopt;
    return 0;
}

inline std::optional<int> only_maximal(const TiltingObject& t) {
    const std::size_t n = t.size();
    if (n >= 2 && t[n - 1].slope == t[n - 2].slope) return std::nullopt;
    return static_cast<int>(n) - 1;
}

inline std::pair<TiltingObject, MutationEvent> apr_mutate(const Workspace& ws, const TiltingObject& t, int k) {
    const auto firsts = first_objects(ws, t);
    if (std::find(firsts.begin(), firsts.end(), k) == firsts.end()) fail(ErrorCode::NotFirstObject, "summand " + std::to_string(k) + " is not a first object");
    auto result = mutate(ws, t, k);
    const Slope hi = slope_range(t).second;
    const Slope& q = result.second.added.slope;
    require(t[k].slope <= q && q <= hi, ErrorCode::InternalConsistency, "APR mutation left the slope bounds");
    if (t.is_bundle()) require(result.first.is_bundle(), ErrorCode::InternalConsistency, "APR mutation of a bundle produced torsion");
    return result;
}

inline std::pair<TiltingObject, MutationEvent> co_apr_mutate(const Workspace& ws, const TiltingObject& t, int k) {
    const auto lasts = last_objects(ws, t);
    if (std::find(lasts.begin(), lasts.end(), k) == lasts.end()) fail(ErrorCode::NotLastObject, "summand " + std::to_string(k) + " is not a last object");
    auto result = mutate(ws, t, k);
    const Slope lo = slope_range(t).first;
    const Slope& q = result.second.added.slope;
    require(lo <= q && q <= t[k].slope, ErrorCode::InternalConsistency, "co-APR mutation left the slope bounds");
    if (t.is_bundle()) require(result.first.is_bundle(), ErrorCode::InternalConsistency, "co-APR mutation of a bundle produced torsion");
    return result;
}

/// Indices of summands lying in the wing of T_z (z included).
inline std::vector<int> wing_summands(const TiltingObject& t, int z) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(t.size()); ++i)
        if (wing_contains(t[z], t[i])) out.push_back(i);
    return out;
}

/// Mutates away every torsion summand, largest quasi-length first.
inline std::pair<TiltingObject, std::vector<MutationEvent>> purge_torsion(const Workspace& ws, const TiltingObject& t) {
    std::vector<ExcObject> torsion;
    for (const auto& s : t.summands())
        if (s.is_torsion()) torsion.push_back(s);
    std::stable_sort(torsion.begin(), torsion.end(), [](const ExcObject& a, const ExcObject& b) { return a.len > b.len; });
    TiltingObject cur = t;
    std::vector<MutationEvent> events;
    for (const auto& x : torsion) {
        const int k = cur.index_of(x);
        require(k >= 0, ErrorCode::InternalConsistency, "torsion summand vanished during purge");
        auto [next, ev] = mutate(ws, cur, k);
        require(!ev.added.is_torsion(), ErrorCode::InternalConsistency, "torsion purge produced a torsion summand");
        cur = std::move(next);
        events.push_back(std::move(ev));
    }
    require(cur.is_bundle(), ErrorCode::InternalConsistency, "torsion purge did not reach a bundle");
    return {std::move(cur), std::move(events)};
}

/// Quasi-simple summand with τ-period p, first in sort order.
inline int find_full_period_quasi_simple(const Workspace& ws, const TiltingObject& t) {
    for (int i = 0; i < static_cast<int>(t.size()); ++i)
        if (t[i].is_quasi_simple() && t[i].period == ws.weights().p) return i;
    fail(ErrorCode::NoFullPeriodSummand, "no quasi-simple summand of full tau-period");
}

enum class PerpComponent { Preprojective, Regular, Preinjective };

inline std::string_view component_name(PerpComponent c) {
    switch (c) {
    case PerpComponent::Preprojective: return "preprojective";
    case PerpComponent::Regular: return "regular";
    case PerpComponent::Preinjective: return "preinjective";
    }
    return "?";
}

struct PerpSide {
    bool in_right_perp = false; ///< e ∈ x^⊥
    bool in_left_perp = false;  ///< e ∈ ^⊥x
    PerpComponent component = PerpComponent::Regular;
};

inline PerpSide perp_side(const Workspace& ws, const ExcObject& x, const ExcObject& e) {
    PerpSide out;
    out.in_right_perp = ws.hom_dim(x, e) == 0 && ws.ext_dim(x, e) == 0;
    out.in_left_perp = ws.hom_dim(e, x) == 0 && ws.ext_dim(e, x) == 0;
    if (e.slope < x.slope) out.component = PerpComponent::Preprojective;
    else if (x.slope < e.slope) out.component = PerpComponent::Preinjective;
    else out.component = PerpComponent::Regular;
    return out;
}

/// Deterministic generator shared by the CLI walks and the verification
/// suites; draws are reduced by modulo so sequences do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

private:
    std::mt19937_64 eng_;
};

/// Random mutation walk. With bundle_only, steps that would produce torsion
/// are redrawn (among the remaining indices).
inline std::pair<TiltingObject, std::vector<MutationEvent>> random_walk(const Workspace& ws, TiltingObject start, int steps, Rng& rng,
                                                                        bool bundle_only) {
    std::vector<MutationEvent> events;
    for (int s = 0; s < steps; ++s) {
        std::vector<int> order(start.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        bool moved = false;
        while (!order.empty()) {
            const std::size_t pick = rng.below(order.size());
            const int k = order[pick];
            order.erase(order.begin() + static_cast<std::ptrdiff_t>(pick));
            auto [next, ev] = mutate(ws, start, k);
            if (bundle_only && !next.is_bundle()) continue;
            start = std::move(next);
            events.push_back(std::move(ev));
            moved = true;
            break;
        }
        require(moved, ErrorCode::InternalConsistency, "no admissible mutation in random walk");
    }
    return {std::move(start), std::move(events)};
}

} // namespace tubtilt
