#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tubtilt/error.hpp"
#include "tubtilt/k0.hpp"
#include "tubtilt/slope.hpp"
#include "tubtilt/tube.hpp"

namespace tubtilt {

struct IVecHash {
    std::size_t operator()(const IVec& v) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

/// An exceptional sheaf: its class plus its position in the tube chart of
/// its slope. The class determines everything else.
struct ExcObject {
    IVec cls;
    Slope slope;
    int orbit = 0;
    int socle = 0;
    int len = 1;
    int period = 1;

    bool is_quasi_simple() const noexcept { return len == 1; }
    bool is_torsion() const noexcept { return slope.is_inf(); }
    Window window() const noexcept { return Window{socle, len}; }

    friend bool operator==(const ExcObject& a, const ExcObject& b) { return a.cls == b.cls; }

    /// Sort order used for tilting objects: slope, orbit, socle, length.
    friend bool operator<(const ExcObject& a, const ExcObject& b) {
        if (a.slope != b.slope) return a.slope < b.slope;
        if (a.orbit != b.orbit) return a.orbit < b.orbit;
        if (a.socle != b.socle) return a.socle < b.socle;
        if (a.len != b.len) return a.len < b.len;
        return a.cls < b.cls;
    }
};

/// Quasi-simple classes of the non-homogeneous tubes at one slope. Orbit k
/// is cyclically ordered with τ(orbit[j+1]) = orbit[j]; position 0 holds the
/// lexicographically smallest class.
struct TubeChart {
    Slope slope;
    std::vector<std::vector<IVec>> orbits;

    struct Coords {
        int orbit;
        int socle;
        int len;
    };
    std::unordered_map<IVec, Coords, IVecHash> windows;

    int rank_of(int orbit) const { return static_cast<int>(orbits.at(orbit).size()); }

    IVec window_class(int orbit, int socle, int len) const {
        const auto& o = orbits.at(orbit);
        const int r = static_cast<int>(o.size());
        IVec v(o[0].size(), 0);
        for (int j = 0; j < len; ++j) {
            const auto& s = o[((socle + j) % r + r) % r];
            for (std::size_t k = 0; k < v.size(); ++k) v[k] += s[k];
        }
        return v;
    }

    std::size_t quasi_simple_count() const {
        std::size_t c = 0;
        for (const auto& o : orbits) c += o.size();
        return c;
    }
};

namespace detail {

inline void index_windows(TubeChart& chart) {
    chart.windows.clear();
    for (int k = 0; k < static_cast<int>(chart.orbits.size()); ++k) {
        const int r = chart.rank_of(k);
        for (int s = 0; s < r; ++s)
            for (int l = 1; l < r; ++l) {
                IVec cls = chart.window_class(k, s, l);
                auto [it, inserted] = chart.windows.emplace(std::move(cls), TubeChart::Coords{k, s, l});
                require(inserted, ErrorCode::ChartInconsistent, "two chart windows share a class at slope " + chart.slope.str());
            }
    }
}

} // namespace detail

/// Checks every chart invariant; used after construction and when charts are
/// loaded from a cache.
inline void verify_chart(const K0Context& ctx, const TubeChart& chart) {
    const WeightData& w = ctx.weights();
    const std::string at = " at slope " + chart.slope.str();
    std::vector<int> sizes;
    for (const auto& o : chart.orbits) sizes.push_back(static_cast<int>(o.size()));
    std::sort(sizes.begin(), sizes.end());
    require(sizes == w.weights, ErrorCode::ChartInconsistent, "orbit sizes differ from the weight sequence" + at);
    for (std::size_t k = 0; k < chart.orbits.size(); ++k) {
        const auto& o = chart.orbits[k];
        const int r = static_cast<int>(o.size());
        require(*std::min_element(o.begin(), o.end()) == o[0], ErrorCode::ChartInconsistent, "orbit basepoint is not minimal" + at);
        for (int j = 0; j < r; ++j) {
            require(static_cast<int>(o[j].size()) == ctx.dim(), ErrorCode::ChartInconsistent, "class length mismatch" + at);
            require(ctx.is_root(o[j]), ErrorCode::ChartInconsistent, "quasi-simple class is not a root" + at);
            require(ctx.is_sheaf_like(o[j]) && ctx.slope_of(o[j]) == chart.slope, ErrorCode::ChartInconsistent, "quasi-simple off slope" + at);
            require(ctx.tau().apply(o[(j + 1) % r]) == o[j], ErrorCode::ChartInconsistent, "orbit is not a tau-orbit" + at);
            for (int l = 0; l < r; ++l) {
                const int expect = (j == l ? 1 : 0) - (r > 1 && l == (j - 1 + r) % r ? 1 : 0);
                require(ctx.chi(o[j], o[l]) == expect, ErrorCode::ChartInconsistent, "standard tube pattern fails" + at);
            }
        }
        IVec full = chart.window_class(static_cast<int>(k), 0, r);
        require(ctx.chi(full, full) == 0, ErrorCode::ChartInconsistent, "orbit sum is not isotropic" + at);
        for (std::size_t k2 = 0; k2 < chart.orbits.size(); ++k2) {
            if (k2 == k) continue;
            for (const auto& a : o)
                for (const auto& b : chart.orbits[k2])
                    require(ctx.chi(a, b) == 0, ErrorCode::ChartInconsistent, "distinct orbits are not orthogonal" + at);
        }
    }
    // all orbit sums coincide: every tube has the same full-period class
    for (std::size_t k = 1; k < chart.orbits.size(); ++k)
        require(chart.window_class(static_cast<int>(k), 0, chart.rank_of(static_cast<int>(k))) ==
                    chart.window_class(0, 0, chart.rank_of(0)),
                ErrorCode::ChartInconsistent, "orbit sums differ" + at);
}

/// Builds the chart at slope q from the roots of multiplicity ≤ p. Roots are
/// processed by ascending multiplicity; a root that is a window sum of ≥ 2
/// consecutive quasi-simples of an earlier orbit is a window, anything else is
/// a new quasi-simple. Every root must end up as a rigid window.
inline TubeChart build_chart(const K0Context& ctx, const Slope& q) {
    const WeightData& w = ctx.weights();
    const std::int64_t b = q.den();
    const std::int64_t a = q.num();
    auto level_of = [&](const IVec& v) -> std::int64_t {
        return b == 0 ? ctx.deg(v) / a : ctx.rank(v) / b;
    };
    std::vector<IVec> roots = ctx.enumerate_roots_at(q, w.p);
    std::sort(roots.begin(), roots.end(), [&](const IVec& x, const IVec& y) {
        const auto lx = level_of(x), ly = level_of(y);
        return lx != ly ? lx < ly : x < y;
    });
    TubeChart chart;
    chart.slope = q;
    std::unordered_map<IVec, int, IVecHash> window_sums; // classes of windows with len ≥ 2
    std::size_t pos = 0;
    while (pos < roots.size()) {
        const std::int64_t level = level_of(roots[pos]);
        std::vector<IVec> simples;
        std::size_t end = pos;
        while (end < roots.size() && level_of(roots[end]) == level) {
            if (!window_sums.count(roots[end])) simples.push_back(roots[end]);
            ++end;
        }
        std::sort(simples.begin(), simples.end());
        std::vector<bool> used(simples.size(), false);
        for (std::size_t s = 0; s < simples.size(); ++s) {
            if (used[s]) continue;
            std::vector<IVec> orbit{simples[s]};
            used[s] = true;
            IVec cur = ctx.tau_inverse().apply(simples[s]);
            while (cur != simples[s]) {
                auto it = std::lower_bound(simples.begin(), simples.end(), cur);
                require(it != simples.end() && *it == cur, ErrorCode::ChartInconsistent,
                        "tau-orbit of a quasi-simple leaves the quasi-simple set at slope " + q.str());
                const auto idx = static_cast<std::size_t>(it - simples.begin());
                require(!used[idx], ErrorCode::ChartInconsistent, "overlapping tau-orbits at slope " + q.str());
                used[idx] = true;
                orbit.push_back(cur);
                cur = ctx.tau_inverse().apply(cur);
                require(orbit.size() <= static_cast<std::size_t>(w.p), ErrorCode::ChartInconsistent, "tau-orbit longer than p");
            }
            // orbit[0] is the smallest since simples are visited in sorted order
            require(static_cast<std::int64_t>(orbit.size()) * level == w.p, ErrorCode::ChartInconsistent,
                    "orbit size times multiplicity differs from p at slope " + q.str());
            chart.orbits.push_back(orbit);
            const int r = static_cast<int>(orbit.size());
            TubeChart tmp;
            tmp.orbits = {orbit};
            for (int soc = 0; soc < r; ++soc)
                for (int l = 2; l < r; ++l) window_sums.emplace(tmp.window_class(0, soc, l), 0);
        }
        pos = end;
    }
    std::stable_sort(chart.orbits.begin(), chart.orbits.end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() < y.size() : x[0] < y[0];
    });
    detail::index_windows(chart);
    for (const auto& root : roots)
        require(chart.windows.count(root) == 1, ErrorCode::ChartInconsistent, "root " + K0Context::vec_str(root) + " is not a rigid window at slope " + q.str());
    std::size_t expected = 0;
    for (int pi : w.weights) expected += static_cast<std::size_t>(pi) * (pi - 1);
    require(chart.windows.size() == expected && roots.size() == expected, ErrorCode::ChartInconsistent,
            "root census differs from the rigid window count at slope " + q.str());
    verify_chart(ctx, chart);
    return chart;
}

/// Shared context plus a memo table of charts keyed by slope. Concurrent
/// builders for one slope may race; the first insert wins and all callers
/// observe the same chart.
class Workspace {
public:
    explicit Workspace(const WeightData& w) : ctx_(std::make_shared<const K0Context>(w)) {}

    const K0Context& ctx() const noexcept { return *ctx_; }
    const WeightData& weights() const noexcept { return ctx_->weights(); }
    int n() const noexcept { return ctx_->dim(); }

    std::shared_ptr<const TubeChart> chart(const Slope& q) const {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = charts_.find(q);
            if (it != charts_.end()) return it->second;
        }
        auto built = std::make_shared<const TubeChart>(build_chart(*ctx_, q));
        std::lock_guard<std::mutex> lock(mutex_);
        return charts_.emplace(q, std::move(built)).first->second;
    }

    /// Adds a chart obtained elsewhere (e.g. a disk cache) after verifying it.
    void insert_chart(TubeChart chart) const {
        detail::index_windows(chart);
        verify_chart(*ctx_, chart);
        std::lock_guard<std::mutex> lock(mutex_);
        charts_.emplace(chart.slope, std::make_shared<const TubeChart>(std::move(chart)));
    }

    std::vector<std::shared_ptr<const TubeChart>> cached_charts() const {
        std::lock_guard<std::mutex> lock(mutex_);
        std::vector<std::shared_ptr<const TubeChart>> out;
        for (const auto& [q, c] : charts_) out.push_back(c);
        return out;
    }

    /// Decodes a class into chart coordinates.
    ExcObject object_of_class(const IVec& cls) const {
        require(static_cast<int>(cls.size()) == n(), ErrorCode::NotExceptionalHere, "class has wrong length");
        require(ctx_->is_sheaf_like(cls), ErrorCode::NotExceptionalHere, "class " + K0Context::vec_str(cls) + " is not sheaf-like");
        return coords_of_class(*chart(ctx_->slope_of(cls)), cls);
    }

    /// Decodes a class against a known chart.
    ExcObject coords_of_class(const TubeChart& chart, const IVec& cls) const {
        auto it = chart.windows.find(cls);
        if (it == chart.windows.end())
            fail(ErrorCode::NotExceptionalHere, "class " + K0Context::vec_str(cls) + " is not exceptional at slope " + chart.slope.str());
        return ExcObject{cls, chart.slope, it->second.orbit, it->second.socle, it->second.len, chart.rank_of(it->second.orbit)};
    }

    ExcObject object_at(const Slope& q, int orbit, int socle, int len) const {
        auto ch = chart(q);
        require(orbit >= 0 && orbit < static_cast<int>(ch->orbits.size()), ErrorCode::ValidationError, "orbit index out of range at slope " + q.str());
        const int r = ch->rank_of(orbit);
        require(len >= 1 && len <= r - 1, ErrorCode::ValidationError, "quasi-length must lie in 1..r-1");
        require(socle >= 0 && socle < r, ErrorCode::ValidationError, "socle position out of range");
        return ExcObject{ch->window_class(orbit, socle, len), q, orbit, socle, len, r};
    }

    ExcObject line_bundle(const LElement& x) const { return object_of_class(ctx_->line_bundle_class(l_normalize(weights(), x))); }

    ExcObject tau_obj(const ExcObject& x) const { return object_of_class(ctx_->tau().apply(x.cls)); }
    ExcObject tau_inverse_obj(const ExcObject& x) const { return object_of_class(ctx_->tau_inverse().apply(x.cls)); }

    ExcObject twist_obj(const ExcObject& x, const LElement& v) const {
        return object_of_class(ctx_->twist_matrix(l_normalize(weights(), v)).apply(x.cls));
    }

    std::int64_t chi(const ExcObject& x, const ExcObject& y) const { return ctx_->chi(x.cls, y.cls); }

    /// dim Hom(x, y) for exceptional x, y.
    std::int64_t hom_dim(const ExcObject& x, const ExcObject& y) const {
        if (x.slope < y.slope) return ctx_->chi(x.cls, y.cls);
        if (y.slope < x.slope) return 0;
        if (x.orbit != y.orbit) return 0;
        return TubeHomTable::instance().hom(x.period, x.window(), y.window());
    }

    /// dim Ext¹(x, y) = dim Hom(y, τx).
    std::int64_t ext_dim(const ExcObject& x, const ExcObject& y) const {
        if (x.slope < y.slope) return 0;
        if (y.slope < x.slope) return -ctx_->chi(x.cls, y.cls);
        if (x.orbit != y.orbit) return 0;
        const Window tx{((x.socle - 1) % x.period + x.period) % x.period, x.len};
        return TubeHomTable::instance().hom(x.period, y.window(), tx);
    }

private:
    std::shared_ptr<const K0Context> ctx_;
    mutable std::mutex mutex_;
    mutable std::map<Slope, std::shared_ptr<const TubeChart>> charts_;
};

/// x ∈ W_z: same tube and window(x) ⊆ window(z).
inline bool wing_contains(const ExcObject& z, const ExcObject& x) {
    if (z.slope != x.slope || z.orbit != x.orbit) return false;
    const int r = z.period;
    const int offset = ((x.socle - z.socle) % r + r) % r;
    return offset + x.len <= z.len;
}

} // namespace tubtilt
