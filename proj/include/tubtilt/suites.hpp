#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tubtilt/connect.hpp"
#include "tubtilt/error.hpp"
#include "tubtilt/excalc.hpp"
#include "tubtilt/expr.hpp"
#include "tubtilt/serialize.hpp"
#include "tubtilt/tilting.hpp"

/// Property suites shared by `tubtilt verify` and the acceptance runner.
namespace tubtilt::suites {

using CliRunner = std::function<int(const std::vector<std::string>&, std::ostream&, std::ostream&)>;

struct Options {
    std::vector<std::vector<int>> types{{2, 2, 2, 2}, {3, 3, 3}, {2, 4, 4}, {2, 3, 6}};
    std::optional<long> trials; ///< overrides each suite's main sample count
    std::uint64_t seed = 1;
    CliRunner cli;              ///< needed by the determinism suite
};

struct Outcome {
    std::string name;
    bool pass = true;
    std::string detail;
    double seconds = 0;
};

namespace detail {

class Checker {
public:
    void expect(bool cond, const std::string& what) {
        ++checks_;
        if (!cond && failure_.empty()) failure_ = what;
    }
    bool ok() const noexcept { return failure_.empty(); }
    const std::string& failure() const noexcept { return failure_; }
    long checks() const noexcept { return checks_; }

private:
    long checks_ = 0;
    std::string failure_;
};

inline std::uint64_t type_seed(std::uint64_t seed, const std::vector<int>& w) {
    std::uint64_t h = seed * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull;
    for (int x : w) h = (h ^ static_cast<std::uint64_t>(x)) * 0x100000001b3ull;
    return h;
}

inline std::string type_name(const std::vector<int>& w) {
    std::string s = "(";
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s + ")";
}

inline double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline IVec random_class(Rng& rng, int n, int bound) {
    IVec v(n);
    for (auto& x : v) x = static_cast<std::int64_t>(rng.below(2 * bound + 1)) - bound;
    return v;
}

inline LElement random_l(const WeightData& w, Rng& rng, int c_bound) {
    std::vector<std::int64_t> raw(w.t);
    for (int i = 0; i < w.t; ++i) raw[i] = static_cast<std::int64_t>(rng.below(3 * w.weights[i])) - w.weights[i];
    return l_normalize(w, raw, static_cast<std::int64_t>(rng.below(2 * c_bound + 1)) - c_bound);
}

inline Slope random_slope(Rng& rng) {
    if (rng.below(8) == 0) return Slope::infinity();
    const std::int64_t den = 1 + static_cast<std::int64_t>(rng.below(5));
    const std::int64_t num = static_cast<std::int64_t>(rng.below(8 * den + 1)) - 3 * den;
    return Slope(num, den);
}

inline ExcObject random_object(const Workspace& ws, Rng& rng) {
    const Slope q = random_slope(rng);
    auto ch = ws.chart(q);
    const int o = static_cast<int>(rng.below(ch->orbits.size()));
    const int r = ch->rank_of(o);
    return ws.object_at(q, o, static_cast<int>(rng.below(r)), 1 + static_cast<int>(rng.below(r - 1)));
}

inline TiltingObject random_tilting(const Workspace& ws, Rng& rng, int max_steps, bool bundle_only) {
    const int steps = static_cast<int>(rng.below(max_steps + 1));
    return random_walk(ws, canonical_tilting(ws), steps, rng, bundle_only).first;
}

/// Every complement found by scanning the full multiplicity box, without
/// pruning; the oracle for the pruned search.
inline std::vector<ExcObject> exhaustive_complements(const Workspace& ws, const TiltingObject& t, int k, std::size_t max_box = 2'000'000) {
    const int n = static_cast<int>(t.size());
    std::vector<std::int64_t> cap(n, 0);
    std::size_t box = 1;
    for (int i = 0; i < n; ++i) {
        if (i == k) continue;
        cap[i] = std::max(ws.hom_dim(t[k], t[i]), ws.hom_dim(t[i], t[k]));
        box *= static_cast<std::size_t>(cap[i] + 1);
        require(box <= max_box, ErrorCode::SearchBoundExceeded, "complement box too large for the exhaustive oracle");
    }
    std::vector<std::int64_t> b(n, 0);
    std::vector<ExcObject> out;
    while (true) {
        bool zero = true;
        IVec cls(ws.n(), 0);
        for (int i = 0; i < n; ++i) {
            if (b[i] != 0) zero = false;
            for (int r = 0; r < ws.n(); ++r) cls[r] += b[i] * t[i].cls[r];
        }
        for (int r = 0; r < ws.n(); ++r) cls[r] -= t[k].cls[r];
        if (!zero && ws.ctx().is_root(cls) && ws.ctx().is_sheaf_like(cls)) {
            try {
                ExcObject e = ws.object_of_class(cls);
                bool ok = !(e == t[k]);
                for (int i = 0; i < n && ok; ++i)
                    if (i != k && (ws.ext_dim(e, t[i]) != 0 || ws.ext_dim(t[i], e) != 0)) ok = false;
                if (ok) out.push_back(e);
            } catch (const Error& err) {
                if (err.code() != ErrorCode::NotExceptionalHere) throw;
            }
        }
        int i = 0;
        for (; i < n; ++i) {
            if (i == k) continue;
            if (b[i] < cap[i]) {
                ++b[i];
                break;
            }
            b[i] = 0;
        }
        if (i == n) break;
    }
    return out;
}

/// Either Ext¹(T, L) = 0 or Hom(T, L) = 0.
inline bool dichotomy_holds(const Workspace& ws, const TiltingObject& t, const ExcObject& l) {
    std::int64_t e = 0, h = 0;
    for (const auto& s : t.summands()) {
        e += ws.ext_dim(s, l);
        h += ws.hom_dim(s, l);
    }
    return e == 0 || h == 0;
}

template <class Body>
Outcome run_guarded(const std::string& name, Body&& body) {
    Outcome out;
    out.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    Checker chk;
    std::string info;
    try {
        info = body(chk);
    } catch (const Error& e) {
        chk.expect(false, std::string("unexpected error: ") + e.what());
    } catch (const std::exception& e) {
        chk.expect(false, std::string("unexpected exception: ") + e.what());
    }
    out.seconds = elapsed(t0);
    out.pass = chk.ok();
    out.detail = chk.ok() ? info + " (" + std::to_string(chk.checks()) + " checks)" : chk.failure();
    return out;
}

} // namespace detail

/// L(p): group laws, normal forms, order of ω⃗.
inline Outcome lattice(const Options& opt) {
    return detail::run_guarded("lattice", [&](detail::Checker& chk) {
        const long trials = opt.trials.value_or(10000);
        for (const auto& wv : opt.types) {
            const WeightData w = make_weights(wv);
            Rng rng(detail::type_seed(opt.seed, wv));
            const std::string tn = detail::type_name(wv);
            for (long i = 0; i < trials; ++i) {
                const LElement x = detail::random_l(w, rng, 6), y = detail::random_l(w, rng, 6), z = detail::random_l(w, rng, 6);
                chk.expect(l_add(w, l_add(w, x, y), z) == l_add(w, x, l_add(w, y, z)), tn + " associativity");
                chk.expect(l_add(w, x, y) == l_add(w, y, x), tn + " commutativity");
                chk.expect(l_add(w, x, l_neg(w, x)) == l_zero(w), tn + " inverse");
                chk.expect(delta(w, l_add(w, x, y)) == delta(w, x) + delta(w, y), tn + " degree additivity");
                chk.expect(l_normalize(w, l_normalize(w, x)) == l_normalize(w, x), tn + " normal form idempotence");
            }
            const LElement om = omega(w);
            LElement acc = om;
            int order = 1;
            while (!(acc == l_zero(w)) && order <= 64) {
                acc = l_add(w, acc, om);
                ++order;
            }
            chk.expect(order == w.p, tn + " order of omega is " + std::to_string(order));
        }
        return std::to_string(trials) + " triples per type";
    });
}

/// Criterion 1 plus the lattice-level identities of K0.
inline Outcome structure(const Options& opt) {
    return detail::run_guarded("structure", [&](detail::Checker& chk) {
        const long trials = opt.trials.value_or(10000);
        const std::map<std::vector<int>, int> expected_n{{{2, 2, 2, 2}, 6}, {{3, 3, 3}, 8}, {{2, 4, 4}, 9}, {{2, 3, 6}, 10}};
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            const WeightData w = make_weights(wv);
            const K0Context ctx(w);
            chk.expect(w.genus == Slope(1), tn + " genus is " + w.genus.str());
            chk.expect(expected_n.count(w.weights) && expected_n.at(w.weights) == w.n, tn + " rank of K0 is " + std::to_string(w.n));
            const __int128 det = determinant(ctx.euler());
            chk.expect(det == 1 || det == -1, tn + " Euler matrix not unimodular");
            Rng rng(detail::type_seed(opt.seed, wv));
            for (long i = 0; i < trials; ++i) {
                const IVec a = detail::random_class(rng, w.n, 20), b = detail::random_class(rng, w.n, 20);
                chk.expect(ctx.chi_bar(a, b) == ctx.rank(a) * ctx.deg(b) - ctx.deg(a) * ctx.rank(b), tn + " averaged form identity on " + K0Context::vec_str(a) + "," + K0Context::vec_str(b));
            }
            for (int i = 0; i < w.n; ++i)
                for (int j = 0; j < w.n; ++j)
                    chk.expect(ctx.chi(ctx.tau().apply(ctx.unit(i)), ctx.tau().apply(ctx.unit(j))) == ctx.chi(ctx.unit(i), ctx.unit(j)), tn + " tau does not preserve the Euler form");
            chk.expect(ctx.tau().apply(ctx.unit(ctx.index_f())) == ctx.unit(ctx.index_f()), tn + " tau moves the fiber class");
            IVec v = ctx.unit(ctx.index_O());
            for (int j = 0; j < w.p; ++j) v = ctx.tau().apply(v);
            chk.expect(v == ctx.unit(ctx.index_O()), tn + " tau^p does not fix [O]");
            for (int i = 0; i < w.n; ++i) {
                IVec u = ctx.unit(i);
                for (int j = 0; j < w.p; ++j) u = ctx.tau().apply(u);
                chk.expect(u == ctx.unit(i), tn + " tau^p is not the identity on K0");
            }
            // line bundle classes: injective on normal forms, degree δ
            std::set<IVec> seen;
            std::size_t count = 0;
            std::vector<std::int64_t> a(w.t, 0);
            std::function<void(int)> rec = [&](int i) {
                if (i == w.t) {
                    for (std::int64_t c = -3; c <= 3; ++c) {
                        const LElement x = l_normalize(w, a, c);
                        const IVec cls = ctx.line_bundle_class(x);
                        chk.expect(ctx.deg(cls) == delta(w, x), tn + " degree of " + l_str(x));
                        seen.insert(cls);
                        ++count;
                    }
                    return;
                }
                for (a[i] = 0; a[i] < w.weights[i]; ++a[i]) rec(i + 1);
            };
            rec(0);
            chk.expect(seen.size() == count, tn + " line bundle classes collide");
        }
        const double secs = detail::elapsed(t0);
        chk.expect(secs < 5.0, "structure suite took " + std::to_string(secs) + "s");
        return std::to_string(trials) + " class pairs per type";
    });
}

/// Root enumeration against a brute-force scan of a coefficient box.
inline Outcome roots(const Options&) {
    return detail::run_guarded("roots", [&](detail::Checker& chk) {
        const WeightData w = make_weights({2, 2, 2, 2});
        const K0Context ctx(w);
        const std::int64_t bound = 5;
        const std::vector<Slope> slopes{Slope::infinity(), Slope(0), Slope(1), Slope(1, 2), Slope(-1, 2), Slope(3, 2)};
        std::map<Slope, std::set<IVec>> brute;
        IVec v(w.n, -bound);
        while (true) {
            if (ctx.chi(v, v) == 1 && ctx.is_sheaf_like(v)) {
                const Slope q = ctx.slope_of(v);
                if (std::find(slopes.begin(), slopes.end(), q) != slopes.end()) {
                    const std::int64_t r = ctx.rank(v), d = ctx.deg(v);
                    const std::int64_t m = q.is_inf() ? d : r / q.den();
                    if (m >= 1 && m <= w.p) brute[q].insert(v);
                }
            }
            int i = 0;
            for (; i < w.n; ++i) {
                if (v[i] < bound) {
                    ++v[i];
                    break;
                }
                v[i] = -bound;
            }
            if (i == w.n) break;
        }
        std::size_t total = 0;
        for (const auto& q : slopes) {
            std::set<IVec> fast;
            for (const auto& c : ctx.enumerate_roots_at(q, w.p)) {
                chk.expect(ctx.chi(c, c) == 1 && ctx.slope_of(c) == q, "enumerated class is not a root of slope " + q.str());
                bool inside = true;
                for (auto x : c) inside = inside && std::llabs(x) <= bound;
                chk.expect(inside, "enumerated root outside the brute-force box at slope " + q.str());
                fast.insert(c);
            }
            chk.expect(fast == brute[q], "enumeration differs from brute force at slope " + q.str());
            total += fast.size();
        }
        chk.expect(ctx.enumerate_roots_at(Slope::infinity(), 1).size() == 8, "expected 8 roots at slope inf with m = 1");
        chk.expect(ctx.enumerate_roots_at(Slope(0), 1).size() == 8, "expected 8 roots at slope 0 with m = 1");
        return std::to_string(total) + " roots matched on (2,2,2,2)";
    });
}

/// Criterion 2 plus chart round trips, hom/ext identities and wing vanishing.
inline Outcome charts(const Options& opt) {
    return detail::run_guarded("charts", [&](detail::Checker& chk) {
        const auto t0 = std::chrono::steady_clock::now();
        auto census = [&](const std::vector<int>& wv, const Slope& q, std::size_t qs, std::vector<int> sizes) {
            Workspace ws(make_weights(wv));
            auto ch = ws.chart(q);
            std::vector<int> got;
            for (std::size_t o = 0; o < ch->orbits.size(); ++o) got.push_back(ch->rank_of(static_cast<int>(o)));
            std::sort(got.begin(), got.end());
            std::sort(sizes.begin(), sizes.end());
            chk.expect(ch->quasi_simple_count() == qs, detail::type_name(wv) + " at " + q.str() + ": " + std::to_string(ch->quasi_simple_count()) + " quasi-simples");
            chk.expect(got == sizes, detail::type_name(wv) + " at " + q.str() + ": wrong orbit sizes");
        };
        for (const auto& q : {Slope::infinity(), Slope(0), Slope(1), Slope(1, 2)}) census({2, 2, 2, 2}, q, 8, {2, 2, 2, 2});
        census({2, 3, 6}, Slope::infinity(), 11, {2, 3, 6});
        census({2, 4, 4}, Slope::infinity(), 10, {2, 4, 4});
        census({3, 3, 3}, Slope::infinity(), 9, {3, 3, 3});
        const double census_secs = detail::elapsed(t0);
        chk.expect(census_secs < 10.0, "chart census took " + std::to_string(census_secs) + "s");

        const long trials = opt.trials.value_or(10000);
        const std::vector<Slope> probe{Slope::infinity(), Slope(0), Slope(1), Slope(1, 2), Slope(-1, 2), Slope(1, 3), Slope(2, 3), Slope(3, 2)};
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            Workspace ws(make_weights(wv));
            for (const auto& q : probe) {
                auto ch = ws.chart(q);
                verify_chart(ws.ctx(), *ch);
                std::vector<int> got;
                for (std::size_t o = 0; o < ch->orbits.size(); ++o) got.push_back(ch->rank_of(static_cast<int>(o)));
                std::sort(got.begin(), got.end());
                chk.expect(got == ws.weights().weights, tn + " orbit multiset differs from the weights at " + q.str());
                for (int o = 0; o < static_cast<int>(ch->orbits.size()); ++o)
                    for (int s = 0; s < ch->rank_of(o); ++s)
                        for (int len = 1; len < ch->rank_of(o); ++len) {
                            const IVec cls = ch->window_class(o, s, len);
                            const ExcObject e = ws.coords_of_class(*ch, cls);
                            chk.expect(e.orbit == o && e.socle == s && e.len == len, tn + " window round trip at " + q.str());
                            chk.expect(ws.ctx().chi(cls, cls) == 1 && e.period == ch->rank_of(o), tn + " window is not exceptional at " + q.str());
                        }
            }
            Rng rng(detail::type_seed(opt.seed, wv));
            for (long i = 0; i < trials; ++i) {
                const ExcObject x = detail::random_object(ws, rng), y = detail::random_object(ws, rng);
                const auto h = ws.hom_dim(x, y), e = ws.ext_dim(x, y);
                chk.expect(h >= 0 && e >= 0, tn + " negative hom or ext");
                chk.expect(h - e == ws.chi(x, y), tn + " hom - ext differs from chi for " + K0Context::vec_str(x.cls) + "," + K0Context::vec_str(y.cls));
                chk.expect(e == ws.hom_dim(y, ws.tau_obj(x)), tn + " Serre duality fails for " + K0Context::vec_str(x.cls) + "," + K0Context::vec_str(y.cls));
            }
        }
        // wing vanishing inside single tubes, all windows of length ≤ r
        const auto& table = TubeHomTable::instance();
        long wing_cases = 0;
        for (int r = 2; r <= 6; ++r)
            for (int zs = 0; zs < r; ++zs)
                for (int zl = 1; zl < r; ++zl)
                    for (int xs = 0; xs < r; ++xs)
                        for (int xl = 1; xl <= r; ++xl) {
                            const Window z{zs, zl}, x{xs, xl};
                            const int off = ((xs - zs) % r + r) % r;
                            if (xl <= zl && off + xl <= zl) continue; // x ∈ W_z
                            const bool out_zero = table.hom(r, x, z) == 0;
                            const bool in_zero = table.hom(r, z, x) == 0;
                            for (int ys = 0; ys < zl; ++ys)
                                for (int yl = 1; ys + yl <= zl; ++yl) {
                                    const Window y{(zs + ys) % r, yl};
                                    if (out_zero) chk.expect(table.hom(r, x, y) == 0, "wing vanishing fails in rank " + std::to_string(r));
                                    if (in_zero) chk.expect(table.hom(r, y, x) == 0, "dual wing vanishing fails in rank " + std::to_string(r));
                                    ++wing_cases;
                                }
                        }
        return std::to_string(trials) + " exceptional pairs per type, " + std::to_string(wing_cases) + " wing cases";
    });
}

/// Criterion 3.
inline Outcome canonical(const Options& opt) {
    return detail::run_guarded("canonical", [&](detail::Checker& chk) {
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            Workspace ws(make_weights(wv));
            const WeightData& w = ws.weights();
            const TiltingObject can = canonical_tilting(ws);
            chk.expect(is_tilting(ws, can), tn + " T_can is not tilting");
            auto [lo, hi] = slope_range(can);
            chk.expect(lo == Slope(0) && hi == Slope(w.p), tn + " slope range of T_can is " + lo.str() + ".." + hi.str());
            const int o = can.index_of(ws.line_bundle(l_zero(w)));
            const int oc = can.index_of(ws.line_bundle(l_c(w)));
            const auto firsts = first_objects(ws, can), lasts = last_objects(ws, can);
            chk.expect(std::find(firsts.begin(), firsts.end(), o) != firsts.end(), tn + " O is not a first object");
            chk.expect(std::find(lasts.begin(), lasts.end(), oc) != lasts.end(), tn + " O(c) is not a last object");
            chk.expect(only_minimal(can) == o && only_maximal(can) == oc, tn + " extremal summands of T_can");
            chk.expect(range_contains_integer(can), tn + " range of T_can lacks an integer");
            chk.expect(can[find_full_period_quasi_simple(ws, can)].period == w.p, tn + " full-period summand");
            if (w.weights == std::vector<int>{2, 2, 2, 2}) {
                const int x1 = can.index_of(ws.line_bundle(l_x(w, 0)));
                chk.expect(std::find(firsts.begin(), firsts.end(), x1) == firsts.end() && std::find(lasts.begin(), lasts.end(), x1) == lasts.end(),
                           "O(x1) should be neither first nor last");
                chk.expect(firsts == std::vector<int>{o} && lasts == std::vector<int>{oc}, "(2,2,2,2) first/last objects of T_can");
                std::vector<ExcObject> partial(can.summands().begin() + 1, can.summands().end());
                chk.expect(!is_tilting(ws, partial), "T_can minus O should not be tilting");
                bool rejected = false;
                try {
                    apr_mutate(ws, can, x1);
                } catch (const Error& e) {
                    rejected = e.code() == ErrorCode::NotFirstObject;
                }
                chk.expect(rejected, "APR at O(x1) should be rejected");
            }
        }
        return std::string("T_can checked on all types");
    });
}

/// Criterion 4: involution, uniqueness of the complement, exchange additivity.
inline Outcome mutation(const Options& opt) {
    return detail::run_guarded("mutation", [&](detail::Checker& chk) {
        const long trials = opt.trials.value_or(500);
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            const auto t0 = std::chrono::steady_clock::now();
            Workspace ws(make_weights(wv));
            Rng rng(detail::type_seed(opt.seed, wv));
            const TiltingObject can = canonical_tilting(ws);
            TiltingObject cur = can;
            for (long e = 0; e < trials; ++e) {
                if (e % 50 == 0) cur = can;
                const int k = static_cast<int>(rng.below(cur.size()));
                const auto found = complement_search(ws, cur, k, hom_matrix(ws, cur.summands()));
                chk.expect(found.size() == 1, tn + " complement search returned " + std::to_string(found.size()) + " candidates");
                auto [next, ev] = mutate(ws, cur, k);
                const TiltingObject back = mutate(ws, next, next.index_of(ev.added)).first;
                chk.expect(back == cur, tn + " mutation is not involutive");
                IVec sum = ev.removed.cls;
                for (std::size_t r = 0; r < sum.size(); ++r) sum[r] += ev.added.cls[r];
                chk.expect(sum == ev.approx_class, tn + " exchange additivity");
                const IVec mult = exchange_multiplicities(cur, ev.approx_class);
                bool nonneg = mult[k] == 0;
                for (auto m : mult) nonneg = nonneg && m >= 0;
                chk.expect(nonneg, tn + " exchange term outside add of the remaining summands");
                cur = std::move(next);
            }
            const double secs = detail::elapsed(t0);
            chk.expect(secs < 60.0, tn + " mutation suite took " + std::to_string(secs) + "s");
        }
        return std::to_string(trials) + " events per type";
    });
}

/// Criterion 5: slope bounds for extremal, APR and co-APR mutations, and
/// bundle closure.
inline Outcome slope_theorem(const Options& opt) {
    return detail::run_guarded("slope-theorem", [&](detail::Checker& chk) {
        const long trials = opt.trials.value_or(1000);
        long extremal = 0, apr = 0, coapr = 0;
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            Workspace ws(make_weights(wv));
            Rng rng(detail::type_seed(opt.seed, wv));
            const TiltingObject can = canonical_tilting(ws);
            TiltingObject cur = can;
            for (long e = 0; e < trials; ++e) {
                if (e % 40 == 0) cur = can;
                const auto firsts = first_objects(ws, cur), lasts = last_objects(ws, cur);
                int k;
                switch (rng.below(3)) {
                case 0: k = firsts[rng.below(firsts.size())]; break;
                case 1: k = lasts[rng.below(lasts.size())]; break;
                default: k = static_cast<int>(rng.below(cur.size()));
                }
                auto [next, ev] = mutate(ws, cur, k);
                const auto [lo, hi] = slope_range(cur);
                const Slope& q = ev.added.slope;
                const Slope& qk = cur[k].slope;
                if (qk == lo || qk == hi) {
                    ++extremal;
                    chk.expect(lo <= q && q <= hi, tn + " extremal mutation left the slope range");
                }
                if (std::find(firsts.begin(), firsts.end(), k) != firsts.end()) {
                    ++apr;
                    chk.expect(qk <= q && q <= hi, tn + " APR bound violated");
                    if (cur.is_bundle()) chk.expect(next.is_bundle(), tn + " APR mutation of a bundle produced torsion");
                }
                if (std::find(lasts.begin(), lasts.end(), k) != lasts.end()) {
                    ++coapr;
                    chk.expect(lo <= q && q <= qk, tn + " co-APR bound violated");
                    if (cur.is_bundle()) chk.expect(next.is_bundle(), tn + " co-APR mutation of a bundle produced torsion");
                }
                cur = std::move(next);
            }
        }
        chk.expect(extremal > 0 && apr > 0 && coapr > 0, "some event class was never exercised");
        return std::to_string(trials) + " events per type (" + std::to_string(extremal) + " extremal, " + std::to_string(apr) + " APR, " + std::to_string(coapr) + " co-APR)";
    });
}

/// Criterion 6: wing persistence and the slope-change dichotomy.
inline Outcome wing(const Options& opt) {
    return detail::run_guarded("wing", [&](detail::Checker& chk) {
        const long trials = opt.trials.value_or(500);
        long in_wing = 0, outside = 0;
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            Workspace ws(make_weights(wv));
            Rng rng(detail::type_seed(opt.seed, wv));
            const TiltingObject can = canonical_tilting(ws);
            TiltingObject cur = can;
            for (long e = 0; e < trials; ++e) {
                if (e % 40 == 0) cur = can;
                std::vector<int> winged;
                for (int k = 0; k < static_cast<int>(cur.size()); ++k)
                    for (int z = 0; z < static_cast<int>(cur.size()); ++z)
                        if (z != k && wing_contains(cur[z], cur[k])) {
                            winged.push_back(k);
                            break;
                        }
                const int k = (!winged.empty() && rng.below(2) == 0) ? winged[rng.below(winged.size())] : static_cast<int>(rng.below(cur.size()));
                auto [next, ev] = mutate(ws, cur, k);
                bool any = false;
                for (int z = 0; z < static_cast<int>(cur.size()); ++z) {
                    if (z == k || !wing_contains(cur[z], cur[k])) continue;
                    any = true;
                    chk.expect(wing_contains(cur[z], ev.added), tn + " replacement left the wing of a summand");
                }
                if (any) ++in_wing;
                else {
                    ++outside;
                    chk.expect(ev.added.slope != cur[k].slope, tn + " replacement outside any wing kept the slope");
                }
                cur = std::move(next);
            }
        }
        chk.expect(in_wing > 0 && outside > 0, "wing and non-wing events both need to occur");
        return std::to_string(trials) + " events per type (" + std::to_string(in_wing) + " inside wings)";
    });
}

/// Criterion 7.
inline Outcome purge(const Options& opt) {
    return detail::run_guarded("purge", [&](detail::Checker& chk) {
        const long trials = opt.trials.value_or(100);
        long total_events = 0;
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            Workspace ws(make_weights(wv));
            Rng rng(detail::type_seed(opt.seed, wv));
            const TiltingObject can = canonical_tilting(ws);
            for (long i = 0; i < trials; ++i) {
                TiltingObject t = can;
                while (t.is_bundle()) t = random_walk(ws, can, 1 + static_cast<int>(rng.below(10)), rng, false).first;
                long s = 0;
                for (const auto& x : t.summands()) s += x.is_torsion() ? 1 : 0;
                auto [res, events] = purge_torsion(ws, t);
                chk.expect(res.is_bundle() && is_tilting(ws, res), tn + " purge did not produce a tilting bundle");
                chk.expect(static_cast<long>(events.size()) == s, tn + " purge used " + std::to_string(events.size()) + " mutations for " + std::to_string(s) + " torsion summands");
                for (const auto& ev : events) chk.expect(!ev.added.is_torsion(), tn + " purge event added a torsion summand");
                total_events += static_cast<long>(events.size());
            }
            auto [same, none] = purge_torsion(ws, can);
            chk.expect(same == can && none.empty(), tn + " purge of a bundle is not the identity");
        }
        return std::to_string(trials) + " torsion-bearing tiltings per type, " + std::to_string(total_events) + " purge events";
    });
}

/// Criterion 8.
inline Outcome farey(const Options& opt) {
    return detail::run_guarded("farey", [&](detail::Checker& chk) {
        const std::int64_t limit = opt.trials ? std::max<long>(2, *opt.trials) : 100;
        long pairs = 0;
        for (std::int64_t b = 2; b <= limit; ++b)
            for (std::int64_t a = 1; a < b; ++a) {
                if (std::gcd(a, b) != 1) continue;
                ++pairs;
                const FareyStep st = extend_abcd(a, b);
                const std::string tag = std::to_string(a) + "/" + std::to_string(b);
                chk.expect(st.b * st.c - st.a * st.d == 1, tag + ": bc - ad != 1");
                chk.expect(0 < st.c && st.c <= st.d && st.d < st.b, tag + ": 0 < c <= d < b fails");
                chk.expect(st.c <= st.a, tag + ": c <= a fails");
                std::int64_t x = a, y = b, steps = 0;
                while (x != y && steps <= b) {
                    const FareyStep s2 = extend_abcd(x, y);
                    chk.expect(s2.d < y, tag + ": denominators do not decrease");
                    x = s2.c;
                    y = s2.d;
                    ++steps;
                }
                chk.expect(x == y, tag + ": descent did not reach a = b");
            }
        chk.expect(extend_abcd(1, 2).c == 1 && extend_abcd(1, 2).d == 1, "extend_abcd(1,2)");
        chk.expect(extend_abcd(3, 5).c == 2 && extend_abcd(3, 5).d == 3, "extend_abcd(3,5)");
        chk.expect(extend_abcd(5, 7).c == 3 && extend_abcd(5, 7).d == 4, "extend_abcd(5,7)");
        return std::to_string(pairs) + " coprime pairs";
    });
}

/// Criterion 9, with the line-bundle dichotomy checked on every input.
inline Outcome connect(const Options& opt) {
    return detail::run_guarded("connect", [&](detail::Checker& chk) {
        const long trials = opt.trials.value_or(50);
        std::size_t longest = 0;
        long dichotomy = 0;
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            Workspace ws(make_weights(wv));
            const WeightData& w = ws.weights();
            Rng rng(detail::type_seed(opt.seed, wv));
            const TiltingObject can = canonical_tilting(ws);
            for (long i = 0; i < trials; ++i) {
                const TiltingObject t = random_walk(ws, can, 1 + static_cast<int>(rng.below(8)), rng, true).first;
                const auto [lo, hi] = slope_range(t);
                const std::int64_t lo_d = lo.floor() - w.p, hi_d = hi.floor() + w.p;
                for (int s = 0; s < 20; ++s) {
                    const std::int64_t d = lo_d + static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(hi_d - lo_d + 1)));
                    const LElement x = detail::random_l(w, rng, 0);
                    const std::int64_t gap = d - delta(w, x);
                    const std::int64_t k = gap >= 0 ? gap / w.p : -((-gap + w.p - 1) / w.p);
                    const LElement y = l_add(w, x, l_c(w, k));
                    ++dichotomy;
                    chk.expect(detail::dichotomy_holds(ws, t, ws.line_bundle(y)), tn + " line-bundle dichotomy fails for L(" + l_str(y) + ")");
                }
                const auto t0 = std::chrono::steady_clock::now();
                const MutationPath path = connect_to_canonical(ws, t, SearchBudget{});
                const double secs = detail::elapsed(t0);
                longest = std::max(longest, path.length());
                std::string diag;
                chk.expect(secs < 60.0, tn + " connect took " + std::to_string(secs) + "s");
                chk.expect(verify_path(ws, path, &diag), tn + " path failed verification: " + diag);
                chk.expect(path.bundle_only && path.front() == t && path.back() == can, tn + " path endpoints or bundle flag");
                for (const auto& node : path.nodes) chk.expect(node.is_bundle(), tn + " path visits a torsion summand");
                const MutationPath rev = reversed(ws, path);
                chk.expect(verify_path(ws, rev, &diag) && rev.front() == can && rev.back() == t, tn + " reversed path failed verification: " + diag);
            }
        }
        const long norm_trials = opt.trials.value_or(100);
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            Workspace ws(make_weights(wv));
            Rng rng(detail::type_seed(opt.seed + 1, wv));
            for (long i = 0; i < norm_trials; ++i) {
                const TiltingObject t = detail::random_tilting(ws, rng, 8, true);
                std::vector<int> qs;
                for (int k = 0; k < static_cast<int>(t.size()); ++k)
                    if (t[k].is_quasi_simple()) qs.push_back(k);
                const int k = qs[rng.below(qs.size())];
                const bool minimal = rng.below(2) == 0;
                const MutationPath p = minimal ? make_only_minimal(ws, t, k, SearchBudget{}) : make_only_maximal(ws, t, k, SearchBudget{});
                std::string diag;
                chk.expect(verify_path(ws, p, &diag) && p.bundle_only && p.front() == t, tn + " normalization path failed verification: " + diag);
                const int at = p.back().index_of(t[k]);
                chk.expect(at >= 0 && (minimal ? only_minimal(p.back()) : only_maximal(p.back())) == at, tn + " normalization postcondition");
            }
        }
        return std::to_string(trials) + " bundles per type, longest path " + std::to_string(longest) + ", " + std::to_string(dichotomy) +
               " dichotomy checks, " + std::to_string(norm_trials) + " normalizations per type";
    });
}

/// Criterion 10: frozen complement values against the exhaustive oracle, and
/// the pruned search against the oracle on random inputs.
inline Outcome complement(const Options& opt) {
    return detail::run_guarded("complement", [&](detail::Checker& chk) {
        {
            Workspace ws(make_weights({2, 2, 2, 2}));
            const WeightData& w = ws.weights();
            const TiltingObject can = canonical_tilting(ws);
            auto frozen = [&](const LElement& at, const IVec& cls, const Slope& q) {
                const int k = can.index_of(ws.line_bundle(at));
                const auto oracle = detail::exhaustive_complements(ws, can, k);
                chk.expect(oracle.size() == 1 && oracle.front().cls == cls, "exhaustive oracle disagrees with the frozen class at L(" + l_str(at) + ")");
                const auto ev = mutate(ws, can, k).second;
                chk.expect(ev.added.cls == cls && ev.added.slope == q, "mutation of T_can at L(" + l_str(at) + ") gave " + K0Context::vec_str(ev.added.cls));
            };
            frozen(l_zero(w), IVec{3, 1, 1, 1, 1, 0}, Slope(4, 3));
            frozen(l_c(w), IVec{3, 1, 1, 1, 1, -1}, Slope(2, 3));
        }
        const long trials = opt.trials.value_or(50);
        long compared = 0;
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            Workspace ws(make_weights(wv));
            Rng rng(detail::type_seed(opt.seed, wv));
            for (long i = 0; i < trials; ++i) {
                const TiltingObject t = detail::random_tilting(ws, rng, 12, false);
                const int k = static_cast<int>(rng.below(t.size()));
                std::vector<ExcObject> oracle;
                try {
                    oracle = detail::exhaustive_complements(ws, t, k, 200'000);
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::SearchBoundExceeded) continue;
                    throw;
                }
                ++compared;
                const auto fast = complement_search(ws, t, k, hom_matrix(ws, t.summands()));
                chk.expect(oracle.size() == 1 && fast.size() == 1 && oracle.front() == fast.front().first, tn + " pruned search disagrees with the oracle");
            }
        }
        return "frozen values confirmed, " + std::to_string(compared) + " random comparisons";
    });
}

/// Criterion 11: text and JSON round trips.
inline Outcome roundtrip(const Options& opt) {
    return detail::run_guarded("roundtrip", [&](detail::Checker& chk) {
        const long trials = opt.trials.value_or(1000);
        for (const auto& wv : opt.types) {
            const std::string tn = detail::type_name(wv);
            Workspace ws(make_weights(wv));
            Rng rng(detail::type_seed(opt.seed, wv));
            for (long i = 0; i < trials; ++i) {
                const ExcObject e = detail::random_object(ws, rng);
                chk.expect(std::get<ExcObject>(parse_and_evaluate(ws, chart_expr(e))) == e, tn + " chart expression round trip " + chart_expr(e));
                chk.expect(std::get<ExcObject>(parse_and_evaluate(ws, class_expr(e))) == e, tn + " class expression round trip " + class_expr(e));
                chk.expect(object_from_json(ws, json::parse(object_to_json(e).dump())) == e, tn + " object JSON round trip");
                const LElement x = detail::random_l(ws.weights(), rng, 4);
                chk.expect(std::get<ExcObject>(parse_and_evaluate(ws, line_expr(ws.weights(), x))) == ws.line_bundle(x), tn + " line bundle round trip " + line_expr(ws.weights(), x));
                const TiltingObject t = detail::random_tilting(ws, rng, 10, rng.below(2) == 0);
                chk.expect(tilting_from_json(ws, json::parse(tilting_to_json(ws, t).dump())) == t, tn + " tilting JSON round trip");
            }
            const TiltingObject can = canonical_tilting(ws);
            const MutationPath p = connect_to_canonical(ws, random_walk(ws, can, 3, rng, true).first, SearchBudget{});
            const MutationPath back = path_from_json(ws, json::parse(path_to_json(ws, p).dump()));
            chk.expect(back.nodes == p.nodes && path_to_json(ws, back) == path_to_json(ws, p), tn + " path JSON round trip");
        }
        bool col5 = false;
        try {
            parse_expr("L(x1+");
        } catch (const ParseError& e) {
            col5 = e.column() == 5;
        }
        chk.expect(col5, "L(x1+ should fail at column 5");
        return std::to_string(trials) + " objects and tiltings per type";
    });
}

/// Criterion 11: identical argv and seed give byte-identical stdout.
inline Outcome determinism(const Options& opt) {
    return detail::run_guarded("determinism", [&](detail::Checker& chk) {
        require(static_cast<bool>(opt.cli), ErrorCode::PreconditionViolated, "determinism suite needs the command-line runner");
        const std::string seed = std::to_string(opt.seed);
        const std::vector<std::vector<std::string>> commands{
            {"--weights", "2,2,2,2", "--no-cache", "info"},
            {"--weights", "2,3,6", "--no-cache", "walk", "--steps", "25", "--seed", seed},
            {"--weights", "3,3,3", "--no-cache", "walk", "--steps", "25", "--seed", seed, "--bundle-only"},
            {"--weights", "2,4,4", "--no-cache", "chart", "--slope", "3/2"},
            {"--weights", "2,2,2,2", "--no-cache", "connect", "Tcan(x1+x2)", "--to", "canonical"},
            {"--weights", "2,2,2,2", "--no-cache", "graph", "--slope-window", "0..inf", "--max-nodes", "12", "--dot", "-"},
        };
        for (const auto& argv : commands) {
            std::ostringstream a, b, ea, eb;
            const int ra = opt.cli(argv, a, ea);
            const int rb = opt.cli(argv, b, eb);
            std::string joined;
            for (const auto& s : argv) joined += s + " ";
            chk.expect(ra == 0 && rb == 0, "command failed: " + joined + ea.str());
            chk.expect(!a.str().empty() && a.str() == b.str(), "output differs between runs: " + joined);
        }
        return std::to_string(commands.size()) + " commands run twice";
    });
}

struct SuiteEntry {
    std::string name;
    Outcome (*run)(const Options&);
    int criterion; ///< acceptance criterion number, 0 if none
};

inline const std::vector<SuiteEntry>& registry() {
    static const std::vector<SuiteEntry> entries{
        {"lattice", lattice, 0},     {"structure", structure, 1}, {"roots", roots, 0},         {"charts", charts, 2},
        {"canonical", canonical, 3}, {"mutation", mutation, 4},   {"slope-theorem", slope_theorem, 5}, {"wing", wing, 6},
        {"purge", purge, 7},         {"farey", farey, 8},         {"connect", connect, 9},     {"complement", complement, 10},
        {"roundtrip", roundtrip, 11}, {"determinism", determinism, 11},
    };
    return entries;
}

inline std::vector<std::string> names() {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.push_back(e.name);
    return out;
}

/// Runs one suite by name, or every suite for "all".
inline std::vector<Outcome> run(const std::string& name, const Options& opt) {
    std::vector<Outcome> out;
    for (const auto& e : registry())
        if (name == "all" || name == e.name) out.push_back(e.run(opt));
    require(!out.empty(), ErrorCode::PreconditionViolated, "unknown suite '" + name + "'");
    return out;
}

} // namespace tubtilt::suites
