#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tubtilt/error.hpp"
#include "tubtilt/slope.hpp"
#include "tubtilt/weights.hpp"

namespace tubtilt {

using IVec = std::vector<std::int64_t>;

/// Dense square integer matrix, row-major. Matrices act on column vectors.
struct IMat {
    int n = 0;
    std::vector<std::int64_t> a;

    IMat() = default;
    explicit IMat(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0) {}

    static IMat identity(int dim) {
        IMat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1;
        return m;
    }

    std::int64_t& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
    std::int64_t operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }

    IVec apply(const IVec& v) const {
        IVec out(n, 0);
        for (int r = 0; r < n; ++r) {
            std::int64_t s = 0;
            for (int c = 0; c < n; ++c) s += (*this)(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }

    friend IMat operator*(const IMat& x, const IMat& y) {
        IMat out(x.n);
        for (int r = 0; r < x.n; ++r)
            for (int k = 0; k < x.n; ++k) {
                const std::int64_t v = x(r, k);
                if (v == 0) continue;
                for (int c = 0; c < x.n; ++c) out(r, c) += v * y(k, c);
            }
        return out;
    }

    friend bool operator==(const IMat&, const IMat&) = default;
};

/// Exact determinant by fraction-free (Bareiss) elimination.
inline __int128 determinant(std::vector<std::vector<__int128>> m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    int sign = 1;
    __int128 prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap = k + 1;
            while (swap < n && m[swap][k] == 0) ++swap;
            if (swap == n) return 0;
            std::swap(m[k], m[swap]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

inline __int128 determinant(const IMat& mat) {
    std::vector<std::vector<__int128>> m(mat.n, std::vector<__int128>(mat.n));
    for (int r = 0; r < mat.n; ++r)
        for (int c = 0; c < mat.n; ++c) m[r][c] = mat(r, c);
    return determinant(std::move(m));
}

/// Determinant of the matrix whose columns are the given vectors.
inline __int128 determinant_of_columns(const std::vector<IVec>& cols) {
    const std::size_t n = cols.size();
    std::vector<std::vector<__int128>> m(n, std::vector<__int128>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m[r][c] = cols[c].at(r);
    return determinant(std::move(m));
}

/// The Grothendieck lattice of a tubular weighted projective line in the
/// basis e_O, e_{i,j} (1 ≤ j < p_i), e_f. Here e_{i,j} is the class of the
/// exceptional simple S_{i,j} = O(j x⃗_i)/O((j-1) x⃗_i) and e_f the class of an
/// ordinary simple; S_{i,0} is kept implicit as e_f − Σ_j e_{i,j}.
class K0Context {
public:
    explicit K0Context(WeightData weights) : w_(std::move(weights)) {
        n_ = w_.n;
        offsets_.resize(w_.t);
        int off = 1;
        for (int i = 0; i < w_.t; ++i) {
            offsets_[i] = off;
            off += w_.weights[i] - 1;
        }
        build_labels();
        build_euler();
        build_forms();
        tau_ = twist_matrix(omega(w_));
        tau_inv_ = twist_matrix(l_neg(w_, omega(w_)));
        check_invariants();
    }

    const WeightData& weights() const noexcept { return w_; }
    int dim() const noexcept { return n_; }
    const std::vector<std::string>& basis_labels() const noexcept { return labels_; }
    const IMat& euler() const noexcept { return euler_; }
    const IMat& tau() const noexcept { return tau_; }
    const IMat& tau_inverse() const noexcept { return tau_inv_; }

    int index_O() const noexcept { return 0; }
    int index_f() const noexcept { return n_ - 1; }
    /// Index of e_{i,j}; i is 0-based, 1 ≤ j ≤ p_i − 1.
    int index_simple(int i, int j) const noexcept { return offsets_[i] + j - 1; }

    IVec unit(int idx) const {
        IVec v(n_, 0);
        v[idx] = 1;
        return v;
    }

    /// Class of S_{i,j} for any integer j, reading indices mod p_i.
    IVec simple_class(int i, std::int64_t j) const {
        const int pi = w_.weights[i];
        int jj = static_cast<int>(((j % pi) + pi) % pi);
        if (jj != 0) return unit(index_simple(i, jj));
        IVec v = unit(index_f());
        for (int k = 1; k < pi; ++k) v[index_simple(i, k)] = -1;
        return v;
    }

    std::int64_t rank(const IVec& v) const { return dot(rank_form_, v); }
    std::int64_t deg(const IVec& v) const { return dot(deg_form_, v); }
    const IVec& rank_form() const noexcept { return rank_form_; }
    const IVec& deg_form() const noexcept { return deg_form_; }

    std::int64_t chi(const IVec& a, const IVec& b) const {
        std::int64_t s = 0;
        for (int r = 0; r < n_; ++r) {
            if (a[r] == 0) continue;
            std::int64_t row = 0;
            for (int c = 0; c < n_; ++c) row += euler_(r, c) * b[c];
            s += a[r] * row;
        }
        return s;
    }

    /// Σ_{j<p} χ(τ^j a, b); equals rank(a)deg(b) − deg(a)rank(b).
    std::int64_t chi_bar(const IVec& a, const IVec& b) const {
        std::int64_t s = 0;
        IVec cur = a;
        for (int j = 0; j < w_.p; ++j) {
            s += chi(cur, b);
            cur = tau_.apply(cur);
        }
        return s;
    }

    /// e_O + Σ_i Σ_{j ≤ a_i} e_{i,j} + a·e_f for x⃗ = Σ a_i x⃗_i + a c⃗.
    IVec line_bundle_class(const LElement& x) const {
        IVec v(n_, 0);
        v[index_O()] = 1;
        for (int i = 0; i < w_.t; ++i)
            for (int j = 1; j <= x.coeffs[i]; ++j) v[index_simple(i, j)] += 1;
        v[index_f()] += x.c;
        return v;
    }

    /// Matrix of the twist E ↦ E(v⃗).
    IMat twist_matrix(const LElement& v) const {
        IMat m(n_);
        set_column(m, index_O(), line_bundle_class(v));
        for (int i = 0; i < w_.t; ++i)
            for (int j = 1; j < w_.weights[i]; ++j)
                set_column(m, index_simple(i, j), simple_class(i, static_cast<std::int64_t>(j) + v.coeffs[i]));
        set_column(m, index_f(), unit(index_f()));
        return m;
    }

    /// Slope deg/rank, or ∞ for positive-degree torsion classes.
    Slope slope_of(const IVec& v) const {
        const std::int64_t r = rank(v);
        const std::int64_t d = deg(v);
        if (r < 0 || (r == 0 && d <= 0)) fail(ErrorCode::NotSheafLike, "class " + vec_str(v) + " has no sheaf slope");
        if (r == 0) return Slope::infinity();
        return Slope(d, r);
    }

    bool is_sheaf_like(const IVec& v) const {
        const std::int64_t r = rank(v);
        return r > 0 || (r == 0 && deg(v) > 0);
    }

    bool is_root(const IVec& v) const { return chi(v, v) == 1; }

    /// Largest |numerator| or denominator, times mMax, accepted by root enumeration.
    static constexpr std::int64_t kMaxSlopeEntry = 100'000'000;

    /// All classes c with (deg, rank)(c) = m·(a, b) for some 1 ≤ m ≤ mMax and
    /// χ(c, c) = 1, where q = a/b (∞ = 1/0).
    ///
    /// In this basis χ(c, c) = r²(1 − t/2) + ½ Σ_i Σ_j d_{ij}², where for each
    /// weight i the d_{ij} (0 ≤ j < p_i) are the consecutive differences of
    /// (r, c_{i,1}, …, c_{i,p_i−1}, 0) and sum to the rank r. Since
    /// Σ_i 1/p_i = t − 2 for tubular weights, each tube contributes at least
    /// r²/p_i to Σ d² and the root condition leaves a total excess of 2. Hence
    /// every d_{ij} lies within √2 of r/p_i; the enumeration below walks that
    /// region exactly and fixes c_f from the degree.
    std::vector<IVec> enumerate_roots_at(const Slope& q, int m_max) const {
        require(m_max >= 1 && m_max <= w_.p, ErrorCode::PreconditionViolated, "mMax out of range");
        const std::int64_t a = q.num();
        const std::int64_t b = q.den();
        // keeps p·r² and χ(c, c) inside 64-bit range
        require(std::max<std::int64_t>(a < 0 ? -a : a, b) <= kMaxSlopeEntry / m_max, ErrorCode::SearchBoundExceeded,
                "slope " + q.str() + " exceeds the exact arithmetic range");
        const std::int64_t box = static_cast<std::int64_t>(w_.p) * (1 + m_max * std::max<std::int64_t>(a < 0 ? -a : a, b));
        std::vector<IVec> out;
        for (int m = 1; m <= m_max; ++m) {
            const std::int64_t r = m * b;
            const std::int64_t target_deg = m * a;
            // per-tube candidates: coefficient block and its Σd², Σ deg contribution
            struct Piece {
                std::vector<std::int64_t> coeffs;
                std::int64_t sumsq;
                std::int64_t degree;
            };
            std::vector<std::vector<Piece>> pieces(w_.t);
            for (int i = 0; i < w_.t; ++i) {
                const int pi = w_.weights[i];
                const std::int64_t lo = floor_div(r, pi) - 1;
                const std::int64_t hi = floor_div(r + pi - 1, pi) + 1;
                std::vector<std::int64_t> d(pi, lo);
                // enumerate first p_i - 1 differences; the last is forced by Σd = r
                std::function<void(int, std::int64_t)> rec = [&](int j, std::int64_t partial) {
                    if (j == pi - 1) {
                        const std::int64_t last = r - partial;
                        if (last < lo || last > hi) return;
                        d[j] = last;
                        std::int64_t ss = 0;
                        for (auto x : d) ss += x * x;
                        // scaled per-tube excess p_i Σd² − r² must not exceed 2 p_i
                        if (pi * ss - r * r > 2 * pi) return;
                        Piece pc;
                        pc.coeffs.resize(pi - 1);
                        std::int64_t y = r;
                        std::int64_t dg = 0;
                        for (int k = 0; k < pi - 1; ++k) {
                            y -= d[k];
                            pc.coeffs[k] = y;
                            dg += y;
                        }
                        pc.sumsq = ss;
                        pc.degree = dg * (w_.p / pi);
                        pieces[i].push_back(std::move(pc));
                        return;
                    }
                    for (std::int64_t v = lo; v <= hi; ++v) {
                        d[j] = v;
                        rec(j + 1, partial + v);
                    }
                };
                rec(0, 0);
            }
            const std::int64_t total_sumsq = 2 + r * r * (w_.t - 2);
            IVec cur(n_, 0);
            cur[index_O()] = r;
            std::function<void(int, std::int64_t, std::int64_t)> combine = [&](int i, std::int64_t ss, std::int64_t dg) {
                if (ss > total_sumsq) return;
                if (i == w_.t) {
                    if (ss != total_sumsq) return;
                    const std::int64_t rest = target_deg - dg;
                    if (rest % w_.p != 0) return;
                    cur[index_f()] = rest / w_.p;
                    for (auto x : cur)
                        if ((x < 0 ? -x : x) > box) fail(ErrorCode::SearchBoundExceeded, "root coefficient beyond bound at slope " + q.str());
                    require(chi(cur, cur) == 1, ErrorCode::InternalConsistency, "root enumeration produced a non-root");
                    out.push_back(cur);
                    return;
                }
                for (const Piece& pc : pieces[i]) {
                    for (int k = 0; k + 1 < w_.weights[i]; ++k) cur[index_simple(i, k + 1)] = pc.coeffs[k];
                    combine(i + 1, ss + pc.sumsq, dg + pc.degree);
                }
            };
            combine(0, 0, 0);
        }
        return out;
    }

    static std::string vec_str(const IVec& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(v[i]);
        }
        return s + "]";
    }

private:
    static std::int64_t dot(const IVec& f, const IVec& v) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * v[i];
        return s;
    }

    static std::int64_t floor_div(std::int64_t x, std::int64_t y) {
        std::int64_t q = x / y;
        if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
        return q;
    }

    static void set_column(IMat& m, int col, const IVec& v) {
        for (int r = 0; r < m.n; ++r) m(r, col) = v[r];
    }

    void build_labels() {
        labels_.push_back("e_O");
        for (int i = 0; i < w_.t; ++i)
            for (int j = 1; j < w_.weights[i]; ++j) labels_.push_back("e_" + std::to_string(i + 1) + "," + std::to_string(j));
        labels_.push_back("e_f");
    }

    void build_euler() {
        euler_ = IMat(n_);
        const int O = index_O();
        const int f = index_f();
        euler_(O, O) = 1;
        euler_(O, f) = 1;
        euler_(f, O) = -1;
        for (int i = 0; i < w_.t; ++i) {
            for (int j = 1; j < w_.weights[i]; ++j) {
                const int u = index_simple(i, j);
                euler_(u, O) = (j == 1) ? -1 : 0;
                for (int k = 1; k < w_.weights[i]; ++k) {
                    const int v = index_simple(i, k);
                    euler_(u, v) = (j == k ? 1 : 0) - (k == j - 1 ? 1 : 0);
                }
            }
        }
    }

    void build_forms() {
        rank_form_.assign(n_, 0);
        deg_form_.assign(n_, 0);
        rank_form_[index_O()] = 1;
        for (int i = 0; i < w_.t; ++i)
            for (int j = 1; j < w_.weights[i]; ++j) deg_form_[index_simple(i, j)] = w_.p / w_.weights[i];
        deg_form_[index_f()] = w_.p;
    }

    void check_invariants() const {
        const __int128 det = determinant(euler_);
        require(det == 1 || det == -1, ErrorCode::InternalConsistency, "Euler matrix is not unimodular");
        for (int u = 0; u < n_; ++u)
            for (int v = 0; v < n_; ++v) {
                const IVec a = unit(u), b = unit(v);
                require(chi(tau_.apply(a), tau_.apply(b)) == chi(a, b), ErrorCode::InternalConsistency, "tau does not preserve the Euler form");
                require(chi_bar(a, b) == rank(a) * deg(b) - deg(a) * rank(b), ErrorCode::InternalConsistency,
                        "averaged Euler form differs from the rank/degree determinant");
            }
        require(tau_ * tau_inv_ == IMat::identity(n_), ErrorCode::InternalConsistency, "tau inverse mismatch");
        IMat power = IMat::identity(n_);
        for (int j = 0; j < w_.p; ++j) power = power * tau_;
        for (int u = 1; u < n_; ++u)
            require(power.apply(unit(u)) == unit(u), ErrorCode::InternalConsistency, "tau^p moves a torsion class");
        require(power.apply(unit(index_O())) == unit(index_O()), ErrorCode::InternalConsistency, "tau has wrong order");
    }

    WeightData w_;
    int n_ = 0;
    std::vector<int> offsets_;
    std::vector<std::string> labels_;
    IMat euler_;
    IMat tau_;
    IMat tau_inv_;
    IVec rank_form_;
    IVec deg_form_;
};

} // namespace tubtilt
