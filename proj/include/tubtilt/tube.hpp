#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "tubtilt/error.hpp"

namespace tubtilt {

/// Position of a serial object inside a tube: socle position (mod the
/// tube rank) and quasi-length.
struct Window {
    int socle = 0;
    int len = 1;

    friend bool operator==(const Window&, const Window&) = default;
};

namespace detail {

/// Rank of an integer matrix by fraction-free elimination; rows are divided
/// by their content after each step so entries stay small.
inline int integer_rank(std::vector<std::vector<std::int64_t>> m) {
    if (m.empty()) return 0;
    const std::size_t cols = m[0].size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
        std::size_t piv = row;
        while (piv < m.size() && m[piv][c] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[row], m[piv]);
        for (std::size_t r = row + 1; r < m.size(); ++r) {
            if (m[r][c] == 0) continue;
            const std::int64_t a = m[row][c];
            const std::int64_t b = m[r][c];
            std::int64_t g = 0;
            for (std::size_t k = 0; k < cols; ++k) {
                m[r][k] = m[r][k] * a - m[row][k] * b;
                g = std::gcd(g, m[r][k]);
            }
            if (g > 1)
                for (auto& x : m[r]) x /= g;
        }
        ++row;
        ++rank;
    }
    return rank;
}

/// Serial representation of the cyclic quiver with arrows v → v−1: basis
/// vectors b_0..b_{len−1}, b_k sitting at vertex socle + k, each arrow
/// sending b_k to b_{k−1} and b_0 to zero.
struct SerialRep {
    int r;
    Window w;

    int vertex_of(int k) const { return ((w.socle + k) % r + r) % r; }
};

} // namespace detail

/// dim Hom(M[w1], M[w2]) between serial objects of a stable tube of rank r,
/// computed by solving the commutativity constraints of a morphism of
/// representations.
inline int tube_hom_oracle(int r, Window w1, Window w2) {
    require(r >= 1 && w1.len >= 1 && w2.len >= 1, ErrorCode::PreconditionViolated, "invalid tube window");
    const detail::SerialRep M{r, w1}, N{r, w2};
    // unknowns: f(b_k) = Σ coefficient · b'_l for vertex-matching pairs (k, l)
    std::vector<std::array<int, 2>> unknowns;
    for (int k = 0; k < w1.len; ++k)
        for (int l = 0; l < w2.len; ++l)
            if (M.vertex_of(k) == N.vertex_of(l)) unknowns.push_back({k, l});
    if (unknowns.empty()) return 0;
    auto unknown_index = [&](int k, int l) -> int {
        for (std::size_t u = 0; u < unknowns.size(); ++u)
            if (unknowns[u][0] == k && unknowns[u][1] == l) return static_cast<int>(u);
        return -1;
    };
    // For every basis vector b_k of M and every target basis vector b'_m:
    // coefficient of b'_m in N_arrow(f(b_k)) equals that in f(M_arrow(b_k)).
    // N_arrow(f(b_k)) = Σ_l f_{k,l} b'_{l−1};  f(M_arrow b_k) = Σ_m f_{k−1,m} b'_m.
    std::vector<std::vector<std::int64_t>> eqs;
    for (int k = 0; k < w1.len; ++k) {
        for (int m = 0; m < w2.len; ++m) {
            std::vector<std::int64_t> row(unknowns.size(), 0);
            const int lhs = unknown_index(k, m + 1);
            if (m + 1 < w2.len && lhs >= 0) row[lhs] += 1;
            if (k >= 1) {
                const int rhs = unknown_index(k - 1, m);
                if (rhs >= 0) row[rhs] -= 1;
            }
            bool nonzero = false;
            for (auto x : row) nonzero |= x != 0;
            if (nonzero) eqs.push_back(std::move(row));
        }
    }
    return static_cast<int>(unknowns.size()) - detail::integer_rank(std::move(eqs));
}

/// Memoized oracle for tube ranks up to 6, indexed by relative socle offset.
class TubeHomTable {
public:
    static constexpr int kMaxRank = 6;

    static const TubeHomTable& instance() {
        static const TubeHomTable table;
        return table;
    }

    int hom(int r, Window w1, Window w2) const {
        if (r > kMaxRank || w1.len > r || w2.len > r) return tube_hom_oracle(r, w1, w2);
        const int offset = ((w2.socle - w1.socle) % r + r) % r;
        return data_[r][w1.len][w2.len][offset];
    }

private:
    TubeHomTable() {
        for (int r = 1; r <= kMaxRank; ++r)
            for (int l1 = 1; l1 <= r; ++l1)
                for (int l2 = 1; l2 <= r; ++l2)
                    for (int off = 0; off < r; ++off)
                        data_[r][l1][l2][off] = tube_hom_oracle(r, Window{0, l1}, Window{off, l2});
    }

    int data_[kMaxRank + 1][kMaxRank + 1][kMaxRank + 1][kMaxRank] = {};
};

} // namespace tubtilt
