#include <gtest/gtest.h>

#include "tubtilt/weights.hpp"

using namespace tubtilt;

namespace {

LElement le(std::vector<int> a, std::int64_t c) { return LElement{std::move(a), c}; }

} // namespace

TEST(MakeWeights, SquareType) {
    const WeightData w = make_weights({2, 2, 2, 2});
    EXPECT_EQ(w.p, 2);
    EXPECT_EQ(w.n, 6);
    EXPECT_EQ(w.t, 4);
    EXPECT_EQ(w.genus, Slope(1));
}

TEST(MakeWeights, SortsAscending) {
    const WeightData w = make_weights({6, 2, 3});
    EXPECT_EQ(w.weights, (std::vector<int>{2, 3, 6}));
    EXPECT_EQ(w.p, 6);
    EXPECT_EQ(w.n, 10);
    EXPECT_EQ(w.genus, Slope(1));
}

TEST(MakeWeights, AllTubularTypes) {
    for (const auto& [seq, n] : std::vector<std::pair<std::vector<int>, int>>{{{2, 2, 2, 2}, 6}, {{3, 3, 3}, 8}, {{2, 4, 4}, 9}, {{2, 3, 6}, 10}}) {
        const WeightData w = make_weights(seq);
        EXPECT_EQ(w.n, n);
        EXPECT_EQ(w.p, w.weights.back());
        EXPECT_EQ(w.genus, Slope(1));
    }
}

TEST(MakeWeights, RejectsNonTubular) {
    for (const auto& seq : std::vector<std::vector<int>>{{2, 3, 5}, {2, 2}, {2, 2, 2, 2, 2}, {3, 3, 4}, {1, 2, 2, 2}, {}}) {
        try {
            make_weights(seq);
            ADD_FAILURE() << "accepted a non-tubular sequence";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::NonTubularWeights);
        }
    }
}

TEST(Lattice, NormalizeRelation) {
    const WeightData w = make_weights({2, 2, 2, 2});
    EXPECT_EQ(l_normalize(w, {2, 0, 0, 0}, 0), le({0, 0, 0, 0}, 1));
    EXPECT_EQ(l_normalize(w, {-1, 0, 0, 0}, 0), le({1, 0, 0, 0}, -1));
}

TEST(Lattice, NegAndAdd) {
    const WeightData w = make_weights({2, 2, 2, 2});
    EXPECT_EQ(l_neg(w, l_x(w, 0)), le({1, 0, 0, 0}, -1));
    EXPECT_EQ(l_add(w, l_x(w, 0), l_x(w, 1)), le({1, 1, 0, 0}, 0));
    EXPECT_EQ(l_add(w, l_x(w, 0), l_x(w, 0)), l_c(w));
}

TEST(Lattice, Degree) {
    const WeightData w = make_weights({2, 2, 2, 2});
    EXPECT_EQ(delta(w, l_x(w, 0)), 1);
    EXPECT_EQ(delta(w, l_c(w)), 2);
    EXPECT_EQ(delta(w, omega(w)), 0);
    const WeightData w6 = make_weights({2, 3, 6});
    EXPECT_EQ(delta(w6, l_x(w6, 0)), 3);
    EXPECT_EQ(delta(w6, l_x(w6, 1)), 2);
    EXPECT_EQ(delta(w6, l_x(w6, 2)), 1);
}

TEST(Lattice, Omega) {
    const WeightData w = make_weights({2, 2, 2, 2});
    EXPECT_EQ(omega(w), le({1, 1, 1, 1}, -2));
    EXPECT_EQ(l_add(w, omega(w), omega(w)), l_zero(w));
    for (const auto& seq : std::vector<std::vector<int>>{{3, 3, 3}, {2, 4, 4}, {2, 3, 6}}) {
        const WeightData v = make_weights(seq);
        EXPECT_EQ(delta(v, omega(v)), 0);
        EXPECT_EQ(l_scale(v, omega(v), v.p), l_zero(v));
    }
}

TEST(Lattice, Effective) {
    const WeightData w = make_weights({2, 2, 2, 2});
    EXPECT_TRUE(is_effective(l_zero(w)));
    EXPECT_FALSE(is_effective(omega(w)));
    EXPECT_TRUE(is_effective(l_c(w)));
}

TEST(Lattice, TextForm) {
    const WeightData w = make_weights({2, 2, 2, 2});
    EXPECT_EQ(l_str(l_sub(w, l_add(w, l_x(w, 0), l_x(w, 1)), l_c(w))), "x1+x2-c");
    EXPECT_EQ(l_str(l_zero(w)), "0");
}
