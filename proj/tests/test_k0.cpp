#include <gtest/gtest.h>

#include "tubtilt/k0.hpp"

using namespace tubtilt;

namespace {

const K0Context& square() {
    static const K0Context ctx(make_weights({2, 2, 2, 2}));
    return ctx;
}

} // namespace

TEST(K0, BasisOrder) {
    EXPECT_EQ(square().basis_labels(), (std::vector<std::string>{"e_O", "e_1,1", "e_2,1", "e_3,1", "e_4,1", "e_f"}));
}

TEST(K0, EulerRows) {
    const auto& ctx = square();
    const std::vector<IVec> rows{{1, 0, 0, 0, 0, 1}, {-1, 1, 0, 0, 0, 0}, {-1, 0, 1, 0, 0, 0},
                                {-1, 0, 0, 1, 0, 0}, {-1, 0, 0, 0, 1, 0}, {-1, 0, 0, 0, 0, 0}};
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) EXPECT_EQ(ctx.euler()(r, c), rows[r][c]) << r << "," << c;
    EXPECT_EQ(determinant(ctx.euler()), 1);
}

TEST(K0, EulerValues) {
    const auto& ctx = square();
    const auto& w = ctx.weights();
    EXPECT_EQ(ctx.chi(ctx.line_bundle_class(omega(w)), ctx.unit(0)), -1);
    EXPECT_EQ(ctx.chi(ctx.unit(5), ctx.unit(5)), 0);
}

TEST(K0, LineBundleClasses) {
    const auto& ctx = square();
    const auto& w = ctx.weights();
    EXPECT_EQ(ctx.line_bundle_class(l_zero(w)), (IVec{1, 0, 0, 0, 0, 0}));
    EXPECT_EQ(ctx.line_bundle_class(l_c(w)), (IVec{1, 0, 0, 0, 0, 1}));
    const IVec om = ctx.line_bundle_class(omega(w));
    EXPECT_EQ(om, (IVec{1, 1, 1, 1, 1, -2}));
    EXPECT_EQ(ctx.deg(om), 0);
    EXPECT_EQ(ctx.rank(om), 1);
}

TEST(K0, AveragedForm) {
    const auto& ctx = square();
    const auto& w = ctx.weights();
    const IVec o = ctx.unit(0);
    EXPECT_EQ(ctx.chi_bar(o, o), 0);
    EXPECT_EQ(ctx.chi_bar(o, ctx.line_bundle_class(l_x(w, 3))), 1);
    EXPECT_EQ(ctx.chi_bar(o, ctx.unit(5)), 2);
}

TEST(K0, Slopes) {
    const auto& ctx = square();
    const auto& w = ctx.weights();
    for (int m = -3; m <= 3; ++m) EXPECT_EQ(ctx.slope_of(ctx.line_bundle_class(l_scale(w, l_x(w, 3), m))), Slope(m));
    EXPECT_TRUE(ctx.slope_of(ctx.unit(1)).is_inf());
    EXPECT_EQ(ctx.slope_of(IVec{3, 1, 1, 1, 1, -1}), Slope(2, 3));
}

TEST(K0, TauPeriod) {
    for (const auto& seq : std::vector<std::vector<int>>{{2, 2, 2, 2}, {3, 3, 3}, {2, 4, 4}, {2, 3, 6}}) {
        const K0Context ctx(make_weights(seq));
        for (int i = 0; i < ctx.dim(); ++i) {
            IVec v = ctx.unit(i);
            for (int j = 0; j < ctx.weights().p; ++j) v = ctx.tau().apply(v);
            EXPECT_EQ(v, ctx.unit(i));
            EXPECT_EQ(ctx.tau_inverse().apply(ctx.tau().apply(ctx.unit(i))), ctx.unit(i));
        }
    }
}

TEST(K0, RootsAtInfinity) {
    const auto& ctx = square();
    const auto roots = ctx.enumerate_roots_at(Slope::infinity(), 1);
    std::set<IVec> got(roots.begin(), roots.end());
    std::set<IVec> want;
    for (int i = 1; i <= 4; ++i) {
        IVec a(6, 0), b(6, 0);
        a[i] = 1;
        b[i] = -1;
        b[5] = 1;
        want.insert(a);
        want.insert(b);
    }
    EXPECT_EQ(got, want);
    EXPECT_EQ(got.count(ctx.unit(5)), 0u);
}

TEST(K0, RootsAtZero) {
    const auto& ctx = square();
    const auto& w = ctx.weights();
    const auto roots = ctx.enumerate_roots_at(Slope(0), 1);
    std::set<IVec> got(roots.begin(), roots.end());
    std::set<IVec> want;
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<std::int64_t> a(4);
        int bits = 0;
        for (int i = 0; i < 4; ++i) bits += (a[i] = (mask >> i) & 1);
        if (bits % 2 == 0) want.insert(ctx.line_bundle_class(l_normalize(w, a, -bits / 2)));
    }
    EXPECT_EQ(want.size(), 8u);
    EXPECT_EQ(got, want);
}

TEST(K0, RootEnumerationRejectsHugeSlopes) {
    try {
        square().enumerate_roots_at(Slope(1, 3'000'000'000), 1);
        ADD_FAILURE() << "expected a bound error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SearchBoundExceeded);
    }
}
