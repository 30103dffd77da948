#include <gtest/gtest.h>

#include "tubtilt/excalc.hpp"

using namespace tubtilt;

namespace {

Workspace& square() {
    static Workspace ws(make_weights({2, 2, 2, 2}));
    return ws;
}

std::vector<int> orbit_sizes(const TubeChart& ch) {
    std::vector<int> s;
    for (std::size_t o = 0; o < ch.orbits.size(); ++o) s.push_back(ch.rank_of(static_cast<int>(o)));
    std::sort(s.begin(), s.end());
    return s;
}

} // namespace

TEST(TubeOracle, SmallExamples) {
    EXPECT_EQ(tube_hom_oracle(4, {0, 1}, {0, 1}), 1);
    EXPECT_EQ(tube_hom_oracle(4, {0, 3}, {1, 3}), 1);
    EXPECT_EQ(tube_hom_oracle(4, {0, 1}, {1, 1}), 0);
}

TEST(TubeOracle, TableMatchesOracle) {
    const auto& table = TubeHomTable::instance();
    for (int r = 1; r <= 4; ++r)
        for (int s1 = 0; s1 < r; ++s1)
            for (int l1 = 1; l1 <= r; ++l1)
                for (int s2 = 0; s2 < r; ++s2)
                    for (int l2 = 1; l2 <= r; ++l2) EXPECT_EQ(table.hom(r, {s1, l1}, {s2, l2}), tube_hom_oracle(r, {s1, l1}, {s2, l2}));
}

TEST(Charts, SquareCensus) {
    auto& ws = square();
    for (const auto& q : {Slope::infinity(), Slope(0), Slope(1, 2)}) {
        auto ch = ws.chart(q);
        EXPECT_EQ(orbit_sizes(*ch), (std::vector<int>{2, 2, 2, 2})) << q.str();
        EXPECT_EQ(ch->quasi_simple_count(), 8u);
    }
}

TEST(Charts, TorsionQuasiSimples) {
    auto& ws = square();
    auto ch = ws.chart(Slope::infinity());
    std::set<IVec> qs;
    for (const auto& orbit : ch->orbits) qs.insert(orbit.begin(), orbit.end());
    for (int i = 1; i <= 4; ++i) {
        IVec a(6, 0), b(6, 0);
        a[i] = 1;
        b[i] = -1;
        b[5] = 1;
        EXPECT_TRUE(qs.count(a));
        EXPECT_TRUE(qs.count(b));
        EXPECT_EQ(ws.ctx().tau().apply(a), b);
    }
}

TEST(Charts, SlopeZeroTauIsOmegaTwist) {
    auto& ws = square();
    const auto& w = ws.weights();
    auto ch = ws.chart(Slope(0));
    for (const auto& orbit : ch->orbits)
        for (const auto& cls : orbit) {
            const ExcObject e = ws.object_of_class(cls);
            EXPECT_EQ(ws.tau_obj(e), ws.twist_obj(e, omega(w)));
        }
}

TEST(Charts, MixedTubeSizes) {
    Workspace ws(make_weights({2, 3, 6}));
    auto ch = ws.chart(Slope::infinity());
    EXPECT_EQ(orbit_sizes(*ch), (std::vector<int>{2, 3, 6}));
    EXPECT_EQ(ch->quasi_simple_count(), 11u);
    Workspace ws4(make_weights({2, 4, 4}));
    EXPECT_EQ(orbit_sizes(*ws4.chart(Slope(3, 2))), (std::vector<int>{2, 4, 4}));
}

TEST(Coords, TorsionSimples) {
    auto& ws = square();
    IVec s11(6, 0);
    s11[1] = 1;
    const ExcObject a = ws.object_of_class(s11);
    EXPECT_EQ(a.len, 1);
    EXPECT_EQ(a.period, 2);
    IVec t11 = ws.ctx().unit(5);
    t11[1] = -1;
    const ExcObject b = ws.object_of_class(t11);
    EXPECT_EQ(b.orbit, a.orbit);
    EXPECT_NE(b.socle, a.socle);
    try {
        ws.object_of_class(ws.ctx().unit(5));
        ADD_FAILURE() << "e_f decoded as exceptional";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotExceptionalHere);
    }
}

TEST(Coords, TauTwiceIsIdentity) {
    auto& ws = square();
    const ExcObject x = ws.object_at(Slope(1, 2), 0, 0, 1);
    EXPECT_EQ(ws.tau_obj(ws.tau_obj(x)), x);
    EXPECT_EQ(ws.tau_obj(x).slope, x.slope);
    EXPECT_EQ(ws.tau_inverse_obj(ws.tau_obj(x)), x);
}

TEST(Coords, OutOfRange) {
    auto& ws = square();
    EXPECT_THROW(ws.object_at(Slope(1, 2), 7, 0, 1), Error);
    EXPECT_THROW(ws.object_at(Slope(1, 2), 0, 0, 2), Error);
}

TEST(HomExt, LineBundles) {
    auto& ws = square();
    const auto& w = ws.weights();
    const ExcObject o = ws.line_bundle(l_zero(w));
    const ExcObject oc = ws.line_bundle(l_c(w));
    EXPECT_EQ(ws.hom_dim(o, oc), 2);
    EXPECT_EQ(ws.ext_dim(o, oc), 0);
    EXPECT_EQ(ws.ext_dim(oc, o), 0);
    EXPECT_EQ(ws.hom_dim(oc, o), 0);
    const ExcObject ox = ws.twist_obj(o, l_x(w, 3));
    EXPECT_EQ(ox, ws.line_bundle(l_x(w, 3)));
    EXPECT_EQ(ox.slope, Slope(1));
    const ExcObject ow = ws.line_bundle(omega(w));
    EXPECT_EQ(ws.hom_dim(ow, o), 0);
    EXPECT_EQ(ws.ext_dim(ow, o), 1);
}

TEST(HomExt, TorsionSimple) {
    auto& ws = square();
    IVec s11(6, 0);
    s11[1] = 1;
    const ExcObject s = ws.object_of_class(s11);
    EXPECT_EQ(ws.hom_dim(s, s), 1);
    EXPECT_EQ(ws.ext_dim(s, s), 0);
}

TEST(Wing, Membership) {
    auto& ws = square();
    const ExcObject z = ws.object_at(Slope(1, 2), 0, 0, 1);
    const ExcObject other = ws.object_at(Slope(1, 2), 1, 0, 1);
    EXPECT_TRUE(wing_contains(z, z));
    EXPECT_FALSE(wing_contains(z, other));
    Workspace ws6(make_weights({2, 4, 4}));
    auto ch = ws6.chart(Slope::infinity());
    int o4 = -1;
    for (int o = 0; o < static_cast<int>(ch->orbits.size()); ++o)
        if (ch->rank_of(o) == 4) o4 = o;
    ASSERT_GE(o4, 0);
    const ExcObject big = ws6.object_at(Slope::infinity(), o4, 0, 3);
    EXPECT_TRUE(wing_contains(big, ws6.object_at(Slope::infinity(), o4, 1, 2)));
    EXPECT_FALSE(wing_contains(big, ws6.object_at(Slope::infinity(), o4, 3, 1)));
}
