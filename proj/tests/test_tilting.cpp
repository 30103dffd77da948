#include <gtest/gtest.h>

#include "tubtilt/tilting.hpp"

using namespace tubtilt;

namespace {

Workspace& square() {
    static Workspace ws(make_weights({2, 2, 2, 2}));
    return ws;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InternalConsistency;
}

} // namespace

TEST(Tilting, CanonicalIsTilting) {
    for (const auto& seq : std::vector<std::vector<int>>{{2, 2, 2, 2}, {3, 3, 3}, {2, 4, 4}, {2, 3, 6}}) {
        Workspace ws(make_weights(seq));
        const TiltingObject can = canonical_tilting(ws);
        EXPECT_EQ(static_cast<int>(can.size()), ws.n());
        EXPECT_TRUE(is_tilting(ws, can));
        EXPECT_TRUE(can.is_bundle());
        EXPECT_TRUE(is_tilting(ws, canonical_tilting(ws, l_x(ws.weights(), 0))));
    }
}

TEST(Tilting, RejectsBadSets) {
    auto& ws = square();
    const auto& w = ws.weights();
    const TiltingObject can = canonical_tilting(ws);
    std::vector<ExcObject> five(can.summands().begin() + 1, can.summands().end());
    EXPECT_FALSE(is_tilting(ws, five));
    std::vector<ExcObject> with_omega = five;
    with_omega[0] = ws.line_bundle(omega(w));
    with_omega.push_back(ws.line_bundle(l_zero(w)));
    EXPECT_FALSE(is_tilting(ws, with_omega));
    EXPECT_EQ(code_of([&] { TiltingObject::from_summands(ws, five); }), ErrorCode::WrongSummandCount);
    std::vector<ExcObject> dup = five;
    dup.push_back(five.front());
    EXPECT_EQ(code_of([&] { TiltingObject::from_summands(ws, dup); }), ErrorCode::DuplicateSummand);
}

TEST(Mutation, FrozenComplements) {
    auto& ws = square();
    const auto& w = ws.weights();
    const TiltingObject can = canonical_tilting(ws);
    const auto [at_o, ev_o] = mutate(ws, can, can.index_of(ws.line_bundle(l_zero(w))));
    EXPECT_EQ(ev_o.added.cls, (IVec{3, 1, 1, 1, 1, 0}));
    EXPECT_EQ(ev_o.added.slope, Slope(4, 3));
    EXPECT_EQ(ev_o.direction, ExchangeDirection::Left);
    const auto [at_c, ev_c] = mutate(ws, can, can.index_of(ws.line_bundle(l_c(w))));
    EXPECT_EQ(ev_c.added.cls, (IVec{3, 1, 1, 1, 1, -1}));
    EXPECT_EQ(ev_c.added.slope, Slope(2, 3));
    EXPECT_EQ(ev_c.direction, ExchangeDirection::Right);
    EXPECT_EQ(ws.ctx().rank(ev_c.added.cls), 3);
    EXPECT_EQ(ws.ctx().deg(ev_c.added.cls), 2);
}

TEST(Mutation, Involution) {
    for (const auto& seq : std::vector<std::vector<int>>{{2, 2, 2, 2}, {3, 3, 3}, {2, 4, 4}, {2, 3, 6}}) {
        Workspace ws(make_weights(seq));
        const TiltingObject can = canonical_tilting(ws);
        for (int k = 0; k < ws.n(); ++k) {
            auto [next, ev] = mutate(ws, can, k);
            EXPECT_TRUE(is_tilting(ws, next));
            auto [back, ev2] = mutate(ws, next, next.index_of(ev.added));
            EXPECT_EQ(back, can);
            EXPECT_EQ(ev2.added, ev.removed);
            EXPECT_EQ(ev2.direction, ev.reversed().direction);
        }
    }
}

TEST(Mutation, AdditivityAtCanonical) {
    auto& ws = square();
    const TiltingObject can = canonical_tilting(ws);
    for (int k = 0; k < ws.n(); ++k) {
        const auto ev = mutate(ws, can, k).second;
        IVec sum = ev.removed.cls;
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += ev.added.cls[i];
        EXPECT_EQ(sum, ev.approx_class);
        const IVec mult = exchange_multiplicities(can, ev.approx_class);
        EXPECT_EQ(mult[k], 0);
        for (auto m : mult) EXPECT_GE(m, 0);
    }
}

TEST(Extremal, CanonicalFirstLast) {
    auto& ws = square();
    const auto& w = ws.weights();
    const TiltingObject can = canonical_tilting(ws);
    const int o = can.index_of(ws.line_bundle(l_zero(w)));
    const int oc = can.index_of(ws.line_bundle(l_c(w)));
    const int ox = can.index_of(ws.line_bundle(l_x(w, 0)));
    EXPECT_EQ(first_objects(ws, can), std::vector<int>{o});
    EXPECT_EQ(last_objects(ws, can), std::vector<int>{oc});
    EXPECT_EQ(slope_range(can), std::make_pair(Slope(0), Slope(2)));
    EXPECT_EQ(only_minimal(can), o);
    EXPECT_EQ(only_maximal(can), oc);
    EXPECT_TRUE(range_contains_integer(can));
    EXPECT_EQ(apr_mutate(ws, can, o).second.added.slope, Slope(4, 3));
    EXPECT_EQ(co_apr_mutate(ws, can, oc).second.added.slope, Slope(2, 3));
    EXPECT_EQ(code_of([&] { apr_mutate(ws, can, ox); }), ErrorCode::NotFirstObject);
    EXPECT_EQ(code_of([&] { co_apr_mutate(ws, can, ox); }), ErrorCode::NotLastObject);
}

TEST(Extremal, TwoMinimalSummands) {
    auto& ws = square();
    const auto& w = ws.weights();
    // O and O(x1 + x2 - c) both have slope 0
    std::vector<ExcObject> objs;
    for (const auto& q : std::vector<LElement>{l_zero(w), l_sub(w, l_add(w, l_x(w, 0), l_x(w, 1)), l_c(w)), l_x(w, 1), l_x(w, 2), l_x(w, 3), l_c(w)})
        objs.push_back(ws.line_bundle(q));
    const TiltingObject t = TiltingObject::from_summands(ws, objs);
    EXPECT_FALSE(only_minimal(t).has_value());
    EXPECT_EQ(only_maximal(t), t.index_of(ws.line_bundle(l_c(w))));
}

TEST(Purge, BundleIsFixed) {
    auto& ws = square();
    const TiltingObject can = canonical_tilting(ws);
    auto [res, events] = purge_torsion(ws, can);
    EXPECT_EQ(res, can);
    EXPECT_TRUE(events.empty());
}

TEST(Purge, SingleTorsionSummand) {
    auto& ws = square();
    const auto& w = ws.weights();
    const TiltingObject can = canonical_tilting(ws);
    const TiltingObject t = mutate(ws, can, can.index_of(ws.line_bundle(l_x(w, 0)))).first;
    ASSERT_FALSE(t.is_bundle());
    auto [res, events] = purge_torsion(ws, t);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_FALSE(events[0].added.is_torsion());
    EXPECT_TRUE(res.is_bundle());
    EXPECT_TRUE(is_tilting(ws, res));
}

TEST(FullPeriod, FindsSummand) {
    Workspace ws(make_weights({2, 3, 6}));
    const TiltingObject can = canonical_tilting(ws);
    EXPECT_EQ(can[find_full_period_quasi_simple(ws, can)].period, 6);
}

TEST(Perp, Sides) {
    auto& ws = square();
    const auto& w = ws.weights();
    const ExcObject o = ws.line_bundle(l_zero(w));
    const ExcObject ox = ws.line_bundle(l_x(w, 0));
    const PerpSide s = perp_side(ws, ox, o);
    EXPECT_EQ(s.component, PerpComponent::Preprojective);
    EXPECT_FALSE(s.in_left_perp); // Hom(O, O(x1)) ≠ 0
    EXPECT_EQ(component_name(perp_side(ws, o, ox).component), "preinjective");
}

TEST(Walk, Deterministic) {
    auto& ws = square();
    const TiltingObject can = canonical_tilting(ws);
    Rng a(42), b(42);
    const auto wa = random_walk(ws, can, 20, a, true);
    const auto wb = random_walk(ws, can, 20, b, true);
    EXPECT_EQ(wa.first, wb.first);
    EXPECT_TRUE(wa.first.is_bundle());
    EXPECT_EQ(wa.second.size(), 20u);
}
