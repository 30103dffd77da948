#include <gtest/gtest.h>

#include "tubtilt/connect.hpp"

using namespace tubtilt;

namespace {

Workspace& square() {
    static Workspace ws(make_weights({2, 2, 2, 2}));
    return ws;
}

const std::vector<std::vector<int>> kTypes{{2, 2, 2, 2}, {3, 3, 3}, {2, 4, 4}, {2, 3, 6}};

} // namespace

TEST(Farey, Examples) {
    const FareyStep a = extend_abcd(1, 2);
    EXPECT_EQ(a.c, 1);
    EXPECT_EQ(a.d, 1);
    const FareyStep b = extend_abcd(3, 5);
    EXPECT_EQ(b.c, 2);
    EXPECT_EQ(b.d, 3);
    const FareyStep c = extend_abcd(5, 7);
    EXPECT_EQ(c.c, 3);
    EXPECT_EQ(c.d, 4);
}

TEST(Farey, DescentFromThreeFifths) {
    std::vector<std::int64_t> dens{5};
    std::int64_t a = 3, b = 5;
    while (a != b) {
        const FareyStep s = extend_abcd(a, b);
        a = s.c;
        b = s.d;
        dens.push_back(b);
    }
    EXPECT_EQ(dens, (std::vector<std::int64_t>{5, 3, 1}));
}

TEST(Farey, ExhaustiveConstraints) {
    for (std::int64_t b = 2; b <= 100; ++b)
        for (std::int64_t a = 1; a < b; ++a) {
            if (std::gcd(a, b) != 1) continue;
            const FareyStep s = extend_abcd(a, b);
            ASSERT_EQ(b * s.c - a * s.d, 1);
            ASSERT_TRUE(0 < s.c && s.c <= s.d && s.d < b && s.c <= a) << a << "/" << b;
        }
}

TEST(Companion, HalfToOne) {
    auto& ws = square();
    const ExcObject x = ws.object_at(Slope(1, 2), 0, 0, 1);
    const ExcObject y = find_companion(ws, x, Slope(1));
    EXPECT_EQ(y.slope, Slope(1));
    EXPECT_EQ(y.period, 2);
    EXPECT_EQ(ws.ext_dim(x, y), 0);
    EXPECT_EQ(ws.ext_dim(y, x), 0);
}

TEST(Completion, ContainsSeed) {
    auto& ws = square();
    const auto& w = ws.weights();
    const ExcObject o = ws.line_bundle(l_zero(w));
    const TiltingObject t = completion_containing(ws, {o}, SearchBudget{});
    EXPECT_TRUE(t.contains(o));
    EXPECT_TRUE(t.is_bundle());
    EXPECT_TRUE(is_tilting(ws, t));
    const ExcObject x = ws.object_at(Slope(1, 2), 0, 0, 1);
    const ExcObject y = find_companion(ws, x, Slope(1));
    const TiltingObject u = completion_containing(ws, {x, y}, SearchBudget{});
    EXPECT_TRUE(u.contains(x) && u.contains(y) && u.is_bundle() && is_tilting(ws, u));
}

TEST(Completion, RejectsNonRigidSeed) {
    auto& ws = square();
    const auto& w = ws.weights();
    try {
        completion_containing(ws, {ws.line_bundle(l_zero(w)), ws.line_bundle(omega(w))}, SearchBudget{});
        ADD_FAILURE() << "accepted a non-rigid seed";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PreconditionViolated);
    }
}

TEST(Normalize, CanonicalExamples) {
    auto& ws = square();
    const auto& w = ws.weights();
    const TiltingObject can = canonical_tilting(ws);
    EXPECT_TRUE(make_only_minimal(ws, can, can.index_of(ws.line_bundle(l_zero(w))), SearchBudget{}).empty());
    const ExcObject ox = ws.line_bundle(l_x(w, 0));
    const MutationPath p = make_only_minimal(ws, can, can.index_of(ox), SearchBudget{});
    EXPECT_TRUE(verify_path(ws, p));
    EXPECT_TRUE(p.bundle_only);
    EXPECT_EQ(only_minimal(p.back()), p.back().index_of(ox));
}

TEST(Normalize, OppositeEnd) {
    for (const auto& seq : kTypes) {
        Workspace ws(make_weights(seq));
        const auto& w = ws.weights();
        const TiltingObject can = canonical_tilting(ws);
        const ExcObject top = ws.line_bundle(l_c(w));
        const MutationPath p = make_only_minimal(ws, can, can.index_of(top), SearchBudget{});
        std::string diag;
        EXPECT_TRUE(verify_path(ws, p, &diag)) << diag;
        EXPECT_EQ(only_minimal(p.back()), p.back().index_of(top));
        const ExcObject bottom = ws.line_bundle(l_zero(w));
        const MutationPath q = make_only_maximal(ws, can, can.index_of(bottom), SearchBudget{});
        EXPECT_TRUE(verify_path(ws, q, &diag)) << diag;
        EXPECT_EQ(only_maximal(q.back()), q.back().index_of(bottom));
    }
}

TEST(Shared, TrivialAndAdjacent) {
    auto& ws = square();
    const auto& w = ws.weights();
    const TiltingObject can = canonical_tilting(ws);
    const int k = can.index_of(ws.line_bundle(l_x(w, 3)));
    EXPECT_TRUE(connect_shared(ws, can, can, k, SearchBudget{}).empty());
    const TiltingObject next = mutate(ws, can, can.index_of(ws.line_bundle(l_zero(w)))).first;
    EXPECT_EQ(connect_shared(ws, can, next, k, SearchBudget{}).length(), 1u);
}

TEST(Shared, CanonicalAndTwist) {
    for (const auto& seq : kTypes) {
        Workspace ws(make_weights(seq));
        const auto& w = ws.weights();
        const LElement xt = l_x(w, w.t - 1);
        const TiltingObject can = canonical_tilting(ws);
        const TiltingObject twisted = canonical_tilting(ws, xt);
        const ExcObject shared = ws.line_bundle(xt);
        ASSERT_TRUE(twisted.contains(shared));
        const MutationPath p = connect_shared(ws, can, twisted, can.index_of(shared), SearchBudget{});
        std::string diag;
        EXPECT_TRUE(verify_path(ws, p, &diag)) << diag;
        EXPECT_EQ(p.back(), twisted);
        for (const auto& node : p.nodes) EXPECT_TRUE(node.contains(shared));
    }
}

TEST(Integerize, RejectsIntegerRange) {
    auto& ws = square();
    try {
        integerize(ws, canonical_tilting(ws), SearchBudget{});
        ADD_FAILURE() << "accepted a range with an integer";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PreconditionViolated);
    }
}

TEST(Integerize, ReachesIntegerRange) {
    int found = 0;
    for (const auto& seq : kTypes) {
        Workspace ws(make_weights(seq));
        Rng rng(99);
        const TiltingObject can = canonical_tilting(ws);
        for (int i = 0; i < 200 && found < 8; ++i) {
            const TiltingObject t = random_walk(ws, can, 12, rng, true).first;
            if (range_contains_integer(t)) continue;
            ++found;
            const MutationPath p = integerize(ws, t, SearchBudget{});
            EXPECT_TRUE(verify_path(ws, p));
            EXPECT_TRUE(range_contains_integer(p.back()));
        }
    }
    EXPECT_GT(found, 0);
}

TEST(Canonical, Trivial) {
    auto& ws = square();
    EXPECT_TRUE(connect_to_canonical(ws, canonical_tilting(ws), SearchBudget{}).empty());
}

TEST(Canonical, FromTwist) {
    for (const auto& seq : kTypes) {
        Workspace ws(make_weights(seq));
        const auto& w = ws.weights();
        const TiltingObject twisted = canonical_tilting(ws, l_x(w, w.t - 1));
        const MutationPath p = connect_to_canonical(ws, twisted, SearchBudget{});
        EXPECT_FALSE(p.empty());
        EXPECT_TRUE(verify_path(ws, p));
        EXPECT_EQ(p.front(), twisted);
        EXPECT_EQ(p.back(), canonical_tilting(ws));
        const MutationPath r = reversed(ws, p);
        EXPECT_TRUE(verify_path(ws, r));
        EXPECT_EQ(r.back(), twisted);
    }
}

TEST(Canonical, RandomBundles) {
    for (const auto& seq : kTypes) {
        Workspace ws(make_weights(seq));
        Rng rng(2024);
        const TiltingObject can = canonical_tilting(ws);
        for (int i = 0; i < 5; ++i) {
            const TiltingObject t = random_walk(ws, can, 5, rng, true).first;
            const MutationPath p = connect_to_canonical(ws, t, SearchBudget{});
            EXPECT_TRUE(verify_path(ws, p));
            EXPECT_TRUE(p.bundle_only);
            EXPECT_EQ(p.back(), can);
        }
    }
}

TEST(VerifyPath, DetectsCorruption) {
    auto& ws = square();
    const auto& w = ws.weights();
    EXPECT_TRUE(verify_path(ws, MutationPath::trivial(canonical_tilting(ws))));
    MutationPath p = connect_to_canonical(ws, canonical_tilting(ws, l_x(w, 3)), SearchBudget{});
    ASSERT_GE(p.nodes.size(), 3u);
    p.nodes[1] = canonical_tilting(ws, l_c(w, 5));
    std::string diag;
    EXPECT_FALSE(verify_path(ws, p, &diag));
    EXPECT_FALSE(diag.empty());
}

TEST(VerifyPath, BundleFlagMustBeAccurate) {
    auto& ws = square();
    const auto& w = ws.weights();
    const TiltingObject can = canonical_tilting(ws);
    auto [t, ev] = mutate(ws, can, can.index_of(ws.line_bundle(l_x(w, 0))));
    MutationPath p = MutationPath::trivial(can);
    p.push(t, ev);
    EXPECT_FALSE(p.bundle_only);
    EXPECT_TRUE(verify_path(ws, p));
    p.bundle_only = true;
    EXPECT_FALSE(verify_path(ws, p));
}

TEST(RemoveLoops, CollapsesBacktracking) {
    auto& ws = square();
    const TiltingObject can = canonical_tilting(ws);
    auto [t, ev] = mutate(ws, can, 0);
    MutationPath p = MutationPath::trivial(can);
    p.push(t, ev);
    p.push(can, event_between(ws, t, can));
    EXPECT_TRUE(remove_loops(p).empty());
}
