#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tubtilt/cli.hpp"

using namespace tubtilt;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("tubtilt_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST(Run, ExitCodes) {
    EXPECT_EQ(run({"--no-cache", "info"}).code, 0);
    EXPECT_EQ(run({"--no-cache", "--weights", "2,3,5", "info"}).code, 2);
    EXPECT_EQ(run({"--no-cache", "--weights", "2,x", "info"}).code, 2);
    EXPECT_EQ(run({"--no-cache", "frobnicate"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"--no-cache", "check", "L(x1+"}).code, 1);
}

TEST(Run, Info) {
    const Result r = run({"--no-cache", "--weights", "4,2,4", "info"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("weights=2,4,4"), std::string::npos);
    EXPECT_NE(r.out.find("p=4"), std::string::npos);
    EXPECT_NE(r.out.find("n=9"), std::string::npos);
}

TEST(Run, ParseErrorReportsColumn) {
    const Result r = run({"--no-cache", "check", "L(x1+"});
    const json j = json::parse(r.err);
    EXPECT_EQ(j.at("error"), "SyntaxError");
    EXPECT_EQ(j.at("column"), 5);
    EXPECT_EQ(j.at("line"), 1);
}

TEST(Expr, LineBundle) {
    Workspace ws(make_weights({2, 2, 2, 2}));
    const auto& w = ws.weights();
    const ExprValue v = parse_and_evaluate(ws, "L(x1+x2-c)");
    ASSERT_TRUE(std::holds_alternative<ExcObject>(v));
    const LElement e = l_sub(w, l_add(w, l_x(w, 0), l_x(w, 1)), l_c(w));
    EXPECT_EQ(e.coeffs, (std::vector<int>{1, 1, 0, 0}));
    EXPECT_EQ(e.c, -1);
    EXPECT_EQ(std::get<ExcObject>(v), ws.line_bundle(e));
    EXPECT_EQ(line_expr(w, e), "L(x1+x2-c)");
}

TEST(Expr, ChartCoordinates) {
    Workspace ws(make_weights({2, 2, 2, 2}));
    const ExprValue v = parse_and_evaluate(ws, "E(1/2; t=0; s=0; l=1)");
    ASSERT_TRUE(std::holds_alternative<ExcObject>(v));
    const ExcObject e = std::get<ExcObject>(v);
    EXPECT_EQ(e, ws.object_at(Slope(1, 2), 0, 0, 1));
    EXPECT_EQ(std::get<ExcObject>(parse_and_evaluate(ws, chart_expr(e))), e);
    EXPECT_EQ(std::get<ExcObject>(parse_and_evaluate(ws, class_expr(e))), e);
}

TEST(Expr, ErrorColumn) {
    Workspace ws(make_weights({2, 2, 2, 2}));
    try {
        parse_and_evaluate(ws, "L(x1+");
        ADD_FAILURE() << "parsed a dangling operator";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 5);
    }
}

TEST(Graph, SmallWindow) {
    Workspace ws(make_weights({2, 2, 2, 2}));
    const cli::Graph g = cli::explore(ws, Slope(0), Slope::infinity(), 7);
    EXPECT_EQ(g.nodes.size(), 7u);
    EXPECT_EQ(g.edges.size(), 6u);
    const cli::Graph h = cli::explore(ws, Slope(0), Slope::infinity(), 7);
    EXPECT_EQ(cli::export_dot(g), cli::export_dot(h));
    EXPECT_EQ(cli::export_dot(g).rfind("graph tilting {", 0), 0u);
    EXPECT_TRUE(cli::explore(ws, Slope(0), Slope(1), 7).nodes.empty());
}

TEST(Graph, DotDeterministicAcrossRuns) {
    const std::vector<std::string> args{"--no-cache", "graph", "--slope-window", "0..inf", "--max-nodes", "12", "--dot", "-"};
    const Result a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Connect, TwistedFile) {
    const Result r = run({"--no-cache", "connect", std::string(TUBTILT_TEST_DATA) + "/tcan_twisted.json", "--to", "canonical"});
    ASSERT_EQ(r.code, 0) << r.err;
    Workspace ws(make_weights({2, 2, 2, 2}));
    const MutationPath p = path_from_json(ws, json::parse(r.out));
    EXPECT_TRUE(verify_path(ws, p));
    EXPECT_EQ(p.back(), canonical_tilting(ws));
}

TEST(Json, RoundTrips) {
    for (const auto& seq : std::vector<std::vector<int>>{{2, 2, 2, 2}, {2, 3, 6}}) {
        Workspace ws(make_weights(seq));
        Rng rng(5);
        const auto [t, events] = random_walk(ws, canonical_tilting(ws), 8, rng, false);
        EXPECT_EQ(tilting_from_json(ws, json::parse(tilting_to_json(ws, t).dump())), t);
        for (const auto& e : t.summands()) EXPECT_EQ(object_from_json(ws, object_to_json(e)), e);
        const MutationPath p = connect_to_canonical(ws, canonical_tilting(ws, l_x(ws.weights(), 0)), SearchBudget{});
        const MutationPath q = path_from_json(ws, json::parse(path_to_json(ws, p).dump()));
        EXPECT_EQ(q.nodes, p.nodes);
        EXPECT_EQ(path_to_json(ws, q), path_to_json(ws, p));
    }
}

TEST(Json, RejectsWrongWeights) {
    Workspace a(make_weights({2, 2, 2, 2})), b(make_weights({3, 3, 3}));
    EXPECT_THROW(tilting_from_json(b, tilting_to_json(a, canonical_tilting(a))), Error);
}

TEST(Cache, SaveAndLoad) {
    const auto dir = scratch_dir("cache");
    {
        Workspace ws(make_weights({2, 4, 4}));
        ws.chart(Slope(3, 2));
        ws.chart(Slope(1));
        ChartCache(dir).save(ws);
    }
    Workspace fresh(make_weights({2, 4, 4}));
    EXPECT_GE(ChartCache(dir).load(fresh), 2u);
    Workspace other(make_weights({3, 3, 3}));
    EXPECT_EQ(ChartCache(dir).load(other), 0u);
    std::filesystem::remove_all(dir);
}

TEST(Cache, IgnoresCorruptFiles) {
    const auto dir = scratch_dir("corrupt");
    Workspace ws(make_weights({2, 2, 2, 2}));
    ChartCache cache(dir);
    std::ofstream(cache.file_for(ws, Slope(1, 2))) << "{not json";
    Workspace fresh(make_weights({2, 2, 2, 2}));
    EXPECT_EQ(ChartCache(dir).load(fresh), 0u);
    std::filesystem::remove_all(dir);
}

TEST(Run, WalkDeterministic) {
    const std::vector<std::string> args{"--no-cache", "--weights", "2,3,6", "walk", "--steps", "15", "--seed", "9"};
    const Result a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}
