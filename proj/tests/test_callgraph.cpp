#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "sbest/callgraph.hpp"

using namespace sbest;

namespace {

MethodId id(const std::string& s) { return MethodId::parse(s); }

std::string node(int i) { return "app$N#n" + std::to_string(i) + "()"; }

using EdgeList = std::vector<std::pair<int, int>>;

CallGraph build(const EdgeList& edges, int nodes) {
    CallGraph g;
    for (int i = 0; i < nodes; ++i) g.add_node(id(node(i)));
    for (auto [a, b] : edges) g.add_edge(id(node(a)), id(node(b)));
    return g;
}

// Reference BFS over plain adjacency sets.
std::optional<std::size_t> oracle_distance(const EdgeList& edges, const std::set<int>& from, const std::set<int>& to) {
    for (int f : from)
        if (to.count(f)) return 0;
    std::map<int, std::set<int>> adj;
    for (auto [a, b] : edges) adj[a].insert(b);
    std::set<int> seen = from;
    std::vector<int> frontier(from.begin(), from.end());
    for (std::size_t d = 1; !frontier.empty(); ++d) {
        std::vector<int> next;
        for (int v : frontier)
            for (int w : adj[v])
                if (seen.insert(w).second) {
                    if (to.count(w)) return d;
                    next.push_back(w);
                }
        frontier = std::move(next);
    }
    return std::nullopt;
}

void check_witness(const CallGraph& g, const DistanceResult& r, std::span<const MethodId> trace,
                   std::span<const MethodId> buggy) {
    REQUIRE(r.distance);
    REQUIRE(r.witness_path.size() == *r.distance + 1);
    auto in = [](std::span<const MethodId> s, const MethodId& m) { return std::find(s.begin(), s.end(), m) != s.end(); };
    CHECK(in(trace, r.witness_path.front()));
    CHECK(in(buggy, r.witness_path.back()));
    for (std::size_t i = 0; i + 1 < r.witness_path.size(); ++i)
        CHECK(g.has_edge(r.witness_path[i], r.witness_path[i + 1]));
}

}  // namespace

TEST_CASE("parse_call_graph") {
    const auto g = parse_call_graph("caller,callee\napp$A#f(),app$B#g(int,long)\napp$B#g(int,long),app$A#f()\n");
    CHECK(g.edge_count() == 2);
    CHECK(g.node_count() <= 4);
    CHECK(g.has_edge(id("app$B#g(int,long)"), id("app$A#f()")));

    const auto dup = parse_call_graph("caller,callee\napp$A#f(),app$B#g()\napp$A#f(),app$B#g()\n");
    CHECK(dup.edge_count() == 1);

    try {
        parse_call_graph("caller,callee\napp$A#f(),app$B#g()\nnot a row\n");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_call_graph("from,to\n"), Error);
}

TEST_CASE("parse_call_graph: 50-edge file against a line recount") {
    std::mt19937_64 rng(50);
    std::uniform_int_distribution<int> pick(0, 24);
    std::string csv = "caller,callee\n";
    std::set<std::string> rows, names;
    for (int i = 0; i < 50; ++i) {
        const auto a = node(pick(rng)), b = node(pick(rng));
        const std::string row = a + "," + b;
        csv += row + "\n";
        rows.insert(row);
        names.insert(a);
        names.insert(b);
    }
    const auto g = parse_call_graph(csv);
    CHECK(g.edge_count() == rows.size());
    CHECK(g.node_count() == names.size());
}

TEST_CASE("min_distance examples") {
    // Shaped like the Math-79 report: trace frame -> a -> b -> buggy.
    CallGraph g;
    const auto trace = id("org.apache.commons.math.stat.clustering$KMeansPlusPlusClusterer#cluster(java.util.Collection,int,int)");
    const auto a = id("org.apache.commons.math.stat.clustering$KMeansPlusPlusClusterer#chooseInitialCenters(java.util.Collection,int,java.util.Random)");
    const auto b = id("org.apache.commons.math.stat.clustering$EuclideanIntegerPoint#distanceFrom(org.apache.commons.math.stat.clustering.EuclideanIntegerPoint)");
    const auto bug = id("org.apache.commons.math.util$MathUtils#distance(int[],int[])");
    const auto lonely = id("org.apache.commons.math.util$Other#x()");
    g.add_edge(trace, a);
    g.add_edge(a, b);
    g.add_edge(b, bug);
    g.add_edge(trace, id("org.apache.commons.math.util$Helper#h()"));
    g.add_node(lonely);

    const std::vector<MethodId> t{trace};
    const std::vector<MethodId> buggy{bug};
    const auto r = min_distance(g, t, buggy);
    CHECK(r.distance == 3u);
    check_witness(g, r, t, buggy);

    const std::vector<MethodId> self{trace};
    CHECK(min_distance(g, t, self).distance == 0u);

    const std::vector<MethodId> far{lonely};
    CHECK_FALSE(min_distance(g, t, far).reachable());

    // Reverse direction is unreachable unless traversal is undirected.
    CHECK_FALSE(min_distance(g, buggy, t).reachable());
    CHECK(min_distance(g, buggy, t, {true}).distance == 3u);

    const std::vector<MethodId> none;
    CHECK_THROWS_AS(min_distance(g, none, buggy), Error);
}

TEST_CASE("min_distance agrees with a reference BFS") {
    std::mt19937_64 rng(60);
    for (int round = 0; round < 200; ++round) {
        std::uniform_int_distribution<int> pick(0, 19), ecount(0, 45);
        EdgeList edges;
        const int n = ecount(rng);
        for (int i = 0; i < n; ++i) edges.emplace_back(pick(rng), pick(rng));
        std::set<int> from{pick(rng), pick(rng)}, to{pick(rng)};
        const auto g = build(edges, 20);
        std::vector<MethodId> tm, bm;
        for (int f : from) tm.push_back(id(node(f)));
        for (int b : to) bm.push_back(id(node(b)));
        const auto r = min_distance(g, tm, bm);
        CHECK(r.distance == oracle_distance(edges, from, to));
        if (r.reachable()) check_witness(g, r, tm, bm);

        // Duplicated and reordered edges give the same answer.
        auto shuffled = edges;
        shuffled.insert(shuffled.end(), edges.begin(), edges.end());
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(min_distance(build(shuffled, 20), tm, bm).distance == r.distance);

        // Adding an edge never increases the distance.
        auto more = edges;
        more.emplace_back(pick(rng), pick(rng));
        const auto after = min_distance(build(more, 20), tm, bm).distance;
        if (r.distance) {
            REQUIRE(after);
            CHECK(*after <= *r.distance);
        }
    }
}

TEST_CASE("distance_report") {
    auto with = [](std::optional<std::size_t> d) {
        DistanceResult r;
        r.distance = d;
        return r;
    };
    const std::vector<DistanceResult> a{with(0), with(0), with(1)};
    const auto s = distance_report(a);
    CHECK(s.bugs == 3);
    CHECK(s.reachable == 3);
    CHECK(s.zero == 2);
    CHECK(s.reachable_fraction == 1.0);
    CHECK(s.mean_distance == doctest::Approx(1.0 / 3.0));

    const std::vector<DistanceResult> b{with(0), with(std::nullopt)};
    const auto t = distance_report(b);
    CHECK(t.reachable_fraction == 0.5);
    CHECK(t.mean_distance == 0.0);

    // 10 bugs, recomputed by hand: reachable 0,0,2,5,1,3,0 and three unreachable.
    std::vector<DistanceResult> ten;
    for (auto d : {0, 0, 2, -1, 5, 1, -1, 3, 0, -1})
        ten.push_back(d < 0 ? with(std::nullopt) : with(static_cast<std::size_t>(d)));
    const auto u = distance_report(ten);
    CHECK(u.bugs == 10);
    CHECK(u.reachable == 7);
    CHECK(u.zero == 3);
    CHECK(u.zero_fraction == doctest::Approx(0.3));
    CHECK(u.reachable_fraction == doctest::Approx(0.7));
    CHECK(u.mean_distance == doctest::Approx(11.0 / 7.0));
}
