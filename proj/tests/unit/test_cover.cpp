#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cpsim/cover.hpp"
#include "cpsim/error.hpp"
#include "cpsim/stats.hpp"

using namespace cpsim;

namespace {

MultiGraph cycle(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    e.push_back({static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n)});
  return MultiGraph(n, e);
}

MultiGraph k4() { return MultiGraph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}); }

MultiGraph random_multigraph(Rng& rng, std::size_t n, std::size_t m) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < m; ++i)
    e.push_back({static_cast<Vertex>(uniform_index(rng, n)),
                 static_cast<Vertex>(uniform_index(rng, n))});
  return MultiGraph(n, e);
}

// Counts non-backtracking walks of each length from x, independently of the
// cover builder, by dynamic programming over oriented edges.
std::size_t nb_paths_up_to(const MultiGraph& g, Vertex x, std::size_t depth) {
  std::vector<std::size_t> ways(g.oriented_edge_count(), 0);
  for (OrientedEdge oe : g.out_edges(x)) ways[oe.index()] += 1;
  std::size_t total = 1;
  for (std::size_t len = 1; len <= depth; ++len) {
    for (std::size_t w : ways) total += w;
    if (len == depth) break;
    std::vector<std::size_t> next(ways.size(), 0);
    for (std::uint32_t i = 0; i < ways.size(); ++i) {
      if (!ways[i]) continue;
      OrientedEdge oe = OrientedEdge::from_index(i);
      for (OrientedEdge nx : g.out_edges(g.v1(oe)))
        if (nx.edge != oe.edge) next[nx.index()] += ways[i];
    }
    ways = next;
  }
  return total;
}

}  // namespace

TEST_SUITE("cover") {

TEST_CASE("cover of a tree is the ball") {
  RootedGraph t = build_hat_tree(2, 3);
  for (std::size_t R = 0; R <= 4; ++R) {
    CoverTree c = build_cover(t.graph, 1, R);
    Subgraph b = ball(t.graph, 1, R);
    CHECK(c.size() == b.graph.vertex_count());
    for (Vertex v = 0; v < t.graph.vertex_count(); ++v)
      CHECK(c.fiber(v).size() == (std::find(b.to_original.begin(), b.to_original.end(), v) !=
                                  b.to_original.end()));
    CHECK(check_cover(c, t.graph).empty());
  }
}

TEST_CASE("cover of C_3 is a path") {
  for (std::size_t R = 0; R <= 6; ++R) {
    CoverTree c = build_cover(cycle(3), 0, R);
    CHECK(c.size() == 2 * R + 1);
    CHECK(c.tree().max_degree() <= 2);
    CHECK(check_cover(c, cycle(3)).empty());
  }
}

TEST_CASE("cover of a loop") {
  MultiGraph loop(1, {{0, 0}});
  CoverTree c = build_cover(loop, 0, 1);
  CHECK(c.size() == 3);
  CHECK(c.fiber(0).size() == 3);
  CHECK(check_cover(c, loop).empty());
}

TEST_CASE("node cap") {
  CHECK_THROWS_AS(CoverTree(k4(), 0, 30, 1000), InputError);
  CHECK_THROWS_AS(build_cover(k4(), 9, 1), InputError);
}

TEST_CASE("structure on random multigraphs") {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rep % 8;
    MultiGraph g = random_multigraph(rng, n, rep % 10);
    Vertex x = static_cast<Vertex>(uniform_index(rng, n));
    std::size_t R = rep % 5;
    CoverTree c = build_cover(g, x, R);
    CHECK(c.size() == nb_paths_up_to(g, x, R));
    CHECK(check_cover(c, g) == "");
    for (CoverNode a = 0; a < c.size(); ++a)
      for (CoverNode b = a; b < c.size(); b += 3) {
        auto dg = dist(g, c.psi(a), c.psi(b));
        REQUIRE(dg.has_value());
        CHECK(c.tree_distance(a, b) >= *dg);
      }
  }
}

TEST_CASE("check_cover detects corruption") {
  // a cover built on one graph fails against a graph with different edges
  CoverTree c = build_cover(cycle(4), 0, 2);
  CHECK_FALSE(check_cover(c, MultiGraph(4, {{0, 2}, {1, 3}, {0, 1}, {2, 3}})).empty());
}

TEST_CASE("project") {
  CoverTree c = build_cover(cycle(3), 0, 3);
  CHECK(project(c, std::vector<CoverNode>{}).empty());
  CHECK(project(c, std::vector<CoverNode>{0}) == VertexSet{0});
  std::vector<CoverNode> two;
  for (CoverNode n = 1; n < c.size() && two.size() < 2; ++n)
    if (two.empty() || c.psi(n) != c.psi(two[0])) two.push_back(n);
  VertexSet expect{c.psi(two[0]), c.psi(two[1])};
  std::sort(expect.begin(), expect.end());
  CHECK(project(c, two) == expect);
  std::vector<CoverNode> clash{c.fiber(1)[0], c.fiber(1)[1]};
  CHECK_FALSE(in_omega(c, clash));
  CHECK_THROWS_AS(project(c, clash), InvariantViolation);
}

TEST_CASE("constrained process basics") {
  Rng rng(5);
  CoverTree c3 = build_cover(cycle(3), 0, 4);
  CoverTrajectory e = constrained_cp(c3, 1.0, std::vector<CoverNode>{}, rng, 10.0);
  REQUIRE(e.extinction_time.has_value());
  CHECK(*e.extinction_time == 0.0);
  std::vector<CoverNode> clash{c3.fiber(1)[0], c3.fiber(1)[1]};
  CHECK_THROWS_AS(constrained_cp(c3, 1.0, clash, rng, 10.0), InputError);

  CoverTree single = build_cover(MultiGraph(1, {}), 0, 3);
  REQUIRE(single.size() == 1);
  std::vector<double> tau;
  for (int i = 0; i < 20000; ++i)
    tau.push_back(*constrained_cp(single, 1.0, std::vector<CoverNode>{0}, rng, kForever).extinction_time);
  auto m = stats::mean_se(tau);
  CHECK(std::abs(m.mean - 1.0) < 4 * m.se);
}

TEST_CASE("projection never has more than one particle per fiber") {
  Rng rng(6);
  CoverTree c = build_cover(k4(), 0, 6);
  std::vector<double> times{0.25, 0.5, 1.0, 2.0};
  for (int i = 0; i < 200; ++i) {
    CoverTrajectory tr = constrained_cp(c, 2.0, std::vector<CoverNode>{0}, rng, 2.5, times);
    REQUIRE(tr.projected.size() == times.size());
    CHECK(tr.peak <= 4);
  }
}

TEST_CASE("projection law on small connected graphs") {
  std::vector<MultiGraph> graphs{cycle(3), MultiGraph(2, {{0, 1}, {0, 1}}),
                                 MultiGraph(3, {{0, 1}, {1, 2}, {1, 1}})};
  const int reps = 20000;
  Rng rng(7);
  for (const MultiGraph& g : graphs) {
    CoverTree c = build_cover(g, 0, 8);
    ContactSimulator sim(g);
    for (double t : {0.5, 1.0, 2.0}) {
      std::size_t a = 0, b = 0;
      for (int i = 0; i < reps; ++i) {
        auto tr = constrained_cp(c, 1.0, std::vector<CoverNode>{0}, rng, t);
        a += !tr.censored;
        SimulationOptions so;
        so.horizon = t;
        b += !sim.run(1.0, VertexSet{0}, rng, so).censored;
      }
      double z = stats::two_proportion_z(a, reps, b, reps);
      CHECK(std::abs(z) < 3.29);
    }
  }
}

TEST_CASE("spread placement") {
  RootedGraph t = build_hat_tree(3, 4);
  auto one = spread_placement(t, 1, 1);
  CHECK(one == std::vector<Vertex>{t.root});
  auto four = spread_placement(t, 4, 2);
  CHECK(four.size() == 4);
  auto depth = distances_from(t.graph, t.root);
  for (Vertex v : four) CHECK(depth[v] <= 2);
  for (std::size_t i = 0; i < four.size(); ++i)
    for (std::size_t j = i + 1; j < four.size(); ++j) CHECK(four[i] != four[j]);
  CHECK(spread_placement(t, 0, 2).empty());
  CHECK_THROWS_AS(spread_placement(t, 6, 1), InputError);
}

TEST_CASE("domination: identical process and empty start") {
  DominationOptions opt;
  opt.depth = 4;
  opt.workers = 1;
  RootedGraph t = build_hat_tree(3, 4);
  std::vector<double> grid{0.5, 1, 2};
  auto same = domination_check(t.graph, 0.3, VertexSet{t.root}, 5000, grid, opt);
  CHECK_FALSE(same.any_violation);
  for (auto& p : same.points) CHECK(std::abs(p.z) < 4);
  auto empty = domination_check(k4(), 0.2, VertexSet{}, 100, grid, opt);
  for (auto& p : empty.points) {
    CHECK(p.graph_survival == 0.0);
    CHECK(p.tree_survival == 0.0);
  }
  CHECK(empty.caveat.find("depth 4") != std::string::npos);
  MultiGraph star(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  CHECK_THROWS_AS(domination_check(star, 0.2, VertexSet{0}, 10, grid, opt), InputError);
}

TEST_CASE("domination on K_4") {
  DominationOptions opt;
  opt.workers = 1;
  std::vector<double> grid{1, 2, 4};
  auto rep = domination_check(k4(), 0.2, VertexSet{0, 1, 2, 3}, 5000, grid, opt);
  CHECK_FALSE(rep.any_violation);
  CHECK(rep.contamination < 0.01);
  CHECK(rep.tree_initial.size() == 4);
  auto kap = kappa_domination_check(k4(), 0.2, 0, 5000, opt);
  CHECK_FALSE(kap.any_violation);
  CHECK(kap.depth > kap.graph_max_kappa);
  CHECK(kap.contamination < 0.01);
  auto kempty = kappa_domination_check(MultiGraph(1, {}), 0.2, 0, 0, opt);
  CHECK(kempty.points.size() == 1);
}

}
