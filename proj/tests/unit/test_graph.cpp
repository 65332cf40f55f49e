#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cpsim/error.hpp"
#include "cpsim/graph.hpp"

using namespace cpsim;

namespace {

MultiGraph cycle(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    e.push_back({static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n)});
  return MultiGraph(n, e);
}

MultiGraph random_multigraph(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
  std::vector<Edge> e;
  for (std::size_t i = 0; i < m; ++i) e.push_back({pick(rng), pick(rng)});
  return MultiGraph(n, e);
}

// Floyd-Warshall on the simple adjacency, as an independent distance oracle.
std::vector<std::vector<std::size_t>> all_pairs(const MultiGraph& g) {
  const std::size_t n = g.vertex_count();
  const std::size_t inf = n + 1;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const Edge& e : g.edges())
    if (!e.is_loop()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

std::size_t geometric(std::size_t d, std::size_t ell) {
  std::size_t s = 0, p = 1;
  for (std::size_t i = 0; i <= ell; ++i, p *= d) s += p;
  return s;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("degree counts loops twice") {
  CHECK(degree(MultiGraph(1, {{0, 0}}), 0) == 2);
  MultiGraph k2(2, {{0, 1}});
  CHECK(degree(k2, 0) == 1);
  CHECK(degree(k2, 1) == 1);
  MultiGraph g(2, {{0, 1}, {1, 0}, {0, 0}});
  CHECK(degree(g, 0) == 4);
  CHECK(degree(g, 1) == 2);
  CHECK_THROWS_AS(degree(g, 2), InputError);
}

TEST_CASE("out-of-range endpoint rejected") {
  CHECK_THROWS_AS(MultiGraph(2, {{0, 2}}), InputError);
  CHECK_THROWS_AS(RootedGraph(MultiGraph(2, {}), 2), InputError);
}

TEST_CASE("oriented edges") {
  MultiGraph g(3, {{0, 1}, {1, 2}, {2, 2}});
  CHECK(g.oriented_edge_count() == 6);
  for (std::uint32_t i = 0; i < g.oriented_edge_count(); ++i) {
    OrientedEdge oe = OrientedEdge::from_index(i);
    CHECK(oe.index() == i);
    CHECK(g.v0(oe) == g.v1(oe.flipped()));
    CHECK(g.v1(oe) == g.v0(oe.flipped()));
    const Edge& u = g.u(oe);
    CHECK(std::set<Vertex>{u.u, u.v} == std::set<Vertex>{g.v0(oe), g.v1(oe)});
  }
  for (Vertex v = 0; v < 3; ++v) {
    CHECK(g.out_edges(v).size() == g.degree(v));
    for (OrientedEdge oe : g.out_edges(v)) CHECK(g.v0(oe) == v);
  }
}

TEST_CASE("handshake on random multigraphs") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    MultiGraph g = random_multigraph(rng, 1 + rep % 12, rep % 20);
    std::size_t sum = 0;
    for (Vertex v = 0; v < g.vertex_count(); ++v) sum += degree(g, v);
    CHECK(sum == 2 * g.edge_count());
  }
}

TEST_CASE("dist") {
  MultiGraph c6 = cycle(6);
  CHECK(dist(c6, 2, 2) == 0u);
  CHECK(dist(c6, 0, 1) == 1u);
  CHECK(dist(c6, 0, 3) == 3u);
  MultiGraph split(3, {{0, 1}, {2, 2}});
  CHECK_FALSE(dist(split, 0, 2).has_value());
  // a loop never shortens a path
  MultiGraph looped(3, {{0, 0}, {0, 1}, {1, 2}});
  CHECK(dist(looped, 0, 2) == 2u);
}

TEST_CASE("dist matches Floyd-Warshall and obeys the triangle inequality") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rep % 11;
    MultiGraph g = random_multigraph(rng, n, rep % 15);
    auto oracle = all_pairs(g);
    std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, n + 1));
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = 0; v < n; ++v) {
        auto x = dist(g, u, v);
        if (x) d[u][v] = *x;
        CHECK(d[u][v] == oracle[u][v]);
      }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) CHECK(d[a][c] <= d[a][b] + d[b][c]);
  }
}

TEST_CASE("ball") {
  MultiGraph looped(3, {{0, 0}, {0, 1}, {1, 2}});
  Subgraph b0 = ball(looped, 0, 0);
  CHECK(b0.graph.vertex_count() == 1);
  CHECK(b0.graph.edge_count() == 1);
  CHECK(b0.to_original == std::vector<Vertex>{0});

  std::vector<Edge> star;
  for (Vertex i = 1; i <= 5; ++i) star.push_back({0, i});
  Subgraph bs = ball(MultiGraph(6, star), 0, 1);
  CHECK(bs.graph.vertex_count() == 6);
  CHECK(bs.graph.edge_count() == 5);

  Subgraph bc = ball(cycle(5), 0, 2);
  CHECK(bc.graph.vertex_count() == 5);
  CHECK(bc.graph.edge_count() == 5);  // induced: C_5 keeps all its edges
  Subgraph bc1 = ball(cycle(5), 0, 1);
  CHECK(bc1.graph.vertex_count() == 3);
  CHECK(bc1.graph.edge_count() == 2);
  CHECK(bc1.to_original[0] == 0);
}

TEST_CASE("regular tree sizes and degree profile") {
  CHECK(build_regular_tree(3, 0).graph.vertex_count() == 1);
  CHECK(build_regular_tree(3, 2).graph.vertex_count() == 13);
  RootedGraph t = build_regular_tree(2, 3);
  CHECK(t.graph.vertex_count() == 15);
  CHECK(degree(t.graph, t.root) == 2);
  for (std::size_t d = 2; d <= 4; ++d)
    for (std::size_t ell = 0; ell <= 4; ++ell) {
      RootedGraph tr = build_regular_tree(d, ell);
      CHECK(tr.graph.vertex_count() == geometric(d, ell));
      CHECK(is_tree(tr.graph));
      auto dd = distances_from(tr.graph, tr.root);
      for (Vertex v = 0; v < tr.graph.vertex_count(); ++v) {
        std::size_t expect = v == tr.root ? (ell == 0 ? 0 : d)
                             : static_cast<std::size_t>(dd[v]) == ell ? 1
                                                                      : d + 1;
        CHECK(degree(tr.graph, v) == expect);
      }
    }
}

TEST_CASE("hat tree") {
  CHECK(build_hat_tree(3, 1).graph.vertex_count() == 5);
  CHECK(build_hat_tree(3, 2).graph.vertex_count() == 17);
  for (std::size_t d = 2; d <= 5; ++d) CHECK(build_hat_tree(d, 0).graph.vertex_count() == 1);
  for (std::size_t d = 2; d <= 4; ++d)
    for (std::size_t ell = 1; ell <= 4; ++ell) {
      RootedGraph h = build_hat_tree(d, ell);
      std::size_t pow = 1;
      for (std::size_t i = 0; i < ell; ++i) pow *= d;
      CHECK(h.graph.vertex_count() == 1 + (d + 1) * (pow - 1) / (d - 1));
      CHECK(is_tree(h.graph));
      CHECK(degree(h.graph, h.root) == d + 1);
    }
}

TEST_CASE("pruned trees") {
  RootedGraph full = build_regular_tree(3, 2);
  // edge i joins vertex i+1 to its parent; the last edge is a leaf edge
  RootedGraph leafless = build_pruned_tree(3, 2, static_cast<EdgeId>(full.graph.edge_count() - 1));
  CHECK(leafless.graph.vertex_count() == 12);
  CHECK(build_pruned_tree(3, 2, 0).graph.vertex_count() == 9);
  for (EdgeId e = 0; e < 3; ++e) {
    RootedGraph p = build_pruned_tree(3, 1, e);
    CHECK(p.graph.vertex_count() == 3);
    CHECK(degree(p.graph, p.root) == 2);
  }
  CHECK_THROWS_AS(build_pruned_tree(3, 2, 12), InputError);
  for (EdgeId e = 0; e < full.graph.edge_count(); ++e) {
    RootedGraph p = build_pruned_tree(3, 2, e);
    CHECK(is_tree(p.graph));
  }
  CHECK(pruned_tree_catalog(3, 3).size() == 3);
}

TEST_CASE("embeds") {
  RootedGraph single(MultiGraph(1, {}), 0);
  CHECK(embeds(RootedGraph(cycle(4), 2), single).has_value());

  RootedGraph host = build_hat_tree(3, 2);
  RootedGraph pattern = build_regular_tree(3, 2);
  auto w = embeds(host, pattern);
  REQUIRE(w.has_value());
  CHECK(is_embedding(host, pattern, *w));

  RootedGraph triangle(cycle(3), 0);
  CHECK_FALSE(embeds(triangle, build_regular_tree(3, 1)).has_value());
  // two non-adjacent leaves cannot map into a triangle either
  CHECK_FALSE(embeds(triangle, build_regular_tree(2, 1)).has_value());
  CHECK(embeds(RootedGraph(cycle(4), 0), build_regular_tree(2, 1)).has_value());
}

TEST_CASE("embedding witnesses survive independent checking") {
  std::mt19937_64 rng(3);
  int found = 0;
  for (int rep = 0; rep < 150; ++rep) {
    MultiGraph g = random_multigraph(rng, 10, 12 + rep % 6);
    RootedGraph host(g, 0);
    for (std::size_t ell = 1; ell <= 2; ++ell) {
      RootedGraph pat = build_regular_tree(2, ell);
      auto w = embeds(host, pat);
      if (w) {
        ++found;
        CHECK(is_embedding(host, pat, *w));
        // adding an isolated vertex keeps the witness valid
        std::vector<Edge> e(g.edges().begin(), g.edges().end());
        RootedGraph bigger(MultiGraph(11, e), 0);
        CHECK(is_embedding(bigger, pat, *w));
      }
    }
  }
  CHECK(found > 0);
}

TEST_CASE("is_embedding rejects bad witnesses") {
  RootedGraph host = build_hat_tree(3, 1);
  RootedGraph pat = build_regular_tree(2, 1);
  std::vector<Vertex> good{0, 1, 2};
  CHECK(is_embedding(host, pat, good));
  std::vector<Vertex> collapsed{0, 1, 1};
  CHECK_FALSE(is_embedding(host, pat, collapsed));
  std::vector<Vertex> unrooted{1, 0, 2};
  CHECK_FALSE(is_embedding(host, pat, unrooted));
}

}
