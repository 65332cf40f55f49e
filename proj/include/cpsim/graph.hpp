#pragma once

// Finite multigraphs with loops and parallel edges.
//
// Degree follows the loop-doubling convention: a loop at v contributes 2.
// Every unoriented edge yields two oriented edges, so a loop at v yields two
// oriented edges that both start (and end) at v, and k parallel edges between
// u and v yield 2k oriented edges.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cpsim {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr Vertex kNoVertex = static_cast<Vertex>(-1);

struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  bool is_loop() const { return u == v; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// An unoriented edge together with a direction bit. Direction 0 runs
/// edge.u -> edge.v, direction 1 runs edge.v -> edge.u.
struct OrientedEdge {
  EdgeId edge = 0;
  std::uint8_t dir = 0;

  /// Dense index in [0, 2m).
  std::uint32_t index() const { return 2 * edge + dir; }
  static OrientedEdge from_index(std::uint32_t i) {
    return {i / 2, static_cast<std::uint8_t>(i & 1u)};
  }
  OrientedEdge flipped() const { return {edge, static_cast<std::uint8_t>(dir ^ 1u)}; }

  friend bool operator==(const OrientedEdge&, const OrientedEdge&) = default;
};

class MultiGraph {
 public:
  MultiGraph() = default;
  /// Throws InputError if an endpoint is out of range.
  MultiGraph(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t oriented_edge_count() const { return 2 * edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  Vertex v0(OrientedEdge oe) const { return oe.dir ? edges_[oe.edge].v : edges_[oe.edge].u; }
  Vertex v1(OrientedEdge oe) const { return oe.dir ? edges_[oe.edge].u : edges_[oe.edge].v; }
  const Edge& u(OrientedEdge oe) const { return edges_[oe.edge]; }

  /// Oriented edges whose start vertex is v. A loop appears twice.
  std::span<const OrientedEdge> out_edges(Vertex v) const {
    return {out_.data() + out_offset_[v], out_.data() + out_offset_[v + 1]};
  }
  /// Degree with loops counted twice; equals out_edges(v).size().
  std::size_t degree(Vertex v) const { return out_offset_[v + 1] - out_offset_[v]; }
  std::size_t max_degree() const { return max_degree_; }

  /// Distinct neighbours w != v, sorted.
  std::span<const Vertex> neighbours(Vertex v) const {
    return {nbr_.data() + nbr_offset_[v], nbr_.data() + nbr_offset_[v + 1]};
  }
  std::size_t loop_count(Vertex v) const { return loops_[v]; }
  bool has_loop(Vertex v) const { return loops_[v] > 0; }

  /// Neighbour relation: for u != v, joined by at least one edge; for u == v,
  /// carries a loop.
  bool adjacent(Vertex a, Vertex b) const;

  bool valid(Vertex v) const { return v < n_; }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offset_{0};
  std::vector<OrientedEdge> out_;
  std::vector<std::size_t> nbr_offset_{0};
  std::vector<Vertex> nbr_;
  std::vector<std::uint32_t> loops_;
  std::size_t max_degree_ = 0;
};

struct RootedGraph {
  MultiGraph graph;
  Vertex root = 0;

  RootedGraph() = default;
  /// Throws InputError if root is not a vertex of graph.
  RootedGraph(MultiGraph g, Vertex r);
};

/// Subgraph together with the map from its vertex indices back to the parent.
struct Subgraph {
  MultiGraph graph;
  std::vector<Vertex> to_original;
};

inline constexpr std::int64_t kUnreachable = -1;

std::size_t degree(const MultiGraph& g, Vertex v);

/// Shortest-path length, or nullopt when v is not reachable from u.
std::optional<std::size_t> dist(const MultiGraph& g, Vertex u, Vertex v);

/// BFS distances from `source`, stopping after max_radius layers (negative
/// means unbounded). Unreached vertices hold kUnreachable.
std::vector<std::int64_t> distances_from(const MultiGraph& g, Vertex source,
                                         std::int64_t max_radius = -1);

/// Multi-source variant: distance to the nearest source.
std::vector<std::int64_t> distances_from(const MultiGraph& g, std::span<const Vertex> sources,
                                         std::int64_t max_radius = -1);

/// Induced subgraph on `vertices` (order preserved in to_original). Keeps every
/// edge, loop and parallel copy whose endpoints both lie in the set.
Subgraph induced_subgraph(const MultiGraph& g, std::span<const Vertex> vertices);

/// Induced subgraph on {w : dist(v, w) <= r}; index 0 of the result is v.
Subgraph ball(const MultiGraph& g, Vertex v, std::size_t r);

/// True iff g is connected and has exactly n - 1 edges (hence no loops and
/// no parallel edges).
bool is_tree(const MultiGraph& g);
bool is_connected(const MultiGraph& g);

/// The d-ary tree of height ell: root degree d, internal degree d+1, leaves at
/// depth ell. Vertices are numbered in BFS order, root 0, and edge i joins
/// vertex i+1 to its parent.
RootedGraph build_regular_tree(std::size_t d, std::size_t ell);

/// Ball of radius ell in the (d+1)-regular tree (root degree d+1). Same BFS
/// numbering convention as build_regular_tree.
RootedGraph build_hat_tree(std::size_t d, std::size_t ell);

/// Root component of build_regular_tree(d, ell) after deleting edge
/// `removed_edge`, rooted at the original root. Vertex order is preserved.
RootedGraph build_pruned_tree(std::size_t d, std::size_t ell, EdgeId removed_edge);

/// One representative per rooted-isomorphism class of pruned ell-trees:
/// entry k-1 removes an edge between depths k-1 and k, for k = 1..ell.
std::vector<RootedGraph> pruned_tree_catalog(std::size_t d, std::size_t ell);

/// Root-preserving injective map f with u ~ v  <=>  f(u) ~ f(v) (the
/// induced notion; loops must match too). Returns a witness indexed by
/// pattern vertex, or nullopt.
///
/// Backtracking in BFS order from the pattern root with degree pruning. For
/// tree patterns each candidate is additionally filtered by a memoised
/// subtree-hosting test (bipartite matching of children), which is exact
/// when the host is a tree. Intended for desk-scale tree patterns; general
/// patterns on adversarial hosts can take exponential time.
std::optional<std::vector<Vertex>> embeds(const RootedGraph& host, const RootedGraph& pattern);
std::optional<std::vector<Vertex>> embeds(const MultiGraph& host, Vertex host_root,
                                          const RootedGraph& pattern);

/// Independent check that `witness` is an embedding of pattern into host.
bool is_embedding(const RootedGraph& host, const RootedGraph& pattern,
                  std::span<const Vertex> witness);

}  // namespace cpsim
