#pragma once

// Configuration-model sampling of (d+1)-regular multigraphs by half-edge
// matching, with a pluggable rule for which half-edge is matched next.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cpsim/graph.hpp"
#include "cpsim/rng.hpp"

namespace cpsim {

/// Half-edge id: vertex * slots + slot.
using HalfEdge = std::uint32_t;
inline constexpr HalfEdge kNoHalfEdge = static_cast<HalfEdge>(-1);

/// Partially matched half-edge structure (V, E, H). Every half-edge is either
/// glued into exactly one edge of E or still unmatched in H.
class SemiGraph {
 public:
  SemiGraph() = default;
  SemiGraph(std::size_t n, std::size_t slots_per_vertex);

  std::size_t vertex_count() const { return n_; }
  std::size_t slots_per_vertex() const { return slots_; }
  std::size_t total_half_edges() const { return partner_.size(); }

  Vertex vertex_of(HalfEdge h) const { return static_cast<Vertex>(h / slots_); }
  std::size_t slot_of(HalfEdge h) const { return h % slots_; }
  HalfEdge half_edge(Vertex v, std::size_t slot) const {
    return static_cast<HalfEdge>(v * slots_ + slot);
  }

  bool is_unmatched(HalfEdge h) const { return h < pos_.size() && pos_[h] != kNoPos; }
  /// H in internal pool order; pool_position(h) indexes into it.
  std::span<const HalfEdge> unmatched() const { return pool_; }
  std::size_t pool_position(HalfEdge h) const { return pos_[h]; }
  std::size_t unmatched_count() const { return pool_.size(); }
  std::size_t free_half_edges(Vertex v) const { return free_[v]; }
  /// Unmatched half-edges at v in slot order.
  std::vector<HalfEdge> unmatched_at(Vertex v) const;
  /// Lowest-index unmatched half-edge, or kNoHalfEdge when H is empty.
  HalfEdge lowest_unmatched() const;
  HalfEdge partner(HalfEdge h) const { return partner_[h]; }

  /// Realised edges in formation order; edge i glues halves()[i].
  std::span<const Edge> edges() const { return edges_; }
  std::span<const std::pair<HalfEdge, HalfEdge>> halves() const { return halves_; }
  /// Neighbours of v in (V, E), one entry per incident edge end.
  std::span<const Vertex> adjacency(Vertex v) const { return adj_[v]; }

  /// E <- E + {h + h2}, H <- H \ {h, h2}. Throws StateError unless both are
  /// distinct members of H. Returns the new edge id.
  EdgeId match(HalfEdge h, HalfEdge h2);

  MultiGraph to_multigraph() const { return MultiGraph(n_, edges_); }

  /// Checks conservation: 2|E| + |H| equals the initial half-edge count and
  /// every half-edge is in exactly one place. Throws InvariantViolation.
  void check_invariants() const;

 private:
  static constexpr std::uint32_t kNoPos = static_cast<std::uint32_t>(-1);

  std::size_t n_ = 0;
  std::size_t slots_ = 0;
  std::vector<HalfEdge> pool_;
  std::vector<std::uint32_t> pos_;
  std::vector<HalfEdge> partner_;
  std::vector<std::uint32_t> free_;
  std::vector<Edge> edges_;
  std::vector<std::pair<HalfEdge, HalfEdge>> halves_;
  std::vector<std::vector<Vertex>> adj_;
  mutable HalfEdge cursor_ = 0;
};

/// Chooses the elected half-edge from the current state, or nullopt to fall
/// back to the default order (lowest unmatched half-edge). The returned
/// half-edge must be unmatched.
using ElectionPolicy = std::function<std::optional<HalfEdge>(const SemiGraph&)>;

struct FormedEdge {
  HalfEdge elected = kNoHalfEdge;
  HalfEdge partner = kNoHalfEdge;
  Vertex u = 0;  // vertex of the elected half-edge
  Vertex v = 0;  // vertex of the partner
  EdgeId edge = 0;
};

/// Semigraph on n vertices with d+1 unmatched half-edges each.
/// Throws InputError when n(d+1) is odd.
SemiGraph fresh_semigraph(std::size_t n, std::size_t d);

/// Matches the given elected half-edge with a partner drawn uniformly from
/// H \ {elected}. Throws StateError when |H| < 2 or elected is not in H.
FormedEdge match_elected(SemiGraph& s, HalfEdge elected, Rng& rng);

/// One step of the construction: elect (policy or default order), then
/// match_elected. Throws InvariantViolation if the policy returns a
/// half-edge outside H.
FormedEdge match_step(SemiGraph& s, const ElectionPolicy& policy, Rng& rng);

/// Runs match_step until H is empty. The output is a uniform perfect matching
/// of the n(d+1) half-edges regardless of the policy.
MultiGraph sample_regular(std::size_t n, std::size_t d, Rng& rng,
                          const ElectionPolicy& policy = {});

/// Completes a semigraph to a full matching with the given policy.
MultiGraph complete_matching(SemiGraph& s, Rng& rng, const ElectionPolicy& policy = {});

/// Number of cycles of length <= r, counted up to rotation and reflection.
/// A loop is a cycle of length 1, each pair of parallel edges a cycle of
/// length 2, and longer cycles have distinct vertices and are distinguished
/// by their edge sets.
std::uint64_t count_short_cycles(const MultiGraph& g, std::size_t r);

}  // namespace cpsim
