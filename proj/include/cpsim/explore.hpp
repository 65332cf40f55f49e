#pragma once

// Exploration of a partially built configuration-model graph: r-prepared
// seed sets, the Pass with its collision bookkeeping, extraction of good and
// regenerative subsets, and independent verifiers for the results.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpsim/configmodel.hpp"
#include "cpsim/graph.hpp"
#include "cpsim/rng.hpp"

namespace cpsim {

struct PreparedReport {
  std::vector<Vertex> seeds;
  std::vector<std::uint8_t> tree_ball;  // per seed: r-ball is a tree
  std::size_t overlapping_pairs = 0;
  std::optional<Vertex> first_cyclic;
  std::optional<std::pair<Vertex, Vertex>> first_overlap;
  bool prepared = true;
};

/// Literal check via ball(., r): each ball is loop-free (contains no cycle,
/// so it is a tree) and the balls are pairwise disjoint.
PreparedReport is_r_prepared(const MultiGraph& g, std::span<const Vertex> W, std::size_t r);

/// Greedy subset of W, in the given order: a seed is kept when its r-ball is
/// a tree disjoint from the balls of the seeds kept before it.
std::vector<Vertex> prepared_subset(const MultiGraph& g, std::span<const Vertex> W, std::size_t r);

/// Matches half-edges, always electing one attached to a vertex at distance
/// < r from W (lowest vertex, then lowest slot), until none is left. Then
/// reports r-preparedness of W in the partial graph.
PreparedReport build_neighbourhoods_first(SemiGraph& s, std::span<const Vertex> W, std::size_t r,
                                          Rng& rng);

struct ExploreConstants {
  std::uint64_t c_ell = 0;     // d + d^2 + ... + d^ell
  std::uint64_t c_bar_r = 0;   // 1 + (d+1) + (d+1)d + ... + (d+1)d^{r-1}
  std::uint64_t c_r_ell = 0;   // c_bar_r + c_ell
  std::uint64_t gamma_num = 0;  // gamma_r = gamma_num / gamma_den
  std::uint64_t gamma_den = 1;
  double gamma_r = 0.0;
};

/// Throws InputError unless d >= 2, r >= 1, ell >= 1.
ExploreConstants constants(std::size_t d, std::size_t r, std::size_t ell);

/// A rooted subgraph in local indices with its map back to the host graph.
struct Witness {
  MultiGraph graph;
  std::vector<Vertex> to_original;
  Vertex root = 0;    // local index of the seed
  Vertex anchor = 0;  // local index of the tree root x
};

enum class CollisionKind { kShort, kLong };

struct Collision {
  CollisionKind kind = CollisionKind::kLong;
  std::size_t iteration = 0;  // Step-1 iteration (1-based) that found it
  HalfEdge h = kNoHalfEdge;
  HalfEdge partner = kNoHalfEdge;
  Vertex at = 0;
};

struct PassOutcome {
  bool success = false;
  std::size_t seed_index = 0;
  Vertex seed = 0;
  Vertex bud = 0;
  std::vector<Collision> collisions;
  std::size_t iterations = 0;  // Step-1 draws
  std::size_t max_frontier = 0;  // max |H-bar|
  std::size_t half_edges_consumed = 0;
  std::vector<Vertex> explored;      // V-bar in discovery order, explored[0] == bud
  std::vector<Edge> explored_edges;  // E-bar
  std::size_t buds_quieted = 0;      // active before, quiet after, excluding the bud
  std::size_t fresh_after = 0;
  std::optional<Witness> witness;    // on success: B_r(seed) union (V-bar, E-bar)
};

/// State shared by the passes of one construction. Buds are the vertices at
/// distance exactly r from each seed in the partial graph at construction
/// time; fresh vertices are those still carrying all d+1 half-edges.
class PassState {
 public:
  /// Throws InputError when the seeds are not r-prepared in s.
  PassState(SemiGraph& s, std::span<const Vertex> seeds, std::size_t d, std::size_t r);

  SemiGraph& semigraph() { return s_; }
  const SemiGraph& semigraph() const { return s_; }
  std::size_t d() const { return d_; }
  std::size_t r() const { return r_; }
  std::size_t seed_count() const { return seeds_.size(); }
  Vertex seed(std::size_t i) const { return seeds_[i]; }
  std::span<const Vertex> buds(std::size_t i) const { return buds_[i]; }

  bool fresh(Vertex v) const { return fresh_[v] != 0; }
  std::size_t fresh_count() const { return fresh_count_; }
  void remove_fresh(Vertex v);
  bool bud_active(Vertex b) const { return s_.free_half_edges(b) == d_; }
  bool seed_active(std::size_t i) const;
  bool used(std::size_t i) const { return used_[i] != 0; }
  void mark_used(std::size_t i) { used_[i] = 1; }
  /// Active buds over all seeds.
  std::size_t active_bud_count() const;

 private:
  SemiGraph& s_;
  std::size_t d_ = 0;
  std::size_t r_ = 0;
  std::vector<Vertex> seeds_;
  std::vector<std::vector<Vertex>> buds_;
  std::vector<std::uint8_t> fresh_;
  std::size_t fresh_count_ = 0;
  std::vector<std::uint8_t> used_;
};

/// One Pass from seed i. Lowest-index active bud, lowest frontier half-edge.
/// H-bar holds the unmatched half-edges of explored vertices at depth < ell.
/// Throws StateError if the seed is quiet; throws InvariantViolation if the
/// Step-1 iteration bound c_ell, |H-bar| <= d^ell, or h' not in H-bar at
/// Step 2 is broken.
PassOutcome run_pass(PassState& state, std::size_t seed_index, std::size_t ell, Rng& rng);

struct GoodExtraction {
  std::vector<PassOutcome> passes;
  std::vector<std::size_t> good;  // indices into passes of the successes
  std::size_t short_collisions = 0;
  std::size_t long_collisions = 0;
  std::size_t double_collisions = 0;  // failures by a second long collision
  std::size_t min_fresh = 0;
  std::size_t fresh_floor = 0;  // n - c_{r,ell} |W|, floored at 0
  bool all_buds_initially_active = true;
  bool truncated = false;  // stopped on reaching the target
  bool target_met = false;
  /// successes >= gamma_r |W| - shorts - doubles; only meaningful when
  /// all buds started active and the run was not truncated.
  bool bookkeeping_ok = true;
};

/// Runs passes over the seeds in order (each active, unused seed once) until
/// `target` successes are found or no seed is left. Asserts the fresh-vertex
/// floor and the at-most-two-quieted-buds rule after every pass. The floor
/// counts built_seed_count neighbourhoods (default |W|) as already built, for
/// when W is a subset of the seeds passed to build_neighbourhoods_first.
/// Throws InputError when W is not r-prepared in s.
GoodExtraction extract_good_subset(SemiGraph& s, std::span<const Vertex> W, std::size_t d,
                                   std::size_t ell, std::size_t r, std::size_t target, Rng& rng,
                                   std::size_t built_seed_count = 0);

/// Some x at distance exactly r from the root with (x, w) embedding a rooted
/// pruned ell-tree (T_0 itself when ell == 0).
bool verify_favourable(const Witness& w, std::size_t d, std::size_t ell, std::size_t r);

/// For each (ell, r)-favourable witness, picks a neighbour y of a bud at
/// distance r+1 from the seed with (y, w) embedding (o, T_{ell-1}). Returns
/// witnesses at (ell-1, r+1) with anchor y. Throws InputError if none exists.
std::vector<Witness> good_to_regenerative(std::span<const Witness> witnesses, std::size_t d,
                                          std::size_t ell, std::size_t r);

/// Pairwise vertex-disjoint, each witness a subgraph of g containing its
/// seed W[i] as root, with some x at distance exactly r from the root such
/// that (x, witness) embeds (o, T_ell).
bool verify_regenerative(const MultiGraph& g, std::span<const Vertex> W,
                         std::span<const Witness> witnesses, std::size_t d, std::size_t ell,
                         std::size_t r);

struct PosthocWitness {
  Witness witness;
  std::vector<EdgeId> edges;  // ids in g of the witness edges
};

/// Greedy search on a complete graph, not the construction-time procedure:
/// for each candidate v in order, looks for x at distance r (among unclaimed
/// vertices) hosting T_ell and claims the path and tree. Stops after `want`.
std::vector<PosthocWitness> posthoc_regenerative(const MultiGraph& g,
                                                 std::span<const Vertex> candidates,
                                                 std::size_t d, std::size_t ell, std::size_t r,
                                                 std::size_t want);

}  // namespace cpsim
