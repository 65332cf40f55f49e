#pragma once

// Truncated universal cover of a multigraph and the fiber-constrained contact
// process on it, plus Monte Carlo domination reports comparing a bounded-degree
// graph against the (d+1)-regular tree.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpsim/cp.hpp"
#include "cpsim/graph.hpp"
#include "cpsim/rng.hpp"

namespace cpsim {

using CoverNode = std::uint32_t;

/// Tree of non-backtracking paths from a base vertex x, truncated at depth R.
/// Node 0 is the empty path; every other node is its parent's path extended
/// by one oriented edge. Nodes are stored in BFS order.
class CoverTree {
 public:
  static constexpr std::size_t kDefaultNodeCap = 5'000'000;

  /// Throws InputError if the node count would exceed node_cap.
  CoverTree(const MultiGraph& g, Vertex base, std::size_t depth,
            std::size_t node_cap = kDefaultNodeCap);

  std::size_t size() const { return parent_.size(); }
  std::size_t depth_cap() const { return depth_cap_; }
  Vertex base() const { return base_; }

  CoverNode parent(CoverNode c) const { return parent_[c]; }
  /// Last oriented edge of the path; meaningless for the root.
  OrientedEdge via(CoverNode c) const { return via_[c]; }
  std::size_t depth(CoverNode c) const { return depth_[c]; }
  /// psi: the end vertex of the path (the base vertex for the root).
  Vertex psi(CoverNode c) const { return psi_[c]; }
  std::span<const CoverNode> fiber(Vertex v) const {
    return {fiber_nodes_.data() + fiber_offset_[v], fiber_nodes_.data() + fiber_offset_[v + 1]};
  }

  /// The tree itself: edge c-1 joins node c to its parent.
  const MultiGraph& tree() const { return tree_; }
  std::size_t tree_distance(CoverNode a, CoverNode b) const;

  /// Oriented edges of g assigned to the neighbour slots of c: the reverse
  /// of via(c) for the parent, then via(child) for each child.
  std::vector<OrientedEdge> neighbourhood_image(CoverNode c) const;

 private:
  Vertex base_ = 0;
  std::size_t depth_cap_ = 0;
  std::vector<CoverNode> parent_;
  std::vector<OrientedEdge> via_;
  std::vector<std::uint32_t> depth_;
  std::vector<Vertex> psi_;
  std::vector<std::size_t> fiber_offset_;
  std::vector<CoverNode> fiber_nodes_;
  MultiGraph tree_;
};

CoverTree build_cover(const MultiGraph& g, Vertex x, std::size_t depth);

/// Re-checks the structural properties: tree with degree <= max degree of g,
/// non-backtracking paths, and (for loop-free g, nodes below the depth cap)
/// the bijection between the neighbourhood of c and the oriented edges out of
/// psi(c). Returns an empty string when all hold, else the first violation.
std::string check_cover(const CoverTree& c, const MultiGraph& g);

/// Nodes with at most one occupied node per fiber.
using FiberConfiguration = std::vector<CoverNode>;

bool in_omega(const CoverTree& c, std::span<const CoverNode> zeta);

/// pi(zeta): vertices whose fiber is occupied. Throws InvariantViolation when a
/// fiber is doubly occupied.
VertexSet project(const CoverTree& c, std::span<const CoverNode> zeta);

struct CoverTrajectory {
  std::optional<double> extinction_time;
  bool censored = false;
  std::size_t peak = 0;
  bool touched_boundary = false;  // a depth-cap node was ever occupied
  std::size_t max_depth = 0;
  std::uint64_t suppressed = 0;    // births blocked by the fiber constraint
  std::vector<VertexSet> projected;  // pi(zeta_t) at the sample times
};

/// Contact process on the cover in which any birth onto a node whose fiber is
/// already occupied is suppressed (still consuming the event). Depth-cap
/// nodes are leaves. Throws InputError if B is not in Omega_T.
class ConstrainedSimulator {
 public:
  explicit ConstrainedSimulator(const CoverTree& c);
  CoverTrajectory run(double lambda, std::span<const CoverNode> initial, Rng& rng,
                      double horizon, std::span<const double> sample_times = {});

 private:
  void occupy(CoverNode n);
  void vacate(CoverNode n);

  const CoverTree& c_;
  std::vector<CoverNode> occupied_;
  std::vector<std::uint32_t> position_;
  std::vector<std::uint8_t> fiber_taken_;
  std::size_t degree_sum_ = 0;
};

CoverTrajectory constrained_cp(const CoverTree& c, double lambda, std::span<const CoverNode> B,
                               Rng& rng, double horizon,
                               std::span<const double> sample_times = {});

/// Greedy farthest-point placement of k vertices among those within
/// `radius` of the root of a rooted tree (first pick: the root; ties: lowest
/// index).
std::vector<Vertex> spread_placement(const RootedGraph& tree, std::size_t k, std::size_t radius);

struct DominationPoint {
  double t = 0.0;
  double graph_survival = 0.0;
  double tree_survival = 0.0;
  double se = 0.0;
  double z = 0.0;        // (graph - tree) / se, 0 when se == 0
  bool violation = false;  // graph exceeds tree by more than 3 se
};

struct DominationReport {
  std::size_t d = 0;
  std::size_t depth = 0;             // truncation radius R of the tree
  std::size_t placement_radius = 0;
  double lambda = 0.0;
  std::size_t replicas = 0;
  std::size_t initial_size = 0;
  std::vector<Vertex> tree_initial;
  std::vector<DominationPoint> points;
  double contamination = 0.0;  // fraction of tree runs that reached depth R
  bool any_violation = false;
  std::string caveat;
};

struct DominationOptions {
  std::size_t d = 3;
  std::size_t depth = 10;
  /// Placement radius for the tree-side initial set; defaults to depth / 3.
  std::optional<std::size_t> placement_radius;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

/// Survival-curve comparison P[tau^A_G > t] against P[tau^B_T > t] on the
/// depth-truncated (d+1)-regular tree with |B| = |A| placed by
/// spread_placement. Throws InputError when max degree of g exceeds d+1.
DominationReport domination_check(const MultiGraph& g, double lambda, std::span<const Vertex> A,
                                  std::size_t replicas, std::span<const double> t_grid,
                                  const DominationOptions& options);

struct KappaTailPoint {
  std::size_t k = 0;
  double graph_tail = 0.0;  // P[kappa_G > k]
  double tree_tail = 0.0;   // P[kappa_T > k]
  double se = 0.0;
  double z = 0.0;
  bool violation = false;
};

struct KappaDominationReport {
  std::size_t d = 0;
  std::size_t depth = 0;
  double lambda = 0.0;
  std::size_t replicas = 0;
  std::size_t graph_max_kappa = 0;
  std::vector<KappaTailPoint> points;
  double contamination = 0.0;
  double graph_censored = 0.0;
  bool any_violation = false;
  std::string caveat;
};

/// Tail comparison P[kappa^x_G > k] against P[kappa^o_T > k]. The tree depth
/// is raised to exceed the largest kappa observed on g. Graph runs are
/// censored at `horizon`.
KappaDominationReport kappa_domination_check(const MultiGraph& g, double lambda, Vertex x,
                                             std::size_t replicas,
                                             const DominationOptions& options,
                                             double horizon = 1e4);

}  // namespace cpsim
