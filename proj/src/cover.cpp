#include "cpsim/cover.hpp"

#include <algorithm>
#include <cmath>

#include "cpsim/error.hpp"
#include "cpsim/parallel.hpp"

namespace cpsim {

CoverTree::CoverTree(const MultiGraph& g, Vertex base, std::size_t depth, std::size_t node_cap)
    : base_(base), depth_cap_(depth) {
  if (!g.valid(base)) throw InputError("cover base vertex out of range");
  parent_.push_back(0);
  via_.push_back({});
  depth_.push_back(0);
  psi_.push_back(base);
  std::vector<Edge> tree_edges;
  for (CoverNode c = 0; c < parent_.size(); ++c) {
    if (depth_[c] >= depth) continue;
    Vertex at = psi_[c];
    for (OrientedEdge oe : g.out_edges(at)) {
      if (c != 0 && oe.edge == via_[c].edge) continue;  // no backtracking
      if (parent_.size() >= node_cap) {
        throw InputError("universal cover exceeds the node cap of " + std::to_string(node_cap));
      }
      auto child = static_cast<CoverNode>(parent_.size());
      parent_.push_back(c);
      via_.push_back(oe);
      depth_.push_back(depth_[c] + 1);
      psi_.push_back(g.v1(oe));
      tree_edges.push_back({c, child});
    }
  }
  fiber_offset_.assign(g.vertex_count() + 1, 0);
  for (Vertex v : psi_) ++fiber_offset_[v + 1];
  for (std::size_t v = 0; v < g.vertex_count(); ++v) fiber_offset_[v + 1] += fiber_offset_[v];
  fiber_nodes_.resize(psi_.size());
  std::vector<std::size_t> fill(fiber_offset_.begin(), fiber_offset_.end() - 1);
  for (CoverNode c = 0; c < psi_.size(); ++c) fiber_nodes_[fill[psi_[c]]++] = c;
  tree_ = MultiGraph(parent_.size(), std::move(tree_edges));
}

std::size_t CoverTree::tree_distance(CoverNode a, CoverNode b) const {
  std::size_t steps = 0;
  while (a != b) {
    if (depth_[a] >= depth_[b]) {
      a = parent_[a];
    } else {
      b = parent_[b];
    }
    ++steps;
  }
  return steps;
}

std::vector<OrientedEdge> CoverTree::neighbourhood_image(CoverNode c) const {
  std::vector<OrientedEdge> out;
  if (c != 0) out.push_back(via_[c].flipped());
  for (OrientedEdge oe : tree_.out_edges(c)) {
    CoverNode w = tree_.v1(oe);
    if (w != parent_[c] || c == 0) out.push_back(via_[w]);
  }
  return out;
}

CoverTree build_cover(const MultiGraph& g, Vertex x, std::size_t depth) {
  return CoverTree(g, x, depth);
}

std::string check_cover(const CoverTree& c, const MultiGraph& g) {
  const MultiGraph& t = c.tree();
  if (!is_tree(t)) return "cover is not a tree";
  if (t.max_degree() > std::max<std::size_t>(g.max_degree(), 0)) {
    return "cover degree exceeds the maximum degree of the base graph";
  }
  bool loop_free = true;
  for (const Edge& e : g.edges()) loop_free &= !e.is_loop();
  for (CoverNode n = 0; n < c.size(); ++n) {
    if (n != 0) {
      if (g.v1(c.via(n)) != c.psi(n)) return "psi disagrees with the path end";
      CoverNode p = c.parent(n);
      Vertex start = p == 0 ? c.base() : c.psi(p);
      if (g.v0(c.via(n)) != start) return "path is not contiguous";
      if (p != 0 && c.via(p).edge == c.via(n).edge) return "path backtracks";
    }
    if (!loop_free || c.depth(n) >= c.depth_cap()) continue;
    auto image = c.neighbourhood_image(n);
    auto out = g.out_edges(c.psi(n));
    std::vector<std::uint32_t> a;
    std::vector<std::uint32_t> b;
    for (OrientedEdge oe : image) a.push_back(oe.index());
    for (OrientedEdge oe : out) b.push_back(oe.index());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return "neighbourhood of node " + std::to_string(n) + " is not mapped bijectively";
  }
  return {};
}

bool in_omega(const CoverTree& c, std::span<const CoverNode> zeta) {
  std::vector<Vertex> images;
  for (CoverNode n : zeta) {
    if (n >= c.size()) return false;
    images.push_back(c.psi(n));
  }
  std::sort(images.begin(), images.end());
  return std::adjacent_find(images.begin(), images.end()) == images.end();
}

VertexSet project(const CoverTree& c, std::span<const CoverNode> zeta) {
  VertexSet out;
  for (CoverNode n : zeta) {
    if (n >= c.size()) throw InputError("cover node out of range");
    out.push_back(c.psi(n));
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw InvariantViolation("configuration has a doubly occupied fiber");
  }
  return out;
}

ConstrainedSimulator::ConstrainedSimulator(const CoverTree& c)
    : c_(c), position_(c.size(), static_cast<std::uint32_t>(-1)) {
  std::size_t n = 0;
  for (CoverNode x = 0; x < c.size(); ++x) n = std::max<std::size_t>(n, c.psi(x) + 1);
  fiber_taken_.assign(n, 0);
}

void ConstrainedSimulator::occupy(CoverNode n) {
  position_[n] = static_cast<std::uint32_t>(occupied_.size());
  occupied_.push_back(n);
  fiber_taken_[c_.psi(n)] = 1;
  degree_sum_ += c_.tree().degree(n);
}

void ConstrainedSimulator::vacate(CoverNode n) {
  std::uint32_t p = position_[n];
  CoverNode last = occupied_.back();
  occupied_[p] = last;
  position_[last] = p;
  occupied_.pop_back();
  position_[n] = static_cast<std::uint32_t>(-1);
  fiber_taken_[c_.psi(n)] = 0;
  degree_sum_ -= c_.tree().degree(n);
}

CoverTrajectory ConstrainedSimulator::run(double lambda, std::span<const CoverNode> initial,
                                          Rng& rng, double horizon,
                                          std::span<const double> sample_times) {
  if (!in_omega(c_, initial)) throw InputError("initial configuration is not in Omega_T");
  const MultiGraph& t = c_.tree();
  CoverTrajectory tr;
  for (CoverNode n : initial) {
    occupy(n);
    tr.max_depth = std::max(tr.max_depth, c_.depth(n));
  }
  tr.peak = occupied_.size();
  tr.touched_boundary = tr.max_depth >= c_.depth_cap() && !occupied_.empty();
  auto snapshot = [&] {
    VertexSet s;
    for (CoverNode n : occupied_) s.push_back(c_.psi(n));
    std::sort(s.begin(), s.end());
    return s;
  };
  std::size_t next_sample = 0;
  const std::uint64_t max_deg = t.max_degree();
  double now = 0.0;
  for (;;) {
    if (occupied_.empty()) {
      tr.extinction_time = now;
      break;
    }
    const double count = static_cast<double>(occupied_.size());
    const double rate = count + lambda * static_cast<double>(degree_sum_);
    const double next = now + exponential(rng, rate);
    if (next > horizon) {
      tr.censored = true;
      break;
    }
    while (next_sample < sample_times.size() && sample_times[next_sample] < next) {
      tr.projected.push_back(snapshot());
      ++next_sample;
    }
    now = next;
    if (uniform01(rng) * rate < count) {
      vacate(occupied_[fast_index(rng, occupied_.size())]);
      continue;
    }
    CoverNode from = 0;
    for (;;) {
      from = occupied_[fast_index(rng, occupied_.size())];
      std::size_t deg = t.degree(from);
      if (deg == max_deg || fast_index(rng, max_deg) < deg) break;
    }
    auto out = t.out_edges(from);
    CoverNode to = t.v1(out[fast_index(rng, out.size())]);
    if (fiber_taken_[c_.psi(to)]) {
      ++tr.suppressed;
      continue;
    }
    occupy(to);
    tr.peak = std::max(tr.peak, occupied_.size());
    tr.max_depth = std::max(tr.max_depth, c_.depth(to));
    tr.touched_boundary |= c_.depth(to) >= c_.depth_cap();
  }
  while (next_sample < sample_times.size()) {
    tr.projected.push_back(snapshot());
    ++next_sample;
  }
  while (!occupied_.empty()) vacate(occupied_.back());
  return tr;
}

CoverTrajectory constrained_cp(const CoverTree& c, double lambda, std::span<const CoverNode> B,
                               Rng& rng, double horizon, std::span<const double> sample_times) {
  ConstrainedSimulator sim(c);
  return sim.run(lambda, B, rng, horizon, sample_times);
}

std::vector<Vertex> spread_placement(const RootedGraph& tree, std::size_t k, std::size_t radius) {
  const MultiGraph& t = tree.graph;
  std::vector<Vertex> chosen;
  if (k == 0) return chosen;
  auto depth = distances_from(t, tree.root);
  std::vector<std::int64_t> nearest(t.vertex_count(), std::numeric_limits<std::int64_t>::max());
  Vertex pick = tree.root;
  while (chosen.size() < k) {
    chosen.push_back(pick);
    auto dp = distances_from(t, pick);
    for (Vertex v = 0; v < t.vertex_count(); ++v) {
      if (dp[v] != kUnreachable) nearest[v] = std::min(nearest[v], dp[v]);
    }
    if (chosen.size() == k) break;
    std::int64_t best = 0;
    pick = kNoVertex;
    for (Vertex v = 0; v < t.vertex_count(); ++v) {
      if (depth[v] == kUnreachable || depth[v] > static_cast<std::int64_t>(radius)) continue;
      if (nearest[v] > best) {
        best = nearest[v];
        pick = v;
      }
    }
    if (pick == kNoVertex) {
      throw InputError("placement radius too small for " + std::to_string(k) + " vertices");
    }
  }
  return chosen;
}

namespace {

constexpr double kViolationZ = 3.0;

std::string truncation_caveat(std::size_t depth) {
  return "tree truncated at depth " + std::to_string(depth) +
         "; truncation can only lower the tree-side curve, so a violation in a run with "
         "boundary contamination may be a truncation artefact. Statistical evidence only.";
}

struct Comparison {
  double se = 0.0;
  double z = 0.0;
  bool violation = false;
};

Comparison one_sided(double pg, double pt, std::size_t n) {
  Comparison c;
  const double nn = static_cast<double>(n);
  c.se = std::sqrt(pg * (1.0 - pg) / nn + pt * (1.0 - pt) / nn);
  if (c.se > 0.0) c.z = (pg - pt) / c.se;
  c.violation = pg - pt > kViolationZ * c.se && pg > pt;
  return c;
}

}  // namespace

DominationReport domination_check(const MultiGraph& g, double lambda, std::span<const Vertex> A,
                                  std::size_t replicas, std::span<const double> t_grid,
                                  const DominationOptions& options) {
  if (g.max_degree() > options.d + 1) {
    throw InputError("domination_check requires max degree <= d + 1");
  }
  if (t_grid.empty()) throw InputError("domination_check needs a non-empty time grid");
  VertexSet initial(A.begin(), A.end());
  std::sort(initial.begin(), initial.end());
  initial.erase(std::unique(initial.begin(), initial.end()), initial.end());

  DominationReport rep;
  rep.d = options.d;
  rep.depth = options.depth;
  rep.placement_radius = options.placement_radius.value_or(options.depth / 3);
  rep.lambda = lambda;
  rep.replicas = replicas;
  rep.initial_size = initial.size();
  rep.caveat = truncation_caveat(options.depth);

  const RootedGraph tree = build_hat_tree(options.d, options.depth);
  rep.tree_initial = spread_placement(tree, initial.size(), rep.placement_radius);
  std::vector<std::uint8_t> boundary(tree.graph.vertex_count(), 0);
  {
    auto depth = distances_from(tree.graph, tree.root);
    for (Vertex v = 0; v < boundary.size(); ++v) {
      boundary[v] = depth[v] >= static_cast<std::int64_t>(options.depth);
    }
  }
  const double horizon = *std::max_element(t_grid.begin(), t_grid.end());

  // End time of each run: tau, or +inf when it survived past the horizon.
  auto run_side = [&](const MultiGraph& host, const VertexSet& start, std::uint64_t stream,
                      std::span<const std::uint8_t> bmask, std::size_t& contaminated) {
    std::vector<double> ends(replicas);
    std::vector<std::uint8_t> touched(replicas, 0);
    unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : options.workers;
    workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(workers, replicas)));
    const std::size_t block = (replicas + workers - 1) / workers;
    parallel_for(
        workers,
        [&](std::size_t w) {
          ContactSimulator sim(host);
          SimulationOptions so;
          so.horizon = horizon;
          so.boundary = bmask;
          for (std::size_t i = w * block; i < std::min(replicas, (w + 1) * block); ++i) {
            Rng rng(derive_seed(options.seed, {stream, i}));
            Trajectory tr = sim.run(lambda, start, rng, so);
            ends[i] = tr.extinction_time.value_or(kForever);
            touched[i] = tr.touched_boundary;
          }
        },
        workers);
    contaminated = static_cast<std::size_t>(std::count(touched.begin(), touched.end(), 1));
    return ends;
  };

  std::size_t unused = 0;
  std::size_t contaminated = 0;
  VertexSet tree_start(rep.tree_initial.begin(), rep.tree_initial.end());
  std::sort(tree_start.begin(), tree_start.end());
  auto graph_ends = run_side(g, initial, 0, {}, unused);
  auto tree_ends = run_side(tree.graph, tree_start, 1, boundary, contaminated);
  rep.contamination =
      replicas == 0 ? 0.0 : static_cast<double>(contaminated) / static_cast<double>(replicas);

  for (double t : t_grid) {
    DominationPoint pt;
    pt.t = t;
    if (replicas > 0) {
      auto surv = [t](const std::vector<double>& ends) {
        return static_cast<double>(std::count_if(ends.begin(), ends.end(),
                                                 [t](double e) { return e > t; })) /
               static_cast<double>(ends.size());
      };
      pt.graph_survival = surv(graph_ends);
      pt.tree_survival = surv(tree_ends);
      Comparison c = one_sided(pt.graph_survival, pt.tree_survival, replicas);
      pt.se = c.se;
      pt.z = c.z;
      pt.violation = c.violation;
    }
    rep.any_violation |= pt.violation;
    rep.points.push_back(pt);
  }
  return rep;
}

KappaDominationReport kappa_domination_check(const MultiGraph& g, double lambda, Vertex x,
                                             std::size_t replicas,
                                             const DominationOptions& options, double horizon) {
  if (g.max_degree() > options.d + 1) {
    throw InputError("kappa_domination_check requires max degree <= d + 1");
  }
  if (!g.valid(x)) throw InputError("kappa_domination_check: x out of range");
  KappaDominationReport rep;
  rep.d = options.d;
  rep.lambda = lambda;
  rep.replicas = replicas;

  std::vector<std::size_t> graph_kappa(replicas);
  std::size_t censored = 0;
  {
    ContactSimulator sim(g);
    SimulationOptions so;
    so.horizon = horizon;
    for (std::size_t i = 0; i < replicas; ++i) {
      Rng rng(derive_seed(options.seed, {0, i}));
      Trajectory tr = sim.run(lambda, std::span<const Vertex>(&x, 1), rng, so);
      graph_kappa[i] = tr.kappa.value_or(0);
      censored += tr.censored;
      rep.graph_max_kappa = std::max(rep.graph_max_kappa, graph_kappa[i]);
    }
  }
  rep.graph_censored =
      replicas == 0 ? 0.0 : static_cast<double>(censored) / static_cast<double>(replicas);
  rep.depth = std::max(options.depth, rep.graph_max_kappa + 1);
  rep.caveat = truncation_caveat(rep.depth);

  const RootedGraph tree = build_hat_tree(options.d, rep.depth);
  std::vector<std::uint8_t> boundary(tree.graph.vertex_count(), 0);
  {
    auto depth = distances_from(tree.graph, tree.root);
    for (Vertex v = 0; v < boundary.size(); ++v) {
      boundary[v] = depth[v] >= static_cast<std::int64_t>(rep.depth);
    }
  }
  std::vector<std::size_t> tree_kappa(replicas);
  std::size_t contaminated = 0;
  {
    ContactSimulator sim(tree.graph);
    SimulationOptions so;
    so.horizon = horizon;
    so.boundary = boundary;
    const Vertex root = tree.root;
    for (std::size_t i = 0; i < replicas; ++i) {
      Rng rng(derive_seed(options.seed, {1, i}));
      Trajectory tr = sim.run(lambda, std::span<const Vertex>(&root, 1), rng, so);
      tree_kappa[i] = tr.kappa.value_or(0);
      contaminated += tr.touched_boundary;
    }
  }
  rep.contamination =
      replicas == 0 ? 0.0 : static_cast<double>(contaminated) / static_cast<double>(replicas);

  std::size_t top = rep.graph_max_kappa;
  for (std::size_t k : tree_kappa) top = std::max(top, k);
  for (std::size_t k = 0; k < std::max<std::size_t>(top, 1); ++k) {
    KappaTailPoint pt;
    pt.k = k;
    if (replicas > 0) {
      auto tail = [k](const std::vector<std::size_t>& v) {
        return static_cast<double>(std::count_if(v.begin(), v.end(),
                                                 [k](std::size_t z) { return z > k; })) /
               static_cast<double>(v.size());
      };
      pt.graph_tail = tail(graph_kappa);
      pt.tree_tail = tail(tree_kappa);
      Comparison c = one_sided(pt.graph_tail, pt.tree_tail, replicas);
      pt.se = c.se;
      pt.z = c.z;
      pt.violation = c.violation;
    }
    rep.any_violation |= pt.violation;
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace cpsim
