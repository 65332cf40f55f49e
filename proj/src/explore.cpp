#include "cpsim/explore.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>

#include "cpsim/error.hpp"

namespace cpsim {

namespace {

std::vector<Vertex> ball_vertices(const MultiGraph& g, Vertex v, std::size_t r) {
  auto dist = distances_from(g, v, static_cast<std::int64_t>(r));
  std::vector<Vertex> out;
  for (Vertex w = 0; w < g.vertex_count(); ++w) {
    if (dist[w] != kUnreachable) out.push_back(w);
  }
  return out;
}

bool ball_is_tree(const MultiGraph& g, Vertex v, std::size_t r) {
  return is_tree(ball(g, v, r).graph);
}

std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t out = 1;
  while (e-- > 0) out *= b;
  return out;
}

std::optional<EdgeId> edge_between(const MultiGraph& g, Vertex a, Vertex b) {
  for (OrientedEdge oe : g.out_edges(a)) {
    if (g.v1(oe) == b) return oe.edge;
  }
  return std::nullopt;
}

std::uint64_t pair_key(Vertex a, Vertex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

bool embeds_some(const MultiGraph& host, Vertex x, std::span<const RootedGraph> patterns) {
  for (const RootedGraph& p : patterns) {
    if (embeds(host, x, p)) return true;
  }
  return false;
}

}  // namespace

PreparedReport is_r_prepared(const MultiGraph& g, std::span<const Vertex> W, std::size_t r) {
  PreparedReport rep;
  rep.seeds.assign(W.begin(), W.end());
  for (Vertex w : W) {
    if (!g.valid(w)) throw InputError("seed out of range");
  }
  std::vector<std::int64_t> owner(g.vertex_count(), -1);
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < W.size(); ++i) {
    bool tree = ball_is_tree(g, W[i], r);
    rep.tree_ball.push_back(tree);
    if (!tree && !rep.first_cyclic) rep.first_cyclic = W[i];
    for (Vertex v : ball_vertices(g, W[i], r)) {
      if (owner[v] >= 0 && static_cast<std::size_t>(owner[v]) != i) {
        auto j = static_cast<std::size_t>(owner[v]);
        if (pairs.insert({j, i}).second && !rep.first_overlap) rep.first_overlap = {W[j], W[i]};
      } else {
        owner[v] = static_cast<std::int64_t>(i);
      }
    }
  }
  rep.overlapping_pairs = pairs.size();
  rep.prepared = !rep.first_cyclic && pairs.empty();
  return rep;
}

std::vector<Vertex> prepared_subset(const MultiGraph& g, std::span<const Vertex> W,
                                    std::size_t r) {
  std::vector<std::uint8_t> taken(g.vertex_count(), 0);
  std::vector<Vertex> kept;
  for (Vertex w : W) {
    if (!g.valid(w)) throw InputError("seed out of range");
    if (!ball_is_tree(g, w, r)) continue;
    auto vs = ball_vertices(g, w, r);
    if (std::any_of(vs.begin(), vs.end(), [&](Vertex v) { return taken[v] != 0; })) continue;
    for (Vertex v : vs) taken[v] = 1;
    kept.push_back(w);
  }
  return kept;
}

PreparedReport build_neighbourhoods_first(SemiGraph& s, std::span<const Vertex> W, std::size_t r,
                                          Rng& rng) {
  constexpr std::int64_t kFar = std::numeric_limits<std::int64_t>::max();
  const auto rr = static_cast<std::int64_t>(r);
  std::vector<std::int64_t> dist(s.vertex_count(), kFar);
  std::set<Vertex> electing;
  auto consider = [&](Vertex v) {
    if (dist[v] < rr && s.free_half_edges(v) > 0) electing.insert(v);
  };
  for (Vertex w : W) {
    if (w >= s.vertex_count()) throw InputError("seed out of range");
    dist[w] = 0;
    consider(w);
  }
  std::deque<Vertex> queue;
  while (!electing.empty()) {
    Vertex v = *electing.begin();
    if (s.free_half_edges(v) == 0) {
      electing.erase(electing.begin());
      continue;
    }
    FormedEdge fe = match_elected(s, s.unmatched_at(v).front(), rng);
    if (s.free_half_edges(fe.v) == 0) electing.erase(fe.v);
    // The new edge can only shorten distances through its far end.
    if (dist[v] + 1 < dist[fe.v]) {
      dist[fe.v] = dist[v] + 1;
      queue.push_back(fe.v);
    }
    while (!queue.empty()) {
      Vertex u = queue.front();
      queue.pop_front();
      consider(u);
      for (Vertex w : s.adjacency(u)) {
        if (dist[u] + 1 < dist[w]) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
  }
  return is_r_prepared(s.to_multigraph(), W, r);
}

ExploreConstants constants(std::size_t d, std::size_t r, std::size_t ell) {
  if (d < 2 || r < 1 || ell < 1) throw InputError("constants require d >= 2, r >= 1, ell >= 1");
  ExploreConstants c;
  for (std::size_t k = 1; k <= ell; ++k) c.c_ell += ipow(d, k);
  c.c_bar_r = 1;
  for (std::size_t k = 0; k < r; ++k) c.c_bar_r += (d + 1) * ipow(d, k);
  c.c_r_ell = c.c_bar_r + c.c_ell;
  const std::uint64_t buds = (d + 1) * ipow(d, r - 1);
  c.gamma_num = buds;
  c.gamma_den = buds + 2;
  c.gamma_r = static_cast<double>(c.gamma_num) / static_cast<double>(c.gamma_den);
  return c;
}

PassState::PassState(SemiGraph& s, std::span<const Vertex> seeds, std::size_t d, std::size_t r)
    : s_(s), d_(d), r_(r), seeds_(seeds.begin(), seeds.end()) {
  if (s.slots_per_vertex() != d + 1) throw InputError("semigraph degree does not match d + 1");
  const MultiGraph g = s.to_multigraph();
  if (!is_r_prepared(g, seeds, r).prepared) throw InputError("seed set is not r-prepared");
  for (Vertex w : seeds_) {
    auto dist = distances_from(g, w, static_cast<std::int64_t>(r));
    std::vector<Vertex> b;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      if (dist[v] == static_cast<std::int64_t>(r)) b.push_back(v);
    }
    buds_.push_back(std::move(b));
  }
  fresh_.assign(s.vertex_count(), 0);
  for (Vertex v = 0; v < s.vertex_count(); ++v) {
    if (s.free_half_edges(v) == d + 1) {
      fresh_[v] = 1;
      ++fresh_count_;
    }
  }
  used_.assign(seeds_.size(), 0);
}

void PassState::remove_fresh(Vertex v) {
  if (fresh_[v]) {
    fresh_[v] = 0;
    --fresh_count_;
  }
}

bool PassState::seed_active(std::size_t i) const {
  return std::any_of(buds_[i].begin(), buds_[i].end(), [&](Vertex b) { return bud_active(b); });
}

std::size_t PassState::active_bud_count() const {
  std::size_t n = 0;
  for (const auto& bs : buds_) {
    for (Vertex b : bs) n += bud_active(b);
  }
  return n;
}

namespace {

Witness pass_witness(const SemiGraph& s, Vertex seed, std::size_t r,
                     const std::vector<Vertex>& explored, const std::vector<Edge>& explored_edges) {
  // BFS ball in the partial graph.
  std::unordered_map<Vertex, Vertex> local;
  std::vector<Vertex> order{seed};
  std::vector<std::size_t> depth{0};
  local.emplace(seed, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (depth[i] == r) continue;
    for (Vertex w : s.adjacency(order[i])) {
      if (local.emplace(w, static_cast<Vertex>(order.size())).second) {
        order.push_back(w);
        depth.push_back(depth[i] + 1);
      }
    }
  }
  const std::size_t ball_size = order.size();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < ball_size; ++i) {
    Vertex a = order[i];
    std::size_t loop_ends = 0;
    for (Vertex b : s.adjacency(a)) {
      if (b == a) {
        ++loop_ends;
        continue;
      }
      auto it = local.find(b);
      if (it != local.end() && it->second < ball_size && a < b) {
        edges.push_back({static_cast<Vertex>(i), it->second});
      }
    }
    for (std::size_t k = 0; k < loop_ends / 2; ++k) {
      edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(i)});
    }
  }
  for (Vertex v : explored) {
    if (local.emplace(v, static_cast<Vertex>(order.size())).second) order.push_back(v);
  }
  for (const Edge& e : explored_edges) edges.push_back({local.at(e.u), local.at(e.v)});
  Witness w;
  w.graph = MultiGraph(order.size(), std::move(edges));
  w.to_original = std::move(order);
  w.root = 0;
  w.anchor = local.at(explored.front());
  return w;
}

}  // namespace

PassOutcome run_pass(PassState& state, std::size_t seed_index, std::size_t ell, Rng& rng) {
  if (seed_index >= state.seed_count()) throw InputError("seed index out of range");
  if (!state.seed_active(seed_index)) throw StateError("the Pass needs an active seed");
  SemiGraph& s = state.semigraph();
  const std::size_t d = state.d();
  std::uint64_t c_ell = 0;
  for (std::size_t k = 1; k <= ell; ++k) c_ell += ipow(d, k);
  const std::uint64_t frontier_cap = ipow(d, ell);

  PassOutcome out;
  out.seed_index = seed_index;
  out.seed = state.seed(seed_index);
  auto bs = state.buds(seed_index);
  out.bud = *std::find_if(bs.begin(), bs.end(), [&](Vertex b) { return state.bud_active(b); });
  state.mark_used(seed_index);

  std::vector<Vertex> active_before;
  for (std::size_t i = 0; i < state.seed_count(); ++i) {
    for (Vertex b : state.buds(i)) {
      if (b != out.bud && state.bud_active(b)) active_before.push_back(b);
    }
  }

  std::unordered_map<Vertex, std::size_t> depth{{out.bud, 0}};
  std::set<HalfEdge> hbar;
  if (ell > 0) {
    for (HalfEdge h : s.unmatched_at(out.bud)) hbar.insert(h);
  }
  out.explored.push_back(out.bud);
  out.max_frontier = hbar.size();
  std::size_t longs = 0;
  for (;;) {
    if (hbar.empty()) {
      out.success = true;
      break;
    }
    if (++out.iterations > c_ell) throw InvariantViolation("Step 1 ran more than c_ell times");
    // Lowest half-edge id is the lowest vertex, then the lowest slot.
    const HalfEdge h = *hbar.begin();
    const Vertex v = s.vertex_of(h);
    FormedEdge fe = match_elected(s, h, rng);
    out.half_edges_consumed += 2;
    const Vertex v2 = fe.v;
    if (!state.fresh(v2)) {
      const bool is_short = depth.contains(v2);
      out.collisions.push_back({is_short ? CollisionKind::kShort : CollisionKind::kLong,
                                out.iterations, h, fe.partner, v2});
      if (is_short || ++longs == 2) break;
    } else {
      const std::size_t dv = depth.at(v) + 1;
      depth.emplace(v2, dv);
      out.explored.push_back(v2);
      out.explored_edges.push_back({v, v2});
      if (dv < ell) {
        for (HalfEdge h2 : s.unmatched_at(v2)) hbar.insert(h2);
      }
    }
    // Step 2.
    if (hbar.contains(fe.partner)) throw InvariantViolation("h' found in H-bar at Step 2");
    hbar.erase(h);
    state.remove_fresh(v2);
    out.max_frontier = std::max(out.max_frontier, hbar.size());
    if (out.max_frontier > frontier_cap) throw InvariantViolation("|H-bar| exceeded d^ell");
  }
  for (Vertex b : active_before) out.buds_quieted += !state.bud_active(b);
  if (out.buds_quieted > 2) throw InvariantViolation("a pass quieted more than two other buds");
  out.fresh_after = state.fresh_count();
  if (out.success) {
    out.witness = pass_witness(s, out.seed, state.r(), out.explored, out.explored_edges);
  }
  return out;
}

GoodExtraction extract_good_subset(SemiGraph& s, std::span<const Vertex> W, std::size_t d,
                                   std::size_t ell, std::size_t r, std::size_t target, Rng& rng,
                                   std::size_t built_seed_count) {
  PassState state(s, W, d, r);
  const ExploreConstants c = constants(d, r, std::max<std::size_t>(ell, 1));
  const std::uint64_t c_ell = ell == 0 ? 0 : c.c_ell;
  const std::uint64_t base = built_seed_count == 0 ? W.size() : built_seed_count;
  const std::uint64_t removed = c.c_bar_r * base + c_ell * W.size();
  GoodExtraction ex;
  ex.fresh_floor = s.vertex_count() > removed ? s.vertex_count() - removed : 0;
  ex.min_fresh = state.fresh_count();
  for (std::size_t i = 0; i < state.seed_count(); ++i) {
    for (Vertex b : state.buds(i)) ex.all_buds_initially_active &= state.bud_active(b);
  }
  if (ex.min_fresh < ex.fresh_floor) throw InvariantViolation("fresh-vertex floor violated");
  if (target == 0) {
    ex.target_met = true;
    ex.truncated = W.size() > 0;
    return ex;
  }
  for (std::size_t i = 0; i < state.seed_count(); ++i) {
    if (state.used(i) || !state.seed_active(i)) continue;
    PassOutcome out = run_pass(state, i, ell, rng);
    std::size_t longs = 0;
    for (const Collision& col : out.collisions) {
      if (col.kind == CollisionKind::kShort) {
        ++ex.short_collisions;
      } else {
        ++ex.long_collisions;
        ++longs;
      }
    }
    if (!out.success && longs == 2) ++ex.double_collisions;
    ex.min_fresh = std::min(ex.min_fresh, out.fresh_after);
    if (out.fresh_after < ex.fresh_floor) throw InvariantViolation("fresh-vertex floor violated");
    if (out.success) ex.good.push_back(ex.passes.size());
    ex.passes.push_back(std::move(out));
    if (ex.good.size() >= target) {
      ex.target_met = true;
      for (std::size_t j = i + 1; j < state.seed_count(); ++j) {
        ex.truncated |= !state.used(j) && state.seed_active(j);
      }
      break;
    }
  }
  if (ex.all_buds_initially_active && !ex.truncated) {
    const std::uint64_t lhs =
        (ex.good.size() + ex.short_collisions + ex.double_collisions) * c.gamma_den;
    ex.bookkeeping_ok = lhs >= c.gamma_num * W.size();
  }
  return ex;
}

bool verify_favourable(const Witness& w, std::size_t d, std::size_t ell, std::size_t r) {
  const MultiGraph& g = w.graph;
  if (!g.valid(w.root)) return false;
  std::vector<RootedGraph> patterns =
      ell == 0 ? std::vector<RootedGraph>{build_regular_tree(d, 0)} : pruned_tree_catalog(d, ell);
  auto dist = distances_from(g, w.root);
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    if (dist[x] != static_cast<std::int64_t>(r)) continue;
    if (embeds_some(g, x, patterns)) return true;
  }
  return false;
}

std::vector<Witness> good_to_regenerative(std::span<const Witness> witnesses, std::size_t d,
                                          std::size_t ell, std::size_t r) {
  if (ell < 1) throw InputError("good_to_regenerative needs ell >= 1");
  const RootedGraph target = build_regular_tree(d, ell - 1);
  std::vector<Witness> out;
  for (const Witness& w : witnesses) {
    const MultiGraph& g = w.graph;
    if (!g.valid(w.root) || !g.valid(w.anchor) || w.to_original.size() != g.vertex_count()) {
      throw InputError("malformed witness");
    }
    auto dist = distances_from(g, w.root);
    std::vector<Vertex> buds;
    if (dist[w.anchor] == static_cast<std::int64_t>(r)) buds.push_back(w.anchor);
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
      if (x != w.anchor && dist[x] == static_cast<std::int64_t>(r)) buds.push_back(x);
    }
    std::optional<Vertex> found;
    for (Vertex x : buds) {
      for (Vertex y : g.neighbours(x)) {
        if (dist[y] != static_cast<std::int64_t>(r + 1)) continue;
        if (embeds(g, y, target)) {
          found = y;
          break;
        }
      }
      if (found) break;
    }
    if (!found) throw InputError("witness has no intact child subtree");
    Witness next = w;
    next.anchor = *found;
    out.push_back(std::move(next));
  }
  return out;
}

bool verify_regenerative(const MultiGraph& g, std::span<const Vertex> W,
                         std::span<const Witness> witnesses, std::size_t d, std::size_t ell,
                         std::size_t r) {
  if (W.size() != witnesses.size()) return false;
  if (W.empty()) return true;
  std::unordered_map<std::uint64_t, std::size_t> available;
  for (const Edge& e : g.edges()) ++available[pair_key(e.u, e.v)];
  std::vector<std::uint8_t> owned(g.vertex_count(), 0);
  const RootedGraph target = build_regular_tree(d, ell);
  for (std::size_t i = 0; i < W.size(); ++i) {
    const Witness& w = witnesses[i];
    const MultiGraph& h = w.graph;
    if (w.to_original.size() != h.vertex_count() || !h.valid(w.root)) return false;
    if (w.to_original[w.root] != W[i]) return false;
    for (Vertex v : w.to_original) {
      if (!g.valid(v) || owned[v]) return false;
      owned[v] = 1;
    }
    std::unordered_map<std::uint64_t, std::size_t> used;
    for (const Edge& e : h.edges()) {
      auto key = pair_key(w.to_original[e.u], w.to_original[e.v]);
      if (++used[key] > available[key]) return false;
    }
    auto dist = distances_from(h, w.root);
    bool ok = false;
    for (Vertex x = 0; x < h.vertex_count() && !ok; ++x) {
      if (dist[x] == static_cast<std::int64_t>(r)) ok = embeds(h, x, target).has_value();
    }
    if (!ok) return false;
  }
  return true;
}

std::vector<PosthocWitness> posthoc_regenerative(const MultiGraph& g,
                                                 std::span<const Vertex> candidates,
                                                 std::size_t d, std::size_t ell, std::size_t r,
                                                 std::size_t want) {
  const RootedGraph tree = build_regular_tree(d, ell);
  std::vector<std::uint8_t> claimed(g.vertex_count(), 0);
  std::vector<PosthocWitness> out;
  std::vector<std::int64_t> dist(g.vertex_count(), kUnreachable);
  std::vector<Vertex> parent(g.vertex_count(), kNoVertex);
  for (Vertex v : candidates) {
    if (out.size() >= want) break;
    if (!g.valid(v)) throw InputError("candidate out of range");
    if (claimed[v]) continue;
    // BFS over unclaimed vertices up to r + ell.
    std::vector<Vertex> region{v};
    dist[v] = 0;
    for (std::size_t i = 0; i < region.size(); ++i) {
      Vertex u = region[i];
      if (dist[u] == static_cast<std::int64_t>(r + ell)) continue;
      for (Vertex w : g.neighbours(u)) {
        if (claimed[w] || dist[w] != kUnreachable) continue;
        dist[w] = dist[u] + 1;
        parent[w] = u;
        region.push_back(w);
      }
    }
    for (Vertex x : region) {
      if (dist[x] != static_cast<std::int64_t>(r)) continue;
      std::vector<Vertex> path;
      for (Vertex u = x; u != v; u = parent[u]) path.push_back(u);
      path.push_back(v);
      // The tree may not reuse the path back to v, so search without it.
      std::vector<Vertex> allowed{x};
      for (Vertex u : region) {
        if (u != x && std::find(path.begin(), path.end(), u) == path.end()) allowed.push_back(u);
      }
      Subgraph sub = induced_subgraph(g, allowed);
      auto emb = embeds(sub.graph, 0, tree);
      if (!emb) continue;
      std::vector<Vertex> image;
      for (Vertex p : *emb) image.push_back(sub.to_original[p]);
      // Local order: path from v to x, then the rest of the tree image.
      std::vector<Vertex> order(path.rbegin(), path.rend());
      for (Vertex p : image) {
        if (p != x) order.push_back(p);
      }
      std::unordered_map<Vertex, Vertex> idx;
      for (Vertex i = 0; i < order.size(); ++i) idx.emplace(order[i], i);
      PosthocWitness pw;
      std::vector<Edge> edges;
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        pw.edges.push_back(*edge_between(g, path[k], path[k + 1]));
        edges.push_back({idx.at(path[k + 1]), idx.at(path[k])});
      }
      for (const Edge& e : tree.graph.edges()) {
        Vertex a = image[e.u];
        Vertex b = image[e.v];
        pw.edges.push_back(*edge_between(g, a, b));
        edges.push_back({idx.at(a), idx.at(b)});
      }
      pw.witness.graph = MultiGraph(order.size(), std::move(edges));
      pw.witness.to_original = order;
      pw.witness.root = 0;
      pw.witness.anchor = idx.at(x);
      for (Vertex u : order) claimed[u] = 1;
      out.push_back(std::move(pw));
      break;
    }
    for (Vertex u : region) {
      dist[u] = kUnreachable;
      parent[u] = kNoVertex;
    }
  }
  return out;
}

}  // namespace cpsim
