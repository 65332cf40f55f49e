#include "cpsim/configmodel.hpp"

#include <string>

#include "cpsim/error.hpp"

namespace cpsim {

SemiGraph::SemiGraph(std::size_t n, std::size_t slots_per_vertex)
    : n_(n),
      slots_(slots_per_vertex),
      pool_(n * slots_per_vertex),
      pos_(n * slots_per_vertex),
      partner_(n * slots_per_vertex, kNoHalfEdge),
      free_(n, static_cast<std::uint32_t>(slots_per_vertex)),
      adj_(n) {
  for (HalfEdge h = 0; h < pool_.size(); ++h) {
    pool_[h] = h;
    pos_[h] = h;
  }
}

std::vector<HalfEdge> SemiGraph::unmatched_at(Vertex v) const {
  std::vector<HalfEdge> out;
  for (std::size_t s = 0; s < slots_; ++s) {
    HalfEdge h = half_edge(v, s);
    if (pos_[h] != kNoPos) out.push_back(h);
  }
  return out;
}

HalfEdge SemiGraph::lowest_unmatched() const {
  // Half-edges only ever leave H, so the minimum never decreases.
  while (cursor_ < pos_.size() && pos_[cursor_] == kNoPos) ++cursor_;
  return cursor_ < pos_.size() ? cursor_ : kNoHalfEdge;
}

EdgeId SemiGraph::match(HalfEdge h, HalfEdge h2) {
  if (h == h2 || !is_unmatched(h) || !is_unmatched(h2)) {
    throw StateError("match requires two distinct unmatched half-edges");
  }
  for (HalfEdge x : {h, h2}) {
    std::uint32_t p = pos_[x];
    HalfEdge last = pool_.back();
    pool_[p] = last;
    pos_[last] = p;
    pool_.pop_back();
    pos_[x] = kNoPos;
    --free_[vertex_of(x)];
  }
  partner_[h] = h2;
  partner_[h2] = h;
  Vertex a = vertex_of(h);
  Vertex b = vertex_of(h2);
  edges_.push_back({a, b});
  halves_.emplace_back(h, h2);
  adj_[a].push_back(b);
  adj_[b].push_back(a);
  return static_cast<EdgeId>(edges_.size() - 1);
}

void SemiGraph::check_invariants() const {
  if (2 * edges_.size() + pool_.size() != partner_.size()) {
    throw InvariantViolation("half-edge count not conserved");
  }
  std::vector<std::uint32_t> free_count(n_, 0);
  for (HalfEdge h = 0; h < partner_.size(); ++h) {
    bool in_pool = pos_[h] != kNoPos;
    bool glued = partner_[h] != kNoHalfEdge;
    if (in_pool == glued) throw InvariantViolation("half-edge neither or both matched and free");
    if (in_pool && pool_[pos_[h]] != h) throw InvariantViolation("pool index corrupt");
    if (glued && partner_[partner_[h]] != h) throw InvariantViolation("partner not symmetric");
    if (in_pool) ++free_count[vertex_of(h)];
  }
  for (Vertex v = 0; v < n_; ++v) {
    if (free_count[v] != free_[v]) throw InvariantViolation("per-vertex free count corrupt");
  }
}

SemiGraph fresh_semigraph(std::size_t n, std::size_t d) {
  if ((n * (d + 1)) % 2 != 0) {
    throw InputError("n(d+1) = " + std::to_string(n * (d + 1)) +
                     " is odd; no perfect matching of half-edges exists");
  }
  return SemiGraph(n, d + 1);
}

FormedEdge match_elected(SemiGraph& s, HalfEdge elected, Rng& rng) {
  if (s.unmatched_count() < 2) throw StateError("fewer than two unmatched half-edges");
  if (!s.is_unmatched(elected)) throw StateError("elected half-edge is not in H");
  // Uniform over H \ {elected}: draw among the other |H| - 1 pool positions.
  auto pool = s.unmatched();
  std::size_t self = s.pool_position(elected);
  std::size_t i = uniform_index(rng, pool.size() - 1);
  if (i >= self) ++i;
  HalfEdge other = pool[i];
  EdgeId e = s.match(elected, other);
  return {elected, other, s.vertex_of(elected), s.vertex_of(other), e};
}

FormedEdge match_step(SemiGraph& s, const ElectionPolicy& policy, Rng& rng) {
  if (s.unmatched_count() < 2) throw StateError("fewer than two unmatched half-edges");
  HalfEdge h = s.lowest_unmatched();
  if (policy) {
    if (auto chosen = policy(s)) {
      if (!s.is_unmatched(*chosen)) {
        throw InvariantViolation("election policy returned a half-edge outside H");
      }
      h = *chosen;
    }
  }
  return match_elected(s, h, rng);
}

MultiGraph complete_matching(SemiGraph& s, Rng& rng, const ElectionPolicy& policy) {
  while (s.unmatched_count() >= 2) match_step(s, policy, rng);
  return s.to_multigraph();
}

MultiGraph sample_regular(std::size_t n, std::size_t d, Rng& rng, const ElectionPolicy& policy) {
  SemiGraph s = fresh_semigraph(n, d);
  return complete_matching(s, rng, policy);
}

std::uint64_t count_short_cycles(const MultiGraph& g, std::size_t r) {
  if (r == 0) return 0;
  std::uint64_t count = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) count += g.loop_count(v);
  if (r < 2) return count;

  // Parallel classes: k edges between u != v give k(k-1)/2 two-cycles.
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    for (Vertex w : g.neighbours(u)) {
      if (w <= u) continue;
      std::uint64_t k = 0;
      for (OrientedEdge oe : g.out_edges(u)) k += g.v1(oe) == w;
      count += k * (k - 1) / 2;
    }
  }
  if (r < 3) return count;

  // Simple cycles of length 3..r: DFS from the smallest vertex s over
  // vertices > s, following individual edges. Each cycle is found once per
  // direction.
  std::uint64_t directed = 0;
  std::vector<char> on_path(g.vertex_count(), 0);
  for (Vertex s = 0; s < g.vertex_count(); ++s) {
    auto dfs = [&](auto&& self, Vertex v, std::size_t len, EdgeId via) -> void {
      for (OrientedEdge oe : g.out_edges(v)) {
        if (oe.edge == via) continue;
        Vertex w = g.v1(oe);
        if (w == v) continue;
        if (w == s) {
          if (len + 1 >= 3) ++directed;
          continue;
        }
        if (w < s || on_path[w] || len + 1 >= r) continue;
        on_path[w] = 1;
        self(self, w, len + 1, oe.edge);
        on_path[w] = 0;
      }
    };
    on_path[s] = 1;
    dfs(dfs, s, 0, static_cast<EdgeId>(-1));
    on_path[s] = 0;
  }
  return count + directed / 2;
}

}  // namespace cpsim
