#include "cpsim/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <string>
#include <unordered_map>

#include "cpsim/error.hpp"

namespace cpsim {

MultiGraph::MultiGraph(std::size_t vertex_count, std::vector<Edge> edges)
    : n_(vertex_count), edges_(std::move(edges)), loops_(vertex_count, 0) {
  std::vector<std::size_t> deg(n_, 0);
  for (const Edge& e : edges_) {
    if (e.u >= n_ || e.v >= n_) {
      throw InputError("edge endpoint out of range: (" + std::to_string(e.u) + ", " +
                       std::to_string(e.v) + ") with n = " + std::to_string(n_));
    }
    ++deg[e.u];
    ++deg[e.v];
    if (e.is_loop()) ++loops_[e.u];
  }
  out_offset_.assign(n_ + 1, 0);
  for (std::size_t v = 0; v < n_; ++v) {
    out_offset_[v + 1] = out_offset_[v] + deg[v];
    max_degree_ = std::max(max_degree_, deg[v]);
  }
  out_.resize(out_offset_[n_]);
  std::vector<std::size_t> fill(out_offset_.begin(), out_offset_.end() - 1);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    out_[fill[edges_[e].u]++] = {e, 0};
    out_[fill[edges_[e].v]++] = {e, 1};
  }

  nbr_offset_.assign(n_ + 1, 0);
  std::vector<Vertex> scratch;
  for (Vertex v = 0; v < n_; ++v) {
    scratch.clear();
    for (OrientedEdge oe : out_edges(v)) {
      Vertex w = v1(oe);
      if (w != v) scratch.push_back(w);
    }
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    nbr_.insert(nbr_.end(), scratch.begin(), scratch.end());
    nbr_offset_[v + 1] = nbr_.size();
  }
}

bool MultiGraph::adjacent(Vertex a, Vertex b) const {
  if (a == b) return has_loop(a);
  auto nb = neighbours(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

RootedGraph::RootedGraph(MultiGraph g, Vertex r) : graph(std::move(g)), root(r) {
  if (!graph.valid(root)) throw InputError("root is not a vertex of the graph");
}

namespace {

void require_vertex(const MultiGraph& g, Vertex v) {
  if (!g.valid(v)) {
    throw InputError("invalid vertex " + std::to_string(v) + " (n = " +
                     std::to_string(g.vertex_count()) + ")");
  }
}

}  // namespace

std::size_t degree(const MultiGraph& g, Vertex v) {
  require_vertex(g, v);
  return g.degree(v);
}

std::vector<std::int64_t> distances_from(const MultiGraph& g, std::span<const Vertex> sources,
                                         std::int64_t max_radius) {
  std::vector<std::int64_t> d(g.vertex_count(), kUnreachable);
  std::deque<Vertex> queue;
  for (Vertex s : sources) {
    require_vertex(g, s);
    if (d[s] != 0) {
      d[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    if (max_radius >= 0 && d[v] >= max_radius) continue;
    for (Vertex w : g.neighbours(v)) {
      if (d[w] == kUnreachable) {
        d[w] = d[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return d;
}

std::vector<std::int64_t> distances_from(const MultiGraph& g, Vertex source,
                                         std::int64_t max_radius) {
  return distances_from(g, std::span<const Vertex>(&source, 1), max_radius);
}

std::optional<std::size_t> dist(const MultiGraph& g, Vertex u, Vertex v) {
  require_vertex(g, u);
  require_vertex(g, v);
  auto d = distances_from(g, u);
  if (d[v] == kUnreachable) return std::nullopt;
  return static_cast<std::size_t>(d[v]);
}

Subgraph induced_subgraph(const MultiGraph& g, std::span<const Vertex> vertices) {
  std::vector<Vertex> local(g.vertex_count(), kNoVertex);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    require_vertex(g, vertices[i]);
    local[vertices[i]] = static_cast<Vertex>(i);
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (local[e.u] != kNoVertex && local[e.v] != kNoVertex) {
      edges.push_back({local[e.u], local[e.v]});
    }
  }
  return {MultiGraph(vertices.size(), std::move(edges)),
          std::vector<Vertex>(vertices.begin(), vertices.end())};
}

Subgraph ball(const MultiGraph& g, Vertex v, std::size_t r) {
  auto d = distances_from(g, v, static_cast<std::int64_t>(r));
  std::vector<Vertex> members{v};
  for (Vertex w = 0; w < g.vertex_count(); ++w) {
    if (w != v && d[w] != kUnreachable) members.push_back(w);
  }
  return induced_subgraph(g, members);
}

bool is_connected(const MultiGraph& g) {
  if (g.vertex_count() == 0) return true;
  auto d = distances_from(g, Vertex{0});
  return std::none_of(d.begin(), d.end(), [](std::int64_t x) { return x == kUnreachable; });
}

bool is_tree(const MultiGraph& g) {
  return g.vertex_count() > 0 && g.edge_count() + 1 == g.vertex_count() && is_connected(g);
}

namespace {

// BFS-numbered tree where the root has root_children children and every
// other vertex above depth ell has d children.
RootedGraph build_layered_tree(std::size_t root_children, std::size_t d, std::size_t ell) {
  std::vector<Edge> edges;
  std::size_t next = 1;
  std::size_t layer_begin = 0;
  std::size_t layer_end = 1;
  for (std::size_t depth = 0; depth < ell; ++depth) {
    for (std::size_t p = layer_begin; p < layer_end; ++p) {
      std::size_t kids = depth == 0 ? root_children : d;
      for (std::size_t c = 0; c < kids; ++c) {
        edges.push_back({static_cast<Vertex>(p), static_cast<Vertex>(next++)});
      }
    }
    layer_begin = layer_end;
    layer_end = next;
  }
  return {MultiGraph(next, std::move(edges)), 0};
}

}  // namespace

RootedGraph build_regular_tree(std::size_t d, std::size_t ell) {
  if (d < 2) throw InputError("build_regular_tree requires d >= 2");
  return build_layered_tree(d, d, ell);
}

RootedGraph build_hat_tree(std::size_t d, std::size_t ell) {
  if (d < 2) throw InputError("build_hat_tree requires d >= 2");
  return build_layered_tree(d + 1, d, ell);
}

RootedGraph build_pruned_tree(std::size_t d, std::size_t ell, EdgeId removed_edge) {
  RootedGraph full = build_regular_tree(d, ell);
  const MultiGraph& t = full.graph;
  if (removed_edge >= t.edge_count()) {
    throw InputError("edge " + std::to_string(removed_edge) + " is not an edge of T_" +
                     std::to_string(ell));
  }
  std::vector<Edge> kept;
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    if (e != removed_edge) kept.push_back(t.edge(e));
  }
  MultiGraph cut(t.vertex_count(), std::move(kept));
  auto d0 = distances_from(cut, full.root);
  std::vector<Vertex> members;
  for (Vertex v = 0; v < cut.vertex_count(); ++v) {
    if (d0[v] != kUnreachable) members.push_back(v);
  }
  Subgraph sub = induced_subgraph(cut, members);
  return {std::move(sub.graph), 0};
}

std::vector<RootedGraph> pruned_tree_catalog(std::size_t d, std::size_t ell) {
  std::vector<RootedGraph> out;
  // First vertex at depth k is 1 + d + ... + d^{k-1}; the edge into it has
  // index one less.
  std::size_t first = 1;
  std::size_t layer = 1;
  for (std::size_t k = 1; k <= ell; ++k) {
    out.push_back(build_pruned_tree(d, ell, static_cast<EdgeId>(first - 1)));
    layer *= d;
    first += layer;
  }
  return out;
}

bool is_embedding(const RootedGraph& host, const RootedGraph& pattern,
                  std::span<const Vertex> witness) {
  const MultiGraph& h = host.graph;
  const MultiGraph& p = pattern.graph;
  if (witness.size() != p.vertex_count()) return false;
  if (witness[pattern.root] != host.root) return false;
  std::vector<char> used(h.vertex_count(), 0);
  for (Vertex w : witness) {
    if (!h.valid(w) || used[w]) return false;
    used[w] = 1;
  }
  for (Vertex a = 0; a < p.vertex_count(); ++a) {
    for (Vertex b = a; b < p.vertex_count(); ++b) {
      if (p.adjacent(a, b) != h.adjacent(witness[a], witness[b])) return false;
    }
  }
  return true;
}

namespace {

class EmbeddingSearch {
 public:
  EmbeddingSearch(const MultiGraph& host, Vertex host_root, const RootedGraph& pattern)
      : host_root_(host_root), pattern_(pattern), h_(host), p_(pattern.graph) {}

  std::optional<std::vector<Vertex>> run() {
    const std::size_t k = p_.vertex_count();
    if (k > h_.vertex_count()) return std::nullopt;

    // BFS order from the pattern root; unreachable pattern vertices go last.
    order_.clear();
    parent_.assign(k, kNoVertex);
    std::vector<char> seen(k, 0);
    order_.push_back(pattern_.root);
    seen[pattern_.root] = 1;
    for (std::size_t i = 0; i < order_.size(); ++i) {
      Vertex v = order_[i];
      for (Vertex w : p_.neighbours(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          parent_[w] = v;
          order_.push_back(w);
        }
      }
    }
    for (Vertex v = 0; v < k; ++v) {
      if (!seen[v]) order_.push_back(v);
    }
    tree_mode_ = is_tree(p_);
    if (tree_mode_) {
      children_.assign(k, {});
      for (Vertex v = 0; v < k; ++v) {
        if (parent_[v] != kNoVertex) children_[parent_[v]].push_back(v);
      }
    }

    map_.assign(k, kNoVertex);
    used_.assign(h_.vertex_count(), 0);
    if (!compatible(pattern_.root, host_root_, 0)) return std::nullopt;
    if (tree_mode_ && !can_host(pattern_.root, host_root_, kNoVertex)) return std::nullopt;
    assign(pattern_.root, host_root_);
    if (extend(1)) return map_;
    return std::nullopt;
  }

 private:
  // Induced-condition check of candidate c for pattern vertex v against the
  // first `placed` vertices of the order.
  bool compatible(Vertex v, Vertex c, std::size_t placed) const {
    if (p_.has_loop(v) != h_.has_loop(c)) return false;
    if (h_.neighbours(c).size() < p_.neighbours(v).size()) return false;
    for (std::size_t i = 0; i < placed; ++i) {
      Vertex q = order_[i];
      if (p_.adjacent(v, q) != h_.adjacent(c, map_[q])) return false;
    }
    return true;
  }

  void assign(Vertex v, Vertex c) {
    map_[v] = c;
    used_[c] = 1;
  }
  void unassign(Vertex v) {
    used_[map_[v]] = 0;
    map_[v] = kNoVertex;
  }

  bool extend(std::size_t i) {
    if (i == order_.size()) return true;
    Vertex v = order_[i];
    auto try_candidate = [&](Vertex c, Vertex host_parent) {
      if (used_[c] || !compatible(v, c, i)) return false;
      if (tree_mode_ && !can_host(v, c, host_parent)) return false;
      assign(v, c);
      if (extend(i + 1)) return true;
      unassign(v);
      return false;
    };
    if (parent_[v] != kNoVertex) {
      Vertex hp = map_[parent_[v]];
      for (Vertex c : h_.neighbours(hp)) {
        if (try_candidate(c, hp)) return true;
      }
    } else {
      for (Vertex c = 0; c < h_.vertex_count(); ++c) {
        if (try_candidate(c, kNoVertex)) return true;
      }
    }
    return false;
  }

  // Can host vertex c (entered from host_parent) carry the pattern subtree
  // below v? Necessary in general, exact when the host is a tree.
  bool can_host(Vertex v, Vertex c, Vertex host_parent) {
    if (h_.has_loop(c)) return false;
    const auto& kids = children_[v];
    if (kids.empty()) return true;
    const std::uint64_t key =
        (static_cast<std::uint64_t>(v) * h_.vertex_count() + c) * (h_.vertex_count() + 1) +
        (host_parent == kNoVertex ? 0 : host_parent + 1);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    std::vector<Vertex> slots;
    for (Vertex w : h_.neighbours(c)) {
      if (w != host_parent) slots.push_back(w);
    }
    bool ok = slots.size() >= kids.size();
    if (ok) {
      // Bipartite matching pattern children -> host slots (Kuhn's algorithm).
      std::vector<std::vector<std::size_t>> options(kids.size());
      for (std::size_t a = 0; a < kids.size(); ++a) {
        for (std::size_t b = 0; b < slots.size(); ++b) {
          if (can_host(kids[a], slots[b], c)) options[a].push_back(b);
        }
        if (options[a].empty()) {
          ok = false;
          break;
        }
      }
      if (ok) {
        std::vector<std::size_t> owner(slots.size(), kids.size());
        std::vector<char> visited;
        auto augment = [&](auto&& self, std::size_t a) -> bool {
          for (std::size_t b : options[a]) {
            if (visited[b]) continue;
            visited[b] = 1;
            if (owner[b] == kids.size() || self(self, owner[b])) {
              owner[b] = a;
              return true;
            }
          }
          return false;
        };
        for (std::size_t a = 0; a < kids.size() && ok; ++a) {
          visited.assign(slots.size(), 0);
          ok = augment(augment, a);
        }
      }
    }
    memo_.emplace(key, ok);
    return ok;
  }

  Vertex host_root_;
  const RootedGraph& pattern_;
  const MultiGraph& h_;
  const MultiGraph& p_;
  std::vector<Vertex> order_;
  std::vector<Vertex> parent_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<Vertex> map_;
  std::vector<char> used_;
  bool tree_mode_ = false;
  std::unordered_map<std::uint64_t, bool> memo_;
};

}  // namespace

std::optional<std::vector<Vertex>> embeds(const MultiGraph& host, Vertex host_root,
                                          const RootedGraph& pattern) {
  if (!host.valid(host_root)) throw InputError("embeds: host root out of range");
  return EmbeddingSearch(host, host_root, pattern).run();
}

std::optional<std::vector<Vertex>> embeds(const RootedGraph& host, const RootedGraph& pattern) {
  return embeds(host.graph, host.root, pattern);
}

}  // namespace cpsim
