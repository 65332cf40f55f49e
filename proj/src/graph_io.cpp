#include "cpsim/graph_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "cpsim/error.hpp"

namespace cpsim {

MultiGraph read_graph(std::istream& in) {
  long long n = -1;
  long long m = -1;
  if (!(in >> n >> m) || n < 0 || m < 0) throw InputError("graph header must be 'n m'");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u = -1;
    long long v = -1;
    if (!(in >> u >> v)) {
      throw InputError("graph file truncated at edge " + std::to_string(i));
    }
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw InputError("edge " + std::to_string(i) + " has an endpoint out of range");
    }
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  return MultiGraph(static_cast<std::size_t>(n), std::move(edges));
}

MultiGraph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file " + path.string());
  return read_graph(in);
}

void write_graph(std::ostream& out, const MultiGraph& g) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void write_graph(const std::filesystem::path& path, const MultiGraph& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write graph file " + path.string());
  write_graph(out, g);
}

}  // namespace cpsim
