#pragma once

// Line-oriented graph text format:
//
//   n m
//   u v        (m lines, 0-based; a loop is written "u u", parallel edges repeat)
//
// Edge order in memory equals file order.

#include <filesystem>
#include <iosfwd>

#include "cpsim/graph.hpp"

namespace cpsim {

MultiGraph read_graph(std::istream& in);
MultiGraph read_graph(const std::filesystem::path& path);
void write_graph(std::ostream& out, const MultiGraph& g);
void write_graph(const std::filesystem::path& path, const MultiGraph& g);

}  // namespace cpsim
