#ifndef BLOCKSKETCH_GRAPH_IO_H_
#define BLOCKSKETCH_GRAPH_IO_H_

#include <iosfwd>
#include <string>

#include "blocksketch/graph.h"

namespace blocksketch {

// Text format:
//   n m
//   u v          (m lines, u < v, ascending lexicographic)
//   labels x_0 ... x_{n-1}   (optional, each 1 or -1)
void WriteGraph(std::ostream& out, const Graph& g);
void WriteGraphFile(const std::string& path, const Graph& g);

// Throws ParseError on malformed input, duplicate edges, self-loops or
// out-of-range endpoints.
Graph ReadGraph(std::istream& in);
Graph ReadGraphFile(const std::string& path);

}  // namespace blocksketch

#endif  // BLOCKSKETCH_GRAPH_IO_H_
