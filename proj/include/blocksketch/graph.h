#ifndef BLOCKSKETCH_GRAPH_H_
#define BLOCKSKETCH_GRAPH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace blocksketch {

using NodeId = std::int32_t;

// Community label. kUnassigned marks nodes a vote could not decide.
enum class Label : std::int8_t { kMinus = -1, kUnassigned = 0, kPlus = 1 };

using LabelVector = std::vector<Label>;

inline int LabelSign(Label l) { return static_cast<int>(l); }
inline Label Flip(Label l) { return static_cast<Label>(-static_cast<int>(l)); }

bool IsComplete(const LabelVector& labels);

// Compact rendering: '+', '-', '?' per node.
std::string LabelString(const LabelVector& labels);

// Unordered pair stored with first < second.
using Edge = std::pair<NodeId, NodeId>;

// Undirected simple graph in CSR form with an optional planted partition.
// Immutable after construction.
class Graph {
 public:
  Graph() = default;

  // Edges may be given in either orientation and any order. Throws
  // ParameterError on self-loops, duplicates, out-of-range endpoints, or a
  // truth vector that is incomplete or of the wrong length.
  Graph(std::int64_t num_nodes, std::vector<Edge> edges,
        std::optional<LabelVector> truth = std::nullopt);

  std::int64_t num_nodes() const { return num_nodes_; }
  std::int64_t num_edges() const {
    return static_cast<std::int64_t>(edges_.size());
  }

  // Sorted ascending.
  std::span<const NodeId> Neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v],
            adjacency_.data() + offsets_[v + 1]};
  }
  std::int64_t Degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  bool HasEdge(NodeId u, NodeId v) const;

  // Lexicographically sorted, first < second.
  const std::vector<Edge>& edges() const { return edges_; }

  const std::optional<LabelVector>& truth() const { return truth_; }

  Graph WithTruth(std::optional<LabelVector> truth) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.edges_ == b.edges_ &&
           a.truth_ == b.truth_;
  }

 private:
  std::int64_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::int64_t> offsets_{0};
  std::vector<NodeId> adjacency_;
  std::optional<LabelVector> truth_;
};

}  // namespace blocksketch

#endif  // BLOCKSKETCH_GRAPH_H_
