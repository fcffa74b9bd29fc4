#include "blocksketch/graph.h"

#include <algorithm>
#include <string>
#include <utility>

#include "blocksketch/error.h"

namespace blocksketch {

bool IsComplete(const LabelVector& labels) {
  return std::none_of(labels.begin(), labels.end(),
                      [](Label l) { return l == Label::kUnassigned; });
}

std::string LabelString(const LabelVector& labels) {
  std::string s;
  s.reserve(labels.size());
  for (Label l : labels) {
    s.push_back(l == Label::kPlus ? '+' : l == Label::kMinus ? '-' : '?');
  }
  return s;
}

Graph::Graph(std::int64_t num_nodes, std::vector<Edge> edges,
             std::optional<LabelVector> truth)
    : num_nodes_(num_nodes), edges_(std::move(edges)),
      truth_(std::move(truth)) {
  if (num_nodes_ < 0 || num_nodes_ > (std::int64_t{1} << 30)) {
    throw ParameterError("graph: node count out of range: " +
                         std::to_string(num_nodes_));
  }
  for (Edge& e : edges_) {
    if (e.first < 0 || e.second < 0 || e.first >= num_nodes_ ||
        e.second >= num_nodes_) {
      throw ParameterError("graph: edge endpoint out of range: (" +
                           std::to_string(e.first) + ", " +
                           std::to_string(e.second) + ")");
    }
    if (e.first == e.second) {
      throw ParameterError("graph: self-loop at node " +
                           std::to_string(e.first));
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw ParameterError("graph: duplicate edge (" +
                         std::to_string(dup->first) + ", " +
                         std::to_string(dup->second) + ")");
  }
  if (truth_.has_value()) {
    if (static_cast<std::int64_t>(truth_->size()) != num_nodes_) {
      throw ParameterError("graph: truth length does not match node count");
    }
    if (!IsComplete(*truth_)) {
      throw ParameterError("graph: truth has unassigned entries");
    }
  }

  offsets_.assign(num_nodes_ + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.first + 1];
    ++offsets_[e.second + 1];
  }
  for (std::int64_t v = 0; v < num_nodes_; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.resize(2 * edges_.size());
  std::vector<std::int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Two passes over the sorted edges: neighbours below v first, then above.
  for (const Edge& e : edges_) adjacency_[cursor[e.second]++] = e.first;
  for (const Edge& e : edges_) adjacency_[cursor[e.first]++] = e.second;
}

bool Graph::HasEdge(NodeId u, NodeId v) const {
  if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_) return false;
  auto nbrs = Neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

Graph Graph::WithTruth(std::optional<LabelVector> truth) const {
  Graph g = *this;
  if (truth.has_value()) {
    if (static_cast<std::int64_t>(truth->size()) != num_nodes_ ||
        !IsComplete(*truth)) {
      throw ParameterError("graph: invalid truth vector");
    }
  }
  g.truth_ = std::move(truth);
  return g;
}

}  // namespace blocksketch
