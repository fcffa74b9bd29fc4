#ifndef BLOCKSKETCH_SBM_H_
#define BLOCKSKETCH_SBM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "blocksketch/graph.h"
#include "blocksketch/rng.h"

namespace blocksketch {

// Two-community planted partition model.
//
// Balanced mode: n even, communities of size n/2, p = alpha * ln(n) / n and
// q = beta * ln(n) / n. Explicit mode: community sizes n1 + n2 = n and the
// edge probabilities given directly; alpha and beta are then back-computed
// as p * n / ln(n) for reporting (NaN when n < 2).
struct SbmParams {
  enum class Mode { kBalanced, kExplicit };

  static SbmParams Balanced(std::int64_t n, double alpha, double beta);
  static SbmParams Explicit(std::int64_t n1, std::int64_t n2, double p,
                            double q);

  // Throws ParameterError when the invariants do not hold.
  void Validate() const;

  Mode mode = Mode::kBalanced;
  std::int64_t n = 0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double q = 0.0;
};

// Rate-to-probability conversion with the natural log: alpha * ln(n) / n.
double RateToProbability(double rate, std::int64_t n);

// Draws a graph with the planted partition stored as truth (+1 for the first
// community). Deterministic in (params, seed).
Graph SampleSbm(const SbmParams& params, RngSeed seed);

struct SampleMask {
  std::int64_t num_nodes = 0;
  std::vector<NodeId> kept;  // ascending
  double gamma = 0.0;
  RngSeed seed = 0;
};

// Keeps each node independently with probability gamma.
SampleMask SubsampleNodes(std::int64_t n, double gamma, RngSeed seed);

struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_original;  // subgraph index -> original index
};

// Restricts g (and its truth, if any) to mask.kept with contiguous
// relabeling in ascending original order.
Subgraph InducedSubgraph(const Graph& g, const SampleMask& mask);
Subgraph InducedSubgraph(const Graph& g, std::span<const NodeId> kept);

// True iff both vectors are complete and equal up to a global sign flip.
bool PartitionsEqual(const LabelVector& a, const LabelVector& b);

// Number of neighbours of v inside s. s is treated as a set.
std::int64_t EdgeCountBetween(const Graph& g, NodeId v,
                              std::span<const NodeId> s);

}  // namespace blocksketch

#endif  // BLOCKSKETCH_SBM_H_
