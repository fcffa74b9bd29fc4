#include "blocksketch/sbm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "blocksketch/error.h"

namespace blocksketch {
namespace {

bool IsProbability(double x) { return x >= 0.0 && x <= 1.0; }

double BackComputeRate(double prob, std::int64_t n) {
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return prob * static_cast<double>(n) / std::log(static_cast<double>(n));
}

// Geometric skipping over a sorted candidate list: each candidate is chosen
// independently with probability prob.
template <typename Fn>
void ForEachBernoulliHit(Rng& rng, double prob, std::span<const NodeId> list,
                         Fn&& emit) {
  if (prob <= 0.0 || list.empty()) return;
  std::uint64_t pos = rng.GeometricSkip(prob);
  while (pos < list.size()) {
    emit(list[pos]);
    const std::uint64_t skip = rng.GeometricSkip(prob);
    if (skip >= list.size()) break;
    pos += skip + 1;
  }
}

}  // namespace

double RateToProbability(double rate, std::int64_t n) {
  if (n < 2) throw ParameterError("rate parametrization needs n >= 2");
  const double dn = static_cast<double>(n);
  return rate * std::log(dn) / dn;
}

SbmParams SbmParams::Balanced(std::int64_t n, double alpha, double beta) {
  SbmParams params;
  params.mode = Mode::kBalanced;
  params.n = n;
  params.n1 = n / 2;
  params.n2 = n - n / 2;
  params.alpha = alpha;
  params.beta = beta;
  if (n >= 2) {
    params.p = RateToProbability(alpha, n);
    params.q = RateToProbability(beta, n);
  }
  params.Validate();
  return params;
}

SbmParams SbmParams::Explicit(std::int64_t n1, std::int64_t n2, double p,
                              double q) {
  SbmParams params;
  params.mode = Mode::kExplicit;
  params.n1 = n1;
  params.n2 = n2;
  params.n = n1 + n2;
  params.p = p;
  params.q = q;
  params.alpha = BackComputeRate(p, params.n);
  params.beta = BackComputeRate(q, params.n);
  params.Validate();
  return params;
}

void SbmParams::Validate() const {
  if (mode == Mode::kBalanced) {
    if (n < 2 || n % 2 != 0) {
      throw ParameterError("balanced SBM needs an even n >= 2, got " +
                           std::to_string(n));
    }
    if (!(alpha > beta) || !(beta >= 0.0)) {
      throw ParameterError("balanced SBM needs alpha > beta >= 0");
    }
    if (n1 != n / 2 || n2 != n / 2) {
      throw ParameterError("balanced SBM needs n1 = n2 = n/2");
    }
  } else {
    if (n1 < 1 || n2 < 1 || n1 + n2 != n) {
      throw ParameterError("explicit SBM needs n1, n2 >= 1 and n1 + n2 = n");
    }
  }
  if (!IsProbability(p) || !IsProbability(q)) {
    throw ParameterError("SBM edge probabilities must lie in [0, 1]");
  }
  // p == q is admitted in explicit mode (structureless graph).
  if (mode == Mode::kBalanced ? !(p > q) : !(p >= q)) {
    throw ParameterError("SBM needs p > q");
  }
}

Graph SampleSbm(const SbmParams& params, RngSeed seed) {
  params.Validate();
  const std::int64_t n = params.n;

  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng partition_rng(SplitSeed(seed, Stream::kPartition));
  for (std::int64_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::int64_t>(
        partition_rng.Below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }
  LabelVector truth(n, Label::kMinus);
  for (std::int64_t i = 0; i < params.n1; ++i) truth[perm[i]] = Label::kPlus;

  std::vector<NodeId> plus, minus;
  for (NodeId v = 0; v < n; ++v) {
    (truth[v] == Label::kPlus ? plus : minus).push_back(v);
  }

  Rng edge_rng(SplitSeed(seed, Stream::kEdges));
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    const auto& same = truth[u] == Label::kPlus ? plus : minus;
    const auto& other = truth[u] == Label::kPlus ? minus : plus;
    auto emit = [&](NodeId v) { edges.emplace_back(u, v); };
    auto tail = [u](const std::vector<NodeId>& list) {
      auto it = std::upper_bound(list.begin(), list.end(), u);
      return std::span<const NodeId>(list.data() + (it - list.begin()),
                                     static_cast<std::size_t>(list.end() - it));
    };
    ForEachBernoulliHit(edge_rng, params.p, tail(same), emit);
    ForEachBernoulliHit(edge_rng, params.q, tail(other), emit);
  }
  return Graph(n, std::move(edges), std::move(truth));
}

SampleMask SubsampleNodes(std::int64_t n, double gamma, RngSeed seed) {
  if (n < 0) throw ParameterError("subsample: negative node count");
  if (!IsProbability(gamma)) {
    throw ParameterError("subsample: gamma must lie in [0, 1]");
  }
  SampleMask mask;
  mask.num_nodes = n;
  mask.gamma = gamma;
  mask.seed = seed;
  Rng rng(SplitSeed(seed, Stream::kSubsample));
  for (NodeId v = 0; v < n; ++v) {
    if (rng.Bernoulli(gamma)) mask.kept.push_back(v);
  }
  return mask;
}

Subgraph InducedSubgraph(const Graph& g, const SampleMask& mask) {
  return InducedSubgraph(g, mask.kept);
}

Subgraph InducedSubgraph(const Graph& g, std::span<const NodeId> kept) {
  const std::int64_t n = g.num_nodes();
  std::vector<NodeId> position(n, -1);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const NodeId v = kept[i];
    if (v < 0 || v >= n) {
      throw ParameterError("induced subgraph: node " + std::to_string(v) +
                           " out of range");
    }
    if (i > 0 && kept[i - 1] >= v) {
      throw ParameterError("induced subgraph: kept nodes must be ascending "
                           "and distinct");
    }
    position[v] = static_cast<NodeId>(i);
  }

  std::vector<Edge> edges;
  for (NodeId u : kept) {
    for (NodeId v : g.Neighbors(u)) {
      if (v > u && position[v] >= 0) edges.emplace_back(position[u], position[v]);
    }
  }
  std::optional<LabelVector> truth;
  if (g.truth().has_value()) {
    truth.emplace();
    truth->reserve(kept.size());
    for (NodeId v : kept) truth->push_back((*g.truth())[v]);
  }
  Subgraph sub;
  sub.to_original.assign(kept.begin(), kept.end());
  sub.graph = Graph(static_cast<std::int64_t>(kept.size()), std::move(edges),
                    std::move(truth));
  return sub;
}

bool PartitionsEqual(const LabelVector& a, const LabelVector& b) {
  if (a.size() != b.size()) {
    throw ParameterError("partition comparison: length mismatch");
  }
  if (!IsComplete(a) || !IsComplete(b)) return false;
  return a == b ||
         std::equal(a.begin(), a.end(), b.begin(),
                    [](Label x, Label y) { return x == Flip(y); });
}

std::int64_t EdgeCountBetween(const Graph& g, NodeId v,
                              std::span<const NodeId> s) {
  const std::int64_t n = g.num_nodes();
  if (v < 0 || v >= n) {
    throw ParameterError("edge count: node out of range");
  }
  std::vector<NodeId> members(s.begin(), s.end());
  for (NodeId u : members) {
    if (u < 0 || u >= n) throw ParameterError("edge count: set out of range");
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::int64_t count = 0;
  for (NodeId u : members) count += g.HasEdge(v, u) ? 1 : 0;
  return count;
}

}  // namespace blocksketch
