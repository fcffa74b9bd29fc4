#include "blocksketch/vote.h"

#include <string>
#include <vector>

#include "blocksketch/error.h"

namespace blocksketch {

VoteOutcome MajorityVote(const Graph& g, const SampleMask& mask,
                         const LabelVector& sample_labels,
                         const TieBreak& tie_break) {
  const std::int64_t n = g.num_nodes();
  if (mask.num_nodes != n) {
    throw ParameterError("majority vote: mask is for " +
                         std::to_string(mask.num_nodes) + " nodes, graph has " +
                         std::to_string(n));
  }
  if (sample_labels.size() != mask.kept.size()) {
    throw ParameterError("majority vote: " +
                         std::to_string(sample_labels.size()) +
                         " labels for " + std::to_string(mask.kept.size()) +
                         " sampled nodes");
  }
  if (!IsComplete(sample_labels)) {
    throw ParameterError("majority vote: sample labels must be complete");
  }

  VoteOutcome out;
  out.labels.assign(n, Label::kUnassigned);
  out.margin.assign(n, 0);
  std::vector<bool> sampled(n, false);
  for (std::size_t i = 0; i < mask.kept.size(); ++i) {
    const NodeId v = mask.kept[i];
    if (v < 0 || v >= n || sampled[v]) {
      throw ParameterError("majority vote: invalid sample mask");
    }
    sampled[v] = true;
    out.labels[v] = sample_labels[i];
  }

  for (NodeId v = 0; v < n; ++v) {
    if (sampled[v]) continue;
    std::int64_t margin = 0;
    for (NodeId u : g.Neighbors(v)) {
      if (sampled[u]) margin += LabelSign(out.labels[u]);
    }
    out.margin[v] = margin;
    if (margin > 0) {
      out.labels[v] = Label::kPlus;
    } else if (margin < 0) {
      out.labels[v] = Label::kMinus;
    } else {
      ++out.tie_count;
      if (tie_break.mode == TieMode::kCoin) {
        Rng coin(SplitSeed(tie_break.seed, Stream::kTieBreak,
                           static_cast<std::uint64_t>(v)));
        out.labels[v] = coin.Bernoulli(0.5) ? Label::kPlus : Label::kMinus;
      }
    }
  }
  return out;
}

bool OracleVoteTrial(const Graph& g, double gamma, RngSeed seed) {
  if (!g.truth().has_value()) {
    throw ParameterError("oracle vote needs a graph with planted labels");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ParameterError("oracle vote: gamma must lie in (0, 1]");
  }
  const LabelVector& truth = *g.truth();
  const SampleMask mask = SubsampleNodes(g.num_nodes(), gamma, seed);
  LabelVector sample_labels;
  sample_labels.reserve(mask.kept.size());
  for (NodeId v : mask.kept) sample_labels.push_back(truth[v]);
  const VoteOutcome outcome = MajorityVote(g, mask, sample_labels);
  return PartitionsEqual(outcome.labels, truth);
}

}  // namespace blocksketch
