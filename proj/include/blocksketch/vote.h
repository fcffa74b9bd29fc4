#ifndef BLOCKSKETCH_VOTE_H_
#define BLOCKSKETCH_VOTE_H_

#include <cstdint>
#include <vector>

#include "blocksketch/graph.h"
#include "blocksketch/rng.h"
#include "blocksketch/sbm.h"

namespace blocksketch {

enum class TieMode { kStrict, kCoin };

struct TieBreak {
  TieMode mode = TieMode::kStrict;
  RngSeed seed = 0;  // used only by kCoin
};

struct VoteOutcome {
  LabelVector labels;
  std::int64_t tie_count = 0;
  // margin[v] = e(v, R1) - e(v, R2) for off-sample v; 0 for sampled nodes.
  std::vector<std::int64_t> margin;
};

// Extends labels on mask.kept (sample_labels[i] labels mask.kept[i]) to the
// whole graph: an off-sample node takes the strict majority label of its
// sampled neighbours. Ties stay kUnassigned unless tie_break is kCoin.
VoteOutcome MajorityVote(const Graph& g, const SampleMask& mask,
                         const LabelVector& sample_labels,
                         const TieBreak& tie_break = {});

// Majority vote driven by the true labels of the sampled nodes. Returns
// whether the full planted partition is recovered.
bool OracleVoteTrial(const Graph& g, double gamma, RngSeed seed);

}  // namespace blocksketch

#endif  // BLOCKSKETCH_VOTE_H_
