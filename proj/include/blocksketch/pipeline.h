#ifndef BLOCKSKETCH_PIPELINE_H_
#define BLOCKSKETCH_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blocksketch/graph.h"
#include "blocksketch/rng.h"
#include "blocksketch/sbm.h"
#include "blocksketch/sdp.h"
#include "blocksketch/vote.h"

namespace blocksketch {

struct SketchConfig {
  double gamma = 1.0;
  // Unset: lambda = LambdaStar(p, q).
  std::optional<double> fixed_lambda;
  SdpConfig sdp;
  TieBreak tie_break;
  // Wall time is left at 0 unless requested so records stay reproducible.
  bool measure_time = false;

  void Validate() const;
};

struct SketchDiagnostics {
  SampleMask mask;
  std::int64_t sample_size = 0;
  bool degenerate_sample = false;  // |sample| <= 1
  double lambda_used = 0.0;
  double solver_lambda = 0.0;      // as recorded by the solver; 0 if not run
  LabelVector sample_labels;       // rounded SDP labels on mask.kept
  Certificate certificate;
  bool solver_converged = false;
  int solver_iterations = 0;
  std::int64_t vote_ties = 0;
};

struct SketchResult {
  LabelVector labels;
  SketchDiagnostics diagnostics;
};

// Subsample, solve the Lagrangian relaxation on the induced subgraph, and
// extend by majority vote. Requires p > q.
SketchResult SketchAndRecover(const Graph& g, double p, double q,
                              const SketchConfig& cfg, RngSeed seed);

struct TrialRecord {
  SbmParams params;
  double gamma = 0.0;
  RngSeed seed = 0;
  std::int64_t sample_size = 0;
  Certificate sdp_certificate;
  bool subgraph_success = false;
  std::int64_t vote_ties = 0;
  bool overall_success = false;
  bool degenerate_sample = false;
  bool solver_converged = false;
  double lambda_used = 0.0;
  std::string error;  // empty unless the trial threw
  double wall_ms = 0.0;
};

// Draws a graph from params and runs the sketch pipeline on it. A pure
// function of its arguments (wall_ms aside).
TrialRecord RunTrial(const SbmParams& params, const SketchConfig& cfg,
                     RngSeed trial_seed);

// Canonical single-line JSON rendering of a record.
std::string TrialRecordJson(const TrialRecord& record);

struct SweepAxes {
  std::vector<std::int64_t> n;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> gamma;

  std::size_t NumCells() const {
    return n.size() * alpha.size() * beta.size() * gamma.size();
  }
};

struct SweepCell {
  std::int64_t cell_id = 0;
  std::int64_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  std::int64_t subgraph_successes = 0;
  double success_rate = 0.0;
  double subgraph_success_rate = 0.0;
  double mean_sample_size = 0.0;
  double mean_tie_count = 0.0;
  double mean_wall_ms = 0.0;
};

struct SweepTable {
  SweepAxes axes;
  RngSeed master_seed = 0;
  std::vector<SweepCell> cells;           // axes order, gamma fastest
  std::vector<TrialRecord> trials;        // sorted by (cell_id, trial index)
};

// Seed of trial t in cell cell_id. Injective over cell_id, t < 2^32.
RngSeed TrialSeed(RngSeed master_seed, std::int64_t cell_id, std::int64_t t);

// Runs every (cell, trial) job on a pool of `workers` threads. The result is
// independent of the worker count and completion order. Trials that throw are
// counted as failures with TrialRecord::error set.
SweepTable RunSweep(const SweepAxes& axes, std::int64_t trials_per_cell,
                    const SketchConfig& cfg_template, RngSeed master_seed,
                    int workers = 1);

inline constexpr const char* kSweepCsvHeader =
    "n,alpha,beta,gamma,trials,successes,success_rate,subgraph_success_rate,"
    "mean_sample_size,mean_tie_count,mean_wall_ms,master_seed";

void WriteSweepCsv(std::ostream& out, const SweepTable& table);
std::string SweepCsv(const SweepTable& table);

// Strict parser for the CSV above; throws ParseError.
std::vector<SweepCell> ParseSweepCsv(const std::string& text,
                                     RngSeed* master_seed = nullptr);

// Renders cells exactly as WriteSweepCsv does.
std::string RenderSweepCsv(const std::vector<SweepCell>& cells,
                           RngSeed master_seed);

// "%.6g".
std::string FormatSig6(double value);

}  // namespace blocksketch

#endif  // BLOCKSKETCH_PIPELINE_H_
