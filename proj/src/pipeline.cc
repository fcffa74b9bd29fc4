#include "blocksketch/pipeline.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "blocksketch/analytics.h"
#include "blocksketch/error.h"
#include "json.hpp"

namespace blocksketch {
namespace {

double AutoLambda(double p, double q) {
  // The q -> 0 limit of lambda* is 0, where Tr(A X) cannot tell the planted
  // partition from the one-community labeling.
  if (q == 0.0) {
    throw ParameterError("sketch: automatic lambda needs q > 0; pass a fixed "
                         "lambda instead");
  }
  return LambdaStar(p, q);
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::int64_t ParseCsvInt(const std::string& s) {
  if (s.empty()) throw ParseError("csv: empty integer field");
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("csv: bad integer '" + s + "'");
  }
  if (pos != s.size()) throw ParseError("csv: bad integer '" + s + "'");
  return v;
}

std::uint64_t ParseCsvUnsigned(const std::string& s) {
  if (s.empty() || s[0] == '-') throw ParseError("csv: bad seed '" + s + "'");
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("csv: bad seed '" + s + "'");
  }
  if (pos != s.size()) throw ParseError("csv: bad seed '" + s + "'");
  return v;
}

double ParseCsvDouble(const std::string& s) {
  if (s.empty()) throw ParseError("csv: empty numeric field");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("csv: bad number '" + s + "'");
  }
  if (pos != s.size()) throw ParseError("csv: bad number '" + s + "'");
  return v;
}

}  // namespace

void SketchConfig::Validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ParameterError("sketch: gamma must lie in (0, 1]");
  }
  if (fixed_lambda.has_value() &&
      !(*fixed_lambda >= 0.0 && std::isfinite(*fixed_lambda))) {
    throw ParameterError("sketch: fixed lambda must be >= 0");
  }
  if (sdp.balanced_mode) {
    throw ParameterError("sketch: the subgraph solve uses the Lagrangian mode");
  }
  sdp.Validate();
}

SketchResult SketchAndRecover(const Graph& g, double p, double q,
                              const SketchConfig& cfg, RngSeed seed) {
  cfg.Validate();
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0) || !(p > q)) {
    throw ParameterError("sketch: needs 0 <= q < p <= 1");
  }
  if (g.num_nodes() < 1) throw EmptyGraphError("sketch: empty graph");

  SketchResult result;
  SketchDiagnostics& diag = result.diagnostics;
  diag.lambda_used =
      cfg.fixed_lambda.has_value() ? *cfg.fixed_lambda : AutoLambda(p, q);
  diag.mask = SubsampleNodes(g.num_nodes(), cfg.gamma, seed);
  diag.sample_size = static_cast<std::int64_t>(diag.mask.kept.size());

  if (diag.sample_size <= 1) {
    diag.degenerate_sample = true;
    result.labels.assign(g.num_nodes(), Label::kUnassigned);
    return result;
  }

  const Subgraph sub = InducedSubgraph(g, diag.mask);
  SdpConfig sdp = cfg.sdp;
  sdp.lambda = diag.lambda_used;
  sdp.seed = Mix64(cfg.sdp.seed) ^ SplitSeed(seed, Stream::kSolverInit);
  SdpSolution sol = SolveLagrangianSdp(sub.graph, sdp);
  diag.solver_lambda = sol.lambda;
  diag.certificate = sol.certificate;
  diag.solver_converged = sol.diagnostics.converged;
  diag.solver_iterations = sol.diagnostics.iterations;
  diag.sample_labels = std::move(sol.rounded);

  TieBreak tie = cfg.tie_break;
  tie.seed = Mix64(cfg.tie_break.seed) ^ SplitSeed(seed, Stream::kTieBreak);
  VoteOutcome vote = MajorityVote(g, diag.mask, diag.sample_labels, tie);
  diag.vote_ties = vote.tie_count;
  result.labels = std::move(vote.labels);
  return result;
}

TrialRecord RunTrial(const SbmParams& params, const SketchConfig& cfg,
                     RngSeed trial_seed) {
  params.Validate();
  cfg.Validate();
  const auto start = std::chrono::steady_clock::now();

  TrialRecord record;
  record.params = params;
  record.gamma = cfg.gamma;
  record.seed = trial_seed;

  const Graph g = SampleSbm(params, SplitSeed(trial_seed, Stream::kGraph));
  const SketchResult res = SketchAndRecover(
      g, params.p, params.q, cfg, SplitSeed(trial_seed, Stream::kSketch));
  const SketchDiagnostics& diag = res.diagnostics;
  const LabelVector& truth = *g.truth();

  record.sample_size = diag.sample_size;
  record.sdp_certificate = diag.certificate;
  record.degenerate_sample = diag.degenerate_sample;
  record.solver_converged = diag.solver_converged;
  record.vote_ties = diag.vote_ties;
  record.lambda_used = diag.lambda_used;
  if (!diag.degenerate_sample) {
    LabelVector sample_truth;
    sample_truth.reserve(diag.mask.kept.size());
    for (NodeId v : diag.mask.kept) sample_truth.push_back(truth[v]);
    record.subgraph_success = PartitionsEqual(diag.sample_labels, sample_truth);
  }
  record.overall_success = PartitionsEqual(res.labels, truth);

  if (cfg.measure_time) {
    record.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  }
  return record;
}

std::string TrialRecordJson(const TrialRecord& r) {
  nlohmann::ordered_json j;
  j["mode"] = r.params.mode == SbmParams::Mode::kBalanced ? "balanced"
                                                          : "explicit";
  j["n"] = r.params.n;
  j["n1"] = r.params.n1;
  j["n2"] = r.params.n2;
  j["alpha"] = r.params.alpha;
  j["beta"] = r.params.beta;
  j["p"] = r.params.p;
  j["q"] = r.params.q;
  j["gamma"] = r.gamma;
  j["seed"] = r.seed;
  j["sample_size"] = r.sample_size;
  j["certificate"] = r.sdp_certificate.tight ? "tight" : "not-tight";
  j["gap"] = r.sdp_certificate.gap;
  j["subgraph_success"] = r.subgraph_success;
  j["vote_ties"] = r.vote_ties;
  j["overall_success"] = r.overall_success;
  j["degenerate_sample"] = r.degenerate_sample;
  j["solver_converged"] = r.solver_converged;
  j["lambda"] = r.lambda_used;
  j["error"] = r.error;
  j["wall_ms"] = r.wall_ms;
  return j.dump();
}

RngSeed TrialSeed(RngSeed master_seed, std::int64_t cell_id, std::int64_t t) {
  if (cell_id < 0 || t < 0 || cell_id >= (std::int64_t{1} << 32) ||
      t >= (std::int64_t{1} << 32)) {
    throw ParameterError("trial seed: cell or trial index out of range");
  }
  return SplitSeed(master_seed, static_cast<std::uint64_t>(cell_id),
                   static_cast<std::uint64_t>(t));
}

SweepTable RunSweep(const SweepAxes& axes, std::int64_t trials_per_cell,
                    const SketchConfig& cfg_template, RngSeed master_seed,
                    int workers) {
  if (axes.n.empty() || axes.alpha.empty() || axes.beta.empty() ||
      axes.gamma.empty()) {
    throw ParameterError("sweep: every axis needs at least one value");
  }
  if (trials_per_cell < 1) throw ParameterError("sweep: trials must be >= 1");
  if (workers < 1) throw ParameterError("sweep: workers must be >= 1");

  SweepTable table;
  table.axes = axes;
  table.master_seed = master_seed;
  for (std::int64_t n : axes.n) {
    for (double alpha : axes.alpha) {
      for (double beta : axes.beta) {
        for (double gamma : axes.gamma) {
          SweepCell cell;
          cell.cell_id = static_cast<std::int64_t>(table.cells.size());
          cell.n = n;
          cell.alpha = alpha;
          cell.beta = beta;
          cell.gamma = gamma;
          table.cells.push_back(cell);
        }
      }
    }
  }

  const std::size_t num_jobs = table.cells.size() * trials_per_cell;
  table.trials.resize(num_jobs);
  auto run_job = [&](std::size_t job) {
    const SweepCell& cell = table.cells[job / trials_per_cell];
    const auto t = static_cast<std::int64_t>(job % trials_per_cell);
    const RngSeed seed = TrialSeed(master_seed, cell.cell_id, t);
    try {
      SketchConfig cfg = cfg_template;
      cfg.gamma = cell.gamma;
      table.trials[job] =
          RunTrial(SbmParams::Balanced(cell.n, cell.alpha, cell.beta), cfg,
                   seed);
    } catch (const std::exception& e) {
      TrialRecord failed;
      failed.params.n = cell.n;
      failed.params.alpha = cell.alpha;
      failed.params.beta = cell.beta;
      failed.gamma = cell.gamma;
      failed.seed = seed;
      failed.error = e.what();
      table.trials[job] = std::move(failed);
    }
  };

  if (workers == 1) {
    for (std::size_t job = 0; job < num_jobs; ++job) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t job = next++; job < num_jobs; job = next++) {
          run_job(job);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }

  for (SweepCell& cell : table.cells) {
    double sample_sum = 0.0, tie_sum = 0.0, wall_sum = 0.0;
    for (std::int64_t t = 0; t < trials_per_cell; ++t) {
      const TrialRecord& r = table.trials[cell.cell_id * trials_per_cell + t];
      ++cell.trials;
      cell.successes += r.overall_success ? 1 : 0;
      cell.subgraph_successes += r.subgraph_success ? 1 : 0;
      sample_sum += static_cast<double>(r.sample_size);
      tie_sum += static_cast<double>(r.vote_ties);
      wall_sum += r.wall_ms;
    }
    const double trials = static_cast<double>(cell.trials);
    cell.success_rate = static_cast<double>(cell.successes) / trials;
    cell.subgraph_success_rate =
        static_cast<double>(cell.subgraph_successes) / trials;
    cell.mean_sample_size = sample_sum / trials;
    cell.mean_tie_count = tie_sum / trials;
    cell.mean_wall_ms = wall_sum / trials;
  }
  return table;
}

std::string FormatSig6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string RenderSweepCsv(const std::vector<SweepCell>& cells,
                           RngSeed master_seed) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const SweepCell& c : cells) {
    out += std::to_string(c.n) + ',' + FormatSig6(c.alpha) + ',' +
           FormatSig6(c.beta) + ',' + FormatSig6(c.gamma) + ',' +
           std::to_string(c.trials) + ',' + std::to_string(c.successes) +
           ',' + FormatSig6(c.success_rate) + ',' +
           FormatSig6(c.subgraph_success_rate) + ',' +
           FormatSig6(c.mean_sample_size) + ',' +
           FormatSig6(c.mean_tie_count) + ',' + FormatSig6(c.mean_wall_ms) +
           ',' + std::to_string(master_seed) + '\n';
  }
  return out;
}

std::string SweepCsv(const SweepTable& table) {
  return RenderSweepCsv(table.cells, table.master_seed);
}

void WriteSweepCsv(std::ostream& out, const SweepTable& table) {
  out << SweepCsv(table);
}

std::vector<SweepCell> ParseSweepCsv(const std::string& text,
                                     RngSeed* master_seed) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    throw ParseError("csv: missing or unexpected header");
  }
  std::vector<SweepCell> cells;
  std::optional<RngSeed> seed;
  while (std::getline(in, line)) {
    const std::vector<std::string> f = SplitFields(line);
    if (f.size() != 12) throw ParseError("csv: expected 12 fields");
    SweepCell c;
    c.cell_id = static_cast<std::int64_t>(cells.size());
    c.n = ParseCsvInt(f[0]);
    c.alpha = ParseCsvDouble(f[1]);
    c.beta = ParseCsvDouble(f[2]);
    c.gamma = ParseCsvDouble(f[3]);
    c.trials = ParseCsvInt(f[4]);
    c.successes = ParseCsvInt(f[5]);
    c.success_rate = ParseCsvDouble(f[6]);
    c.subgraph_success_rate = ParseCsvDouble(f[7]);
    c.mean_sample_size = ParseCsvDouble(f[8]);
    c.mean_tie_count = ParseCsvDouble(f[9]);
    c.mean_wall_ms = ParseCsvDouble(f[10]);
    const RngSeed row_seed = ParseCsvUnsigned(f[11]);
    if (seed.has_value() && *seed != row_seed) {
      throw ParseError("csv: inconsistent master_seed column");
    }
    seed = row_seed;
    if (c.trials < 1 || c.successes < 0 || c.successes > c.trials) {
      throw ParseError("csv: success count out of range");
    }
    if (!(c.success_rate >= 0.0 && c.success_rate <= 1.0) ||
        !(c.subgraph_success_rate >= 0.0 && c.subgraph_success_rate <= 1.0)) {
      throw ParseError("csv: rate outside [0, 1]");
    }
    cells.push_back(c);
  }
  if (master_seed != nullptr) *master_seed = seed.value_or(0);
  return cells;
}

}  // namespace blocksketch
