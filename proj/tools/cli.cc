#include "blocksketch/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blocksketch/analytics.h"
#include "blocksketch/error.h"
#include "blocksketch/graph_io.h"
#include "blocksketch/pipeline.h"
#include "blocksketch/sbm.h"
#include "blocksketch/sdp.h"
#include "blocksketch/vote.h"

namespace blocksketch {
namespace {

constexpr const char* kSeedEnv = "BLOCKSKETCH_SEED";

std::string Fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// 6.737947e-3 style: six mantissa decimals, unpadded exponent.
std::string Sci6(double v) {
  if (!std::isfinite(v)) return Num(v);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  std::string s = buf;
  const auto e = s.find('e');
  const int exponent = std::atoi(s.c_str() + e + 1);
  return s.substr(0, e + 1) + std::to_string(exponent);
}

RngSeed DefaultSeed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || env[0] == '-') {
    throw ParameterError(std::string(kSeedEnv) + " is not an unsigned integer");
  }
  return v;
}

struct SolverFlags {
  std::optional<int> rank;
  std::optional<int> max_iters;
  std::optional<int> restarts;
  std::optional<double> step_tol;
  std::optional<double> grad_tol;

  void Register(CLI::App* cmd) {
    cmd->add_option("--rank", rank, "Factor width (default: auto)");
    cmd->add_option("--max-iters", max_iters, "Iteration cap per restart");
    cmd->add_option("--restarts", restarts, "Random initializations");
    cmd->add_option("--step-tol", step_tol, "Relative objective tolerance");
    cmd->add_option("--grad-tol", grad_tol, "Relative gradient tolerance");
  }

  void Apply(SdpConfig* cfg) const {
    if (rank) cfg->rank = *rank;
    if (max_iters) cfg->max_iters = *max_iters;
    if (restarts) cfg->restarts = *restarts;
    if (step_tol) cfg->step_tol = *step_tol;
    if (grad_tol) cfg->grad_tol = *grad_tol;
  }
};

// Model flags shared by gen and vote-oracle.
struct ModelFlags {
  std::optional<std::int64_t> n;
  std::optional<double> alpha, beta, p, q;
  std::optional<std::int64_t> n1, n2;

  CLI::Option* Register(CLI::App* cmd) {
    CLI::Option* n_opt = cmd->add_option("--n", n, "Node count");
    cmd->add_option("--alpha", alpha, "Within-community rate coefficient");
    cmd->add_option("--beta", beta, "Cross-community rate coefficient");
    cmd->add_option("--p", p, "Within-community edge probability");
    cmd->add_option("--q", q, "Cross-community edge probability");
    cmd->add_option("--n1", n1, "Size of community +1 (explicit mode)");
    cmd->add_option("--n2", n2, "Size of community -1 (explicit mode)");
    return n_opt;
  }

  SbmParams Params() const {
    if (!n) throw ParameterError("--n is required");
    const bool rates = alpha || beta;
    const bool probs = p || q || n1 || n2;
    if (rates && probs) {
      throw ParameterError("give either --alpha/--beta or --p/--q, not both");
    }
    if (rates) {
      if (!alpha || !beta) throw ParameterError("--alpha and --beta go together");
      return SbmParams::Balanced(*n, *alpha, *beta);
    }
    if (!p || !q) throw ParameterError("need --alpha/--beta or --p/--q");
    const std::int64_t size1 = n1.value_or(n2 ? *n - *n2 : *n / 2);
    const std::int64_t size2 = n2.value_or(*n - size1);
    if (size1 + size2 != *n) throw ParameterError("--n1 + --n2 must equal --n");
    return SbmParams::Explicit(size1, size2, *p, *q);
  }
};

// Edge probabilities from --p/--q or from --alpha/--beta at node count n.
struct RateFlags {
  std::optional<double> alpha, beta, p, q;

  void Register(CLI::App* cmd) {
    cmd->add_option("--p", p, "Within-community edge probability");
    cmd->add_option("--q", q, "Cross-community edge probability");
    cmd->add_option("--alpha", alpha, "Within-community rate coefficient");
    cmd->add_option("--beta", beta, "Cross-community rate coefficient");
  }

  bool Present() const { return p || q || alpha || beta; }

  std::pair<double, double> Resolve(std::int64_t n) const {
    if ((p || q) && (alpha || beta)) {
      throw ParameterError("give either --p/--q or --alpha/--beta, not both");
    }
    if (p || q) {
      if (!p || !q) throw ParameterError("--p and --q go together");
      return {*p, *q};
    }
    if (!alpha || !beta) throw ParameterError("need --p/--q or --alpha/--beta");
    return {RateToProbability(*alpha, n), RateToProbability(*beta, n)};
  }
};

void PrintKv(std::ostream& out, const std::string& key,
             const std::string& value) {
  out << key << '=' << value << '\n';
}

std::string Bool(bool b) { return b ? "true" : "false"; }

std::string CertificateName(const Certificate& c) {
  return c.tight ? "tight" : "not-tight";
}

// --- gen ------------------------------------------------------------------

struct GenCommand {
  ModelFlags model;
  std::optional<RngSeed> seed;
  std::string out_path;

  void Register(CLI::App* cmd) {
    model.Register(cmd)->required();
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--out", out_path, "Output graph file (default: stdout)");
  }

  int Run(std::ostream& out, std::ostream& err) const {
    const SbmParams params = model.Params();
    const Graph g = SampleSbm(params, seed.value_or(DefaultSeed()));
    if (out_path.empty()) {
      WriteGraph(out, g);
      err << "edges=" << g.num_edges() << '\n';
    } else {
      WriteGraphFile(out_path, g);
      PrintKv(out, "edges", std::to_string(g.num_edges()));
    }
    return kExitOk;
  }
};

// --- solve ----------------------------------------------------------------

struct SolveCommand {
  std::string in_path;
  RateFlags rates;
  std::optional<double> lambda;
  bool balanced = false;
  std::optional<RngSeed> seed;
  SolverFlags solver;

  void Register(CLI::App* cmd) {
    cmd->add_option("--in", in_path, "Graph file")->required();
    rates.Register(cmd);
    cmd->add_option("--lambda", lambda, "Lagrange multiplier");
    cmd->add_flag("--balanced", balanced, "Enforce the balance constraint");
    cmd->add_option("--seed", seed, "Solver seed");
    solver.Register(cmd);
  }

  int Run(std::ostream& out, std::ostream&) const {
    const Graph g = ReadGraphFile(in_path);
    SdpConfig cfg;
    solver.Apply(&cfg);
    cfg.seed = seed.value_or(DefaultSeed());
    cfg.balanced_mode = balanced;
    if (!balanced) {
      if (lambda && rates.Present()) {
        throw ParameterError("give --lambda or model rates, not both");
      }
      if (lambda) {
        cfg.lambda = *lambda;
      } else if (rates.Present()) {
        const auto [p, q] = rates.Resolve(g.num_nodes());
        cfg.lambda = LambdaStar(p, q);
      } else {
        throw ParameterError("need --lambda, --p/--q, --alpha/--beta or "
                             "--balanced");
      }
    }
    const SdpSolution sol = SolveSdp(g, cfg);
    PrintKv(out, "nodes", std::to_string(g.num_nodes()));
    PrintKv(out, "edges", std::to_string(g.num_edges()));
    PrintKv(out, "mode", balanced ? "balanced" : "lagrangian");
    PrintKv(out, "lambda", Num(sol.lambda));
    PrintKv(out, "rank", std::to_string(sol.factor.cols()));
    PrintKv(out, "objective", Num(sol.objective));
    PrintKv(out, "rounded_objective", Num(sol.rounded_objective));
    PrintKv(out, "certificate", CertificateName(sol.certificate));
    PrintKv(out, "gap", Num(sol.certificate.gap));
    PrintKv(out, "iterations", std::to_string(sol.diagnostics.iterations));
    PrintKv(out, "converged", Bool(sol.diagnostics.converged));
    PrintKv(out, "grad_norm", Num(sol.diagnostics.grad_norm));
    PrintKv(out, "balance_residual", Num(sol.balance_residual));
    PrintKv(out, "labels", LabelString(sol.rounded));
    if (g.truth().has_value()) {
      const bool ok = PartitionsEqual(sol.rounded, *g.truth());
      PrintKv(out, "recovered", Bool(ok));
      return ok ? kExitOk : kExitRecoveryFailure;
    }
    return kExitOk;
  }
};

// --- sketch ---------------------------------------------------------------

struct SketchCommand {
  std::string in_path;
  double gamma = 1.0;
  RateFlags rates;
  std::optional<double> lambda;
  std::string tie_mode = "strict";
  std::optional<RngSeed> seed;
  SolverFlags solver;

  void Register(CLI::App* cmd) {
    cmd->add_option("--in", in_path, "Graph file with a labels line")
        ->required();
    cmd->add_option("--gamma", gamma, "Sampling probability")->required();
    rates.Register(cmd);
    cmd->add_option("--lambda", lambda, "Fixed multiplier (default: lambda*)");
    cmd->add_option("--tie-mode", tie_mode, "strict or coin")
        ->check(CLI::IsMember({"strict", "coin"}));
    cmd->add_option("--seed", seed, "RNG seed");
    solver.Register(cmd);
  }

  int Run(std::ostream& out, std::ostream&) const {
    const Graph g = ReadGraphFile(in_path);
    if (!g.truth().has_value()) {
      throw ParameterError("sketch needs a graph file with a labels line");
    }
    const auto [p, q] = rates.Resolve(g.num_nodes());
    SketchConfig cfg;
    cfg.gamma = gamma;
    cfg.fixed_lambda = lambda;
    solver.Apply(&cfg.sdp);
    cfg.tie_break.mode = tie_mode == "coin" ? TieMode::kCoin : TieMode::kStrict;
    const SketchResult res =
        SketchAndRecover(g, p, q, cfg, seed.value_or(DefaultSeed()));
    const SketchDiagnostics& d = res.diagnostics;
    const LabelVector& truth = *g.truth();
    bool subgraph_ok = false;
    if (!d.degenerate_sample) {
      LabelVector sample_truth;
      for (NodeId v : d.mask.kept) sample_truth.push_back(truth[v]);
      subgraph_ok = PartitionsEqual(d.sample_labels, sample_truth);
    }
    const bool ok = PartitionsEqual(res.labels, truth);
    PrintKv(out, "success", Bool(ok));
    PrintKv(out, "sample_size", std::to_string(d.sample_size));
    PrintKv(out, "degenerate_sample", Bool(d.degenerate_sample));
    PrintKv(out, "lambda", Num(d.lambda_used));
    PrintKv(out, "certificate", CertificateName(d.certificate));
    PrintKv(out, "gap", Num(d.certificate.gap));
    PrintKv(out, "subgraph_success", Bool(subgraph_ok));
    PrintKv(out, "vote_ties", std::to_string(d.vote_ties));
    PrintKv(out, "labels", LabelString(res.labels));
    return ok ? kExitOk : kExitRecoveryFailure;
  }
};

// --- sweep ----------------------------------------------------------------

struct SweepCommand {
  std::vector<std::int64_t> n;
  std::vector<double> alpha, beta, gamma;
  std::int64_t trials = 10;
  std::optional<RngSeed> master_seed;
  int jobs = 1;
  std::string out_path;
  std::string log_path;
  bool timing = false;
  SolverFlags solver;

  void Register(CLI::App* cmd) {
    cmd->add_option("--n", n, "Node count axis (repeatable)");
    cmd->add_option("--alpha", alpha, "Alpha axis (repeatable)");
    cmd->add_option("--beta", beta, "Beta axis (repeatable)");
    cmd->add_option("--gamma", gamma, "Gamma axis (repeatable)");
    cmd->add_option("--trials", trials, "Trials per cell");
    cmd->add_option("--master-seed", master_seed, "Master seed");
    cmd->add_option("--jobs", jobs, "Worker threads");
    cmd->add_option("--out", out_path, "CSV output (default: stdout)");
    cmd->add_option("--trials-log", log_path, "Per-trial JSON lines");
    cmd->add_flag("--timing", timing, "Record wall time (not reproducible)");
    solver.Register(cmd);
  }

  int Run(std::ostream& out, std::ostream& err) const {
    if (n.empty() || alpha.empty() || beta.empty() || gamma.empty()) {
      throw ParameterError("sweep needs at least one value on each of --n, "
                           "--alpha, --beta and --gamma");
    }
    SweepAxes axes{n, alpha, beta, gamma};
    SketchConfig cfg;
    solver.Apply(&cfg.sdp);
    cfg.measure_time = timing;
    const SweepTable table = RunSweep(axes, trials, cfg,
                                      master_seed.value_or(DefaultSeed()), jobs);
    if (out_path.empty()) {
      WriteSweepCsv(out, table);
    } else {
      std::ofstream f(out_path);
      if (!f) throw ParseError("cannot open " + out_path);
      WriteSweepCsv(f, table);
    }
    if (!log_path.empty()) {
      std::ofstream f(log_path);
      if (!f) throw ParseError("cannot open " + log_path);
      for (const TrialRecord& r : table.trials) f << TrialRecordJson(r) << '\n';
    }
    std::int64_t errors = 0;
    for (const TrialRecord& r : table.trials) errors += r.error.empty() ? 0 : 1;
    if (errors > 0) err << "trials_with_errors=" << errors << '\n';
    return kExitOk;
  }
};

// --- vote-oracle ----------------------------------------------------------

struct VoteOracleCommand {
  std::string in_path;
  ModelFlags model;
  double gamma = 1.0;
  std::optional<RngSeed> seed;
  std::int64_t trials = 1;

  void Register(CLI::App* cmd) {
    cmd->add_option("--in", in_path, "Graph file with a labels line");
    model.Register(cmd);
    cmd->add_option("--gamma", gamma, "Sampling probability")->required();
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--trials", trials, "Number of trials");
  }

  int Run(std::ostream& out, std::ostream&) const {
    if (trials < 1) throw ParameterError("--trials must be >= 1");
    const RngSeed base = seed.value_or(DefaultSeed());
    std::optional<Graph> fixed;
    std::optional<SbmParams> params;
    if (!in_path.empty()) {
      if (model.n || model.alpha || model.beta || model.p || model.q) {
        throw ParameterError("give --in or model flags, not both");
      }
      fixed = ReadGraphFile(in_path);
    } else {
      params = model.Params();
    }
    std::int64_t successes = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
      const auto index = static_cast<std::uint64_t>(t);
      const Graph g = fixed ? *fixed
                            : SampleSbm(*params, SplitSeed(base, Stream::kGraph,
                                                           index));
      successes += OracleVoteTrial(g, gamma,
                                   SplitSeed(base, Stream::kSubsample, index))
                       ? 1
                       : 0;
    }
    PrintKv(out, "trials", std::to_string(trials));
    PrintKv(out, "successes", std::to_string(successes));
    PrintKv(out, "success_rate",
            Fixed6(static_cast<double>(successes) / static_cast<double>(trials)));
    if (trials == 1) return successes == 1 ? kExitOk : kExitRecoveryFailure;
    return kExitOk;
  }
};

// --- bounds ---------------------------------------------------------------

struct BoundsCommand {
  std::optional<double> alpha, beta, gamma, p, q;
  std::optional<std::int64_t> n, k1, k2;

  void Register(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Within-community rate coefficient");
    cmd->add_option("--beta", beta, "Cross-community rate coefficient");
    cmd->add_option("--gamma", gamma, "Sampling probability");
    cmd->add_option("--n", n, "Node count");
    cmd->add_option("--K1", k1, "Trials of X");
    cmd->add_option("--K2", k2, "Trials of Y");
    cmd->add_option("--p", p, "Success probability of X");
    cmd->add_option("--q", q, "Success probability of Y");
  }

  int Run(std::ostream& out, std::ostream&) const {
    bool printed = false;
    if (alpha || beta) {
      if (!alpha || !beta) throw ParameterError("--alpha and --beta go together");
      PrintKv(out, "gamma_star", Fixed6(GammaStar(*alpha, *beta)));
      PrintKv(out, "theorem1",
              std::string(RegimeName(ExactRecoveryPossible(*alpha, *beta))));
      if (n && *beta > 0.0) {
        PrintKv(out, "lambda_star", Sci6(LambdaStarFromRates(*alpha, *beta, *n)));
      }
      if (gamma) {
        PrintKv(out, "lemma2_exponent",
                Fixed6(Lemma2Exponent(*alpha, *beta, *gamma)));
        if (n) {
          PrintKv(out, "lemma2_asymptotic",
                  Sci6(Lemma2Asymptotic(*alpha, *beta, *gamma, *n)));
        }
      }
      printed = true;
    }
    if (k1 || k2) {
      if (!k1 || !k2) throw ParameterError("--K1 and --K2 go together");
      double pp = 0.0, qq = 0.0;
      if (p || q) {
        if (!p || !q) throw ParameterError("--p and --q go together");
        pp = *p;
        qq = *q;
      } else if (alpha && beta && n) {
        pp = RateToProbability(*alpha, *n);
        qq = RateToProbability(*beta, *n);
      } else {
        throw ParameterError("--K1/--K2 need --p/--q or --alpha/--beta/--n");
      }
      const BoundParams bp{*k1, *k2, pp, qq};
      const double bound = Lemma2Bound(bp);
      PrintKv(out, "lemma2_bound", Sci6(bound));
      PrintKv(out, "exact_tail", Sci6(BinomDiffTailExact(bp)));
      const std::vector<double> grid = UniformGrid(0.01, 1, 2000);
      PrintKv(out, "chernoff_grid_min", Sci6(ChernoffGridMin(bp, grid)));
      printed = true;
    } else if ((p || q) && !(alpha || beta)) {
      if (!p || !q) throw ParameterError("--p and --q go together");
      PrintKv(out, "lambda_star", Sci6(LambdaStar(*p, *q)));
      printed = true;
    }
    if (!printed) {
      throw ParameterError("bounds needs --alpha/--beta or --K1/--K2 with "
                           "probabilities");
    }
    return kExitOk;
  }
};

// The subcommand being parsed, or the top-level app.
const CLI::App& HelpTarget(const CLI::App& app) {
  const auto subs = app.get_subcommands();
  return subs.empty() ? app : *subs.front();
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Sketched SDP community detection for the two-community "
               "stochastic block model"};
  app.name("blocksketch");
  app.require_subcommand(1, 1);

  GenCommand gen;
  SolveCommand solve;
  SketchCommand sketch;
  SweepCommand sweep;
  VoteOracleCommand vote;
  BoundsCommand bounds;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Sample an SBM graph");
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the SDP relaxation");
  CLI::App* sketch_cmd =
      app.add_subcommand("sketch", "Subsample, solve, and extend by vote");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
  CLI::App* vote_cmd =
      app.add_subcommand("vote-oracle", "Majority vote from true sample labels");
  CLI::App* bounds_cmd =
      app.add_subcommand("bounds", "Thresholds and tail bounds");
  gen.Register(gen_cmd);
  solve.Register(solve_cmd);
  sketch.Register(sketch_cmd);
  sweep.Register(sweep_cmd);
  vote.Register(vote_cmd);
  bounds.Register(bounds_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << HelpTarget(app).help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << HelpTarget(app).help();
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return gen.Run(out, err);
    if (solve_cmd->parsed()) return solve.Run(out, err);
    if (sketch_cmd->parsed()) return sketch.Run(out, err);
    if (sweep_cmd->parsed()) return sweep.Run(out, err);
    if (vote_cmd->parsed()) return vote.Run(out, err);
    if (bounds_cmd->parsed()) return bounds.Run(out, err);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace blocksketch
