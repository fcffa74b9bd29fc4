// Acceptance suite. Each criterion prints one PASS/FAIL line; the exit code is
// non-zero when any selected criterion fails.
//
//   acceptance_test                 run all criteria
//   acceptance_test --criterion N   run criterion N only

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "blocksketch/analytics.h"
#include "blocksketch/cli.h"
#include "blocksketch/error.h"
#include "blocksketch/pipeline.h"
#include "blocksketch/rng.h"
#include "blocksketch/sbm.h"
#include "blocksketch/sdp.h"
#include "blocksketch/vote.h"

namespace blocksketch {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// --- 1: SDP vs exhaustive MLE ---------------------------------------------

Outcome OracleEquivalence() {
  const double p = 0.9;
  const double q = 0.1;
  const double lambda = LambdaStar(p, q);
  const int n_values[] = {8, 10, 12};
  struct Tally {
    int tight = 0;
    int agree = 0;
    int tied = 0;
  } lag, bal;
  const int instances = 200;
  for (int i = 0; i < instances; ++i) {
    const int n = n_values[i % 3];
    const Graph g = SampleSbm(SbmParams::Explicit(n / 2, n / 2, p, q), i);
    for (bool balanced : {false, true}) {
      SdpConfig cfg;
      cfg.seed = i;
      cfg.balanced_mode = balanced;
      cfg.lambda = balanced ? 0.0 : lambda;
      const SdpSolution sol = SolveSdp(g, cfg);
      if (!sol.certificate.tight) continue;
      Tally& t = balanced ? bal : lag;
      ++t.tight;
      const MleResult mle = BruteForceMle(
          g, balanced ? MleConstraint::Balanced() : MleConstraint::Lagrangian(lambda));
      // A tied optimum has several maximizers; any of them is the MLE.
      const bool agree =
          mle.num_optimal == 1
              ? PartitionsEqual(sol.rounded, mle.labels)
              : std::abs(LabelObjective(g, sol.rounded, cfg.lambda) - mle.objective) <=
                    1e-9 * (1 + std::abs(mle.objective));
      t.agree += agree ? 1 : 0;
      t.tied += mle.num_optimal > 1 ? 1 : 0;
    }
  }
  Outcome out;
  for (const auto& [name, t] : {std::pair{"lagrangian", lag}, std::pair{"balanced", bal}}) {
    out.Require(t.agree == t.tight,
                Fmt("%s: %d/%d tight instances agree (%d with tied optima)", name,
                    t.agree, t.tight, t.tied));
    out.Require(t.tight >= 0.7 * instances,
                Fmt("%s: tight rate %.3f >= 0.70", name,
                    static_cast<double>(t.tight) / instances));
  }
  return out;
}

// --- 2: tail bound domination and Chernoff sandwich ------------------------

Outcome BoundDomination() {
  const std::int64_t ks[] = {5, 10, 20, 50, 100, 200};
  const struct {
    double alpha, beta;
    std::int64_t n;
  } rates[] = {{9, 1, 200}, {30, 2, 400}, {4, 1, 100}};
  const std::vector<double> grid = UniformGrid(0.01, 1, 2000);
  int cells = 0, dominated = 0, sandwiched = 0;
  std::string misses;
  for (const auto& r : rates) {
    const double p = RateToProbability(r.alpha, r.n);
    const double q = RateToProbability(r.beta, r.n);
    for (std::int64_t k1 : ks) {
      for (std::int64_t k2 : ks) {
        const BoundParams bp{k1, k2, p, q};
        if (k1 * p < k2 * q) continue;
        ++cells;
        const double exact = BinomDiffTailExact(bp);
        const double bound = Lemma2Bound(bp);
        const double chernoff = ChernoffGridMin(bp, grid);
        dominated += exact <= bound + 1e-12 ? 1 : 0;
        if (exact <= chernoff && chernoff <= bound) {
          ++sandwiched;
        } else {
          misses += Fmt(" (%g,%g,%lld K1=%lld K2=%lld: exact=%.6g chernoff=%.6g bound=%.6g)",
                        r.alpha, r.beta, static_cast<long long>(r.n),
                        static_cast<long long>(k1), static_cast<long long>(k2), exact,
                        chernoff, bound);
        }
      }
    }
  }
  Outcome out;
  out.Require(dominated == cells, Fmt("exact <= bound on %d/%d cells", dominated, cells));
  out.Require(sandwiched == cells,
              Fmt("exact <= chernoff <= bound on %d/%d cells%s", sandwiched, cells,
                  misses.c_str()));
  return out;
}

// --- 3: threshold identities -----------------------------------------------

Outcome ThresholdIdentities() {
  double worst_threshold = 0.0;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double beta = 20 * (1 - rng.Uniform());
    const double root = std::sqrt(beta) + std::sqrt(2.0) + 5 * rng.Uniform();
    const double alpha = root * root;
    const double e = Lemma2Exponent(alpha, beta, GammaStar(alpha, beta));
    worst_threshold = std::max(worst_threshold, std::abs(e - 1.0));
  }
  double worst_identity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double alpha = 50 * (1 - rng.Uniform());
    const double beta = alpha * rng.Uniform();
    const double gamma = 1 - rng.Uniform();
    const Big d = sqrt(Big(alpha)) - sqrt(Big(beta));
    const Big want = Big(gamma) * d * d / 2;
    const double got = Lemma2Exponent(alpha, beta, gamma);
    worst_identity = std::max(
        worst_identity, static_cast<double>(abs((Big(got) - want) / want)));
  }
  Outcome out;
  out.Require(worst_threshold <= 1e-12,
              Fmt("exponent at gamma* = 1, worst rel err %.2e", worst_threshold));
  out.Require(worst_identity <= 1e-12,
              Fmt("gamma (sqrt a - sqrt b)^2 / 2 identity, worst rel err %.2e",
                  worst_identity));
  return out;
}

// --- 4: oracle vote --------------------------------------------------------

Outcome OracleVote() {
  const SbmParams params = SbmParams::Balanced(400, 30.0, 2.0);
  int above = 0, below = 0;
  for (RngSeed seed = 0; seed < 100; ++seed) {
    const Graph g = SampleSbm(params, seed);
    above += OracleVoteTrial(g, 0.6, seed) ? 1 : 0;
    below += OracleVoteTrial(g, 0.05, seed) ? 1 : 0;
  }
  Outcome out;
  out.Require(above >= 90, Fmt("gamma=0.6: %d/100 >= 90", above));
  out.Require(below <= 50, Fmt("gamma=0.05: %d/100 <= 50", below));
  return out;
}

// --- 5: phase behaviour of the full pipeline --------------------------------

Outcome PhaseBehaviour() {
  const double gs = GammaStar(30.0, 2.0);
  SweepAxes axes{{400}, {30.0}, {2.0}, {0.5 * gs, gs, 2 * gs, 3 * gs, 1.0}};
  const SweepTable table = RunSweep(axes, 50, SketchConfig{}, 5);
  SweepAxes control{{300}, {3.0}, {1.0}, {1.0}};
  const SweepTable low = RunSweep(control, 100, SketchConfig{}, 5);
  std::string rates;
  for (const SweepCell& c : table.cells) {
    rates += Fmt("%s%.4g:%.2f", rates.empty() ? "" : " ", c.gamma, c.success_rate);
  }
  const double gap = table.cells[3].success_rate - table.cells[0].success_rate;
  Outcome out;
  out.Require(gap >= 0.4, Fmt("rate(3g*) - rate(0.5g*) = %.2f >= 0.4 [%s]", gap, rates.c_str()));
  out.Require(table.cells[4].success_rate >= 0.85,
              Fmt("rate(1.0) = %.2f >= 0.85", table.cells[4].success_rate));
  out.Require(low.cells[0].success_rate <= 0.2,
              Fmt("control n=300 a=3 b=1: rate %.2f <= 0.2", low.cells[0].success_rate));
  return out;
}

// --- 6: solver numerics and determinism ------------------------------------

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome SolverNumerics() {
  Outcome out;

  const Graph small = SampleSbm(SbmParams::Explicit(4, 4, 0.8, 0.3), 6);
  double worst_fd = 0.0;
  for (RngSeed seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    FactorMatrix y(8, 3);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 3; ++j) y(i, j) = rng.Symmetric();
    }
    const double lambda = 0.1 * static_cast<double>(seed % 4);
    const FactorMatrix grad = FactorGradient(small, y, lambda);
    FactorMatrix fd(8, 3);
    const double h = 1e-5;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double saved = y(i, j);
        y(i, j) = saved + h;
        const double up = FactorObjective(small, y, lambda);
        y(i, j) = saved - h;
        const double down = FactorObjective(small, y, lambda);
        y(i, j) = saved;
        fd(i, j) = (up - down) / (2 * h);
      }
    }
    worst_fd = std::max(worst_fd, (grad - fd).norm() / grad.norm());
  }
  out.Require(worst_fd <= 1e-5, Fmt("gradient vs finite differences, worst rel err %.2e", worst_fd));

  double worst_row = 0.0;
  std::size_t records = 0;
  const Graph g = SampleSbm(SbmParams::Balanced(200, 12.0, 2.0), 6);
  for (bool balanced : {false, true}) {
    SdpConfig cfg;
    cfg.balanced_mode = balanced;
    cfg.lambda = balanced ? 0.0 : 0.05;
    cfg.seed = 6;
    cfg.record_trace = true;
    const SdpSolution sol = SolveSdp(g, cfg);
    for (const IterationRecord& rec : sol.diagnostics.trace) {
      worst_row = std::max(worst_row, rec.max_row_norm_error);
    }
    records += sol.diagnostics.trace.size();
  }
  out.Require(records > 0 && worst_row <= 1e-9,
              Fmt("row-norm error over %zu logged iterations %.2e <= 1e-9", records, worst_row));

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("blocksketch_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string graph = (dir / "g.txt").string();
  const std::vector<std::vector<std::string>> commands = {
      {"gen", "--n", "300", "--alpha", "12", "--beta", "2", "--seed", "6", "--out", graph},
      {"solve", "--in", graph, "--alpha", "12", "--beta", "2", "--seed", "6"},
      {"solve", "--in", graph, "--balanced", "--seed", "6"},
      {"sketch", "--in", graph, "--gamma", "0.5", "--alpha", "12", "--beta", "2", "--seed", "6"},
      {"sketch", "--in", graph, "--gamma", "0.2", "--alpha", "12", "--beta", "2",
       "--tie-mode", "coin", "--seed", "6"},
      {"sweep", "--n", "100", "--n", "200", "--alpha", "12", "--beta", "2", "--gamma", "0.4",
       "--gamma", "1", "--trials", "3", "--master-seed", "6", "--jobs", "2", "--out",
       (dir / "s.csv").string(), "--trials-log", (dir / "s.jsonl").string()},
      {"vote-oracle", "--n", "300", "--alpha", "12", "--beta", "2", "--gamma", "0.5",
       "--trials", "5", "--seed", "6"},
      {"bounds", "--alpha", "12", "--beta", "2", "--gamma", "0.5", "--n", "300", "--K1", "50",
       "--K2", "50"},
  };
  int identical = 0;
  std::string differing;
  for (const auto& args : commands) {
    std::string runs[2];
    for (std::string& run : runs) {
      std::ostringstream o, e;
      const int code = RunCli(args, o, e);
      run = std::to_string(code) + "\n" + o.str();
      for (const char* file : {"g.txt", "s.csv", "s.jsonl"}) {
        if (fs::exists(dir / file)) run += Slurp(dir / file);
      }
      if (args[0] == "gen") continue;
      fs::remove(dir / "s.csv");
      fs::remove(dir / "s.jsonl");
    }
    if (runs[0] == runs[1]) {
      ++identical;
    } else {
      differing += " " + args[0];
    }
  }
  fs::remove_all(dir);
  out.Require(identical == static_cast<int>(commands.size()),
              Fmt("%d/%zu seeded commands byte-identical across two runs%s", identical,
                  commands.size(), differing.c_str()));
  return out;
}

// --- 7: lambda* parametrization and routing ---------------------------------

Outcome LambdaInvariance() {
  Rng rng(7);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double beta = 0.1 + 19.9 * rng.Uniform();
    const double alpha = beta + 0.5 + 39.5 * rng.Uniform();
    const std::int64_t n = 1000 + static_cast<std::int64_t>(rng.Below(1000000));
    const double a = LambdaStarFromRates(alpha, beta, n);
    const double b = LambdaStar(RateToProbability(alpha, n), RateToProbability(beta, n));
    worst = std::max(worst, std::abs(a - b) / b);
  }
  Outcome out;
  out.Require(worst <= 1e-12, Fmt("paper form vs (p-q)/ln(p/q), worst rel err %.2e", worst));

  const SbmParams params = SbmParams::Balanced(300, 15.0, 2.0);
  const double expected = LambdaStar(params.p, params.q);
  int runs = 0, exact = 0;
  std::int64_t smallest = params.n, largest = 0;
  for (double gamma : {0.1, 0.3, 0.6, 1.0}) {
    for (RngSeed seed = 0; seed < 5; ++seed) {
      const Graph g = SampleSbm(params, seed);
      SketchConfig cfg;
      cfg.gamma = gamma;
      const SketchResult res = SketchAndRecover(g, params.p, params.q, cfg, seed);
      if (res.diagnostics.degenerate_sample) continue;
      ++runs;
      exact += res.diagnostics.solver_lambda == expected ? 1 : 0;
      smallest = std::min(smallest, res.diagnostics.sample_size);
      largest = std::max(largest, res.diagnostics.sample_size);
    }
  }
  out.Require(runs > 0 && exact == runs,
              Fmt("solver lambda == lambda*(p, q) bitwise in %d/%d runs, sample sizes %lld..%lld",
                  exact, runs, static_cast<long long>(smallest),
                  static_cast<long long>(largest)));
  return out;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace blocksketch

int main(int argc, char** argv) {
  using blocksketch::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "SDP certificate vs exhaustive MLE", blocksketch::OracleEquivalence},
      {2, "tail bound domination and Chernoff sandwich", blocksketch::BoundDomination},
      {3, "threshold identities", blocksketch::ThresholdIdentities},
      {4, "oracle majority vote", blocksketch::OracleVote},
      {5, "pipeline phase behaviour", blocksketch::PhaseBehaviour},
      {6, "solver numerics and determinism", blocksketch::SolverNumerics},
      {7, "lambda* invariance", blocksketch::LambdaInvariance},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    blocksketch::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.Require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s (%.1fs) | %s\n", c.id, outcome.pass ? "PASS" : "FAIL",
                c.title, secs, outcome.detail.c_str());
    std::fflush(stdout);
    failed += outcome.pass ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no such criterion\n");
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
