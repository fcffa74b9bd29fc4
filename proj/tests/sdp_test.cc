#include "blocksketch/sdp.h"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "blocksketch/analytics.h"
#include "blocksketch/error.h"
#include "blocksketch/rng.h"
#include "blocksketch/sbm.h"
#include "test_util.h"

namespace blocksketch {
namespace {

using testing::M;
using testing::MakeGraph;
using testing::P;

SdpConfig Lagrangian(double lambda, RngSeed seed = 1) {
  SdpConfig cfg;
  cfg.lambda = lambda;
  cfg.seed = seed;
  return cfg;
}

SdpConfig Balanced(RngSeed seed = 1) {
  SdpConfig cfg;
  cfg.balanced_mode = true;
  cfg.seed = seed;
  return cfg;
}

double MaxRowNormError(const FactorMatrix& y) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    worst = std::max(worst, std::abs(y.row(i).norm() - 1.0));
  }
  return worst;
}

FactorMatrix RandomFactor(int n, int r, RngSeed seed, bool unit_rows) {
  Rng rng(seed);
  FactorMatrix y(n, r);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < r; ++j) y(i, j) = rng.Symmetric();
    if (unit_rows) y.row(i).normalize();
  }
  return y;
}

// Rounded labels agree with the exhaustive optimum, allowing any maximizer
// when the optimum is not unique.
void ExpectMatchesMle(const Graph& g, const SdpSolution& sol,
                      const MleConstraint& c) {
  const MleResult mle = BruteForceMle(g, c);
  const double lambda = c.kind == MleConstraint::Kind::kLagrangian ? c.lambda : 0.0;
  if (mle.num_optimal == 1) {
    EXPECT_TRUE(PartitionsEqual(sol.rounded, mle.labels))
        << LabelString(sol.rounded) << " vs " << LabelString(mle.labels);
  } else {
    EXPECT_NEAR(LabelObjective(g, sol.rounded, lambda), mle.objective,
                1e-9 * (1 + std::abs(mle.objective)));
  }
}

TEST(SdpConfigTest, Validation) {
  SdpConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.rank = 1;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = SdpConfig{};
  cfg.lambda = -0.1;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = SdpConfig{};
  cfg.restarts = 0;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = SdpConfig{};
  cfg.grad_tol = 0.0;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = SdpConfig{};
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.Validate(), ParameterError);
}

TEST(SdpConfigTest, DefaultRank) {
  EXPECT_EQ(DefaultRank(1), 2);
  EXPECT_EQ(DefaultRank(8), 4);
  EXPECT_EQ(DefaultRank(50), 10);
  EXPECT_EQ(DefaultRank(100000), 32);
}

TEST(LagrangianSdpTest, TwoCliquesAtZeroLambda) {
  // At lambda = 0 every labeling constant on each clique is optimal.
  const Graph g = testing::TwoCliques(4);
  const SdpSolution sol = SolveLagrangianSdp(g, Lagrangian(0.0));
  EXPECT_NEAR(sol.objective, 24.0, 1e-6);
  EXPECT_NEAR(sol.rounded_objective, 24.0, 1e-12);
  EXPECT_TRUE(sol.certificate.tight);
  for (int v = 1; v < 4; ++v) {
    EXPECT_EQ(sol.rounded[v], sol.rounded[0]);
    EXPECT_EQ(sol.rounded[4 + v], sol.rounded[4]);
  }
}

TEST(LagrangianSdpTest, TwoCliquesRecoveredWithPositiveLambda) {
  const Graph g = testing::TwoCliques(4);
  for (double lambda : {0.05, 0.2, 0.5}) {
    const SdpSolution sol = SolveLagrangianSdp(g, Lagrangian(lambda));
    EXPECT_NEAR(sol.objective, 24.0, 1e-6);
    EXPECT_TRUE(sol.certificate.tight);
    EXPECT_TRUE(PartitionsEqual(sol.rounded, *g.truth()));
  }
}

TEST(LagrangianSdpTest, SingleEdge) {
  const Graph g = MakeGraph(2, {{0, 1}});
  const SdpSolution sol = SolveLagrangianSdp(g, Lagrangian(0.0));
  EXPECT_NEAR(sol.objective, 2.0, 1e-9);
  EXPECT_EQ(sol.rounded[0], sol.rounded[1]);
  EXPECT_TRUE(sol.certificate.tight);
}

TEST(LagrangianSdpTest, DenseSbmTenNodesMatchesMle) {
  const Graph g = SampleSbm(SbmParams::Explicit(5, 5, 0.9, 0.1), 7);
  const double lambda = LambdaStar(0.9, 0.1);
  const SdpSolution sol = SolveLagrangianSdp(g, Lagrangian(lambda));
  ASSERT_TRUE(sol.certificate.tight);
  ExpectMatchesMle(g, sol, MleConstraint::Lagrangian(lambda));
}

TEST(LagrangianSdpTest, EmptyGraphErrors) {
  EXPECT_THROW(SolveLagrangianSdp(Graph(0, {}), Lagrangian(0.1)),
               EmptyGraphError);
}

TEST(LagrangianSdpTest, IterationCapForcesNotTight) {
  const Graph g = SampleSbm(SbmParams::Balanced(60, 3.0, 1.0), 2);
  SdpConfig cfg = Lagrangian(0.05);
  cfg.max_iters = 1;
  const SdpSolution sol = SolveLagrangianSdp(g, cfg);
  EXPECT_FALSE(sol.diagnostics.converged);
  EXPECT_FALSE(sol.certificate.tight);
  EXPECT_TRUE(IsComplete(sol.rounded));
}

TEST(BalancedSdpTest, TwoCliques) {
  const Graph g = testing::TwoCliques(4);
  const SdpSolution sol = SolveBalancedSdp(g, Balanced());
  EXPECT_TRUE(PartitionsEqual(sol.rounded, *g.truth()));
  EXPECT_NEAR(sol.objective, 24.0, 1e-6);
  EXPECT_LE(sol.balance_residual, 1e-3 * 8);
  EXPECT_TRUE(sol.certificate.tight);
}

TEST(BalancedSdpTest, CompleteGraphRoundsBalanced) {
  const Graph g = testing::CompleteGraph(4);
  const double best = testing::DenseEnumerationOptimum(
      g, 0.0, [](int plus) { return plus == 2; });
  EXPECT_DOUBLE_EQ(best, -4.0);
  const SdpSolution sol = SolveBalancedSdp(g, Balanced());
  EXPECT_EQ(std::count(sol.rounded.begin(), sol.rounded.end(), P), 2);
  EXPECT_DOUBLE_EQ(sol.rounded_objective, -4.0);
  EXPECT_NEAR(sol.objective, -4.0, 1e-6);
}

TEST(BalancedSdpTest, DenseSbmTwelveNodesMatchesMle) {
  const Graph g = SampleSbm(SbmParams::Explicit(6, 6, 0.9, 0.05), 3);
  const SdpSolution sol = SolveBalancedSdp(g, Balanced());
  ASSERT_TRUE(sol.certificate.tight);
  ExpectMatchesMle(g, sol, MleConstraint::Balanced());
}

TEST(BalancedSdpTest, OddNodeCountErrors) {
  EXPECT_THROW(SolveBalancedSdp(testing::CompleteGraph(5), Balanced()),
               ParameterError);
}

TEST(RoundSolutionTest, RankOneFactor) {
  const LabelVector truth = {P, M, M, P, M};
  FactorMatrix y(5, 1);
  for (int i = 0; i < 5; ++i) y(i, 0) = LabelSign(truth[i]);
  EXPECT_TRUE(PartitionsEqual(RoundSolution(y).labels, truth));
}

TEST(RoundSolutionTest, EqualRows) {
  FactorMatrix y(6, 3);
  for (int i = 0; i < 6; ++i) y.row(i) << 0.6, 0.0, 0.8;
  const LabelVector labels = RoundSolution(y).labels;
  for (Label l : labels) EXPECT_EQ(l, labels[0]);
}

TEST(RoundSolutionTest, MatchesDenseEigensolver) {
  for (RngSeed seed = 0; seed < 20; ++seed) {
    const FactorMatrix y = RandomFactor(6, 3, 1000 + seed, true);
    const Eigen::MatrixXd x = y * y.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
    const Eigen::VectorXd lead = eig.eigenvectors().col(5);
    LabelVector expected(6);
    for (int i = 0; i < 6; ++i) expected[i] = lead(i) >= 0 ? P : M;
    const Rounding r = RoundSolution(y);
    EXPECT_TRUE(r.converged);
    EXPECT_TRUE(PartitionsEqual(r.labels, expected)) << "seed " << seed;
    EXPECT_NEAR(std::abs(r.eigenvector.normalized().dot(lead)), 1.0, 1e-8);
  }
}

TEST(RoundSolutionTest, Deterministic) {
  const FactorMatrix y = RandomFactor(30, 4, 3, true);
  const Rounding a = RoundSolution(y);
  const Rounding b = RoundSolution(y);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.eigenvector, b.eigenvector);
}

TEST(BruteForceMleTest, TwoTrianglesBalanced) {
  const Graph g = testing::TwoCliques(3);
  const MleResult mle = BruteForceMle(g, MleConstraint::Balanced());
  EXPECT_EQ(mle.labels, (LabelVector{P, P, P, M, M, M}));
  EXPECT_DOUBLE_EQ(mle.objective, 12.0);
  EXPECT_EQ(mle.num_optimal, 1);
}

TEST(BruteForceMleTest, PathBalanced) {
  const Graph g = MakeGraph(4, {{0, 1}, {1, 2}, {2, 3}});
  const double oracle = testing::DenseEnumerationOptimum(
      g, 0.0, [](int plus) { return plus == 2; });
  EXPECT_DOUBLE_EQ(oracle, 2.0);
  const MleResult mle = BruteForceMle(g, MleConstraint::Balanced());
  EXPECT_EQ(mle.labels, (LabelVector{P, P, M, M}));
  EXPECT_DOUBLE_EQ(mle.objective, 2.0);
}

TEST(BruteForceMleTest, TriangleExactSizeOne) {
  const Graph g = testing::CompleteGraph(3);
  const MleResult mle = BruteForceMle(g, MleConstraint::ExactSize(1));
  EXPECT_EQ(mle.labels, (LabelVector{P, M, M}));
  EXPECT_DOUBLE_EQ(mle.objective, -2.0);
  EXPECT_EQ(mle.num_optimal, 3);
}

TEST(BruteForceMleTest, MatchesDenseEnumeration) {
  for (RngSeed seed = 0; seed < 30; ++seed) {
    const int n = 4 + static_cast<int>(seed % 9);
    const Graph g = SampleSbm(SbmParams::Explicit(n / 2, n - n / 2, 0.7, 0.3), seed);
    if (n % 2 == 0) {
      const MleResult bal = BruteForceMle(g, MleConstraint::Balanced());
      EXPECT_DOUBLE_EQ(bal.objective, testing::DenseEnumerationOptimum(
                                          g, 0.0, [n](int k) { return 2 * k == n; }));
    }
    const MleResult size2 = BruteForceMle(g, MleConstraint::ExactSize(2));
    EXPECT_DOUBLE_EQ(size2.objective, testing::DenseEnumerationOptimum(
                                          g, 0.0, [](int k) { return k == 2; }));
    EXPECT_EQ(std::count(size2.labels.begin(), size2.labels.end(), P), 2);
    for (double lambda : {0.0, 0.3, 1.0}) {
      const MleResult lag = BruteForceMle(g, MleConstraint::Lagrangian(lambda));
      EXPECT_NEAR(lag.objective,
                  testing::DenseEnumerationOptimum(g, lambda, [](int) { return true; }),
                  1e-9);
      EXPECT_NEAR(LabelObjective(g, lag.labels, lambda), lag.objective, 1e-9);
      EXPECT_EQ(lag.labels[0], P);
    }
  }
}

TEST(BruteForceMleTest, CapacityAndDomain) {
  EXPECT_THROW(BruteForceMle(Graph(23, {}), MleConstraint::Balanced()),
               CapacityError);
  EXPECT_THROW(BruteForceMle(Graph(5, {}), MleConstraint::Balanced()),
               ParameterError);
  EXPECT_THROW(BruteForceMle(Graph(5, {}), MleConstraint::ExactSize(6)),
               ParameterError);
}

TEST(CertificateTest, Arithmetic) {
  SdpSolution sol;
  sol.objective = 24.0;
  sol.rounded_objective = 23.5;
  const Certificate c = CertificateCheck(sol, 0.1);
  EXPECT_FALSE(c.tight);
  EXPECT_DOUBLE_EQ(c.gap, 0.5);
  EXPECT_TRUE(CertificateCheck(sol, 0.5).tight);
}

TEST(CertificateTest, RankOnePlantedIsTight) {
  const Graph g = testing::TwoCliques(4);
  SdpSolution sol;
  sol.factor = FactorMatrix(8, 1);
  for (int i = 0; i < 8; ++i) sol.factor(i, 0) = LabelSign((*g.truth())[i]);
  sol.objective = FactorObjective(g, sol.factor, 0.1);
  sol.rounded = RoundSolution(sol.factor).labels;
  sol.rounded_objective = LabelObjective(g, sol.rounded, 0.1);
  const Certificate c = CertificateCheck(sol);
  EXPECT_TRUE(c.tight);
  EXPECT_DOUBLE_EQ(c.gap, 0.0);
}

TEST(CertificateTest, TightInstancesMatchMle) {
  const double lambda = LambdaStar(0.9, 0.1);
  int tight = 0;
  for (RngSeed seed = 0; seed < 100; ++seed) {
    const Graph g = SampleSbm(SbmParams::Explicit(5, 5, 0.9, 0.1), seed);
    const SdpSolution sol = SolveLagrangianSdp(g, Lagrangian(lambda, seed));
    if (!sol.certificate.tight) continue;
    ++tight;
    ExpectMatchesMle(g, sol, MleConstraint::Lagrangian(lambda));
  }
  EXPECT_GT(tight, 50);
}

TEST(SdpPropertyTest, GradientMatchesFiniteDifferences) {
  const Graph g = SampleSbm(SbmParams::Explicit(4, 4, 0.8, 0.3), 5);
  const double h = 1e-5;
  for (RngSeed seed = 0; seed < 20; ++seed) {
    const double lambda = 0.1 * static_cast<double>(seed % 5);
    FactorMatrix y = RandomFactor(8, 3, seed, false);
    const FactorMatrix grad = FactorGradient(g, y, lambda);
    FactorMatrix fd(8, 3);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double saved = y(i, j);
        y(i, j) = saved + h;
        const double up = FactorObjective(g, y, lambda);
        y(i, j) = saved - h;
        const double down = FactorObjective(g, y, lambda);
        y(i, j) = saved;
        fd(i, j) = (up - down) / (2 * h);
      }
    }
    EXPECT_LE((grad - fd).norm() / grad.norm(), 1e-5) << "seed " << seed;
  }
}

TEST(SdpPropertyTest, FeasibleAndMonotoneEveryIteration) {
  for (bool balanced : {false, true}) {
    const Graph g = SampleSbm(SbmParams::Balanced(80, 6.0, 1.0), 11);
    SdpConfig cfg = balanced ? Balanced(4) : Lagrangian(0.05, 4);
    cfg.record_trace = true;
    const SdpSolution sol = SolveSdp(g, cfg);
    ASSERT_FALSE(sol.diagnostics.trace.empty());
    EXPECT_LE(MaxRowNormError(sol.factor), 1e-9);
    const IterationRecord* prev = nullptr;
    for (const IterationRecord& rec : sol.diagnostics.trace) {
      EXPECT_LE(rec.max_row_norm_error, 1e-9);
      if (prev != nullptr && prev->restart == rec.restart) {
        const double slack = cfg.step_tol * (1 + std::abs(prev->objective));
        EXPECT_GE(rec.objective, prev->objective - slack)
            << "balanced=" << balanced << " iteration " << rec.iteration;
      }
      prev = &rec;
    }
  }
}

TEST(SdpPropertyTest, RelaxationDominatesIntegralOptimum) {
  for (RngSeed seed = 0; seed < 25; ++seed) {
    const int n = 4 + static_cast<int>(seed % 9);
    const Graph g = SampleSbm(SbmParams::Explicit(n / 2, n - n / 2, 0.7, 0.2), 50 + seed);
    for (double lambda : {0.0, 0.05, 0.2, 0.5, 1.0}) {
      const SdpSolution sol = SolveLagrangianSdp(g, Lagrangian(lambda, seed));
      const MleResult mle = BruteForceMle(g, MleConstraint::Lagrangian(lambda));
      EXPECT_GE(sol.objective, mle.objective - 1e-6)
          << "seed " << seed << " lambda " << lambda;
      EXPECT_LE(sol.rounded_objective, sol.objective + 1e-6);
      EXPECT_TRUE(IsComplete(sol.rounded));
      if (sol.certificate.tight) {
        ExpectMatchesMle(g, sol, MleConstraint::Lagrangian(lambda));
      }
    }
  }
}

TEST(SdpPropertyTest, Deterministic) {
  const Graph g = SampleSbm(SbmParams::Balanced(60, 5.0, 1.0), 8);
  for (bool balanced : {false, true}) {
    const SdpConfig cfg = balanced ? Balanced(9) : Lagrangian(0.07, 9);
    const SdpSolution a = SolveSdp(g, cfg);
    const SdpSolution b = SolveSdp(g, cfg);
    EXPECT_EQ(a.factor, b.factor);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.rounded, b.rounded);
    EXPECT_EQ(a.certificate, b.certificate);
    EXPECT_EQ(a.iters, b.iters);
    EXPECT_EQ(a.balance_residual, b.balance_residual);
  }
}

}  // namespace
}  // namespace blocksketch
