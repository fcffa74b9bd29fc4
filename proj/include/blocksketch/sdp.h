#ifndef BLOCKSKETCH_SDP_H_
#define BLOCKSKETCH_SDP_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "blocksketch/graph.h"
#include "blocksketch/rng.h"

namespace blocksketch {

// n x rank factor, one row per node.
using FactorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Low-rank solver for
//
//   max  Tr(A X) - lambda * Tr(X J)   s.t.  X_ii = 1, X psd
//
// (Lagrangian mode) or max Tr(A X) s.t. X_ii = 1, Tr(X J) = 0, X psd
// (balanced mode), with X = Y Y^T and Y an n x rank factor with unit rows.
struct SdpConfig {
  int rank = 0;  // 0 selects DefaultRank(n)
  int max_iters = 3000;
  double step_tol = 1e-12;  // relative objective change
  double grad_tol = 1e-9;   // Riemannian gradient norm / (1 + |f|)
  int restarts = 5;
  bool balanced_mode = false;
  double lambda = 0.0;
  RngSeed seed = 0;
  // Keep a per-iteration trace in SdpDiagnostics::trace.
  bool record_trace = false;

  void Validate() const;
};

// max(2, ceil(sqrt(2n))) capped at 32.
int DefaultRank(std::int64_t n);

struct Certificate {
  bool tight = false;
  double gap = 0.0;  // objective - rounded_objective

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct IterationRecord {
  int restart = 0;
  int iteration = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double max_row_norm_error = 0.0;
  double balance_residual = 0.0;
};

struct SdpDiagnostics {
  int iterations = 0;      // summed over restarts
  int restarts_used = 0;
  int best_restart = 0;
  double grad_norm = 0.0;  // final, best restart
  bool converged = false;  // best restart met step_tol or grad_tol
  bool line_search_stalled = false;
  bool rounding_converged = true;
  std::vector<IterationRecord> trace;
};

struct SdpSolution {
  FactorMatrix factor;
  double objective = 0.0;
  LabelVector rounded;
  double rounded_objective = 0.0;
  Certificate certificate;
  int iters = 0;  // iterations of the best restart
  // ||Y^T 1||_2 = sqrt(Tr(X J)).
  double balance_residual = 0.0;
  double lambda = 0.0;
  SdpDiagnostics diagnostics;
};

// Tr(A Y Y^T) - lambda * ||Y^T 1||^2.
double FactorObjective(const Graph& g, const FactorMatrix& factor,
                       double lambda);

// Euclidean gradient 2 (A - lambda J) Y. J is applied as a rank-one update.
FactorMatrix FactorGradient(const Graph& g, const FactorMatrix& factor,
                               double lambda);

// x^T A x - lambda * (1^T x)^2 for a complete label vector.
double LabelObjective(const Graph& g, const LabelVector& labels,
                      double lambda);

SdpSolution SolveLagrangianSdp(const Graph& g, const SdpConfig& cfg);
SdpSolution SolveBalancedSdp(const Graph& g, const SdpConfig& cfg);

// Dispatches on cfg.balanced_mode.
SdpSolution SolveSdp(const Graph& g, const SdpConfig& cfg);

struct Rounding {
  LabelVector labels;
  Eigen::VectorXd eigenvector;
  bool converged = true;
  int iterations = 0;
};

// Signs of the leading eigenvector of Y Y^T (power iteration on the factored
// operator, sign(0) = +1).
Rounding RoundSolution(const FactorMatrix& factor);

// Same eigenvector, split at the median: the n/2 largest entries get +1.
Rounding RoundSolutionBalanced(const FactorMatrix& factor);

// Tight iff objective - rounded_objective <= gap_tol. Default tolerance is
// 1e-6 * (1 + |objective|).
Certificate CertificateCheck(const SdpSolution& sol,
                             std::optional<double> gap_tol = std::nullopt);

// Exhaustive maximum-likelihood search for small graphs.
struct MleConstraint {
  enum class Kind { kExactSize, kBalanced, kLagrangian };

  static MleConstraint ExactSize(std::int64_t k) {
    return {Kind::kExactSize, k, 0.0};
  }
  static MleConstraint Balanced() { return {Kind::kBalanced, 0, 0.0}; }
  static MleConstraint Lagrangian(double lambda) {
    return {Kind::kLagrangian, 0, lambda};
  }

  Kind kind = Kind::kBalanced;
  std::int64_t community_size = 0;  // nodes labelled +1 in kExactSize
  double lambda = 0.0;
};

struct MleResult {
  LabelVector labels;
  double objective = 0.0;
  // Number of maximizers (counted once per sign pair in the symmetric modes).
  std::int64_t num_optimal = 0;
};

inline constexpr std::int64_t kBruteForceMaxNodes = 22;

// Maximizes x^T A x (minus lambda (1^T x)^2 in Lagrangian mode) over
// x in {+1,-1}^n under the constraint. Ties go to the lexicographically
// smallest vector ordering +1 before -1, which in the sign-symmetric modes
// has x_0 = +1. Throws CapacityError above kBruteForceMaxNodes.
MleResult BruteForceMle(const Graph& g, const MleConstraint& constraint);

}  // namespace blocksketch

#endif  // BLOCKSKETCH_SDP_H_
