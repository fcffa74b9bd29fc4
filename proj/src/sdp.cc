#include "blocksketch/sdp.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "blocksketch/error.h"

namespace blocksketch {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 30;
constexpr int kMaxBalanceSweeps = 100;
constexpr int kPowerMaxIters = 20000;
constexpr double kPowerTol = 1e-12;
constexpr RngSeed kRoundingSeed = 0x726f756e64696e67ULL;

using RowVector = Eigen::RowVectorXd;

// out = A * y, A the adjacency matrix. Rows accumulate in neighbour order, so
// the result is bit-reproducible.
void ApplyAdjacency(const Graph& g, const FactorMatrix& y, FactorMatrix* out) {
  out->setZero(y.rows(), y.cols());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto row = out->row(v);
    for (NodeId u : g.Neighbors(v)) row += y.row(u);
  }
}

// Tr(Y^T A Y) - lambda ||Y^T 1||^2 given A Y.
double ObjectiveFromProduct(const FactorMatrix& y, const FactorMatrix& ay,
                            double lambda) {
  const double quad = y.cwiseProduct(ay).sum();
  if (lambda == 0.0) return quad;
  return quad - lambda * y.colwise().sum().squaredNorm();
}

void NormalizeRows(FactorMatrix* y) {
  for (Eigen::Index i = 0; i < y->rows(); ++i) {
    const double norm = y->row(i).norm();
    if (norm > 0.0) y->row(i) /= norm;
  }
}

double BalanceResidual(const FactorMatrix& y) {
  return y.colwise().sum().norm();
}

// Alternating projection onto {Y^T 1 = 0} and {unit rows}; ends on the
// unit-row set.
void RetractBalanced(FactorMatrix* y) {
  const double n = static_cast<double>(y->rows());
  for (int sweep = 0; sweep < kMaxBalanceSweeps; ++sweep) {
    const RowVector colsum = y->colwise().sum();
    if (colsum.norm() <= 1e-12 * n) break;
    y->rowwise() -= colsum / n;
    NormalizeRows(y);
  }
}

double MaxRowNormError(const FactorMatrix& y) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    worst = std::max(worst, std::abs(y.row(i).norm() - 1.0));
  }
  return worst;
}

struct RestartResult {
  FactorMatrix y;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
};

RestartResult RunRestart(const Graph& g, const SdpConfig& cfg, int rank,
                         double lambda, int restart,
                         std::vector<IterationRecord>* trace) {
  const Eigen::Index n = g.num_nodes();
  const bool balanced = cfg.balanced_mode;

  Rng rng(SplitSeed(cfg.seed, Stream::kSolverInit,
                    static_cast<std::uint64_t>(restart)));
  FactorMatrix y(n, rank);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < rank; ++k) y(i, k) = rng.Symmetric();
    if (y.row(i).norm() == 0.0) y(i, 0) = 1.0;
  }
  NormalizeRows(&y);
  if (balanced) RetractBalanced(&y);

  FactorMatrix ay, grad, direction, trial, trial_ay;
  ApplyAdjacency(g, y, &ay);
  double f = ObjectiveFromProduct(y, ay, lambda);

  RestartResult result;
  int it = 0;
  for (it = 1; it <= cfg.max_iters; ++it) {
    grad = 2.0 * ay;
    if (lambda != 0.0) {
      const RowVector colsum = y.colwise().sum();
      grad.rowwise() -= 2.0 * lambda * colsum;
    }
    // Tangent projection: drop the radial component of each row.
    const Eigen::VectorXd radial = grad.cwiseProduct(y).rowwise().sum();
    direction = grad - radial.asDiagonal() * y;
    if (balanced) {
      const RowVector mean = direction.colwise().sum() / static_cast<double>(n);
      direction.rowwise() -= mean;
    }
    const double gn2 = direction.squaredNorm();
    result.grad_norm = std::sqrt(gn2);
    if (result.grad_norm <= cfg.grad_tol * (1.0 + std::abs(f))) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    double f_new = f;
    double step = 1.0;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      trial = y + step * direction;
      NormalizeRows(&trial);
      if (balanced) RetractBalanced(&trial);
      ApplyAdjacency(g, trial, &trial_ay);
      f_new = ObjectiveFromProduct(trial, trial_ay, lambda);
      if (f_new >= f + kArmijo * step * gn2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.stalled = true;
      break;
    }
    const double rel_change = (f_new - f) / (1.0 + std::abs(f));
    y.swap(trial);
    ay.swap(trial_ay);
    f = f_new;
    if (trace != nullptr) {
      trace->push_back({restart, it, f, result.grad_norm, step,
                        MaxRowNormError(y), BalanceResidual(y)});
    }
    if (rel_change < cfg.step_tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = std::min(it, cfg.max_iters);
  result.objective = f;
  result.y = std::move(y);
  return result;
}

SdpSolution Solve(const Graph& g, const SdpConfig& cfg) {
  cfg.Validate();
  if (g.num_nodes() == 0) throw EmptyGraphError("sdp: graph has no nodes");
  const bool balanced = cfg.balanced_mode;
  const double lambda = balanced ? 0.0 : cfg.lambda;
  const int rank = cfg.rank > 0 ? cfg.rank : DefaultRank(g.num_nodes());

  SdpSolution sol;
  sol.lambda = lambda;
  std::vector<IterationRecord>* trace =
      cfg.record_trace ? &sol.diagnostics.trace : nullptr;

  RestartResult best;
  int best_index = -1;
  for (int r = 0; r < cfg.restarts; ++r) {
    RestartResult res = RunRestart(g, cfg, rank, lambda, r, trace);
    sol.diagnostics.iterations += res.iterations;
    if (best_index < 0 || res.objective > best.objective) {
      best = std::move(res);
      best_index = r;
    }
  }
  sol.diagnostics.restarts_used = cfg.restarts;
  sol.diagnostics.best_restart = best_index;
  sol.diagnostics.grad_norm = best.grad_norm;
  sol.diagnostics.converged = best.converged;
  sol.diagnostics.line_search_stalled = best.stalled;

  sol.factor = std::move(best.y);
  sol.objective = best.objective;
  sol.iters = best.iterations;
  sol.balance_residual = BalanceResidual(sol.factor);

  Rounding rounding = balanced ? RoundSolutionBalanced(sol.factor)
                               : RoundSolution(sol.factor);
  sol.diagnostics.rounding_converged = rounding.converged;
  sol.rounded = std::move(rounding.labels);
  sol.rounded_objective = LabelObjective(g, sol.rounded, lambda);
  sol.certificate = CertificateCheck(sol);
  // A solve that ran out of iterations never certifies.
  if (!best.converged && !best.stalled) sol.certificate.tight = false;
  return sol;
}

std::vector<std::uint32_t> BitAdjacency(const Graph& g) {
  // Node i occupies bit (n - 1 - i): ascending integers then enumerate label
  // vectors in lexicographic order with node 0 most significant.
  const int n = static_cast<int>(g.num_nodes());
  std::vector<std::uint32_t> adj(n, 0);
  for (const Edge& e : g.edges()) {
    adj[e.first] |= 1u << (n - 1 - e.second);
    adj[e.second] |= 1u << (n - 1 - e.first);
  }
  return adj;
}

}  // namespace

void SdpConfig::Validate() const {
  if (rank != 0 && rank < 2) throw ParameterError("sdp: rank must be >= 2");
  if (max_iters < 1) throw ParameterError("sdp: max_iters must be >= 1");
  if (!(step_tol > 0.0) || !(grad_tol > 0.0)) {
    throw ParameterError("sdp: tolerances must be positive");
  }
  if (restarts < 1) throw ParameterError("sdp: restarts must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("sdp: lambda must be a finite value >= 0");
  }
}

int DefaultRank(std::int64_t n) {
  const int r = static_cast<int>(std::ceil(std::sqrt(2.0 * static_cast<double>(n))));
  return std::min(32, std::max(2, r));
}

double FactorObjective(const Graph& g, const FactorMatrix& factor,
                       double lambda) {
  if (factor.rows() != g.num_nodes()) {
    throw ParameterError("factor row count does not match graph");
  }
  FactorMatrix ay;
  ApplyAdjacency(g, factor, &ay);
  return ObjectiveFromProduct(factor, ay, lambda);
}

FactorMatrix FactorGradient(const Graph& g, const FactorMatrix& factor,
                            double lambda) {
  if (factor.rows() != g.num_nodes()) {
    throw ParameterError("factor row count does not match graph");
  }
  FactorMatrix ay;
  ApplyAdjacency(g, factor, &ay);
  FactorMatrix grad = 2.0 * ay;
  grad.rowwise() -= 2.0 * lambda * factor.colwise().sum();
  return grad;
}

double LabelObjective(const Graph& g, const LabelVector& labels,
                      double lambda) {
  if (static_cast<std::int64_t>(labels.size()) != g.num_nodes() ||
      !IsComplete(labels)) {
    throw ParameterError("label objective needs a complete label vector");
  }
  std::int64_t quad = 0;
  for (const Edge& e : g.edges()) {
    quad += 2 * LabelSign(labels[e.first]) * LabelSign(labels[e.second]);
  }
  std::int64_t sum = 0;
  for (Label l : labels) sum += LabelSign(l);
  return static_cast<double>(quad) -
         lambda * static_cast<double>(sum) * static_cast<double>(sum);
}

SdpSolution SolveLagrangianSdp(const Graph& g, const SdpConfig& cfg) {
  if (cfg.balanced_mode) {
    throw ParameterError("SolveLagrangianSdp called with balanced_mode set");
  }
  return Solve(g, cfg);
}

SdpSolution SolveBalancedSdp(const Graph& g, const SdpConfig& cfg) {
  if (!cfg.balanced_mode) {
    throw ParameterError("SolveBalancedSdp needs balanced_mode set");
  }
  if (g.num_nodes() % 2 != 0) {
    throw ParameterError("balanced sdp needs an even node count");
  }
  return Solve(g, cfg);
}

SdpSolution SolveSdp(const Graph& g, const SdpConfig& cfg) {
  return cfg.balanced_mode ? SolveBalancedSdp(g, cfg)
                           : SolveLagrangianSdp(g, cfg);
}

namespace {

Rounding LeadingEigenvector(const FactorMatrix& factor) {
  const Eigen::Index n = factor.rows();
  Rounding out;
  Eigen::VectorXd v(n);
  Rng rng(SplitSeed(kRoundingSeed, Stream::kRounding));
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * rng.Symmetric();
  v.normalize();
  out.converged = false;
  for (int it = 1; it <= kPowerMaxIters; ++it) {
    Eigen::VectorXd w = factor * (factor.transpose() * v);
    const double norm = w.norm();
    out.iterations = it;
    if (norm == 0.0) {
      out.converged = true;
      break;
    }
    w /= norm;
    const double change = (w - v).norm();
    v.swap(w);
    if (change <= kPowerTol) {
      out.converged = true;
      break;
    }
  }
  out.eigenvector = std::move(v);
  return out;
}

}  // namespace

Rounding RoundSolution(const FactorMatrix& factor) {
  Rounding out = LeadingEigenvector(factor);
  out.labels.resize(static_cast<std::size_t>(factor.rows()));
  for (Eigen::Index i = 0; i < factor.rows(); ++i) {
    out.labels[i] = out.eigenvector(i) >= 0.0 ? Label::kPlus : Label::kMinus;
  }
  return out;
}

Rounding RoundSolutionBalanced(const FactorMatrix& factor) {
  Rounding out = LeadingEigenvector(factor);
  const auto n = static_cast<std::size_t>(factor.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.eigenvector(a) > out.eigenvector(b);
  });
  out.labels.assign(n, Label::kMinus);
  for (std::size_t k = 0; k < n / 2; ++k) out.labels[order[k]] = Label::kPlus;
  return out;
}

Certificate CertificateCheck(const SdpSolution& sol,
                             std::optional<double> gap_tol) {
  const double tol = gap_tol.value_or(1e-6 * (1.0 + std::abs(sol.objective)));
  Certificate cert;
  cert.gap = sol.objective - sol.rounded_objective;
  cert.tight = cert.gap <= tol;
  return cert;
}

MleResult BruteForceMle(const Graph& g, const MleConstraint& constraint) {
  const std::int64_t n = g.num_nodes();
  if (n > kBruteForceMaxNodes) {
    throw CapacityError("brute-force MLE is capped at " +
                        std::to_string(kBruteForceMaxNodes) + " nodes, got " +
                        std::to_string(n));
  }
  using Kind = MleConstraint::Kind;
  std::int64_t minus_count = -1;  // required number of -1 entries, if fixed
  switch (constraint.kind) {
    case Kind::kBalanced:
      if (n % 2 != 0) throw ParameterError("balanced MLE needs even n");
      minus_count = n / 2;
      break;
    case Kind::kExactSize:
      if (constraint.community_size < 0 || constraint.community_size > n) {
        throw ParameterError("exact-size MLE: community size out of range");
      }
      minus_count = n - constraint.community_size;
      break;
    case Kind::kLagrangian:
      if (!(constraint.lambda >= 0.0)) {
        throw ParameterError("Lagrangian MLE needs lambda >= 0");
      }
      break;
  }
  MleResult result;
  if (n == 0) {
    result.num_optimal = 1;
    return result;
  }

  const int nn = static_cast<int>(n);
  const std::vector<std::uint32_t> adj = BitAdjacency(g);
  const std::uint32_t full = nn == 32 ? ~0u : ((1u << nn) - 1u);
  const std::int64_t m = g.num_edges();
  // Symmetric modes fix node 0 (the top bit) to +1.
  const bool symmetric = constraint.kind != Kind::kExactSize;
  const std::uint64_t limit = symmetric ? (std::uint64_t{1} << (nn - 1))
                                        : (std::uint64_t{1} << nn);
  const double lambda =
      constraint.kind == Kind::kLagrangian ? constraint.lambda : 0.0;
  constexpr double kTieTol = 1e-9;

  bool have_best = false;
  double best = 0.0;
  std::uint32_t best_code = 0;
  std::int64_t count = 0;
  for (std::uint64_t c64 = 0; c64 < limit; ++c64) {
    const auto code = static_cast<std::uint32_t>(c64);
    const int minus = std::popcount(code);
    if (minus_count >= 0 && minus != minus_count) continue;
    std::int64_t cross = 0;
    for (std::uint32_t rest = code; rest != 0; rest &= rest - 1) {
      const int bit = std::countr_zero(rest);
      cross += std::popcount(adj[nn - 1 - bit] & ~code & full);
    }
    const std::int64_t quad = 2 * (m - 2 * cross);
    const std::int64_t sum = nn - 2 * minus;
    const double value = static_cast<double>(quad) -
                         lambda * static_cast<double>(sum * sum);
    if (!have_best || value > best + kTieTol) {
      have_best = true;
      best = value;
      best_code = code;
      count = 1;
    } else if (value >= best - kTieTol) {
      ++count;
    }
  }
  if (!have_best) throw ParameterError("MLE constraint is infeasible");

  result.objective = best;
  result.num_optimal = count;
  result.labels.resize(n);
  for (int i = 0; i < nn; ++i) {
    result.labels[i] =
        (best_code >> (nn - 1 - i)) & 1u ? Label::kMinus : Label::kPlus;
  }
  return result;
}

}  // namespace blocksketch
