#include "blocksketch/analytics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "blocksketch/error.h"

namespace blocksketch {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void RequireOrderedRates(double alpha, double beta) {
  if (!(alpha > beta) || !(beta >= 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("rates must satisfy alpha > beta >= 0");
  }
}

// (sqrt(alpha) - sqrt(beta))^2 without cancellation.
double SqrtGapSquared(double alpha, double beta) {
  const double diff = alpha - beta;
  return diff * diff / (alpha + beta + 2.0 * std::sqrt(alpha * beta));
}

void ValidateBoundParams(const BoundParams& bp) {
  if (bp.k1 < 0 || bp.k2 < 0) {
    throw ParameterError("bound: trial counts must be non-negative");
  }
  if (!(bp.p >= 0.0 && bp.p <= 1.0) || !(bp.q >= 0.0 && bp.q <= 1.0)) {
    throw ParameterError("bound: probabilities must lie in [0, 1]");
  }
}

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double Value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

double GammaStar(double alpha, double beta) {
  RequireOrderedRates(alpha, beta);
  return 2.0 / SqrtGapSquared(alpha, beta);
}

std::string_view RegimeName(RecoveryRegime regime) {
  switch (regime) {
    case RecoveryRegime::kBelow:
      return "below";
    case RecoveryRegime::kAbove:
      return "above";
    case RecoveryRegime::kBoundary:
      return "boundary";
  }
  return "unknown";
}

RecoveryRegime ExactRecoveryPossible(double alpha, double beta) {
  if (!(alpha >= beta) || !(beta >= 0.0)) {
    throw ParameterError("rates must satisfy alpha >= beta >= 0");
  }
  const double d = std::sqrt(alpha) - std::sqrt(beta) - std::sqrt(2.0);
  if (std::abs(d) <= 1e-12) return RecoveryRegime::kBoundary;
  return d > 0.0 ? RecoveryRegime::kAbove : RecoveryRegime::kBelow;
}

double LambdaStar(double p, double q) {
  if (!(q > 0.0) || !(p > q) || !(p <= 1.0)) {
    throw ParameterError("lambda*: needs 0 < q < p <= 1");
  }
  return (p - q) / std::log1p((p - q) / q);
}

double LambdaStarFromRates(double alpha, double beta, std::int64_t n) {
  if (!(beta > 0.0) || !(alpha > beta)) {
    throw ParameterError("lambda*: needs alpha > beta > 0");
  }
  if (n < 2) throw ParameterError("lambda*: needs n >= 2");
  const double dn = static_cast<double>(n);
  return (alpha - beta) / std::log1p((alpha - beta) / beta) *
         (std::log(dn) / dn);
}

double Lemma2Exponent(double alpha, double beta, double gamma) {
  RequireOrderedRates(alpha, beta);
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ParameterError("gamma must lie in [0, 1]");
  }
  // (alpha + beta) gamma / 2 - gamma sqrt(alpha beta), rewritten as
  // gamma (alpha - beta)^2 / (2 (sqrt(alpha) + sqrt(beta))^2).
  return 0.5 * gamma * SqrtGapSquared(alpha, beta);
}

double Lemma2Asymptotic(double alpha, double beta, double gamma,
                        std::int64_t n) {
  if (n < 2) throw ParameterError("needs n >= 2");
  return std::exp(-Lemma2Exponent(alpha, beta, gamma) *
                  std::log(static_cast<double>(n)));
}

double Lemma2Bound(const BoundParams& bp) {
  ValidateBoundParams(bp);
  const double mean_x = static_cast<double>(bp.k1) * bp.p;
  const double mean_y = static_cast<double>(bp.k2) * bp.q;
  if (!(mean_x >= mean_y)) {
    throw DomainError("lemma bound needs k1 p >= k2 q");
  }
  // k1 p + k2 q - 2 sqrt(k1 k2 p q) = (sqrt(k1 p) - sqrt(k2 q))^2.
  const double gap = std::sqrt(mean_x) - std::sqrt(mean_y);
  return std::exp(-gap * gap);
}

std::vector<double> BinomialLogPmf(std::int64_t k, double p) {
  if (k < 0) throw ParameterError("binomial: negative trial count");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError("binomial: probability outside [0, 1]");
  }
  std::vector<double> logpmf(static_cast<std::size_t>(k) + 1, kNegInf);
  if (p == 0.0) {
    logpmf[0] = 0.0;
    return logpmf;
  }
  if (p == 1.0) {
    logpmf[k] = 0.0;
    return logpmf;
  }
  const double dk = static_cast<double>(k);
  const auto mode = std::min<std::int64_t>(
      k, static_cast<std::int64_t>(std::floor((dk + 1.0) * p)));
  const double dm = static_cast<double>(mode);
  logpmf[mode] = std::lgamma(dk + 1.0) - std::lgamma(dm + 1.0) -
                 std::lgamma(dk - dm + 1.0) + dm * std::log(p) +
                 (dk - dm) * std::log1p(-p);
  const double log_odds = std::log(p) - std::log1p(-p);
  // P(j+1) = P(j) * (k - j) / (j + 1) * p / (1 - p), in both directions.
  for (std::int64_t j = mode; j < k; ++j) {
    logpmf[j + 1] = logpmf[j] +
                    std::log(static_cast<double>(k - j) /
                             static_cast<double>(j + 1)) +
                    log_odds;
  }
  for (std::int64_t j = mode; j > 0; --j) {
    logpmf[j - 1] = logpmf[j] -
                    std::log(static_cast<double>(k - j + 1) /
                             static_cast<double>(j)) -
                    log_odds;
  }
  return logpmf;
}

double BinomDiffTailExact(const BoundParams& bp) {
  ValidateBoundParams(bp);
  if (bp.k1 + bp.k2 > kConvolutionMaxTrials) {
    throw CapacityError("exact tail: k1 + k2 exceeds " +
                        std::to_string(kConvolutionMaxTrials));
  }
  const std::vector<double> lx = BinomialLogPmf(bp.k1, bp.p);
  const std::vector<double> ly = BinomialLogPmf(bp.k2, bp.q);
  const double mx = *std::max_element(lx.begin(), lx.end());
  const double my = *std::max_element(ly.begin(), ly.end());

  // tail[j] = P(Y >= j) / exp(my).
  std::vector<double> tail(ly.size() + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t j = ly.size(); j-- > 0;) {
    acc.Add(std::exp(ly[j] - my));
    tail[j] = acc.Value();
  }
  // P(X - Y <= 0) = sum_i P(X = i) P(Y >= i).
  CompensatedSum total;
  const std::size_t top = std::min(lx.size(), ly.size());
  for (std::size_t i = 0; i < top; ++i) {
    total.Add(std::exp(lx[i] - mx) * tail[i]);
  }
  const double scaled = total.Value();
  if (scaled <= 0.0) return 0.0;
  return std::min(1.0, std::exp(std::log(scaled) + mx + my));
}

double ChernoffGridMin(const BoundParams& bp, std::span<const double> grid) {
  ValidateBoundParams(bp);
  if (grid.empty()) throw DomainError("chernoff: empty grid");
  const double k1 = static_cast<double>(bp.k1);
  const double k2 = static_cast<double>(bp.k2);
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (double t : grid) {
    if (!(t >= 0.0)) throw ParameterError("chernoff: grid needs t >= 0");
    // log E exp(-t X) = k1 log(1 - p (1 - e^{-t})), and likewise for +t Y.
    const double shrink = bp.p * -std::expm1(-t);
    const double grow = bp.q * std::expm1(t);
    if ((bp.k1 > 0 && !(1.0 - shrink > 0.0)) ||
        (bp.k2 > 0 && !(1.0 + grow > 0.0))) {
      continue;
    }
    double log_mgf = 0.0;
    if (bp.k1 > 0) log_mgf += k1 * std::log1p(-shrink);
    if (bp.k2 > 0) log_mgf += k2 * std::log1p(grow);
    if (std::isnan(log_mgf)) continue;
    any = true;
    best = std::min(best, log_mgf);
  }
  if (!any) throw DomainError("chernoff: no valid grid point");
  return std::exp(best);
}

std::vector<double> UniformGrid(double step, int first, int last) {
  std::vector<double> grid;
  for (int k = first; k <= last; ++k) grid.push_back(step * k);
  return grid;
}

}  // namespace blocksketch
