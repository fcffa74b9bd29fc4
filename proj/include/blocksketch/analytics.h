#ifndef BLOCKSKETCH_ANALYTICS_H_
#define BLOCKSKETCH_ANALYTICS_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace blocksketch {

// Sampling threshold 2 / (sqrt(alpha) - sqrt(beta))^2. Requires
// alpha > beta >= 0.
double GammaStar(double alpha, double beta);

enum class RecoveryRegime { kBelow, kAbove, kBoundary };

std::string_view RegimeName(RecoveryRegime regime);

// Sign of sqrt(alpha) - sqrt(beta) - sqrt(2), with |.| <= 1e-12 reported as
// the boundary.
RecoveryRegime ExactRecoveryPossible(double alpha, double beta);

// (p - q) / (ln p - ln q) for 0 < q < p <= 1.
double LambdaStar(double p, double q);

// ((alpha - beta) / (ln alpha - ln beta)) * ln(n) / n.
double LambdaStarFromRates(double alpha, double beta, std::int64_t n);

// (alpha + beta) gamma / 2 - gamma sqrt(alpha beta).
double Lemma2Exponent(double alpha, double beta, double gamma);

// n^{-exponent}; display only.
double Lemma2Asymptotic(double alpha, double beta, double gamma,
                        std::int64_t n);

// X ~ Binom(k1, p), Y ~ Binom(k2, q), independent.
struct BoundParams {
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  double p = 0.0;
  double q = 0.0;
};

// exp(-(k1 p + k2 q - 2 sqrt(k1 k2 p q))). Throws DomainError unless
// k1 p >= k2 q.
double Lemma2Bound(const BoundParams& bp);

inline constexpr std::int64_t kConvolutionMaxTrials = 100000;

// P(X - Y <= 0) by exact convolution of the two pmfs.
double BinomDiffTailExact(const BoundParams& bp);

// Natural log of the pmf of Binom(k, p), entries 0..k.
std::vector<double> BinomialLogPmf(std::int64_t k, double p);

// min over t in grid of E[exp(-t (X - Y))], the Laplace-transform bound on
// P(X - Y <= 0). Grid points with a non-positive log argument are skipped.
double ChernoffGridMin(const BoundParams& bp, std::span<const double> grid);

// {step * k : k = first..last}.
std::vector<double> UniformGrid(double step, int first, int last);

}  // namespace blocksketch

#endif  // BLOCKSKETCH_ANALYTICS_H_
