#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "behave/common.hpp"
#include "behave/evaluator.hpp"
#include "behave/trainer.hpp"

namespace behave {

enum class TestMethod : std::uint8_t { ExactBinomialPaired, ExactBinomialOneSample, ApproximateRandomization };

/// How a two-sided exact binomial p-value is formed.
enum class TwoSidedRule : std::uint8_t {
  /// min(1, 2 * smaller tail)
  DoubleTail,
  /// Sum of outcome probabilities not exceeding that of the observed outcome.
  MinLikelihood,
};

struct SignificanceResult {
  TestMethod method = TestMethod::ExactBinomialPaired;
  double p_value = 1.0;
  /// Binomial: A-only correct (b) and B-only correct (c); one-sample: successes/trials.
  std::int64_t b = 0;
  std::int64_t c = 0;
  /// Randomization: observed |metric(A) - metric(B)|.
  double observed = 0.0;
  std::optional<std::int64_t> iterations;
  std::optional<std::uint64_t> seed;
  std::size_t sample_size = 0;

  nlohmann::json to_json() const;
};

/// Lower tail P(X <= k) and upper tail P(X >= k) for X ~ Binomial(n, p).
std::pair<double, double> binomial_tails(std::int64_t k, std::int64_t n, double p);

/// Two-sided exact binomial p-value for k successes out of n at rate p.
double binomial_two_sided(std::int64_t k, std::int64_t n, double p,
                          TwoSidedRule rule = TwoSidedRule::DoubleTail);

/// Exact test on the discordant pairs: b = A correct and B wrong, c = the
/// reverse; p-value for b successes in b + c trials at rate 0.5 (1 when b + c = 0).
SignificanceResult binomial_paired_test(std::span<const Label> a, std::span<const Label> b,
                                        std::span<const Label> gold,
                                        TwoSidedRule rule = TwoSidedRule::DoubleTail);
SignificanceResult binomial_paired_test(const PredictionSet& a, const PredictionSet& b,
                                        const GoldLabels& gold,
                                        TwoSidedRule rule = TwoSidedRule::DoubleTail);

/// Exact test of `successes` out of `trials` against a fixed rate.
SignificanceResult binomial_one_sample_test(std::int64_t successes, std::int64_t trials,
                                            double rate,
                                            TwoSidedRule rule = TwoSidedRule::DoubleTail);

/// Iterations are drawn in chunks of this size; each chunk has its own
/// generator derived from the seed, so the parallel and serial versions agree.
inline constexpr std::int64_t kRandomizationChunk = 512;

/// Approximate randomization test on |macroF1(A) - macroF1(B)|: every iteration
/// swaps the A/B predictions of each example with probability 1/2;
/// p = (#{|d'| >= d} + 1) / (iterations + 1).
SignificanceResult randomization_test_macro_f1(std::span<const Label> a, std::span<const Label> b,
                                               std::span<const Label> gold,
                                               std::int64_t iterations, std::uint64_t seed);
SignificanceResult randomization_test_macro_f1(const PredictionSet& a, const PredictionSet& b,
                                               const GoldLabels& gold, std::int64_t iterations,
                                               std::uint64_t seed);

/// Serial reference of the randomization count (number of iterations with |d'| >= d).
std::int64_t randomization_exceed_count_serial(std::span<const Label> a, std::span<const Label> b,
                                               std::span<const Label> gold,
                                               std::int64_t iterations, std::uint64_t seed);
std::int64_t randomization_exceed_count_parallel(std::span<const Label> a,
                                                 std::span<const Label> b,
                                                 std::span<const Label> gold,
                                                 std::int64_t iterations, std::uint64_t seed);

/// True when p <= alpha; alpha must lie in (0, 1).
bool decide(const SignificanceResult& result, double alpha = 0.05);

}  // namespace behave
