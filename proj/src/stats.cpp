#include "behave/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "behave/rng.hpp"

namespace behave {

using nlohmann::json;

json SignificanceResult::to_json() const {
  json j;
  switch (method) {
    case TestMethod::ExactBinomialPaired: j["method"] = "exact-binomial-paired"; break;
    case TestMethod::ExactBinomialOneSample: j["method"] = "exact-binomial-one-sample"; break;
    case TestMethod::ApproximateRandomization: j["method"] = "approximate-randomization"; break;
  }
  j["p_value"] = p_value;
  j["sample_size"] = sample_size;
  if (method == TestMethod::ApproximateRandomization) {
    j["observed_difference"] = observed;
  } else {
    j["b"] = b;
    j["c"] = c;
  }
  if (iterations) j["iterations"] = *iterations;
  if (seed) j["seed"] = *seed;
  return j;
}

namespace {

// Probability mass of Binomial(n, p) at k, in log space.
double log_pmf(std::int64_t k, std::int64_t n, double p) {
  if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
  const auto dk = static_cast<double>(k);
  const auto dn = static_cast<double>(n);
  return std::lgamma(dn + 1) - std::lgamma(dk + 1) - std::lgamma(dn - dk + 1) + dk * std::log(p) +
         (dn - dk) * std::log1p(-p);
}

// Exact binomial coefficients for n <= 62 (row of Pascal's triangle).
std::vector<std::uint64_t> pascal_row(std::int64_t n) {
  std::vector<std::uint64_t> row(static_cast<std::size_t>(n) + 1, 0);
  row[0] = 1;
  for (std::int64_t i = 1; i <= n; ++i) {
    for (std::int64_t j = i; j > 0; --j) row[j] += row[j - 1];
  }
  return row;
}

std::vector<double> pmf_row(std::int64_t n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  if (p == 0.5 && n <= 62) {
    const auto row = pascal_row(n);
    for (std::int64_t i = 0; i <= n; ++i) {
      pmf[i] = std::ldexp(static_cast<double>(row[i]), -static_cast<int>(n));
    }
    return pmf;
  }
  for (std::int64_t i = 0; i <= n; ++i) pmf[i] = std::exp(log_pmf(i, n, p));
  return pmf;
}

}  // namespace

std::pair<double, double> binomial_tails(std::int64_t k, std::int64_t n, double p) {
  if (n < 0 || k < 0 || k > n) throw Error("binomial: need 0 <= k <= n");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("binomial: rate must lie in [0, 1]");
  if (p == 0.5 && n <= 62) {
    // Integer tail counts scaled by 2^-n.
    const auto row = pascal_row(n);
    std::uint64_t lo = 0, hi = 0;
    for (std::int64_t i = 0; i <= k; ++i) lo += row[i];
    for (std::int64_t i = k; i <= n; ++i) hi += row[i];
    return {std::ldexp(static_cast<double>(lo), -static_cast<int>(n)),
            std::ldexp(static_cast<double>(hi), -static_cast<int>(n))};
  }
  const auto pmf = pmf_row(n, p);
  long double lo = 0, hi = 0;
  for (std::int64_t i = 0; i <= k; ++i) lo += pmf[i];
  for (std::int64_t i = n; i >= k; --i) hi += pmf[i];
  return {std::min(1.0, static_cast<double>(lo)), std::min(1.0, static_cast<double>(hi))};
}

double binomial_two_sided(std::int64_t k, std::int64_t n, double p, TwoSidedRule rule) {
  if (n == 0) return 1.0;
  if (rule == TwoSidedRule::DoubleTail) {
    const auto [lo, hi] = binomial_tails(k, n, p);
    return std::min(1.0, 2.0 * std::min(lo, hi));
  }
  if (k < 0 || k > n) throw Error("binomial: need 0 <= k <= n");
  const auto pmf = pmf_row(n, p);
  // Relative slack so outcomes with equal mass are not split by rounding.
  const double cut = pmf[k] * (1.0 + 1e-7);
  long double total = 0;
  for (double v : pmf) {
    if (v <= cut) total += v;
  }
  return std::min(1.0, static_cast<double>(total));
}

namespace {

void check_aligned(std::span<const Label> a, std::span<const Label> b, std::span<const Label> gold) {
  if (a.size() != gold.size() || b.size() != gold.size()) {
    throw Error("significance test: prediction vectors must cover the gold set");
  }
}

// Aligns both prediction sets to gold order; throws naming missing ids.
void align_pair(const PredictionSet& a, const PredictionSet& b, const GoldLabels& gold,
                std::vector<Label>& la, std::vector<Label>& lb, std::vector<Label>& lg) {
  const auto ra = align_covering(a, gold);
  const auto rb = align_covering(b, gold);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    la.push_back(ra[i].predicted);
    lb.push_back(rb[i].predicted);
    lg.push_back(gold[i].second);
  }
}

}  // namespace

SignificanceResult binomial_paired_test(std::span<const Label> a, std::span<const Label> b,
                                        std::span<const Label> gold, TwoSidedRule rule) {
  check_aligned(a, b, gold);
  SignificanceResult r;
  r.method = TestMethod::ExactBinomialPaired;
  r.sample_size = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool ca = a[i] == gold[i];
    const bool cb = b[i] == gold[i];
    if (ca && !cb) ++r.b;
    if (cb && !ca) ++r.c;
  }
  r.p_value = binomial_two_sided(r.b, r.b + r.c, 0.5, rule);
  return r;
}

SignificanceResult binomial_paired_test(const PredictionSet& a, const PredictionSet& b,
                                        const GoldLabels& gold, TwoSidedRule rule) {
  std::vector<Label> la, lb, lg;
  align_pair(a, b, gold, la, lb, lg);
  return binomial_paired_test(la, lb, lg, rule);
}

SignificanceResult binomial_one_sample_test(std::int64_t successes, std::int64_t trials,
                                            double rate, TwoSidedRule rule) {
  SignificanceResult r;
  r.method = TestMethod::ExactBinomialOneSample;
  r.b = successes;
  r.c = trials;
  r.sample_size = static_cast<std::size_t>(trials);
  r.p_value = binomial_two_sided(successes, trials, rate, rule);
  return r;
}

// ---------------------------------------------------------------------------
// Approximate randomization

namespace {

struct PairCounts {
  // Confusion counts of the two systems (hateful positive).
  std::int64_t a[4] = {0, 0, 0, 0};  // tp fp fn tn
  std::int64_t b[4] = {0, 0, 0, 0};
};

int cell(Label pred, Label gold) {
  const bool p = pred == Label::Hateful;
  const bool g = gold == Label::Hateful;
  return p && g ? 0 : p ? 1 : g ? 2 : 3;
}

double f1(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  const std::int64_t den = 2 * tp + fp + fn;
  return den == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
}

double macro_from(const std::int64_t c[4]) {
  return (f1(c[0], c[1], c[2]) + f1(c[3], c[2], c[1])) / 2.0;
}

struct Discordant {
  int cell_a;  // confusion cell of A's prediction
  int cell_b;
};

struct Prepared {
  PairCounts base;
  std::vector<Discordant> swaps;  // positions where a swap changes the counts
  double observed = 0.0;
};

Prepared prepare(std::span<const Label> a, std::span<const Label> b, std::span<const Label> gold) {
  Prepared p;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int ca = cell(a[i], gold[i]);
    const int cb = cell(b[i], gold[i]);
    ++p.base.a[ca];
    ++p.base.b[cb];
    if (ca != cb) p.swaps.push_back({ca, cb});
  }
  p.observed = std::abs(macro_from(p.base.a) - macro_from(p.base.b));
  return p;
}

// Tolerance for float noise when comparing permuted statistics with the observed one.
constexpr double kTieSlack = 1e-12;

std::int64_t run_chunk(const Prepared& prep, std::uint64_t seed, std::int64_t chunk,
                       std::int64_t count) {
  Rng rng(derive_seed(seed, "randomization", std::to_string(chunk)));
  std::int64_t exceed = 0;
  for (std::int64_t it = 0; it < count; ++it) {
    std::int64_t ca[4], cb[4];
    std::copy(prep.base.a, prep.base.a + 4, ca);
    std::copy(prep.base.b, prep.base.b + 4, cb);
    for (const auto& s : prep.swaps) {
      if (rng.coin()) {
        --ca[s.cell_a];
        ++ca[s.cell_b];
        --cb[s.cell_b];
        ++cb[s.cell_a];
      }
    }
    const double d = std::abs(macro_from(ca) - macro_from(cb));
    if (d >= prep.observed - kTieSlack) ++exceed;
  }
  return exceed;
}

std::int64_t chunk_size(std::int64_t iterations, std::int64_t chunk) {
  return std::min(kRandomizationChunk, iterations - chunk * kRandomizationChunk);
}

}  // namespace

std::int64_t randomization_exceed_count_serial(std::span<const Label> a, std::span<const Label> b,
                                               std::span<const Label> gold,
                                               std::int64_t iterations, std::uint64_t seed) {
  check_aligned(a, b, gold);
  const Prepared prep = prepare(a, b, gold);
  const std::int64_t chunks = (iterations + kRandomizationChunk - 1) / kRandomizationChunk;
  std::int64_t total = 0;
  for (std::int64_t c = 0; c < chunks; ++c) {
    total += run_chunk(prep, seed, c, chunk_size(iterations, c));
  }
  return total;
}

std::int64_t randomization_exceed_count_parallel(std::span<const Label> a,
                                                 std::span<const Label> b,
                                                 std::span<const Label> gold,
                                                 std::int64_t iterations, std::uint64_t seed) {
  check_aligned(a, b, gold);
  const Prepared prep = prepare(a, b, gold);
  const std::int64_t chunks = (iterations + kRandomizationChunk - 1) / kRandomizationChunk;
  std::int64_t total = 0;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : total) if (chunks > 1)
  for (std::int64_t c = 0; c < chunks; ++c) {
    total += run_chunk(prep, seed, c, chunk_size(iterations, c));
  }
  return total;
}

SignificanceResult randomization_test_macro_f1(std::span<const Label> a, std::span<const Label> b,
                                               std::span<const Label> gold,
                                               std::int64_t iterations, std::uint64_t seed) {
  if (iterations < 1) throw ConfigError("randomization test: iterations must be >= 1");
  check_aligned(a, b, gold);
  if (gold.empty()) throw Error("empty evaluation set");
  SignificanceResult r;
  r.method = TestMethod::ApproximateRandomization;
  r.sample_size = gold.size();
  r.iterations = iterations;
  r.seed = seed;
  r.observed = prepare(a, b, gold).observed;
  const std::int64_t exceed = randomization_exceed_count_parallel(a, b, gold, iterations, seed);
  r.p_value = static_cast<double>(exceed + 1) / static_cast<double>(iterations + 1);
  return r;
}

SignificanceResult randomization_test_macro_f1(const PredictionSet& a, const PredictionSet& b,
                                               const GoldLabels& gold, std::int64_t iterations,
                                               std::uint64_t seed) {
  std::vector<Label> la, lb, lg;
  align_pair(a, b, gold, la, lb, lg);
  return randomization_test_macro_f1(la, lb, lg, iterations, seed);
}

bool decide(const SignificanceResult& result, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  return result.p_value <= alpha;
}

}  // namespace behave
