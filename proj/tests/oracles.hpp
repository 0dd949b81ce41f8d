#pragma once

// Brute-force reference computations shared by the unit tests and the
// acceptance runner. None of these reuse library code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "behave/common.hpp"
#include "behave/rng.hpp"
#include "behave/trainer.hpp"

namespace behave::oracle {

struct Counts {
  std::int64_t m[2][2] = {{0, 0}, {0, 0}};  // [gold][predicted]
};

inline Counts confusion(const std::vector<int>& pred, const std::vector<int>& gold) {
  Counts c;
  for (std::size_t i = 0; i < pred.size(); ++i) ++c.m[gold[i]][pred[i]];
  return c;
}

inline double f1_of(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  const std::int64_t den = 2 * tp + fp + fn;
  return den == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
}

struct Metrics {
  std::int64_t correct = 0;
  std::int64_t total = 0;
  double f1[2] = {0.0, 0.0};
  double macro = 0.0;
  double micro = 0.0;
};

inline Metrics metrics(const std::vector<int>& pred, const std::vector<int>& gold) {
  const Counts c = confusion(pred, gold);
  Metrics r;
  r.correct = c.m[0][0] + c.m[1][1];
  r.total = static_cast<std::int64_t>(pred.size());
  std::int64_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
  for (int k = 0; k < 2; ++k) {
    const std::int64_t tp = c.m[k][k];
    const std::int64_t fp = c.m[1 - k][k];
    const std::int64_t fn = c.m[k][1 - k];
    r.f1[k] = f1_of(tp, fp, fn);
    tp_sum += tp;
    fp_sum += fp;
    fn_sum += fn;
  }
  r.macro = (r.f1[0] + r.f1[1]) / 2.0;
  r.micro = f1_of(tp_sum, fp_sum, fn_sum);
  return r;
}

/// Two-sided p for b successes in b + c fair coin flips by enumerating every
/// sign assignment: min(1, 2 * smaller tail).
inline double binomial_enumerated(int b, int c) {
  const int n = b + c;
  if (n == 0) return 1.0;
  std::int64_t lower = 0, upper = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int k = __builtin_popcount(mask);
    if (k <= b) ++lower;
    if (k >= b) ++upper;
  }
  const double total = std::ldexp(1.0, n);
  const double p = 2.0 * static_cast<double>(std::min(lower, upper)) / total;
  return std::min(1.0, p);
}

/// Sum of probabilities of outcomes no more likely than the observed one.
inline double binomial_enumerated_min_likelihood(int b, int c) {
  const int n = b + c;
  if (n == 0) return 1.0;
  std::vector<std::int64_t> ways(static_cast<std::size_t>(n) + 1, 0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) ++ways[static_cast<std::size_t>(__builtin_popcount(mask))];
  std::int64_t s = 0;
  for (auto w : ways) {
    if (w <= ways[static_cast<std::size_t>(b)]) s += w;
  }
  return std::min(1.0, static_cast<double>(s) / std::ldexp(1.0, n));
}

/// Held-out union accuracy recomputed from raw (predicted, gold) pairs.
struct RawPlan {
  std::vector<std::pair<int, int>> heldout;  // (predicted, gold)
  std::vector<std::pair<int, int>> covered;
};

inline std::pair<std::int64_t, std::int64_t> union_accuracy(const std::vector<RawPlan>& plans) {
  std::int64_t correct = 0, total = 0;
  for (const auto& p : plans) {
    for (const auto& [pr, g] : p.heldout) {
      correct += pr == g;
      ++total;
    }
  }
  return {correct, total};
}

/// Relative error ||g_analytic - g_numeric|| / max(||g_analytic|| + ||g_numeric||, tiny)
/// using central differences on the weighted loss.
inline double gradient_relative_error(const TrainedModel& model, const std::vector<SparseVector>& x,
                                      const std::vector<Label>& y, const ClassWeights& w,
                                      double h = 1e-5) {
  const auto analytic = loss_and_gradient(model, x, y, w).gradient;
  TrainedModel probe = model;
  double diff2 = 0.0, norm_a = 0.0, norm_n = 0.0;
  for (std::size_t i = 0; i < probe.params.size(); ++i) {
    const double orig = probe.params[i];
    probe.params[i] = orig + h;
    const double up = loss_and_gradient(probe, x, y, w).loss;
    probe.params[i] = orig - h;
    const double down = loss_and_gradient(probe, x, y, w).loss;
    probe.params[i] = orig;
    const double numeric = (up - down) / (2.0 * h);
    diff2 += (analytic[i] - numeric) * (analytic[i] - numeric);
    norm_a += analytic[i] * analytic[i];
    norm_n += numeric * numeric;
  }
  return std::sqrt(diff2) / std::max(std::sqrt(norm_a) + std::sqrt(norm_n), 1e-12);
}

/// A random small model and dataset for gradient checks.
struct SmallProblem {
  TrainedModel model;
  std::vector<SparseVector> x;
  std::vector<Label> y;
  ClassWeights weights{};
};

inline SmallProblem small_problem(Rng& rng) {
  FeatureConfig fc;
  fc.dimension = 1u << (2 + rng.below(3));
  SmallProblem p;
  p.model = TrainedModel::zeros(fc);
  for (auto& v : p.model.params) v = rng.normal();
  const std::size_t n = 4 + rng.below(8);
  for (std::size_t i = 0; i < n; ++i) {
    SparseVector sv;
    for (std::uint32_t k = 0; k < fc.dimension; ++k) {
      if (rng.coin()) {
        sv.index.push_back(k);
        sv.value.push_back(static_cast<float>(rng.normal()));
      }
    }
    p.x.push_back(sv);
    p.y.push_back(i % 2 ? Label::Hateful : Label::NonHateful);
  }
  p.weights = {0.5 + rng.uniform(), 0.5 + rng.uniform()};
  return p;
}

}  // namespace behave::oracle
