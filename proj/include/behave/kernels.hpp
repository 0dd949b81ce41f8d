#pragma once

// Data-parallel inner loops. Every kernel has a serial reference (`*_serial`)
// and an OpenMP version (`*_parallel`); both produce bit-identical results
// because work items are independent and each one is reduced in a fixed order.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "behave/features.hpp"

namespace behave::kernels {

struct AdamWParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

/// One decoupled-weight-decay Adam update at step `t` (1-based). Weight decay
/// applies to the first `decayed` parameters only (weights, not biases).
void adamw_step_serial(std::span<double> params, std::span<const double> grad,
                       std::span<double> m, std::span<double> v, const AdamWParams& p,
                       std::int64_t t, std::size_t decayed);
void adamw_step_parallel(std::span<double> params, std::span<const double> grad,
                         std::span<double> m, std::span<double> v, const AdamWParams& p,
                         std::int64_t t, std::size_t decayed);

/// Probability of the hateful class for a two-class linear softmax model with
/// parameter layout [w_nonhateful (dim), w_hateful (dim), b_nonhateful, b_hateful].
double predict_one(std::span<const double> params, std::uint32_t dim, const SparseVector& x);
void predict_serial(std::span<const double> params, std::uint32_t dim,
                    std::span<const SparseVector> xs, std::span<double> out);
void predict_parallel(std::span<const double> params, std::uint32_t dim,
                      std::span<const SparseVector> xs, std::span<double> out);

std::vector<SparseVector> featurize_serial(std::span<const std::string> texts,
                                           const FeatureConfig& config);
std::vector<SparseVector> featurize_parallel(std::span<const std::string> texts,
                                             const FeatureConfig& config);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace behave::kernels
