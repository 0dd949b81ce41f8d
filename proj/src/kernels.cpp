#include "behave/kernels.hpp"

#include <cmath>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace behave::kernels {

namespace {

inline void adamw_update(double& theta, double g, double& m, double& v, const AdamWParams& p,
                         double bc1, double bc2, bool decay) {
  if (decay) theta -= p.learning_rate * p.weight_decay * theta;
  m = p.beta1 * m + (1.0 - p.beta1) * g;
  v = p.beta2 * v + (1.0 - p.beta2) * g * g;
  const double m_hat = m / bc1;
  const double v_hat = v / bc2;
  theta -= p.learning_rate * m_hat / (std::sqrt(v_hat) + p.epsilon);
}

}  // namespace

void adamw_step_serial(std::span<double> params, std::span<const double> grad,
                       std::span<double> m, std::span<double> v, const AdamWParams& p,
                       std::int64_t t, std::size_t decayed) {
  const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    adamw_update(params[i], grad[i], m[i], v[i], p, bc1, bc2, i < decayed);
  }
}

void adamw_step_parallel(std::span<double> params, std::span<const double> grad,
                         std::span<double> m, std::span<double> v, const AdamWParams& p,
                         std::int64_t t, std::size_t decayed) {
  const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(t));
  const auto n = static_cast<std::ptrdiff_t>(params.size());
#pragma omp parallel for schedule(static) if (n > 8192)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    adamw_update(params[u], grad[u], m[u], v[u], p, bc1, bc2, u < decayed);
  }
}

double predict_one(std::span<const double> params, std::uint32_t dim, const SparseVector& x) {
  double z0 = params[2 * static_cast<std::size_t>(dim)];
  double z1 = params[2 * static_cast<std::size_t>(dim) + 1];
  for (std::size_t k = 0; k < x.index.size(); ++k) {
    const double xv = x.value[k];
    z0 += params[x.index[k]] * xv;
    z1 += params[dim + x.index[k]] * xv;
  }
  // softmax over two logits = logistic of the difference
  const double d = z1 - z0;
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

void predict_serial(std::span<const double> params, std::uint32_t dim,
                    std::span<const SparseVector> xs, std::span<double> out) {
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = predict_one(params, dim, xs[i]);
}

void predict_parallel(std::span<const double> params, std::uint32_t dim,
                      std::span<const SparseVector> xs, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = predict_one(params, dim, xs[static_cast<std::size_t>(i)]);
  }
}

std::vector<SparseVector> featurize_serial(std::span<const std::string> texts,
                                           const FeatureConfig& config) {
  std::vector<SparseVector> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) out[i] = featurize(texts[i], config);
  return out;
}

std::vector<SparseVector> featurize_parallel(std::span<const std::string> texts,
                                             const FeatureConfig& config) {
  std::vector<SparseVector> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 64) if (n > 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = featurize(texts[static_cast<std::size_t>(i)], config);
  }
  return out;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace behave::kernels
