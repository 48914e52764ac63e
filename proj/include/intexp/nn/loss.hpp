#pragma once

#include <cmath>
#include <vector>

#include "intexp/nn/tensor.hpp"

namespace intexp::nn {

template <typename T>
struct LossResult {
  double value = 0.0;
  Tensor<T> grad;  // d value / d input
};

// Numerically stable log(1 + exp(x)).
inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

inline double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// Weighted binary cross-entropy on logits:
//   sum_i w_i * (softplus(x_i) - t_i * x_i) / normalizer.
// Zero-weight entries contribute neither loss nor gradient.
template <typename T>
LossResult<T> bce_with_logits(const Tensor<T>& logits, const std::vector<T>& targets, const std::vector<T>& weights,
                              double normalizer) {
  if (targets.size() != logits.size() || weights.size() != logits.size())
    throw DimensionError("bce_with_logits: targets/weights do not match logits " + shape_str(logits.shape));
  if (!(normalizer > 0)) throw UsageError("bce_with_logits: normalizer must be positive");
  LossResult<T> r{0.0, Tensor<T>(logits.shape)};
  for (size_t i = 0; i < logits.size(); ++i) {
    const double w = weights[i];
    if (w == 0) continue;
    const double x = logits[i], t = targets[i];
    r.value += w * (softplus(x) - t * x);
    r.grad[i] = static_cast<T>(w * (sigmoid(x) - t) / normalizer);
  }
  r.value /= normalizer;
  return r;
}

// Row-wise log-softmax of an [N, K] tensor.
template <typename T>
Tensor<T> log_softmax(const Tensor<T>& logits) {
  const int n = logits.dim(0), k = logits.dim(1);
  Tensor<T> out(logits.shape);
  for (int i = 0; i < n; ++i) {
    const T* x = logits.ptr() + static_cast<size_t>(i) * k;
    double mx = x[0];
    for (int j = 1; j < k; ++j) mx = std::max<double>(mx, x[j]);
    double s = 0;
    for (int j = 0; j < k; ++j) s += std::exp(x[j] - mx);
    const double lse = mx + std::log(s);
    for (int j = 0; j < k; ++j) out[static_cast<size_t>(i) * k + j] = static_cast<T>(x[j] - lse);
  }
  return out;
}

// Mean softmax cross-entropy against integer labels.
template <typename T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels) {
  const int n = logits.dim(0), k = logits.dim(1);
  if (static_cast<int>(labels.size()) != n) throw DimensionError("softmax_cross_entropy: label count mismatch");
  const Tensor<T> lp = log_softmax(logits);
  LossResult<T> r{0.0, Tensor<T>(logits.shape)};
  for (int i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw DataError("softmax_cross_entropy: label out of range");
    r.value -= lp[static_cast<size_t>(i) * k + labels[i]];
    for (int j = 0; j < k; ++j) {
      const size_t idx = static_cast<size_t>(i) * k + j;
      r.grad[idx] = static_cast<T>((std::exp(static_cast<double>(lp[idx])) - (j == labels[i] ? 1.0 : 0.0)) / n);
    }
  }
  r.value /= n;
  return r;
}

// Mean squared error: sum (a - b)^2 / count.
template <typename T>
LossResult<T> mse(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape != target.shape)
    throw DimensionError("mse: " + shape_str(pred.shape) + " vs " + shape_str(target.shape));
  LossResult<T> r{0.0, Tensor<T>(pred.shape)};
  const double n = static_cast<double>(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - target[i];
    r.value += d * d;
    r.grad[i] = static_cast<T>(2.0 * d / n);
  }
  r.value /= n;
  return r;
}

}  // namespace intexp::nn
