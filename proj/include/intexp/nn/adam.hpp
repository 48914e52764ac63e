#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "intexp/nn/layers.hpp"

namespace intexp::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Step schedule: base rate until `decay_epoch`, then the decayed rate.
inline double step_decay_lr(int epoch, double base = 1e-4, double decayed = 1e-5, int decay_epoch = 18) {
  return epoch >= decay_epoch ? decayed : base;
}

template <typename T>
double grad_norm(const std::vector<Param<T>*>& ps) {
  double s = 0;
  for (const auto* p : ps)
    for (const T g : p->grad.data) s += static_cast<double>(g) * g;
  return std::sqrt(s);
}

// Scales gradients so their global L2 norm is at most `max_norm`. Returns the
// norm before clipping.
template <typename T>
double clip_grad_norm(const std::vector<Param<T>*>& ps, double max_norm) {
  const double norm = grad_norm(ps);
  if (norm > max_norm && norm > 0) {
    const T scale = static_cast<T>(max_norm / (norm + 1e-6));
    for (auto* p : ps)
      for (T& g : p->grad.data) g *= scale;
  }
  return norm;
}

template <typename T>
void check_finite_grads(const std::vector<Param<T>*>& ps) {
  for (const auto* p : ps)
    if (!p->grad.all_finite()) throw TrainingError("non-finite gradient in " + p->name);
}

template <typename T>
class Adam {
 public:
  Adam(std::vector<Param<T>*> params, AdamConfig cfg = {}) : params_(std::move(params)), cfg_(cfg) {}

  void set_lr(double lr) { cfg_.lr = lr; }
  double lr() const { return cfg_.lr; }
  long steps() const { return t_; }
  const std::vector<Param<T>*>& params() const { return params_; }

  void zero_grad() { zero_grads(params_); }

  void step() {
    check_finite_grads(params_);
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    const double b1 = cfg_.beta1, b2 = cfg_.beta2;
    for (auto* p : params_) {
      if (!p->trainable) continue;
      for (size_t i = 0; i < p->value.size(); ++i) {
        const double g = p->grad[i];
        const double m = b1 * p->m[i] + (1 - b1) * g;
        const double v = b2 * p->v[i] + (1 - b2) * g * g;
        p->m[i] = static_cast<T>(m);
        p->v[i] = static_cast<T>(v);
        p->value[i] -= static_cast<T>(cfg_.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg_.eps));
      }
    }
  }

 private:
  std::vector<Param<T>*> params_;
  AdamConfig cfg_;
  long t_ = 0;
};

}  // namespace intexp::nn
