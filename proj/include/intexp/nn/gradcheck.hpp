#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "intexp/nn/tensor.hpp"

namespace intexp::nn {

struct GradcheckResult {
  double max_rel_error = 0.0;
  size_t checked = 0;
  size_t worst_index = 0;
};

// Compares `analytic` with central differences of `f` w.r.t. every element of
// `x` (which f must read). Entries where both gradients are below `floor` are
// counted as agreeing.
inline GradcheckResult gradcheck(const std::function<double()>& f, Tensor<double>& x, const Tensor<double>& analytic,
                                 double eps = 1e-4, double floor = 1e-8) {
  if (analytic.shape != x.shape) throw DimensionError("gradcheck: gradient shape mismatch");
  GradcheckResult r;
  for (size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + eps;
    const double fp = f();
    x[i] = orig - eps;
    const double fm = f();
    x[i] = orig;
    const double num = (fp - fm) / (2 * eps);
    const double a = analytic[i];
    const double scale = std::max(std::abs(a), std::abs(num));
    const double rel = scale < floor ? 0.0 : std::abs(a - num) / scale;
    ++r.checked;
    if (rel > r.max_rel_error) {
      r.max_rel_error = rel;
      r.worst_index = i;
    }
  }
  return r;
}

}  // namespace intexp::nn
