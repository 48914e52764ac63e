#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace intexp {

// Error hierarchy. Every failure surfaced to callers derives from Error so the
// CLI can map it to a non-zero exit code with a readable message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define INTEXP_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

INTEXP_DEFINE_ERROR(SchemaError);
INTEXP_DEFINE_ERROR(PlacementError);
INTEXP_DEFINE_ERROR(ConfigError);
INTEXP_DEFINE_ERROR(UsageError);
INTEXP_DEFINE_ERROR(DimensionError);
INTEXP_DEFINE_ERROR(TrainingError);
INTEXP_DEFINE_ERROR(InferenceError);
INTEXP_DEFINE_ERROR(DataError);
INTEXP_DEFINE_ERROR(EvaluationError);
INTEXP_DEFINE_ERROR(FileError);
INTEXP_DEFINE_ERROR(IndexError);

#undef INTEXP_DEFINE_ERROR

// Deterministic random source. The engine is std::mt19937_64 (fully specified
// by the standard); the conversions below are written out by hand because the
// std:: distributions are implementation-defined and would break cross-platform
// reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  void seed(std::uint64_t s) { engine_.seed(s); }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw UsageError("Rng::below called with n = 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  int below(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; one value per call.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Gaussian truncated to [mean - k*stddev, mean + k*stddev] by rejection.
  double truncated_normal(double mean, double stddev, double k) {
    if (stddev == 0.0 || k <= 0.0) return mean;
    for (;;) {
      const double x = normal();
      if (std::abs(x) <= k) return mean + stddev * x;
    }
  }

  std::string state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void set_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    if (!is) throw DataError("corrupt RNG state");
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer: derives independent seeds from (seed, stream) pairs.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace intexp
