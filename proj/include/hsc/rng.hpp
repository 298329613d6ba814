#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace hsc {

/// Deterministic random source. mt19937_64 plus an explicit Box-Muller
/// transform, so streams are reproducible across standard libraries
/// (std::normal_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return (gen_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Standard-normal coefficient vector normalized to unit Euclidean length.
inline Eigen::VectorXd random_unit_coeffs(Rng& rng, Eigen::Index size) {
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = rng.normal();
  const double nrm = v.norm();
  if (nrm > 0.0) v /= nrm;
  return v;
}

}  // namespace hsc
