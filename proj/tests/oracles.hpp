#pragma once

// Test-side oracles, independent of the library's quadrature and transform
// paths: an adaptive Gauss-Kronrod integrator and small closed forms.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.0,
    0.2077849550078984676006894,
    0.4058451513773971669066064,
    0.5860872354676911302941448,
    0.7415311855993944398638648,
    0.8648644233597690727897128,
    0.9491079123427585245261897,
    0.9914553711208126392068547,
};
inline constexpr double kKronrodWeights[8] = {
    0.2094821410847278280129992,
    0.2044329400752988924141620,
    0.1903505780647854099132564,
    0.1690047266392679028265834,
    0.1406532597155259187451896,
    0.1047900103222501838398763,
    0.0630920926299785532907007,
    0.0229353220105292249637320,
};
inline constexpr double kGaussWeights[4] = {
    0.4179591836734693877551020,
    0.3818300505051189449503698,
    0.2797053914892766679014678,
    0.1294849661688696932706114,
};

struct PanelResult {
  double value;
  double error;
};

inline PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double kron = kKronrodWeights[0] * f0;
  double gauss = kGaussWeights[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double s = f(mid - dx) + f(mid + dx);
    kron += kKronrodWeights[i] * s;
    if (i % 2 == 0) gauss += kGaussWeights[i / 2] * s;
  }
  kron *= half;
  gauss *= half;
  return {kron, std::abs(kron - gauss)};
}

inline double adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                       int depth) {
  const PanelResult r = gk15(f, a, b);
  if (r.error <= tol || depth >= 48) return r.value;
  const double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * tol, depth + 1) +
         adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  if (!(b >= a)) throw std::invalid_argument("integrate: bad interval");
  // split at zero (many integrands here have an |x| kink there)
  if (a < 0.0 && b > 0.0) {
    return detail::adaptive(f, a, 0.0, 0.5 * tol, 0) + detail::adaptive(f, 0.0, b, 0.5 * tol, 0);
  }
  return detail::adaptive(f, a, b, tol, 0);
}

/// Reference Hermite function through the classical polynomial recurrence
/// (unnormalized H_k, explicit normalization); trustworthy for small k only.
inline double hermite_reference(int k, double x) {
  double hk = 1.0, hkm1 = 0.0;
  for (int j = 0; j < k; ++j) {
    const double next = 2.0 * x * hk - 2.0 * j * hkm1;
    hkm1 = hk;
    hk = next;
  }
  double log_norm = 0.0;  // log(2^k k! sqrt(pi)) / 2
  for (int j = 1; j <= k; ++j) log_norm += std::log(2.0) + std::log(static_cast<double>(j));
  log_norm = 0.5 * (log_norm + 0.5 * std::log(3.14159265358979323846));
  return hk * std::exp(-0.5 * x * x - log_norm);
}

/// Count of multi-indices with n parts and total degree <= max_deg
/// (stars and bars, summed).
inline long multiindex_count(int n, int max_deg) {
  long total = 0;
  for (int deg = 0; deg <= max_deg; ++deg) {
    // C(deg + n - 1, n - 1)
    long c = 1;
    for (int i = 1; i <= n - 1; ++i) c = c * (deg + i) / i;
    total += c;
  }
  return total;
}

}  // namespace oracles
