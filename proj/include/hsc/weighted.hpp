#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "hsc/spectral.hpp"
#include "hsc/stats.hpp"

namespace hsc {

/// Power weight w(x) = (1+|x|)^{-alpha}. The admissible alpha range depends
/// on the use site (0 <= alpha < n in the A2 regime, alpha > 1 for the
/// eigenspace trace norms); each operation checks its own constraint.
struct WeightSpec {
  double alpha = 0.0;

  double operator()(double radius) const { return std::pow(1.0 + radius, -alpha); }
};

/// (sum_i w~_i |f_i|^2 (1+|x_i|)^{-alpha})^{1/2}; the quadrature stand-in for
/// the weighted L^2 norm. The integrand's |x| kink limits the rule to O(1/m)
/// absolute accuracy, which cancels in the ratio functionals built on it.
double weighted_l2_norm(const GridField& f, const WeightSpec& w);

/// Accurate 1-d pair integrals 2*int_0^inf h_j h_k (1+x)^{-alpha} dx via
/// composite panels sized to the oscillation (j, k of equal parity; odd
/// parity pairs integrate to zero by symmetry).
double weighted_pair_integral_1d(int j, int k, double alpha);

/// Dense operator on the enumerated band (graded order) with optional
/// weighted inner products on source and target coefficient spaces
/// (empty Gram = Euclidean).
struct BandOperatorMatrix {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd source_gram;  // empty => identity
  Eigen::MatrixXd target_gram;  // empty => identity
};

/// Largest singular value of the operator between the declared weighted
/// inner-product spaces, via a symmetric (generalized) eigen-solve of the
/// weighted normal matrix.
double band_operator_norm(const BandOperatorMatrix& M);

/// Exact norm of the spectral slice [k, k+1) from L^2 into the weighted
/// space: square root of the largest eigenvalue of the weighted Gram of the
/// eigenspace basis. Requires alpha > 1; returns 0 when the slice is empty.
/// 1-d Grams use the dedicated pair integrals; higher dimensions use a
/// doubled tensor quadrature.
double trace_projection_norm(int k, const WeightSpec& w, const Band& band);

struct PlancherelConfig {
  int trial_count = 64;
  std::uint64_t seed = 1;
  double epsilon = 0.5;  // only used on the 0 < alpha <= 1 branch
};

/// Discretized cell-sup norm ((1/N) sum_i sup_{[(i-1)/N, i/N)} |F(scale .)|^p)^{1/p}
/// over i = -N+1..N.
double discretized_sup_norm(const SpectralSymbol& F, double scale, int cells, double p);

/// Max over random unit-L^2 band-limited trials of the weighted energy of
/// F(sqrt(H)) f divided by the corresponding Plancherel-type bound. F must be
/// supported in [N/4, N] (as a function of sqrt(eigenvalue)).
double weighted_plancherel_ratio(const SpectralSymbol& F, int N, const WeightSpec& w,
                                 const Transform& tr, const PlancherelConfig& cfg = {});

/// ||(1+|x|)^{alpha/2} f||_2 (quadrature) over (sum (1+E)^{alpha/2}|c|^2)^{1/2}
/// (spectral). Throws std::domain_error for f = 0.
double sobolev_weight_ratio(const SpectralCoeffs& c, double alpha, const Transform& tr);

}  // namespace hsc
