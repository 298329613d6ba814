#pragma once

#include <utility>
#include <vector>

#include "hsc/spectral.hpp"
#include "hsc/stats.hpp"

namespace hsc {

/// C-infinity monotone step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x);

/// Even bump supported exactly on {1/8 <= |u| <= 1/2} with sup = 1 attained
/// at |u| = 5/16: exp(1 - 1/(1 - rho^2)) for rho = (|u| - 5/16)/(3/16).
SpectralSymbol build_bump_phi();
double bump_phi(double u);

/// Littlewood-Paley family: even eta supported in {1/2 <= |u| <= 2} with
/// sum_j eta(2^-j u) = 1 for u > 0, plus the lumped tail at the starting
/// index j0 = floor(-log2 delta) - 1.
struct DyadicPartition {
  double delta = 0.0;
  int j0 = 0;

  static DyadicPartition make(double delta);

  /// Base bump eta(u).
  static double eta(double u);
  /// eta_j(u): eta(2^-j u) for j > j0, the lumped 1 - sum_{j>j0} at j = j0.
  double piece(int j, double u) const;
};

/// Uniform samples of one frequency-localized piece on s_i = i*step.
struct SampledSymbol {
  double delta = 0.0;
  int j = 0;
  double step = 0.0;
  std::vector<double> values;

  double s_max() const { return step * static_cast<double>(values.size() - 1); }
  /// Exact on-grid lookup; throws when s is not a grid point.
  double value_at(double s) const;
};

/// Frequency-localized piece of phi_delta(s) = bump((1 - s^2)/delta):
/// windowed inverse Fourier synthesis of the discrete transform of
/// phi_delta on a periodic window, with the eta_j window in the frequency
/// variable. The sample step must resolve the oscillation scale 2^-j
/// (step <= 2^-j/8) and divide the synthesis window as a power of two.
SampledSymbol build_phi_delta_j(double delta, int j, double s_limit, double step);

/// Recommended power-of-two step for a piece at index j.
double phi_piece_step(int j);

/// Log-log regression of |piece(s)| against (1 + 2^j |s-1|) over the
/// off-annulus range |s-1| >= 4*delta (values below the synthesis noise
/// floor are excluded). Throws when fewer than min_points samples qualify.
LineFit decay_check(const SampledSymbol& piece, int min_points = 64,
                    double window_hi = 0.5, double value_floor = 1e-13);

struct SubordinationResult {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Two routes to the Riesz factor (1 - m^2/R^2)_+^lambda: the closed form
/// and the lower-order average C R^{-2 lambda} int_0^R (R^2-t^2)^{lambda-rho-1}
/// t^{2 rho+1} (1 - m^2/t^2)_+^rho dt with C = 2/B(lambda-rho, rho+1),
/// evaluated by double-exponential quadrature.
SubordinationResult subordination_check(double lambda, double rho, double m, double R);

/// Sup over the grid of |x^rho - sum_k 2^{-k rho} phi_*(2^k x)| for the
/// induced compactly supported bump phi_*(x) = x^rho theta(x), where theta
/// is a dyadic partition piece subordinate to [1/8, 1/2].
double riesz_dyadic_check(double rho, std::span<const double> x_grid);

/// The theta piece and its step used by riesz_dyadic_check (exposed for tests).
double dyadic_theta(double x);

/// Export samples as two-column CSV (s,value).
void export_sampled_symbol_csv(const SampledSymbol& piece, std::ostream& os);

}  // namespace hsc
