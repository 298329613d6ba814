#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hsc/spectral.hpp"
#include "hsc/weighted.hpp"

namespace hsc {

/// Pointwise-evaluable multiplier function b with an estimated BMO seminorm
/// (filled by bmo_norm_estimate; a lower bound of the true seminorm).
struct BmoSymbol {
  std::function<double(std::span<const double>)> evaluator;
  double bmo_estimate = 0.0;
  std::string descriptor;

  double operator()(std::span<const double> x) const { return evaluator(x); }
};

/// Registry for the CLI: "const:<c>", "sin" (sin of the coordinate sum),
/// "log1p_abs", "sign_times_log" (sign(x1) log(1+|x|), unbounded BMO).
BmoSymbol make_bmo_symbol(const std::string& name);

GridField sample_symbol(const BmoSymbol& b, std::shared_ptr<const QuadratureGrid> grid);

/// Collects non-fatal diagnostics (aliasing of products past the band).
struct WarningSink {
  std::vector<std::string> messages;
  void warn(std::string msg) { messages.push_back(std::move(msg)); }
};

struct CommutatorOptions {
  /// Relative quadrature energy of b*f not representable in the band above
  /// which a warning is emitted (never a failure).
  double aliasing_tol = 1e-6;
  WarningSink* warnings = nullptr;
  bool parallel = false;
};

using CoefficientOperator = std::function<SpectralCoeffs(const SpectralCoeffs&)>;

/// [b, T] f = b (T f) - T(b f) on the nodes. T acts in coefficient form;
/// b f is sampled then projected at the working band, with the loss reported
/// through the warning sink when it exceeds the tolerance.
GridField commutator_apply(const BmoSymbol& b, const CoefficientOperator& T,
                           const GridField& f, const Transform& tr,
                           const CommutatorOptions& opts = {});

/// Pointwise max over R in r_grid of |[b, S_R^lambda(H)] f|.
GridField maximal_commutator(const BmoSymbol& b, double lambda, const GridField& f,
                             std::span<const double> r_grid, const Transform& tr,
                             const CommutatorOptions& opts = {});

/// Geometric grid with `points_per_octave` points covering [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, int points_per_octave);

/// Annular bump, dt/t grid and per-point log-measure weights for the square
/// function at width delta.
struct SquareFunctionSpec {
  double delta = 0.0;
  SpectralSymbol phi;  // support {1/8 <= |u| <= 1/2}, sup <= 1
  std::vector<double> t_grid;
  std::vector<double> t_weights;
};

/// Builds the spec with a t-grid derived from the band, delta and the
/// support of phi: the grid covers every t where the scaled symbol meets an
/// eigenvalue, with `points_per_window` points across each response window.
SquareFunctionSpec make_square_function_spec(double delta, const Band& band,
                                             int points_per_window = 24);

/// G_{b,delta} f: (sum_t w_t |[b, phi(delta^{-1}(1 - H/t^2))] f|^2)^{1/2}
/// pointwise on the nodes.
GridField square_function(const BmoSymbol& b, const SquareFunctionSpec& spec,
                          const GridField& f, const Transform& tr,
                          const CommutatorOptions& opts = {});

/// Commutator of the Hardy-Littlewood maximal operator:
/// sup over r of r^{-n} int_{|x-y|<r} |(b(x)-b(y)) f(y)| dy by quadrature.
GridField hl_maximal_commutator(const BmoSymbol& b, const GridField& f,
                                std::span<const double> radii);

/// Max mean oscillation |Q|^{-1} int_Q |b - b_Q| over all dyadic subcubes of
/// [-L, L]^n down to `levels` refinements; a lower bound of the seminorm.
double bmo_norm_estimate(const BmoSymbol& b, int dimension, double half_width, int levels,
                         int samples_per_cell = 4);

}  // namespace hsc
