#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hsc/hermite.hpp"

namespace hsc {

/// The index set {mu : 2|mu|+n <= lambda_max} in graded order, with its
/// eigenvalues (ascending by construction).
struct Band {
  int dimension = 1;
  int lambda_max = 0;
  std::vector<MultiIndex> indices;
  std::vector<double> eigenvalues;
  int max_degree = -1;  // max |mu|, -1 when empty

  static std::shared_ptr<const Band> make(int n, int lambda_max);
  std::size_t size() const { return indices.size(); }
};

struct GridField {
  std::shared_ptr<const QuadratureGrid> grid;
  Eigen::VectorXd values;
};

struct SpectralCoeffs {
  std::shared_ptr<const Band> band;
  Eigen::VectorXd values;

  /// Parseval check: sum |c|^2 vs quadrature norm of the synthesis.
  double coefficient_energy() const { return values.squaredNorm(); }
};

/// Real symbol applied at s = sqrt(eigenvalue). When a support interval is
/// declared the symbol evaluates to zero outside it.
struct SpectralSymbol {
  std::function<double(double)> evaluator;
  std::optional<std::pair<double, double>> support;
  std::optional<double> sup_bound;

  double operator()(double s) const {
    if (support && (s < support->first || s > support->second)) return 0.0;
    return evaluator(s);
  }
};

/// Analysis/synthesis between node samples and band coefficients.
/// Requires points_per_axis >= max_degree+1 so the discrete basis is
/// orthonormal; the recommended size for products is 2*lambda_max per axis.
class Transform {
 public:
  Transform(std::shared_ptr<const QuadratureGrid> grid, std::shared_ptr<const Band> band);

  SpectralCoeffs forward(const GridField& f) const;
  SpectralCoeffs forward(const Eigen::VectorXd& node_values) const;
  GridField inverse(const SpectralCoeffs& c) const;
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;

  /// out += sum over the given band positions of coeff * Phi_mu(node),
  /// evaluated for every node. Exact restriction of `synthesize` to a
  /// subset of indices.
  void accumulate_synthesis(std::span<const Eigen::Index> positions,
                            std::span<const double> scaled_coeffs,
                            Eigen::VectorXd& out) const;

  const Band& band() const { return *band_; }
  const QuadratureGrid& grid() const { return *grid_; }
  std::shared_ptr<const Band> band_ptr() const { return band_; }
  std::shared_ptr<const QuadratureGrid> grid_ptr() const { return grid_; }

  static int minimum_points_per_axis(int n, int lambda_max);

 private:
  std::shared_ptr<const QuadratureGrid> grid_;
  std::shared_ptr<const Band> band_;
  Eigen::MatrixXd synth_;  // (K+1) x m, h_k(x_i)
  Eigen::MatrixXd anal_;   // synth scaled by axis Lebesgue weights
  std::vector<std::size_t> tensor_pos_;  // band index -> position in (K+1)^n tensor

  void contract_axes(std::vector<double>& buf, const Eigen::MatrixXd& mat) const;
};

SpectralCoeffs forward_transform(const GridField& f, int lambda_max);
GridField inverse_transform(const SpectralCoeffs& c, std::shared_ptr<const QuadratureGrid> grid);

/// Keeps exactly the coefficients with eigenvalue k, zeroes the rest.
SpectralCoeffs project_eigenspace(const SpectralCoeffs& c, int k);

/// c'_mu = F(sqrt(2|mu|+n)) c_mu. Non-finite symbol values raise
/// std::domain_error naming the offending index.
SpectralCoeffs apply_multiplier(const SpectralCoeffs& c, const SpectralSymbol& F);

/// (x)_+^lambda with the convention x^lambda for x > 0 and 0 otherwise
/// (in particular 0^0 = 0 here, matching the spectrum-edge behaviour of
/// the Riesz factor).
double positive_power(double x, double lambda);

/// Bochner-Riesz factor (1 - eigenvalue/R^2)_+^lambda.
double riesz_factor(double eigenvalue, double R, double lambda);
SpectralSymbol riesz_symbol(double R, double lambda);

SpectralCoeffs bochner_riesz(const SpectralCoeffs& c, double R, double lambda);

/// CSV exchange, columns mu_1..mu_n,value with a mandatory header row.
void export_coeffs_csv(const SpectralCoeffs& c, std::ostream& os);
SpectralCoeffs import_coeffs_csv(std::istream& is);

}  // namespace hsc
