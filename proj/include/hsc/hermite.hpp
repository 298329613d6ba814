#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hsc {

/// Tensorized Gauss-Hermite rule. The native rule integrates against
/// exp(-|x|^2); `lebesgue_weights` carry exp(+x^2) folded back in so that
/// sums against them approximate plain Lebesgue integrals. Lebesgue weights
/// are strictly positive at any size; the Gaussian-measure weights underflow
/// to zero at the extreme nodes of very large rules (|x| beyond ~27), which
/// is below double range and not recoverable in this representation.
struct QuadratureGrid {
  int dimension = 1;
  int points_per_axis = 0;
  std::vector<double> axis_nodes;             // ascending, symmetric
  std::vector<double> axis_gauss_weights;     // per 1-d node
  std::vector<double> axis_lebesgue_weights;  // per 1-d node, > 0

  std::vector<double> nodes;             // count*dimension, row-major
  std::vector<double> gauss_weights;     // count
  std::vector<double> lebesgue_weights;  // count

  std::size_t count() const { return lebesgue_weights.size(); }
  double node(std::size_t i, int axis) const { return nodes[i * dimension + axis]; }
  /// Euclidean norm of node i.
  double radius(std::size_t i) const;
  /// Per-axis index of node i along `axis` (row-major layout).
  int axis_index(std::size_t i, int axis) const;
};

inline constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 22;

/// m-point rule on the line, exact for polynomials of degree <= 2m-1
/// against exp(-x^2). Nodes from the Jacobi matrix, polished by Newton
/// steps on the recurrence; weights from the Christoffel function.
QuadratureGrid gauss_hermite_quadrature(int m);

/// Tensor product of the 1-d rule in `n` dimensions.
QuadratureGrid tensor_grid(int n, int m, std::size_t node_cap = kDefaultNodeCap);

/// Normalized Hermite function h_k(x) = (2^k k! sqrt(pi))^{-1/2} H_k(x) e^{-x^2/2}.
/// Overflow-free for k <= 2048 over the full oscillatory range; values below
/// double range round to zero.
double hermite_eval(int k, double x);

/// h_k(x) together with h_{k-1}(x) at a shared power-of-two scale
/// (value_k = mant_k * 2^exponent). Used for Newton polishing of nodes.
struct ScaledHermitePair {
  double mant_k = 0.0;
  double mant_km1 = 0.0;
  long exponent = 0;
};
ScaledHermitePair hermite_eval_scaled(int k, double x);

struct MultiIndex {
  std::vector<int> components;

  int dimension() const { return static_cast<int>(components.size()); }
  int degree() const;
  int eigenvalue() const { return 2 * degree() + dimension(); }
  bool operator==(const MultiIndex&) const = default;
};

/// All mu with 2|mu|+n <= lambda_max in graded order (by |mu|, then
/// lexicographic). Empty when lambda_max < n.
std::vector<MultiIndex> enumerate_band(int n, int lambda_max);

/// h_k(x_i) for 0 <= k <= max_degree over the given 1-d nodes.
struct HermiteTable {
  int max_degree = 0;
  Eigen::MatrixXd values;  // (max_degree+1) x node count
};
HermiteTable hermite_table(std::span<const double> nodes1d, int max_degree);

}  // namespace hsc
