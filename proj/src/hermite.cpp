#include "hsc/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace hsc {

namespace {

constexpr double kQuarterRootPiInv = 0.7511255444649424828587030047762;  // pi^{-1/4}
constexpr double kInvLn2 = 1.4426950408889634073599246810019;

// Rescale threshold for the mantissa/exponent recurrence.
constexpr double kScaleHi = 0x1.0p500;
constexpr double kScaleLo = 0x1.0p-500;

double apply_exponent(double mant, long exponent) {
  if (mant == 0.0) return 0.0;
  // Mantissas stay within 2^+-500, so +-3000 already saturates the double
  // range; clamping keeps the cast to int safe for extreme tail arguments.
  if (exponent > 3000) exponent = 3000;
  if (exponent < -3000) return 0.0;
  return std::ldexp(mant, static_cast<int>(exponent));
}

}  // namespace

double QuadratureGrid::radius(std::size_t i) const {
  double s = 0.0;
  for (int d = 0; d < dimension; ++d) {
    const double x = node(i, d);
    s += x * x;
  }
  return std::sqrt(s);
}

int QuadratureGrid::axis_index(std::size_t i, int axis) const {
  std::size_t stride = 1;
  for (int d = dimension - 1; d > axis; --d) stride *= static_cast<std::size_t>(points_per_axis);
  return static_cast<int>((i / stride) % static_cast<std::size_t>(points_per_axis));
}

ScaledHermitePair hermite_eval_scaled(int k, double x) {
  ScaledHermitePair out;
  // Seed h_0 = pi^{-1/4} exp(-x^2/2) as mantissa * 2^exponent so the tail
  // never underflows before the recurrence has grown back into range.
  const double t = -0.5 * x * x * kInvLn2;
  double ip = std::floor(t);
  out.exponent = static_cast<long>(ip);
  double cur = kQuarterRootPiInv * std::exp2(t - ip);
  double prev = 0.0;
  for (int j = 0; j < k; ++j) {
    const double nxt =
        std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
    prev = cur;
    cur = nxt;
    const double a = std::abs(cur);
    if (a > kScaleHi) {
      cur *= kScaleLo;
      prev *= kScaleLo;
      out.exponent += 500;
    } else if (a < kScaleLo && a > 0.0 && std::abs(prev) < kScaleLo) {
      cur /= kScaleLo;
      prev /= kScaleLo;
      out.exponent -= 500;
    }
  }
  out.mant_k = cur;
  out.mant_km1 = prev;
  return out;
}

double hermite_eval(int k, double x) {
  if (k < 0) throw std::invalid_argument("hermite_eval: degree must be >= 0");
  const ScaledHermitePair p = hermite_eval_scaled(k, x);
  return apply_exponent(p.mant_k, p.exponent);
}

HermiteTable hermite_table(std::span<const double> nodes1d, int max_degree) {
  if (max_degree < 0) throw std::invalid_argument("hermite_table: max_degree must be >= 0");
  HermiteTable table;
  table.max_degree = max_degree;
  const Eigen::Index m = static_cast<Eigen::Index>(nodes1d.size());
  table.values.resize(max_degree + 1, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = nodes1d[static_cast<std::size_t>(i)];
    const double t = -0.5 * x * x * kInvLn2;
    const double ip = std::floor(t);
    long exponent = static_cast<long>(ip);
    double cur = kQuarterRootPiInv * std::exp2(t - ip);
    double prev = 0.0;
    table.values(0, i) = apply_exponent(cur, exponent);
    for (int k = 0; k < max_degree; ++k) {
      const double nxt =
          std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
      prev = cur;
      cur = nxt;
      const double a = std::abs(cur);
      if (a > kScaleHi) {
        cur *= kScaleLo;
        prev *= kScaleLo;
        exponent += 500;
      } else if (a < kScaleLo && a > 0.0 && std::abs(prev) < kScaleLo) {
        cur /= kScaleLo;
        prev /= kScaleLo;
        exponent -= 500;
      }
      table.values(k + 1, i) = apply_exponent(cur, exponent);
    }
  }
  return table;
}

namespace {

// One Newton step for the largest-degree Hermite function: both h_m and
// h_{m-1} share the scale factor, so the correction is scale-free.
double newton_step(int m, double x) {
  const ScaledHermitePair p = hermite_eval_scaled(m, x);
  const double deriv = std::sqrt(2.0 * m) * p.mant_km1 - x * p.mant_k;
  if (deriv == 0.0) return 0.0;
  return p.mant_k / deriv;
}

}  // namespace

QuadratureGrid gauss_hermite_quadrature(int m) {
  if (m < 1) throw std::invalid_argument("gauss_hermite_quadrature: m must be >= 1");

  Eigen::VectorXd nodes(m);
  if (m == 1) {
    nodes[0] = 0.0;
  } else {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sub(m - 1);
    for (int i = 1; i < m; ++i) sub[i - 1] = std::sqrt(0.5 * i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    nodes = es.eigenvalues();
    std::sort(nodes.data(), nodes.data() + m);
    for (int i = 0; i < m; ++i) {
      double x = nodes[i];
      for (int it = 0; it < 3; ++it) {
        const double dx = newton_step(m, x);
        x -= dx;
        if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
      }
      nodes[i] = x;
    }
    // Exact +/- pairing (the recurrence is sign-symmetric, so paired nodes
    // then get bitwise-equal weights).
    for (int i = 0; i < m / 2; ++i) {
      const double v = 0.5 * (nodes[m - 1 - i] - nodes[i]);
      nodes[m - 1 - i] = v;
      nodes[i] = -v;
    }
    if (m % 2 == 1) nodes[m / 2] = 0.0;
  }

  QuadratureGrid grid;
  grid.dimension = 1;
  grid.points_per_axis = m;
  grid.axis_nodes.assign(nodes.data(), nodes.data() + m);

  const HermiteTable table = hermite_table(grid.axis_nodes, m - 1);
  grid.axis_lebesgue_weights.resize(m);
  grid.axis_gauss_weights.resize(m);
  for (int i = 0; i < m; ++i) {
    const double s = table.values.col(i).squaredNorm();  // Christoffel denominator
    grid.axis_lebesgue_weights[i] = 1.0 / s;
    grid.axis_gauss_weights[i] = std::exp(-nodes[i] * nodes[i]) / s;
  }

  grid.nodes = grid.axis_nodes;
  grid.gauss_weights = grid.axis_gauss_weights;
  grid.lebesgue_weights = grid.axis_lebesgue_weights;
  return grid;
}

QuadratureGrid tensor_grid(int n, int m, std::size_t node_cap) {
  if (n < 1) throw std::invalid_argument("tensor_grid: dimension must be >= 1");
  if (m < 1) throw std::invalid_argument("tensor_grid: points_per_axis must be >= 1");

  double count_d = 1.0;
  for (int d = 0; d < n; ++d) count_d *= static_cast<double>(m);
  if (count_d > static_cast<double>(node_cap)) {
    throw std::length_error("tensor_grid: node count " + std::to_string(count_d) +
                            " exceeds cap " + std::to_string(node_cap));
  }

  QuadratureGrid axis = gauss_hermite_quadrature(m);
  if (n == 1) return axis;

  const std::size_t count = static_cast<std::size_t>(count_d);
  QuadratureGrid grid;
  grid.dimension = n;
  grid.points_per_axis = m;
  grid.axis_nodes = axis.axis_nodes;
  grid.axis_gauss_weights = axis.axis_gauss_weights;
  grid.axis_lebesgue_weights = axis.axis_lebesgue_weights;
  grid.nodes.resize(count * static_cast<std::size_t>(n));
  grid.gauss_weights.assign(count, 1.0);
  grid.lebesgue_weights.assign(count, 1.0);

  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rem = i;
    for (int d = n - 1; d >= 0; --d) {
      const std::size_t j = rem % static_cast<std::size_t>(m);
      rem /= static_cast<std::size_t>(m);
      grid.nodes[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(d)] =
          axis.axis_nodes[j];
      grid.gauss_weights[i] *= axis.axis_gauss_weights[j];
      grid.lebesgue_weights[i] *= axis.axis_lebesgue_weights[j];
    }
  }
  return grid;
}

int MultiIndex::degree() const {
  int s = 0;
  for (int c : components) s += c;
  return s;
}

std::vector<MultiIndex> enumerate_band(int n, int lambda_max) {
  if (n < 1) throw std::invalid_argument("enumerate_band: dimension must be >= 1");
  std::vector<MultiIndex> out;
  if (lambda_max < n) return out;
  const int max_deg = (lambda_max - n) / 2;

  // Compositions of each total degree in lexicographic order.
  std::vector<int> mu(static_cast<std::size_t>(n), 0);
  for (int deg = 0; deg <= max_deg; ++deg) {
    std::fill(mu.begin(), mu.end(), 0);
    mu[0] = deg;
    while (true) {
      out.push_back(MultiIndex{mu});
      // next composition of `deg` in lexicographically decreasing first part
      int i = n - 2;
      while (i >= 0 && mu[static_cast<std::size_t>(i)] == 0) --i;
      if (i < 0) break;
      --mu[static_cast<std::size_t>(i)];
      int tail = 0;
      for (int d = i + 1; d < n; ++d) {
        tail += mu[static_cast<std::size_t>(d)];
        mu[static_cast<std::size_t>(d)] = 0;
      }
      mu[static_cast<std::size_t>(i + 1)] = tail + 1;
    }
  }
  return out;
}

}  // namespace hsc
