#include "hsc/weighted.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hsc/rng.hpp"

namespace hsc {

double weighted_l2_norm(const GridField& f, const WeightSpec& w) {
  const QuadratureGrid& grid = *f.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const double v = f.values[static_cast<Eigen::Index>(i)];
    acc += grid.lebesgue_weights[i] * v * v * w(grid.radius(i));
  }
  return std::sqrt(acc);
}

namespace {

// 16-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

}  // namespace

double weighted_pair_integral_1d(int j, int k, double alpha) {
  if (j < 0 || k < 0) throw std::invalid_argument("weighted_pair_integral_1d: negative degree");
  if (((j + k) & 1) != 0) return 0.0;  // odd integrand

  const int deg = std::max(j, k);
  const double turn = std::sqrt(2.0 * deg + 1.0);
  const double upper = turn + 10.0;
  // Quarter wavelength at the densest point of the oscillation.
  const double panel = 3.14159265358979323846 / (2.0 * std::max(turn, 1.0));
  const int npan = static_cast<int>(std::ceil(upper / panel));
  const double h = upper / npan;

  double acc = 0.0;
  for (int p = 0; p < npan; ++p) {
    const double a = p * h;
    const double mid = a + 0.5 * h;
    const double half = 0.5 * h;
    double panel_sum = 0.0;
    for (int q = 0; q < 8; ++q) {
      for (const double sgn : {-1.0, 1.0}) {
        const double x = mid + sgn * half * kGlNodes[static_cast<std::size_t>(q)];
        const double hj = hermite_eval(j, x);
        const double hk = (k == j) ? hj : hermite_eval(k, x);
        panel_sum += kGlWeights[static_cast<std::size_t>(q)] * hj * hk *
                     std::pow(1.0 + x, -alpha);
      }
    }
    acc += half * panel_sum;
  }
  return 2.0 * acc;
}

double band_operator_norm(const BandOperatorMatrix& M) {
  if (!M.matrix.allFinite()) {
    throw std::invalid_argument("band_operator_norm: non-finite matrix entries");
  }
  const Eigen::MatrixXd target =
      M.target_gram.size() > 0
          ? Eigen::MatrixXd(M.matrix.transpose() * M.target_gram * M.matrix)
          : Eigen::MatrixXd(M.matrix.transpose() * M.matrix);
  if (M.source_gram.size() > 0) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(target, M.source_gram);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(target);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double trace_projection_norm(int k, const WeightSpec& w, const Band& band) {
  if (!(w.alpha > 1.0)) {
    throw std::invalid_argument("trace_projection_norm: requires alpha > 1");
  }
  if (k < 1) throw std::invalid_argument("trace_projection_norm: k must be >= 1");
  if (band.lambda_max < k) {
    throw std::invalid_argument("trace_projection_norm: band does not cover eigenvalue " +
                                std::to_string(k));
  }
  std::vector<const MultiIndex*> members;
  for (const MultiIndex& mu : band.indices) {
    if (mu.eigenvalue() == k) members.push_back(&mu);
  }
  if (members.empty()) return 0.0;
  const int d = static_cast<int>(members.size());

  Eigen::MatrixXd gram(d, d);
  if (band.dimension == 1) {
    gram(0, 0) = weighted_pair_integral_1d(members[0]->components[0],
                                           members[0]->components[0], w.alpha);
  } else {
    // Doubled tensor quadrature; (1+|x|)^{-alpha} is non-polynomial, so the
    // band sizing headroom is what controls the entry accuracy here.
    const int m = 2 * (k + 2);
    const QuadratureGrid grid = tensor_grid(band.dimension, m);
    const int kmax = (k - band.dimension) / 2;
    const HermiteTable table = hermite_table(grid.axis_nodes, kmax);

    const std::size_t count = grid.count();
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(count), d);
    for (int c = 0; c < d; ++c) {
      const MultiIndex& mu = *members[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < count; ++i) {
        double phi = 1.0;
        for (int ax = 0; ax < band.dimension; ++ax) {
          phi *= table.values(mu.components[static_cast<std::size_t>(ax)],
                              grid.axis_index(i, ax));
        }
        basis(static_cast<Eigen::Index>(i), c) = phi;
      }
    }
    Eigen::VectorXd wq(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
      wq[static_cast<Eigen::Index>(i)] = grid.lebesgue_weights[i] * w(grid.radius(i));
    }
    gram.noalias() = basis.transpose() * wq.asDiagonal() * basis;
  }

  BandOperatorMatrix op;
  op.matrix = Eigen::MatrixXd::Identity(d, d);
  op.target_gram = gram;
  return band_operator_norm(op);
}

double discretized_sup_norm(const SpectralSymbol& F, double scale, int cells, double p) {
  if (cells < 1) throw std::invalid_argument("discretized_sup_norm: cells must be >= 1");
  // cells = N in the definition; the sup is sampled within each cell.
  const double n = static_cast<double>(cells);
  double acc = 0.0;
  constexpr int kSamples = 9;
  for (int i = -cells + 1; i <= cells; ++i) {
    const double lo = (i - 1) / n;
    const double hi = i / n;
    double cell_sup = 0.0;
    for (int q = 0; q < kSamples; ++q) {
      const double lam = lo + (hi - lo) * q / (kSamples - 1);
      cell_sup = std::max(cell_sup, std::abs(F(scale * lam)));
    }
    acc += std::pow(cell_sup, p);
  }
  return std::pow(acc / n, 1.0 / p);
}

double weighted_plancherel_ratio(const SpectralSymbol& F, int N, const WeightSpec& w,
                                 const Transform& tr, const PlancherelConfig& cfg) {
  if (N < 1) throw std::invalid_argument("weighted_plancherel_ratio: N must be >= 1");
  if (F.support) {
    if (F.support->first < N / 4.0 - 1e-12 || F.support->second > N + 1e-12) {
      throw std::invalid_argument(
          "weighted_plancherel_ratio: symbol support must lie in [N/4, N]");
    }
  } else {
    throw std::invalid_argument("weighted_plancherel_ratio: symbol must declare support");
  }
  const double alpha = w.alpha;
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("weighted_plancherel_ratio: alpha must be positive");
  }

  double bound = 0.0;
  if (alpha > 1.0) {
    const double nrm = discretized_sup_norm(F, static_cast<double>(N), N * N, 2.0);
    bound = N * nrm * nrm;
  } else {
    const double p = 2.0 * (1.0 + cfg.epsilon) / alpha;
    const double nrm = discretized_sup_norm(F, static_cast<double>(N), N * N, p);
    bound = std::pow(static_cast<double>(N), alpha / (1.0 + cfg.epsilon)) * nrm * nrm;
  }
  if (bound == 0.0) return 0.0;  // F identically zero on its support

  Rng rng(cfg.seed);
  double best = 0.0;
  for (int t = 0; t < cfg.trial_count; ++t) {
    SpectralCoeffs c;
    c.band = tr.band_ptr();
    c.values = random_unit_coeffs(rng, static_cast<Eigen::Index>(tr.band().size()));
    const SpectralCoeffs fc = apply_multiplier(c, F);
    const GridField g = tr.inverse(fc);
    const double num = weighted_l2_norm(g, w);
    best = std::max(best, num * num / bound);  // ||f||_2^2 = 1 by construction
  }
  return best;
}

double sobolev_weight_ratio(const SpectralCoeffs& c, double alpha, const Transform& tr) {
  if (alpha < 0.0) throw std::invalid_argument("sobolev_weight_ratio: alpha must be >= 0");
  double den2 = 0.0;
  for (std::size_t j = 0; j < c.band->size(); ++j) {
    const double e = c.band->eigenvalues[j];
    const double v = c.values[static_cast<Eigen::Index>(j)];
    den2 += std::pow(1.0 + e, 0.5 * alpha) * v * v;
  }
  if (den2 == 0.0) {
    throw std::domain_error("sobolev_weight_ratio: undefined ratio for zero input");
  }
  const GridField f = tr.inverse(c);
  const QuadratureGrid& grid = *f.grid;
  double num2 = 0.0;
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const double v = f.values[static_cast<Eigen::Index>(i)];
    num2 += grid.lebesgue_weights[i] * std::pow(1.0 + grid.radius(i), alpha) * v * v;
  }
  return std::sqrt(num2 / den2);
}

}  // namespace hsc
