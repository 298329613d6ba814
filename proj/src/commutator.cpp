#include "hsc/commutator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

#include "hsc/multiplier.hpp"

namespace hsc {

BmoSymbol make_bmo_symbol(const std::string& name) {
  BmoSymbol b;
  b.descriptor = name;
  if (name.rfind("const:", 0) == 0) {
    const double c = std::stod(name.substr(6));
    b.evaluator = [c](std::span<const double>) { return c; };
    return b;
  }
  if (name == "sin") {
    b.evaluator = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v;
      return std::sin(s);
    };
    return b;
  }
  if (name == "log1p_abs") {
    b.evaluator = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return std::log1p(std::sqrt(s));
    };
    return b;
  }
  if (name == "sign_times_log") {
    b.evaluator = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      const double sgn = x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0);
      return sgn * std::log1p(std::sqrt(s));
    };
    return b;
  }
  throw std::invalid_argument("unknown symbol name: " + name);
}

GridField sample_symbol(const BmoSymbol& b, std::shared_ptr<const QuadratureGrid> grid) {
  GridField f;
  f.values.resize(static_cast<Eigen::Index>(grid->count()));
  const int n = grid->dimension;
  for (std::size_t i = 0; i < grid->count(); ++i) {
    std::span<const double> x(grid->nodes.data() + i * static_cast<std::size_t>(n),
                              static_cast<std::size_t>(n));
    const double v = b(x);
    if (!std::isfinite(v)) {
      throw std::domain_error("symbol '" + b.descriptor + "' not finite at a grid node");
    }
    f.values[static_cast<Eigen::Index>(i)] = v;
  }
  f.grid = std::move(grid);
  return f;
}

namespace {

Eigen::VectorXd sampled_b(const BmoSymbol& b, const Transform& tr) {
  return sample_symbol(b, tr.grid_ptr()).values;
}

void check_aliasing(const Eigen::VectorXd& bf, const SpectralCoeffs& cbf,
                    const QuadratureGrid& grid, const CommutatorOptions& opts,
                    const char* where) {
  if (opts.warnings == nullptr) return;
  double total = 0.0;
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const double v = bf[static_cast<Eigen::Index>(i)];
    total += grid.lebesgue_weights[i] * v * v;
  }
  const double kept = cbf.coefficient_energy();
  if (total <= 0.0) return;
  const double lost = std::max(0.0, total - kept) / total;
  if (lost > opts.aliasing_tol) {
    opts.warnings->warn(std::string(where) + ": product b*f loses " + std::to_string(lost) +
                        " of its quadrature energy past the band limit");
  }
}

}  // namespace

GridField commutator_apply(const BmoSymbol& b, const CoefficientOperator& T,
                           const GridField& f, const Transform& tr,
                           const CommutatorOptions& opts) {
  const Eigen::VectorXd bvals = sampled_b(b, tr);

  const SpectralCoeffs cf = tr.forward(f);
  const Eigen::VectorXd tf = tr.synthesize(T(cf).values);

  const Eigen::VectorXd bf = bvals.cwiseProduct(f.values);
  const SpectralCoeffs cbf = tr.forward(bf);
  check_aliasing(bf, cbf, tr.grid(), opts, "commutator_apply");
  const Eigen::VectorXd tbf = tr.synthesize(T(cbf).values);

  GridField out;
  out.grid = tr.grid_ptr();
  out.values = bvals.cwiseProduct(tf) - tbf;
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, int points_per_octave) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("geometric_grid: bad range");
  if (points_per_octave < 1) throw std::invalid_argument("geometric_grid: bad density");
  const double step = std::log(2.0) / points_per_octave;
  const int count = static_cast<int>(std::ceil(std::log(hi / lo) / step)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(lo * std::exp(step * i));
  return out;
}

GridField maximal_commutator(const BmoSymbol& b, double lambda, const GridField& f,
                             std::span<const double> r_grid, const Transform& tr,
                             const CommutatorOptions& opts) {
  if (lambda < 0.0) throw std::invalid_argument("maximal_commutator: lambda must be >= 0");
  if (r_grid.empty()) throw std::invalid_argument("maximal_commutator: empty R grid");

  const Eigen::VectorXd bvals = sampled_b(b, tr);
  const SpectralCoeffs cf = tr.forward(f);
  const Eigen::VectorXd bf = bvals.cwiseProduct(f.values);
  const SpectralCoeffs cbf = tr.forward(bf);
  check_aliasing(bf, cbf, tr.grid(), opts, "maximal_commutator");

  const auto one_radius = [&](double R) -> Eigen::VectorXd {
    SpectralCoeffs a = bochner_riesz(cf, R, lambda);
    SpectralCoeffs c = bochner_riesz(cbf, R, lambda);
    return (bvals.cwiseProduct(tr.synthesize(a.values)) - tr.synthesize(c.values))
        .cwiseAbs();
  };

  GridField out;
  out.grid = tr.grid_ptr();
  out.values = Eigen::VectorXd::Zero(f.values.size());

  if (opts.parallel && r_grid.size() > 1) {
    // Pointwise max is order-independent, so the chunked reduction is exact.
    const unsigned chunks = std::min<unsigned>(std::thread::hardware_concurrency(),
                                               static_cast<unsigned>(r_grid.size()));
    std::vector<std::future<Eigen::VectorXd>> futs;
    for (unsigned c = 0; c < chunks; ++c) {
      futs.push_back(std::async(std::launch::async, [&, c]() {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.values.size());
        for (std::size_t i = c; i < r_grid.size(); i += chunks) {
          acc = acc.cwiseMax(one_radius(r_grid[i]));
        }
        return acc;
      }));
    }
    for (auto& fut : futs) out.values = out.values.cwiseMax(fut.get());
  } else {
    for (double R : r_grid) out.values = out.values.cwiseMax(one_radius(R));
  }
  return out;
}

SquareFunctionSpec make_square_function_spec(double delta, const Band& band,
                                             int points_per_window) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::invalid_argument("square function: delta must lie in (0, 1/2)");
  }
  if (band.size() == 0) throw std::invalid_argument("square function: empty band");
  if (points_per_window < 1) throw std::invalid_argument("square function: bad density");

  SquareFunctionSpec spec;
  spec.delta = delta;
  spec.phi = build_bump_phi();

  // The scaled symbol responds to eigenvalue E exactly when
  // delta/8 <= |1 - E/t^2| <= delta/2; each response window has log-width
  // 3*delta/16 per side, which sets the resolving step.
  const double emin = band.eigenvalues.front();
  const double emax = band.eigenvalues.back();
  const double tmin = std::sqrt(emin / (1.0 + 0.5 * delta));
  const double tmax = std::sqrt(emax / (1.0 - 0.5 * delta));
  const double step = (3.0 * delta / 16.0) / points_per_window;
  const int count = static_cast<int>(std::ceil(std::log(tmax / tmin) / step)) + 1;
  spec.t_grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) spec.t_grid.push_back(tmin * std::exp(step * i));
  spec.t_weights.assign(static_cast<std::size_t>(count), step);
  return spec;
}

GridField square_function(const BmoSymbol& b, const SquareFunctionSpec& spec,
                          const GridField& f, const Transform& tr,
                          const CommutatorOptions& opts) {
  if (!(spec.delta > 0.0 && spec.delta < 0.5)) {
    throw std::invalid_argument("square_function: delta must lie in (0, 1/2)");
  }
  if (spec.t_grid.empty() || spec.t_grid.size() != spec.t_weights.size()) {
    throw std::invalid_argument("square_function: malformed t grid");
  }
  for (std::size_t i = 1; i < spec.t_grid.size(); ++i) {
    if (!(spec.t_grid[i] > spec.t_grid[i - 1])) {
      throw std::invalid_argument("square_function: t grid must be strictly increasing");
    }
  }
  const Band& band = tr.band();
  const double delta = spec.delta;
  const double need_lo = std::sqrt(band.eigenvalues.front() / (1.0 + 0.5 * delta));
  const double need_hi = std::sqrt(band.eigenvalues.back() / (1.0 - 0.5 * delta));
  if (spec.t_grid.front() > need_lo * 1.0000001 || spec.t_grid.back() < need_hi * 0.9999999) {
    throw std::invalid_argument(
        "square_function: t grid fails coverage; required range [" +
        std::to_string(need_lo) + ", " + std::to_string(need_hi) + "], got [" +
        std::to_string(spec.t_grid.front()) + ", " + std::to_string(spec.t_grid.back()) + "]");
  }

  const Eigen::VectorXd bvals = sampled_b(b, tr);
  const SpectralCoeffs cf = tr.forward(f);
  const Eigen::VectorXd bf = bvals.cwiseProduct(f.values);
  const SpectralCoeffs cbf = tr.forward(bf);
  check_aliasing(bf, cbf, tr.grid(), opts, "square_function");

  const std::vector<double>& eig = band.eigenvalues;  // ascending

  const auto accumulate_range = [&](std::size_t t_begin, std::size_t t_end) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.values.size());
    Eigen::VectorXd term(f.values.size());
    std::vector<Eigen::Index> pos;
    std::vector<double> ca, cb;
    for (std::size_t ti = t_begin; ti < t_end; ++ti) {
      const double t = spec.t_grid[ti];
      const double t2 = t * t;
      // active eigenvalues: E in [t^2(1-delta/2), t^2(1+delta/2)]
      const double elo = t2 * (1.0 - 0.5 * delta);
      const double ehi = t2 * (1.0 + 0.5 * delta);
      const auto first = std::lower_bound(eig.begin(), eig.end(), elo);
      const auto last = std::upper_bound(eig.begin(), eig.end(), ehi);
      if (first == last) continue;
      pos.clear();
      ca.clear();
      cb.clear();
      for (auto it = first; it != last; ++it) {
        const Eigen::Index j = static_cast<Eigen::Index>(it - eig.begin());
        const double d = spec.phi((1.0 - *it / t2) / delta);
        if (d == 0.0) continue;
        pos.push_back(j);
        ca.push_back(d * cf.values[j]);
        cb.push_back(d * cbf.values[j]);
      }
      if (pos.empty()) continue;
      term.setZero();
      tr.accumulate_synthesis(pos, ca, term);
      term = bvals.cwiseProduct(term);
      Eigen::VectorXd second = Eigen::VectorXd::Zero(f.values.size());
      tr.accumulate_synthesis(pos, cb, second);
      term -= second;
      acc += spec.t_weights[ti] * term.cwiseAbs2();
    }
    return acc;
  };

  Eigen::VectorXd total;
  if (opts.parallel && spec.t_grid.size() > 64) {
    const unsigned chunks = std::min<unsigned>(std::thread::hardware_concurrency(), 8u);
    const std::size_t per = (spec.t_grid.size() + chunks - 1) / chunks;
    std::vector<std::future<Eigen::VectorXd>> futs;
    for (unsigned c = 0; c < chunks; ++c) {
      const std::size_t lo = c * per;
      const std::size_t hi = std::min(spec.t_grid.size(), lo + per);
      if (lo >= hi) break;
      futs.push_back(std::async(std::launch::async, accumulate_range, lo, hi));
    }
    total = Eigen::VectorXd::Zero(f.values.size());
    for (auto& fut : futs) total += fut.get();  // fixed chunk order
  } else {
    total = accumulate_range(0, spec.t_grid.size());
  }

  GridField out;
  out.grid = tr.grid_ptr();
  out.values = total.cwiseSqrt();
  return out;
}

GridField hl_maximal_commutator(const BmoSymbol& b, const GridField& f,
                                std::span<const double> radii) {
  if (radii.empty()) throw std::invalid_argument("hl_maximal_commutator: empty radius grid");
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("hl_maximal_commutator: radii must be positive");
  }
  const QuadratureGrid& grid = *f.grid;
  const int n = grid.dimension;
  const std::size_t count = grid.count();
  const Eigen::VectorXd bvals = sample_symbol(b, f.grid).values;

  GridField out;
  out.grid = f.grid;
  out.values.resize(static_cast<Eigen::Index>(count));

  std::vector<double> dist2(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      double d2 = 0.0;
      for (int d = 0; d < n; ++d) {
        const double diff = grid.node(i, d) - grid.node(j, d);
        d2 += diff * diff;
      }
      dist2[j] = d2;
    }
    double best = 0.0;
    for (double r : radii) {
      const double r2 = r * r;
      double acc = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        if (dist2[j] < r2) {
          acc += grid.lebesgue_weights[j] *
                 std::abs((bvals[static_cast<Eigen::Index>(i)] -
                           bvals[static_cast<Eigen::Index>(j)]) *
                          f.values[static_cast<Eigen::Index>(j)]);
        }
      }
      best = std::max(best, acc / std::pow(r, n));
    }
    out.values[static_cast<Eigen::Index>(i)] = best;
  }
  return out;
}

double bmo_norm_estimate(const BmoSymbol& b, int dimension, double half_width, int levels,
                         int samples_per_cell) {
  if (!(half_width > 0.0)) throw std::invalid_argument("bmo_norm_estimate: L must be > 0");
  if (levels < 1) throw std::invalid_argument("bmo_norm_estimate: levels must be >= 1");
  if (dimension < 1 || dimension > 3) {
    throw std::invalid_argument("bmo_norm_estimate: dimension out of range");
  }
  if (samples_per_cell < 1) samples_per_cell = 1;

  // Midpoint samples at the finest level; every dyadic cube average and
  // oscillation is a partial sum over them.
  const long cells = 1L << levels;
  const long s_axis = cells * samples_per_cell;
  double total_d = 1.0;
  for (int d = 0; d < dimension; ++d) total_d *= static_cast<double>(s_axis);
  if (total_d > 2e8) throw std::length_error("bmo_norm_estimate: sample grid too large");
  const std::size_t total = static_cast<std::size_t>(total_d);

  const double h = 2.0 * half_width / static_cast<double>(s_axis);
  std::vector<double> samples(total);
  std::vector<double> coords(static_cast<std::size_t>(dimension));
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    for (int d = dimension - 1; d >= 0; --d) {
      const std::size_t idx = rem % static_cast<std::size_t>(s_axis);
      rem /= static_cast<std::size_t>(s_axis);
      coords[static_cast<std::size_t>(d)] = -half_width + h * (static_cast<double>(idx) + 0.5);
    }
    samples[i] = b(coords);
  }

  double best = 0.0;
  std::vector<double> sums, counts;
  for (int lev = 0; lev <= levels; ++lev) {
    const long cubes_axis = 1L << lev;
    const long samples_per_cube_axis = s_axis / cubes_axis;
    std::size_t ncubes = 1;
    for (int d = 0; d < dimension; ++d) ncubes *= static_cast<std::size_t>(cubes_axis);
    sums.assign(ncubes, 0.0);

    const auto cube_of = [&](std::size_t i) {
      std::size_t rem = i, cube = 0, stride = 1;
      for (int d = dimension - 1; d >= 0; --d) {
        const std::size_t idx = rem % static_cast<std::size_t>(s_axis);
        rem /= static_cast<std::size_t>(s_axis);
        cube += (idx / static_cast<std::size_t>(samples_per_cube_axis)) * stride;
        stride *= static_cast<std::size_t>(cubes_axis);
      }
      return cube;
    };

    for (std::size_t i = 0; i < total; ++i) sums[cube_of(i)] += samples[i];
    const double per_cube = total_d / static_cast<double>(ncubes);
    for (double& s : sums) s /= per_cube;  // cube means

    counts.assign(ncubes, 0.0);
    for (std::size_t i = 0; i < total; ++i) {
      const std::size_t c = cube_of(i);
      counts[c] += std::abs(samples[i] - sums[c]);
    }
    for (std::size_t c = 0; c < ncubes; ++c) {
      best = std::max(best, counts[c] / per_cube);
    }
  }
  return best;
}

}  // namespace hsc
