#include "hsc/multiplier.hpp"

#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>

#include <fftw3.h>

namespace hsc {

namespace {

double glue(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace

double smooth_step(double x) {
  const double a = glue(x);
  const double b = glue(1.0 - x);
  return a / (a + b);
}

double bump_phi(double u) {
  const double rho = (std::abs(u) - 5.0 / 16.0) / (3.0 / 16.0);
  if (std::abs(rho) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - rho * rho));
}

SpectralSymbol build_bump_phi() {
  SpectralSymbol sym;
  sym.evaluator = [](double u) { return bump_phi(u); };
  sym.support = std::make_pair(-0.5, 0.5);
  sym.sup_bound = 1.0;
  return sym;
}

namespace {

// theta(r) = step(log2 r + 1): 0 for r <= 1/2, 1 for r >= 1. The dyadic
// differences of this step telescope to 1.
double log_step(double r) {
  if (r <= 0.0) return 0.0;
  return smooth_step(std::log2(r) + 1.0);
}

}  // namespace

double DyadicPartition::eta(double u) {
  const double r = std::abs(u);
  return log_step(r) - log_step(0.5 * r);
}

DyadicPartition DyadicPartition::make(double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::invalid_argument("DyadicPartition: delta must lie in (0, 1/2)");
  }
  DyadicPartition p;
  p.delta = delta;
  p.j0 = static_cast<int>(std::floor(-std::log2(delta))) - 1;
  return p;
}

double DyadicPartition::piece(int j, double u) const {
  if (j < j0) throw std::invalid_argument("DyadicPartition: index below j0");
  if (j > j0) return eta(std::ldexp(u, -j));
  // lumped tail: 1 - sum_{j > j0} eta(2^-j u) = theta(2^{-j0-1}|u|) restricted
  double s = 1.0;
  const double r = std::abs(u);
  if (r > 0.0) {
    // only finitely many terms are nonzero: 2^{j-1} <= r <= 2^{j+1}
    const int lo = std::max(j0 + 1, static_cast<int>(std::floor(std::log2(r))) - 1);
    const int hi = static_cast<int>(std::ceil(std::log2(r))) + 1;
    for (int q = lo; q <= hi; ++q) s -= eta(std::ldexp(r, -q));
  }
  return s;
}

double SampledSymbol::value_at(double s) const {
  const double pos = s / step;
  const double r = std::round(pos);
  if (std::abs(pos - r) > 1e-9 || r < 0.0 || r >= static_cast<double>(values.size())) {
    throw std::invalid_argument("SampledSymbol: " + std::to_string(s) +
                                " is not a grid point (step " + std::to_string(step) + ")");
  }
  return values[static_cast<std::size_t>(r)];
}

double phi_piece_step(int j) { return std::ldexp(1.0, -(j + 3)); }

SampledSymbol build_phi_delta_j(double delta, int j, double s_limit, double step) {
  const DyadicPartition part = DyadicPartition::make(delta);
  if (j < part.j0) throw std::invalid_argument("build_phi_delta_j: j below j0");
  if (!(s_limit > 0.0)) throw std::invalid_argument("build_phi_delta_j: bad s limit");
  const double required = std::ldexp(1.0, -j) / 8.0;
  if (!(step > 0.0) || step > required * (1.0 + 1e-12)) {
    throw std::invalid_argument("build_phi_delta_j: step " + std::to_string(step) +
                                " does not resolve the oscillation scale; need <= " +
                                std::to_string(required));
  }

  // Synthesis window: period 8 in s; the sample count must resolve the
  // width-delta features of the scaled bump (2^16 floor) and the requested
  // output step must be an exact power-of-two multiple of the window step.
  constexpr double kPeriod = 8.0;
  const double ratio = kPeriod / step;
  const double l2 = std::log2(ratio);
  if (std::abs(l2 - std::round(l2)) > 1e-9) {
    throw std::invalid_argument(
        "build_phi_delta_j: step must divide the synthesis window as a power of two");
  }
  const std::size_t out_res = std::size_t{1} << static_cast<int>(std::round(l2));
  const std::size_t nsamp = std::max(out_res, std::size_t{1} << 16);
  if (nsamp > (std::size_t{1} << 26)) {
    throw std::length_error("build_phi_delta_j: synthesis grid too large");
  }
  if (s_limit > 0.5 * kPeriod - 1.0) {
    throw std::invalid_argument("build_phi_delta_j: s limit exceeds the synthesis window");
  }

  std::vector<double> in(nsamp);
  const double h = kPeriod / static_cast<double>(nsamp);
  for (std::size_t i = 0; i < nsamp; ++i) {
    const double s = -0.5 * kPeriod + h * static_cast<double>(i);
    in[i] = bump_phi((1.0 - s * s) / delta);
  }

  const std::size_t nfreq = nsamp / 2 + 1;
  std::vector<std::complex<double>> spec(nfreq);
  fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(nsamp), in.data(),
                                       reinterpret_cast<fftw_complex*>(spec.data()),
                                       FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);

  // window in the frequency variable u_k = 2 pi k / period
  const double du = 2.0 * 3.14159265358979323846 / kPeriod;
  for (std::size_t kk = 0; kk < nfreq; ++kk) {
    spec[kk] *= part.piece(j, du * static_cast<double>(kk));
  }

  std::vector<double> out(nsamp);
  fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(nsamp),
                                       reinterpret_cast<fftw_complex*>(spec.data()),
                                       out.data(), FFTW_ESTIMATE);
  fftw_execute(bwd);
  fftw_destroy_plan(bwd);
  const double scale = 1.0 / static_cast<double>(nsamp);

  SampledSymbol piece;
  piece.delta = delta;
  piece.j = j;
  piece.step = step;
  const std::size_t stride = static_cast<std::size_t>(std::round(step / h));
  const std::size_t origin = nsamp / 2;  // index of s = 0
  const std::size_t count = static_cast<std::size_t>(std::floor(s_limit / step)) + 1;
  piece.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    piece.values.push_back(out[origin + i * stride] * scale);
  }
  return piece;
}

LineFit decay_check(const SampledSymbol& piece, int min_points, double window_hi,
                    double value_floor) {
  std::vector<double> xs, ys;
  const double scale = std::ldexp(1.0, piece.j);
  for (std::size_t i = 0; i < piece.values.size(); ++i) {
    const double s = piece.step * static_cast<double>(i);
    const double d = std::abs(s - 1.0);
    if (d < 4.0 * piece.delta || d > window_hi) continue;
    const double v = std::abs(piece.values[i]);
    if (v < value_floor) continue;
    xs.push_back(std::log(1.0 + scale * d));
    ys.push_back(std::log(v));
  }
  if (static_cast<int>(xs.size()) < min_points) {
    throw std::invalid_argument("decay_check: only " + std::to_string(xs.size()) +
                                " samples in the regression window, need " +
                                std::to_string(min_points));
  }
  return fit_line(xs, ys);
}

namespace {

double beta_function(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace

SubordinationResult subordination_check(double lambda, double rho, double m, double R) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("subordination_check: lambda must be > 0");
  }
  if (!(rho > -0.5) || !(rho < lambda)) {
    throw std::invalid_argument(
        "subordination_check: need -1/2 < rho < lambda for the identity");
  }
  if (!(m > 0.0) || !(R > 0.0)) {
    throw std::invalid_argument("subordination_check: m and R must be positive");
  }

  SubordinationResult res;
  if (m >= R) return res;  // both sides vanish

  const double ratio = m / R;
  res.lhs = std::pow(1.0 - ratio * ratio, lambda);

  const double coeff = 2.0 / beta_function(lambda - rho, rho + 1.0);
  const auto integrand = [&](double t) {
    const double base = 1.0 - (m * m) / (t * t);
    if (base <= 0.0) return 0.0;
    return std::pow(R * R - t * t, lambda - rho - 1.0) * std::pow(t, 2.0 * rho + 1.0) *
           std::pow(base, rho);
  };

  // Fixed-depth tanh-sinh on (m, R); level doubling until stable.
  const double a = m, b = R;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  const double pi_half = 1.5707963267948966;
  double integral = 0.0;
  double prev = 0.0;
  for (int level = 3; level <= 11; ++level) {
    const int steps = 1 << level;
    const double h = 4.0 / steps;
    double acc = 0.0;
    for (int k = -steps; k <= steps; ++k) {
      const double t = h * k;
      const double u = pi_half * std::sinh(t);
      const double x = std::tanh(u);
      const double ch = std::cosh(u);
      const double w = pi_half * std::cosh(t) / (ch * ch);
      const double point = mid + half * x;
      if (!(point > a && point < b) || w < 1e-300) continue;
      acc += w * integrand(point);
    }
    integral = acc * h * half;
    if (level > 3 && std::abs(integral - prev) <= 1e-13 * std::max(1.0, std::abs(integral))) {
      break;
    }
    prev = integral;
  }

  res.rhs = coeff * std::pow(R, -2.0 * lambda) * integral;
  return res;
}

double dyadic_theta(double x) {
  if (x <= 0.0) return 0.0;
  // T(r) = step(4r - 1): 0 for r <= 1/4, 1 for r >= 1/2; theta = T(2x) - T(x)
  const auto T = [](double r) { return smooth_step(4.0 * r - 1.0); };
  return T(2.0 * x) - T(x);
}

double riesz_dyadic_check(double rho, std::span<const double> x_grid) {
  if (!(rho > 0.0)) throw std::invalid_argument("riesz_dyadic_check: rho must be > 0");
  double worst = 0.0;
  for (double x : x_grid) {
    if (!(x > 0.0 && x <= 1.0)) {
      throw std::invalid_argument("riesz_dyadic_check: grid must lie in (0, 1]");
    }
    // active window: 2^k x in [1/8, 1/2]
    const int klo = static_cast<int>(std::floor(std::log2(0.125 / x))) - 1;
    const int khi = static_cast<int>(std::ceil(std::log2(0.5 / x))) + 1;
    double sum = 0.0;
    for (int k = klo; k <= khi; ++k) {
      const double y = std::ldexp(x, k);
      const double th = dyadic_theta(y);
      if (th != 0.0) sum += std::pow(2.0, -rho * k) * std::pow(y, rho) * th;
    }
    worst = std::max(worst, std::abs(sum - std::pow(x, rho)));
  }
  return worst;
}

void export_sampled_symbol_csv(const SampledSymbol& piece, std::ostream& os) {
  os << "s,value\n";
  os.precision(17);
  for (std::size_t i = 0; i < piece.values.size(); ++i) {
    os << piece.step * static_cast<double>(i) << "," << piece.values[i] << "\n";
  }
}

}  // namespace hsc
