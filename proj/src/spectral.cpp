#include "hsc/spectral.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hsc {

std::shared_ptr<const Band> Band::make(int n, int lambda_max) {
  auto band = std::make_shared<Band>();
  band->dimension = n;
  band->lambda_max = lambda_max;
  band->indices = enumerate_band(n, lambda_max);
  band->eigenvalues.reserve(band->indices.size());
  for (const MultiIndex& mu : band->indices) {
    band->eigenvalues.push_back(static_cast<double>(mu.eigenvalue()));
  }
  band->max_degree = band->indices.empty() ? -1 : band->indices.back().degree();
  return band;
}

int Transform::minimum_points_per_axis(int n, int lambda_max) {
  if (lambda_max < n) return 1;
  return (lambda_max - n) / 2 + 1;  // max degree + 1
}

Transform::Transform(std::shared_ptr<const QuadratureGrid> grid,
                     std::shared_ptr<const Band> band)
    : grid_(std::move(grid)), band_(std::move(band)) {
  if (grid_->dimension != band_->dimension) {
    throw std::invalid_argument("Transform: grid dimension " +
                                std::to_string(grid_->dimension) + " != band dimension " +
                                std::to_string(band_->dimension));
  }
  const int need = minimum_points_per_axis(band_->dimension, band_->lambda_max);
  if (grid_->points_per_axis < need) {
    throw std::invalid_argument("Transform: grid undersized for band limit " +
                                std::to_string(band_->lambda_max) + ": need m >= " +
                                std::to_string(need) + " points per axis, got " +
                                std::to_string(grid_->points_per_axis));
  }
  const int K = std::max(band_->max_degree, 0);
  const HermiteTable table = hermite_table(grid_->axis_nodes, K);
  synth_ = table.values;
  anal_ = synth_;
  for (Eigen::Index i = 0; i < anal_.cols(); ++i) {
    anal_.col(i) *= grid_->axis_lebesgue_weights[static_cast<std::size_t>(i)];
  }
  const int n = band_->dimension;
  tensor_pos_.reserve(band_->size());
  for (const MultiIndex& mu : band_->indices) {
    std::size_t pos = 0;
    for (int d = 0; d < n; ++d) {
      pos = pos * static_cast<std::size_t>(K + 1) +
            static_cast<std::size_t>(mu.components[static_cast<std::size_t>(d)]);
    }
    tensor_pos_.push_back(pos);
  }
}

// In-place contraction of every axis of an n-dim tensor (m per axis,
// row-major) with `mat` ((K+1) x m). After n passes the buffer holds the
// (K+1)^n tensor.
void Transform::contract_axes(std::vector<double>& buf, const Eigen::MatrixXd& mat) const {
  using RowMat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const int n = band_->dimension;
  const std::size_t m = static_cast<std::size_t>(grid_->points_per_axis);
  const std::size_t kp1 = static_cast<std::size_t>(mat.rows());

  std::vector<double> next;
  for (int d = 0; d < n; ++d) {
    // shape: (kp1)^d x m x m^(n-1-d); contract the middle axis
    std::size_t left = 1, right = 1;
    for (int q = 0; q < d; ++q) left *= kp1;
    for (int q = d + 1; q < n; ++q) right *= m;
    next.resize(left * kp1 * right);
    for (std::size_t l = 0; l < left; ++l) {
      Eigen::Map<const RowMat> in(buf.data() + l * m * right, static_cast<Eigen::Index>(m),
                                  static_cast<Eigen::Index>(right));
      Eigen::Map<RowMat> out(next.data() + l * kp1 * right, static_cast<Eigen::Index>(kp1),
                             static_cast<Eigen::Index>(right));
      out.noalias() = mat * in;
    }
    buf.swap(next);
  }
}

SpectralCoeffs Transform::forward(const Eigen::VectorXd& node_values) const {
  if (static_cast<std::size_t>(node_values.size()) != grid_->count()) {
    throw std::invalid_argument("forward: field size does not match grid");
  }
  SpectralCoeffs out;
  out.band = band_;
  out.values.resize(static_cast<Eigen::Index>(band_->size()));
  if (band_->size() == 0) return out;

  std::vector<double> buf(node_values.data(), node_values.data() + node_values.size());
  contract_axes(buf, anal_);
  for (std::size_t j = 0; j < band_->size(); ++j) {
    out.values[static_cast<Eigen::Index>(j)] = buf[tensor_pos_[j]];
  }
  return out;
}

SpectralCoeffs Transform::forward(const GridField& f) const {
  if (f.grid.get() != grid_.get() &&
      (f.grid->dimension != grid_->dimension ||
       f.grid->points_per_axis != grid_->points_per_axis)) {
    throw std::invalid_argument("forward: field grid does not match transform grid");
  }
  return forward(f.values);
}

Eigen::VectorXd Transform::synthesize(const Eigen::VectorXd& coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != band_->size()) {
    throw std::invalid_argument("synthesize: coefficient count does not match band");
  }
  const int n = band_->dimension;
  const int K = std::max(band_->max_degree, 0);
  std::size_t full = 1;
  for (int d = 0; d < n; ++d) full *= static_cast<std::size_t>(K + 1);

  std::vector<double> buf(full, 0.0);
  for (std::size_t j = 0; j < band_->size(); ++j) {
    buf[tensor_pos_[j]] = coeffs[static_cast<Eigen::Index>(j)];
  }

  // Same contraction pattern with the transposed synthesis table.
  using RowMat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const std::size_t m = static_cast<std::size_t>(grid_->points_per_axis);
  const std::size_t kp1 = static_cast<std::size_t>(K + 1);
  std::vector<double> next;
  for (int d = 0; d < n; ++d) {
    std::size_t left = 1, right = 1;
    for (int q = 0; q < d; ++q) left *= m;
    for (int q = d + 1; q < n; ++q) right *= kp1;
    next.resize(left * m * right);
    for (std::size_t l = 0; l < left; ++l) {
      Eigen::Map<const RowMat> in(buf.data() + l * kp1 * right,
                                  static_cast<Eigen::Index>(kp1),
                                  static_cast<Eigen::Index>(right));
      Eigen::Map<RowMat> out(next.data() + l * m * right, static_cast<Eigen::Index>(m),
                             static_cast<Eigen::Index>(right));
      out.noalias() = synth_.transpose() * in;
    }
    buf.swap(next);
  }
  return Eigen::Map<const Eigen::VectorXd>(buf.data(), static_cast<Eigen::Index>(buf.size()));
}

GridField Transform::inverse(const SpectralCoeffs& c) const {
  if (c.band->dimension != band_->dimension) {
    throw std::invalid_argument("inverse: coefficient dimension does not match grid");
  }
  if (c.band.get() != band_.get() && c.band->lambda_max != band_->lambda_max) {
    throw std::invalid_argument("inverse: coefficient band does not match transform band");
  }
  GridField f;
  f.grid = grid_;
  f.values = synthesize(c.values);
  return f;
}

void Transform::accumulate_synthesis(std::span<const Eigen::Index> positions,
                                     std::span<const double> scaled_coeffs,
                                     Eigen::VectorXd& out) const {
  const int n = band_->dimension;
  const std::size_t count = grid_->count();
  if (static_cast<std::size_t>(out.size()) != count) {
    throw std::invalid_argument("accumulate_synthesis: output size mismatch");
  }
  if (n == 1) {
    for (std::size_t q = 0; q < positions.size(); ++q) {
      const MultiIndex& mu = band_->indices[static_cast<std::size_t>(positions[q])];
      out += scaled_coeffs[q] * synth_.row(mu.components[0]).transpose();
    }
    return;
  }
  const std::size_t m = static_cast<std::size_t>(grid_->points_per_axis);
  if (n == 2) {
    using RowMat =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMat> out_mat(out.data(), static_cast<Eigen::Index>(m),
                               static_cast<Eigen::Index>(m));
    for (std::size_t q = 0; q < positions.size(); ++q) {
      const MultiIndex& mu = band_->indices[static_cast<std::size_t>(positions[q])];
      out_mat.noalias() += scaled_coeffs[q] *
                           (synth_.row(mu.components[0]).transpose() *
                            synth_.row(mu.components[1]));
    }
    return;
  }
  for (std::size_t q = 0; q < positions.size(); ++q) {
    const MultiIndex& mu = band_->indices[static_cast<std::size_t>(positions[q])];
    const double cval = scaled_coeffs[q];
    for (std::size_t i = 0; i < count; ++i) {
      double phi = cval;
      std::size_t rem = i;
      for (int d = n - 1; d >= 0; --d) {
        const std::size_t idx = rem % m;
        rem /= m;
        phi *= synth_(mu.components[static_cast<std::size_t>(d)],
                      static_cast<Eigen::Index>(idx));
      }
      out[static_cast<Eigen::Index>(i)] += phi;
    }
  }
}

SpectralCoeffs forward_transform(const GridField& f, int lambda_max) {
  auto band = Band::make(f.grid->dimension, lambda_max);
  Transform tr(f.grid, band);
  return tr.forward(f);
}

GridField inverse_transform(const SpectralCoeffs& c,
                            std::shared_ptr<const QuadratureGrid> grid) {
  Transform tr(std::move(grid), c.band);
  return tr.inverse(c);
}

SpectralCoeffs project_eigenspace(const SpectralCoeffs& c, int k) {
  SpectralCoeffs out = c;
  for (std::size_t j = 0; j < c.band->size(); ++j) {
    if (c.band->indices[j].eigenvalue() != k) out.values[static_cast<Eigen::Index>(j)] = 0.0;
  }
  return out;
}

SpectralCoeffs apply_multiplier(const SpectralCoeffs& c, const SpectralSymbol& F) {
  SpectralCoeffs out = c;
  for (std::size_t j = 0; j < c.band->size(); ++j) {
    const double s = std::sqrt(c.band->eigenvalues[j]);
    const double v = F(s);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "apply_multiplier: symbol not finite at sqrt(eigenvalue)=" << s << " for index (";
      const MultiIndex& mu = c.band->indices[j];
      for (int d = 0; d < mu.dimension(); ++d) {
        if (d) msg << ",";
        msg << mu.components[static_cast<std::size_t>(d)];
      }
      msg << ")";
      throw std::domain_error(msg.str());
    }
    out.values[static_cast<Eigen::Index>(j)] *= v;
  }
  return out;
}

double positive_power(double x, double lambda) {
  if (x <= 0.0) return 0.0;
  if (lambda == 0.0) return 1.0;
  return std::pow(x, lambda);
}

double riesz_factor(double eigenvalue, double R, double lambda) {
  return positive_power(1.0 - eigenvalue / (R * R), lambda);
}

SpectralSymbol riesz_symbol(double R, double lambda) {
  SpectralSymbol sym;
  sym.evaluator = [R, lambda](double s) { return riesz_factor(s * s, R, lambda); };
  sym.support = std::make_pair(0.0, R);
  sym.sup_bound = 1.0;
  return sym;
}

SpectralCoeffs bochner_riesz(const SpectralCoeffs& c, double R, double lambda) {
  if (!(R > 0.0)) throw std::invalid_argument("bochner_riesz: R must be > 0");
  if (lambda < 0.0) {
    throw std::invalid_argument(
        "bochner_riesz: order must be >= 0 (the means are undefined at the "
        "spectrum for negative order)");
  }
  SpectralCoeffs out = c;
  for (std::size_t j = 0; j < c.band->size(); ++j) {
    out.values[static_cast<Eigen::Index>(j)] *= riesz_factor(c.band->eigenvalues[j], R, lambda);
  }
  return out;
}

void export_coeffs_csv(const SpectralCoeffs& c, std::ostream& os) {
  const int n = c.band->dimension;
  for (int d = 0; d < n; ++d) os << "mu_" << (d + 1) << ",";
  os << "value\n";
  os.precision(17);
  for (std::size_t j = 0; j < c.band->size(); ++j) {
    const MultiIndex& mu = c.band->indices[j];
    for (int d = 0; d < n; ++d) os << mu.components[static_cast<std::size_t>(d)] << ",";
    os << c.values[static_cast<Eigen::Index>(j)] << "\n";
  }
}

SpectralCoeffs import_coeffs_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("coefficient CSV: empty input");
  // header: mu_1,...,mu_n,value
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  if (cols.size() < 2 || cols.back() != "value") {
    throw std::invalid_argument("coefficient CSV: header must be mu_1..mu_n,value");
  }
  const int n = static_cast<int>(cols.size()) - 1;
  for (int d = 0; d < n; ++d) {
    if (cols[static_cast<std::size_t>(d)] != "mu_" + std::to_string(d + 1)) {
      throw std::invalid_argument("coefficient CSV: bad header column " +
                                  cols[static_cast<std::size_t>(d)]);
    }
  }

  std::vector<MultiIndex> entries;
  std::vector<double> vals;
  int max_eig = n;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    MultiIndex mu;
    for (int d = 0; d < n; ++d) {
      if (!std::getline(ss, tok, ',')) {
        throw std::invalid_argument("coefficient CSV: short row: " + line);
      }
      const int v = std::stoi(tok);
      if (v < 0) throw std::invalid_argument("coefficient CSV: negative index in row: " + line);
      mu.components.push_back(v);
    }
    if (!std::getline(ss, tok, ',')) {
      throw std::invalid_argument("coefficient CSV: missing value in row: " + line);
    }
    entries.push_back(mu);
    vals.push_back(std::stod(tok));
    max_eig = std::max(max_eig, entries.back().eigenvalue());
  }

  SpectralCoeffs out;
  out.band = Band::make(n, max_eig);
  out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.band->size()));
  for (std::size_t r = 0; r < entries.size(); ++r) {
    bool found = false;
    for (std::size_t j = 0; j < out.band->size(); ++j) {
      if (out.band->indices[j] == entries[r]) {
        out.values[static_cast<Eigen::Index>(j)] = vals[r];
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("coefficient CSV: index outside band");
  }
  return out;
}

}  // namespace hsc
