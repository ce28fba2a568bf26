#include "marsense/baseline_cs.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "marsense/errors.hpp"

namespace marsense {

namespace {

bool is_pow2(int v) { return v >= 1 && (v & (v - 1)) == 0; }

void require_pow2(Dims d, const char* what) {
  if (!is_pow2(d.width) || !is_pow2(d.height)) {
    throw DimensionMismatch(std::string(what) + ": dimensions must be powers of two, got " + std::to_string(d.width) +
                            "x" + std::to_string(d.height));
  }
}

// One analysis step on `len` elements spaced by `stride`.
void haar_step(double* data, int len, std::size_t stride, std::vector<double>& tmp) {
  const double s = 1.0 / std::numbers::sqrt2;
  const int half = len / 2;
  tmp.resize(static_cast<std::size_t>(len));
  for (int i = 0; i < half; ++i) {
    const double a = data[static_cast<std::size_t>(2 * i) * stride];
    const double b = data[static_cast<std::size_t>(2 * i + 1) * stride];
    tmp[static_cast<std::size_t>(i)] = (a + b) * s;
    tmp[static_cast<std::size_t>(half + i)] = (a - b) * s;
  }
  for (int i = 0; i < len; ++i) data[static_cast<std::size_t>(i) * stride] = tmp[static_cast<std::size_t>(i)];
}

void haar_unstep(double* data, int len, std::size_t stride, std::vector<double>& tmp) {
  const double s = 1.0 / std::numbers::sqrt2;
  const int half = len / 2;
  tmp.resize(static_cast<std::size_t>(len));
  for (int i = 0; i < half; ++i) {
    const double a = data[static_cast<std::size_t>(i) * stride];
    const double d = data[static_cast<std::size_t>(half + i) * stride];
    tmp[static_cast<std::size_t>(2 * i)] = (a + d) * s;
    tmp[static_cast<std::size_t>(2 * i + 1)] = (a - d) * s;
  }
  for (int i = 0; i < len; ++i) data[static_cast<std::size_t>(i) * stride] = tmp[static_cast<std::size_t>(i)];
}

// Sizes of the approximation band at each level, finest first.
std::vector<Dims> pyramid_levels(Dims d) {
  std::vector<Dims> levels;
  Dims cur = d;
  while (cur.width > 1 || cur.height > 1) {
    levels.push_back(cur);
    cur = {cur.width > 1 ? cur.width / 2 : 1, cur.height > 1 ? cur.height / 2 : 1};
  }
  return levels;
}

void forward_in_place(std::vector<double>& v, Dims d) {
  std::vector<double> tmp;
  const auto w = static_cast<std::size_t>(d.width);
  for (const Dims cur : pyramid_levels(d)) {
    if (cur.width > 1)
      for (int r = 0; r < cur.height; ++r) haar_step(&v[static_cast<std::size_t>(r) * w], cur.width, 1, tmp);
    if (cur.height > 1)
      for (int c = 0; c < cur.width; ++c) haar_step(&v[static_cast<std::size_t>(c)], cur.height, w, tmp);
  }
}

void inverse_in_place(std::vector<double>& v, Dims d) {
  std::vector<double> tmp;
  const auto w = static_cast<std::size_t>(d.width);
  auto levels = pyramid_levels(d);
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    const Dims cur = *it;
    if (cur.height > 1)
      for (int c = 0; c < cur.width; ++c) haar_unstep(&v[static_cast<std::size_t>(c)], cur.height, w, tmp);
    if (cur.width > 1)
      for (int r = 0; r < cur.height; ++r) haar_unstep(&v[static_cast<std::size_t>(r) * w], cur.width, 1, tmp);
  }
}

}  // namespace

std::vector<std::size_t> SparseCoefficients::support(double tol) const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::abs(values[i]) > tol) s.push_back(i);
  return s;
}

SparseCoefficients haar2_forward(const GrayImage& img) {
  require_pow2(img.dims(), "haar2_forward");
  SparseCoefficients out{img.dims(), img.data()};
  forward_in_place(out.values, img.dims());
  return out;
}

GrayImage haar2_inverse(const SparseCoefficients& coeffs) {
  require_pow2(coeffs.dims, "haar2_inverse");
  if (coeffs.values.size() != coeffs.dims.size()) throw DimensionMismatch("haar2_inverse: coefficient count mismatch");
  std::vector<double> v = coeffs.values;
  inverse_in_place(v, coeffs.dims);
  return GrayImage(coeffs.dims.width, coeffs.dims.height, std::move(v));
}

DenseSensingMatrix::DenseSensingMatrix(int rows, int cols, std::uint64_t seed) : seed_(seed) {
  if (rows < 1 || cols < 1) throw UsageError("sensing matrix dimensions must be positive");
  if (rows > cols) throw UsageError("sensing matrix must not have more rows than columns");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  entries_.resize(rows, cols);
  // row-major fill so the stream order does not depend on Eigen's storage order
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) entries_(r, c) = normal(rng) * scale;
}

Eigen::VectorXd gaussian_measure(const Eigen::VectorXd& x, const DenseSensingMatrix& phi) {
  if (x.size() != phi.cols()) {
    throw DimensionMismatch("gaussian_measure: signal length " + std::to_string(x.size()) + " vs matrix columns " +
                            std::to_string(phi.cols()));
  }
  return phi.entries() * x;
}

Eigen::VectorXd gaussian_measure(const GrayImage& img, const DenseSensingMatrix& phi) {
  return gaussian_measure(Eigen::Map<const Eigen::VectorXd>(img.data().data(), static_cast<Eigen::Index>(img.size())), phi);
}

Eigen::MatrixXd haar_dictionary(const DenseSensingMatrix& phi, Dims dims) {
  require_pow2(dims, "haar_dictionary");
  if (static_cast<std::size_t>(phi.cols()) != dims.size()) throw DimensionMismatch("haar_dictionary: size mismatch");
  Eigen::MatrixXd a(phi.rows(), phi.cols());
  std::vector<double> row(dims.size());
  for (int i = 0; i < phi.rows(); ++i) {
    for (int j = 0; j < phi.cols(); ++j) row[static_cast<std::size_t>(j)] = phi.entries()(i, j);
    forward_in_place(row, dims);
    for (int j = 0; j < phi.cols(); ++j) a(i, j) = row[static_cast<std::size_t>(j)];
  }
  return a;
}

OmpResult omp(const Eigen::VectorXd& y, const DenseSensingMatrix& phi, Dims dims, const OmpOptions& options) {
  if (y.size() != phi.rows()) throw DimensionMismatch("omp: measurement length does not match the sensing matrix");
  if (options.max_sparsity < 0 || options.max_sparsity > phi.rows()) {
    throw UsageError("omp: max_sparsity must lie in [0, rows]");
  }
  const Eigen::MatrixXd dict = haar_dictionary(phi, dims);
  const Eigen::Index n = dict.cols();
  const Eigen::VectorXd col_norms = dict.colwise().norm().transpose();

  OmpResult res;
  const double y_norm = y.norm();
  res.residual_norms.push_back(y_norm);
  Eigen::VectorXd residual = y;
  Eigen::VectorXd coef_active;
  std::vector<char> blocked(static_cast<std::size_t>(n), 0);

  // Cholesky factor of the active Gram matrix, grown one row at a time.
  Eigen::MatrixXd chol(0, 0);
  Eigen::MatrixXd active(y.size(), 0);
  Eigen::VectorXd z;  // chol^-1 * active^T * y

  const auto k_max = static_cast<std::size_t>(options.max_sparsity == 0 ? phi.rows() : options.max_sparsity);
  while (res.support.size() < k_max && residual.norm() > options.residual_tol * y_norm && y_norm > 0.0) {
    const Eigen::VectorXd corr = dict.transpose() * residual;
    Eigen::Index best = -1;
    double best_score = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (blocked[static_cast<std::size_t>(j)] || col_norms(j) == 0.0) continue;
      const double score = std::abs(corr(j)) / col_norms(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0 || best_score <= 1e-14 * y_norm) break;
    blocked[static_cast<std::size_t>(best)] = 1;

    const Eigen::VectorXd atom = dict.col(best);
    const auto k = static_cast<Eigen::Index>(res.support.size());
    Eigen::VectorXd w = k > 0 ? Eigen::VectorXd(chol.triangularView<Eigen::Lower>().solve(active.transpose() * atom))
                              : Eigen::VectorXd();
    const double atom_sq = atom.squaredNorm();
    const double pivot = atom_sq - (k > 0 ? w.squaredNorm() : 0.0);
    if (pivot <= 1e-10 * atom_sq) {
      res.skipped_atoms.push_back(static_cast<std::size_t>(best));
      continue;
    }
    const double diag = std::sqrt(pivot);
    chol.conservativeResize(k + 1, k + 1);
    if (k > 0) {
      chol.row(k).head(k) = w.transpose();
      chol.col(k).head(k).setZero();
    }
    chol(k, k) = diag;
    active.conservativeResize(Eigen::NoChange, k + 1);
    active.col(k) = atom;
    z.conservativeResize(k + 1);
    z(k) = (atom.dot(y) - (k > 0 ? w.dot(z.head(k)) : 0.0)) / diag;
    res.support.push_back(static_cast<std::size_t>(best));

    if (pivot < 1e-6 * atom_sq) {
      // ill-conditioned update: refit from scratch with a pivoted QR
      coef_active = active.colPivHouseholderQr().solve(y);
    } else {
      coef_active = chol.triangularView<Eigen::Lower>().transpose().solve(z);
    }
    const Eigen::VectorXd next = y - active * coef_active;
    const double rn = next.norm();
    if (!(rn < res.residual_norms.back())) {
      // no progress: drop the atom again and stop
      res.support.pop_back();
      chol.conservativeResize(k, k);
      active.conservativeResize(Eigen::NoChange, k);
      z.conservativeResize(k);
      coef_active = k > 0 ? Eigen::VectorXd(chol.triangularView<Eigen::Lower>().transpose().solve(z)) : Eigen::VectorXd();
      break;
    }
    residual = next;
    res.residual_norms.push_back(rn);
    ++res.iterations;
  }

  res.coefficients.dims = dims;
  res.coefficients.values.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < res.support.size(); ++i)
    res.coefficients.values[res.support[i]] = coef_active(static_cast<Eigen::Index>(i));
  res.image = haar2_inverse(res.coefficients);
  return res;
}

}  // namespace marsense
