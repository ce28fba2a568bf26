#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "marsense/image.hpp"

namespace marsense {

/// Haar coefficients laid out as a Mallat pyramid in an image-shaped array.
struct SparseCoefficients {
  Dims dims{};
  std::vector<double> values;

  std::vector<std::size_t> support(double tol = 0.0) const;
};

/// Orthonormal 2D Haar analysis (rows then columns, recursing on the
/// approximation band). Both dimensions must be powers of two.
SparseCoefficients haar2_forward(const GrayImage& img);
GrayImage haar2_inverse(const SparseCoefficients& coeffs);

/// Gaussian projection matrix: iid N(0, 1) entries scaled by 1/sqrt(rows).
class DenseSensingMatrix {
 public:
  DenseSensingMatrix(int rows, int cols, std::uint64_t seed);

  int rows() const { return static_cast<int>(entries_.rows()); }
  int cols() const { return static_cast<int>(entries_.cols()); }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
  std::uint64_t seed_;
};

/// y = phi * x.
Eigen::VectorXd gaussian_measure(const Eigen::VectorXd& x, const DenseSensingMatrix& phi);
Eigen::VectorXd gaussian_measure(const GrayImage& img, const DenseSensingMatrix& phi);

struct OmpOptions {
  /// Atom cap; 0 allows up to one atom per measurement.
  int max_sparsity = 0;
  /// Stop once ||residual|| <= residual_tol * ||y||.
  double residual_tol = 1e-6;
};

struct OmpResult {
  GrayImage image;
  SparseCoefficients coefficients;
  /// Selected atoms in selection order.
  std::vector<std::size_t> support;
  /// residual_norms[0] = ||y||; one entry per accepted atom afterwards.
  std::vector<double> residual_norms;
  /// Atoms rejected because they made the active set rank deficient.
  std::vector<std::size_t> skipped_atoms;
  int iterations = 0;
};

/// Orthogonal matching pursuit over the dictionary phi * H^-1, where H is the
/// 2D Haar transform on images of size `dims`.
OmpResult omp(const Eigen::VectorXd& y, const DenseSensingMatrix& phi, Dims dims, const OmpOptions& options);

/// phi * H^-1, one row per measurement.
Eigen::MatrixXd haar_dictionary(const DenseSensingMatrix& phi, Dims dims);

}  // namespace marsense
