#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace marsense {

struct Dims {
  int width = 0;
  int height = 0;

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Real-valued grayscale image, row-major. Intensities are nominally in
/// [0, 255] but intermediate results (solver iterates, gradients) may leave
/// that range; only finiteness is enforced.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> intensities);

  int width() const { return dims_.width; }
  int height() const { return dims_.height; }
  Dims dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator()(int row, int col) const { return data_[index(row, col)]; }
  double& operator()(int row, int col) { return data_[index(row, col)]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> pixels() const { return data_; }
  std::span<double> pixels() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(dims_.width) + static_cast<std::size_t>(col);
  }

  GrayImage transposed() const;
  GrayImage clamped(double lo = 0.0, double hi = 255.0) const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  Dims dims_{};
  std::vector<double> data_;
};

void require_same_dims(Dims a, Dims b, const char* what);

}  // namespace marsense
