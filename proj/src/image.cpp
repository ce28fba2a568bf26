#include "marsense/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "marsense/errors.hpp"

namespace marsense {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw UsageError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill) : dims_{width, height} {
  check_dims(width, height);
  if (!std::isfinite(fill)) throw DataError("non-finite fill value");
  data_.assign(dims_.size(), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> intensities)
    : dims_{width, height}, data_(std::move(intensities)) {
  check_dims(width, height);
  if (data_.size() != dims_.size()) {
    throw DimensionMismatch("intensity count " + std::to_string(data_.size()) + " does not match " +
                            std::to_string(width) + "x" + std::to_string(height));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("image contains non-finite intensities");
  }
}

GrayImage GrayImage::transposed() const {
  GrayImage out(height(), width());
  for (int r = 0; r < height(); ++r)
    for (int c = 0; c < width(); ++c) out(c, r) = (*this)(r, c);
  return out;
}

GrayImage GrayImage::clamped(double lo, double hi) const {
  GrayImage out = *this;
  for (double& v : out.data_) v = std::clamp(v, lo, hi);
  return out;
}

void require_same_dims(Dims a, Dims b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch " + std::to_string(a.width) + "x" +
                            std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                            std::to_string(b.height));
  }
}

}  // namespace marsense
