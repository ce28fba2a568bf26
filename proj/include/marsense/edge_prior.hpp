#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "marsense/binary_map.hpp"
#include "marsense/image.hpp"

namespace marsense {

enum class MorphOpKind { None, Dilate, Close };

MorphOpKind morph_from_string(const std::string& name);
std::string to_string(MorphOpKind kind);

/// Flat structuring element given as (drow, dcol) offsets. Always contains the origin.
class StructuringElement {
 public:
  /// Full (2r+1) x (2r+1) square; radius 1 is the default 3x3 element.
  static StructuringElement square(int radius = 1);
  explicit StructuringElement(std::vector<std::pair<int, int>> offsets);

  const std::vector<std::pair<int, int>>& offsets() const { return offsets_; }

 private:
  std::vector<std::pair<int, int>> offsets_;
};

/// Sobel gradient magnitude with edge-replicated borders.
GrayImage sobel_magnitude(const GrayImage& img);

/// Pixel indices with nonzero magnitude, strongest first, ties by ascending index.
std::vector<std::size_t> rank_by_magnitude(const GrayImage& mag);

/// Marks the k strongest pixels. Zero-magnitude pixels are never selected, so
/// the popcount is min(k, number of nonzero magnitudes).
BinaryMap threshold_top_k(const GrayImage& mag, std::size_t k);

/// Outside the map counts as 0 for both operators.
BinaryMap dilate(const BinaryMap& map, const StructuringElement& se = StructuringElement::square());
BinaryMap erode(const BinaryMap& map, const StructuringElement& se = StructuringElement::square());
BinaryMap close(const BinaryMap& map, const StructuringElement& se = StructuringElement::square());
BinaryMap apply_morph(const BinaryMap& map, MorphOpKind kind, const StructuringElement& se = StructuringElement::square());

/// Keys cubic convolution (a = -0.5) onto a grid `factor` times finer.
/// Output pixel (i, j) samples the source at (i / factor, j / factor), so
/// grid-aligned outputs reproduce the source exactly. Values are clamped to [0, 255].
GrayImage bicubic_upsample(const GrayImage& low, int factor);

/// morph(threshold_top_k(sobel(bicubic_upsample(low, factor)), budget)).
BinaryMap predict_edge_map(const GrayImage& low, int factor, MorphOpKind morph, std::size_t budget,
                           const StructuringElement& se = StructuringElement::square());

}  // namespace marsense
