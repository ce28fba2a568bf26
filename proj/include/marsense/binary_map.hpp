#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "marsense/image.hpp"

namespace marsense {

/// 0/1 grid used for edge maps and sampling patterns.
class BinaryMap {
 public:
  BinaryMap() = default;
  BinaryMap(int width, int height, bool fill = false);
  BinaryMap(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return dims_.width; }
  int height() const { return dims_.height; }
  Dims dims() const { return dims_; }
  std::size_t size() const { return bits_.size(); }

  bool operator()(int row, int col) const { return bits_[index(row, col)] != 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(int row, int col, bool v = true) { bits_[index(row, col)] = v ? 1 : 0; }
  void set(std::size_t i, bool v = true) { bits_[i] = v ? 1 : 0; }

  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(dims_.width) + static_cast<std::size_t>(col);
  }

  std::size_t popcount() const;
  bool empty_set() const { return popcount() == 0; }
  /// Every set bit of *this is also set in `other`.
  bool subset_of(const BinaryMap& other) const;
  BinaryMap operator|(const BinaryMap& other) const;
  BinaryMap operator&(const BinaryMap& other) const;
  /// Set difference: bits of *this not in `other`.
  BinaryMap minus(const BinaryMap& other) const;
  BinaryMap complement() const;
  BinaryMap transposed() const;
  /// Indices of set bits in ascending (row-major) order.
  std::vector<std::size_t> support() const;

  /// Values {0, 255} as an image, for viewing and PGM export.
  GrayImage to_image() const;

  friend bool operator==(const BinaryMap&, const BinaryMap&) = default;

 private:
  Dims dims_{};
  std::vector<std::uint8_t> bits_;
};

}  // namespace marsense
