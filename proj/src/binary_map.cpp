#include "marsense/binary_map.hpp"

#include <algorithm>
#include <string>

#include "marsense/errors.hpp"

namespace marsense {

BinaryMap::BinaryMap(int width, int height, bool fill) : dims_{width, height} {
  if (width < 1 || height < 1) throw UsageError("binary map dimensions must be positive");
  bits_.assign(dims_.size(), fill ? 1 : 0);
}

BinaryMap::BinaryMap(int width, int height, std::vector<std::uint8_t> bits) : dims_{width, height}, bits_(std::move(bits)) {
  if (width < 1 || height < 1) throw UsageError("binary map dimensions must be positive");
  if (bits_.size() != dims_.size()) throw DimensionMismatch("bit count does not match binary map dimensions");
  if (!std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b <= 1; })) {
    throw DataError("binary map entries must be 0 or 1");
  }
}

std::size_t BinaryMap::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BinaryMap::subset_of(const BinaryMap& other) const {
  require_same_dims(dims_, other.dims_, "subset_of");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return false;
  return true;
}

BinaryMap BinaryMap::operator|(const BinaryMap& other) const {
  require_same_dims(dims_, other.dims_, "union");
  BinaryMap out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] |= other.bits_[i];
  return out;
}

BinaryMap BinaryMap::operator&(const BinaryMap& other) const {
  require_same_dims(dims_, other.dims_, "intersection");
  BinaryMap out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] &= other.bits_[i];
  return out;
}

BinaryMap BinaryMap::minus(const BinaryMap& other) const {
  require_same_dims(dims_, other.dims_, "difference");
  BinaryMap out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = (bits_[i] && !other.bits_[i]) ? 1 : 0;
  return out;
}

BinaryMap BinaryMap::complement() const {
  BinaryMap out = *this;
  for (auto& b : out.bits_) b ^= 1;
  return out;
}

BinaryMap BinaryMap::transposed() const {
  BinaryMap out(height(), width());
  for (int r = 0; r < height(); ++r)
    for (int c = 0; c < width(); ++c) out.set(c, r, (*this)(r, c));
  return out;
}

std::vector<std::size_t> BinaryMap::support() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) idx.push_back(i);
  return idx;
}

GrayImage BinaryMap::to_image() const {
  GrayImage img(width(), height());
  for (std::size_t i = 0; i < bits_.size(); ++i) img[i] = bits_[i] ? 255.0 : 0.0;
  return img;
}

}  // namespace marsense
