#include "marsense/edge_prior.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "marsense/errors.hpp"

namespace marsense {

MorphOpKind morph_from_string(const std::string& name) {
  if (name == "none") return MorphOpKind::None;
  if (name == "dilate") return MorphOpKind::Dilate;
  if (name == "close") return MorphOpKind::Close;
  throw UsageError("unknown morphology '" + name + "' (expected none, dilate or close)");
}

std::string to_string(MorphOpKind kind) {
  switch (kind) {
    case MorphOpKind::None: return "none";
    case MorphOpKind::Dilate: return "dilate";
    case MorphOpKind::Close: return "close";
  }
  return "none";
}

StructuringElement StructuringElement::square(int radius) {
  if (radius < 0) throw UsageError("structuring element radius must be >= 0");
  std::vector<std::pair<int, int>> offsets;
  for (int dr = -radius; dr <= radius; ++dr)
    for (int dc = -radius; dc <= radius; ++dc) offsets.emplace_back(dr, dc);
  return StructuringElement(std::move(offsets));
}

StructuringElement::StructuringElement(std::vector<std::pair<int, int>> offsets) : offsets_(std::move(offsets)) {
  if (std::find(offsets_.begin(), offsets_.end(), std::pair{0, 0}) == offsets_.end()) {
    throw UsageError("structuring element must contain the origin");
  }
}

GrayImage sobel_magnitude(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3) throw DimensionMismatch("sobel_magnitude: image smaller than 3x3 kernel");
  const int w = img.width(), h = img.height();
  auto px = [&](int r, int c) { return img(std::clamp(r, 0, h - 1), std::clamp(c, 0, w - 1)); };
  GrayImage mag(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double gx = (px(r - 1, c + 1) + 2.0 * px(r, c + 1) + px(r + 1, c + 1)) -
                        (px(r - 1, c - 1) + 2.0 * px(r, c - 1) + px(r + 1, c - 1));
      const double gy = (px(r + 1, c - 1) + 2.0 * px(r + 1, c) + px(r + 1, c + 1)) -
                        (px(r - 1, c - 1) + 2.0 * px(r - 1, c) + px(r - 1, c + 1));
      mag(r, c) = std::sqrt(gx * gx + gy * gy);
    }
  return mag;
}

std::vector<std::size_t> rank_by_magnitude(const GrayImage& mag) {
  std::vector<std::size_t> order;
  order.reserve(mag.size());
  for (std::size_t i = 0; i < mag.size(); ++i)
    if (mag[i] > 0.0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
  return order;
}

BinaryMap threshold_top_k(const GrayImage& mag, std::size_t k) {
  if (k > mag.size()) {
    throw UsageError("threshold_top_k: budget " + std::to_string(k) + " exceeds pixel count " + std::to_string(mag.size()));
  }
  const auto order = rank_by_magnitude(mag);
  BinaryMap out(mag.width(), mag.height());
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) out.set(order[i]);
  return out;
}

BinaryMap dilate(const BinaryMap& map, const StructuringElement& se) {
  BinaryMap out(map.width(), map.height());
  for (int r = 0; r < map.height(); ++r)
    for (int c = 0; c < map.width(); ++c) {
      if (!map(r, c)) continue;
      for (auto [dr, dc] : se.offsets()) {
        const int rr = r + dr, cc = c + dc;
        if (rr >= 0 && rr < map.height() && cc >= 0 && cc < map.width()) out.set(rr, cc);
      }
    }
  return out;
}

BinaryMap erode(const BinaryMap& map, const StructuringElement& se) {
  BinaryMap out(map.width(), map.height());
  for (int r = 0; r < map.height(); ++r)
    for (int c = 0; c < map.width(); ++c) {
      bool keep = true;
      for (auto [dr, dc] : se.offsets()) {
        // reflected element; for symmetric elements this is the same set
        const int rr = r - dr, cc = c - dc;
        if (rr < 0 || rr >= map.height() || cc < 0 || cc >= map.width() || !map(rr, cc)) {
          keep = false;
          break;
        }
      }
      if (keep) out.set(r, c);
    }
  return out;
}

BinaryMap close(const BinaryMap& map, const StructuringElement& se) { return erode(dilate(map, se), se); }

BinaryMap apply_morph(const BinaryMap& map, MorphOpKind kind, const StructuringElement& se) {
  switch (kind) {
    case MorphOpKind::None: return map;
    case MorphOpKind::Dilate: return dilate(map, se);
    case MorphOpKind::Close: return close(map, se);
  }
  return map;
}

namespace {

constexpr double kKeysA = -0.5;

double keys_kernel(double t) {
  t = std::abs(t);
  if (t <= 1.0) return ((kKeysA + 2.0) * t - (kKeysA + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((kKeysA * t - 5.0 * kKeysA) * t + 8.0 * kKeysA) * t - 4.0 * kKeysA;
  return 0.0;
}

// Samples along one axis with Keys' boundary extension
// f(-1) = 3 f(0) - 3 f(1) + f(2), mirrored at the far end, which keeps the
// interpolant exact for quadratics up to the border.
template <class Get>
double extended(const Get& get, int n, int k) {
  if (k >= 0 && k < n) return get(k);
  if (k == -1) return 3.0 * get(0) - 3.0 * get(1) + get(2);
  if (k == n) return 3.0 * get(n - 1) - 3.0 * get(n - 2) + get(n - 3);
  // k == n + 1
  return 3.0 * extended(get, n, n) - 3.0 * get(n - 1) + get(n - 2);
}

struct Taps {
  int base = 0;
  std::array<double, 4> weights{};
};

Taps taps_for(int out_index, int factor) {
  const int base = out_index / factor;
  const double frac = static_cast<double>(out_index % factor) / factor;
  Taps t;
  t.base = base;
  for (int k = 0; k < 4; ++k) t.weights[static_cast<std::size_t>(k)] = keys_kernel(frac - (k - 1));
  return t;
}

}  // namespace

GrayImage bicubic_upsample(const GrayImage& low, int factor) {
  if (factor < 1) throw UsageError("upsample factor must be >= 1, got " + std::to_string(factor));
  if (low.width() < 4 || low.height() < 4) throw DimensionMismatch("bicubic_upsample: source must be at least 4x4");
  const int lw = low.width(), lh = low.height();
  const int ow = lw * factor, oh = lh * factor;

  // horizontal pass onto (lh x ow), then vertical onto (oh x ow)
  GrayImage horiz(ow, lh);
  for (int r = 0; r < lh; ++r) {
    auto get = [&](int k) { return low(r, k); };
    for (int c = 0; c < ow; ++c) {
      const Taps t = taps_for(c, factor);
      if (c % factor == 0) {
        horiz(r, c) = low(r, t.base);
        continue;
      }
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += t.weights[static_cast<std::size_t>(k)] * extended(get, lw, t.base - 1 + k);
      horiz(r, c) = acc;
    }
  }
  GrayImage out(ow, oh);
  for (int c = 0; c < ow; ++c) {
    auto get = [&](int k) { return horiz(k, c); };
    for (int r = 0; r < oh; ++r) {
      const Taps t = taps_for(r, factor);
      if (r % factor == 0) {
        out(r, c) = horiz(t.base, c);
        continue;
      }
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += t.weights[static_cast<std::size_t>(k)] * extended(get, lh, t.base - 1 + k);
      out(r, c) = acc;
    }
  }
  return out.clamped();
}

BinaryMap predict_edge_map(const GrayImage& low, int factor, MorphOpKind morph, std::size_t budget,
                           const StructuringElement& se) {
  const GrayImage predicted = bicubic_upsample(low, factor);
  const GrayImage mag = sobel_magnitude(predicted);
  return apply_morph(threshold_top_k(mag, budget), morph, se);
}

}  // namespace marsense
