#include "marsense/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "marsense/errors.hpp"

namespace marsense {

namespace {

struct Ellipse {
  double intensity;
  double semi_x;
  double semi_y;
  double center_x;
  double center_y;
  double angle_deg;
};

// Toft's modified intensities; geometry is the classic Shepp-Logan table.
constexpr std::array<Ellipse, 10> kModifiedSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

void require_side(int n, const char* what) {
  if (n < 16) throw UsageError(std::string(what) + ": side length must be at least 16, got " + std::to_string(n));
}

}  // namespace

GrayImage shepp_logan(int n) {
  require_side(n, "shepp_logan");
  GrayImage img(n, n);
  const double half = (n - 1) / 2.0;
  for (const auto& e : kModifiedSheppLogan) {
    const double phi = e.angle_deg * std::numbers::pi / 180.0;
    const double cs = std::cos(phi), sn = std::sin(phi);
    for (int r = 0; r < n; ++r) {
      // row 0 is the top of the head (y = +1)
      const double y = (half - r) / half;
      for (int c = 0; c < n; ++c) {
        const double x = (c - half) / half;
        const double dx = x - e.center_x, dy = y - e.center_y;
        const double u = (dx * cs + dy * sn) / e.semi_x;
        const double v = (-dx * sn + dy * cs) / e.semi_y;
        if (u * u + v * v <= 1.0) img(r, c) += e.intensity;
      }
    }
  }
  // Table intensities are multiples of 0.1; snapping removes summation-order noise
  // so that levels landing on .5 after scaling round the same way everywhere.
  for (double& v : img.pixels()) v = std::round(v * 10.0) / 10.0;
  const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
  const double lo_v = *lo, span = *hi - *lo;
  for (double& v : img.pixels()) v = std::round((v - lo_v) / span * 255.0);
  return img;
}

GrayImage ball_image(int n) {
  require_side(n, "ball_image");
  GrayImage img(n, n);
  const double center = (n - 1) / 2.0;
  const double radius = n / 4.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double dr = r - center, dc = c - center;
      img(r, c) = dr * dr + dc * dc <= radius * radius ? 255.0 : 0.0;
    }
  return img;
}

GrayImage downsample_decimate(const GrayImage& img, int factor) {
  if (factor < 1) throw UsageError("downsample factor must be >= 1, got " + std::to_string(factor));
  const int ow = (img.width() + factor - 1) / factor;
  const int oh = (img.height() + factor - 1) / factor;
  GrayImage out(ow, oh);
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) out(r, c) = img(r * factor, c * factor);
  return out;
}

}  // namespace marsense
