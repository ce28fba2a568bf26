#include "marsense/metrics.hpp"

#include <cmath>
#include <vector>

#include "marsense/errors.hpp"

namespace marsense {

namespace {

std::vector<double> gaussian_taps(int window, double sigma) {
  std::vector<double> taps(static_cast<std::size_t>(window));
  const double center = (window - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - center;
    taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += taps[static_cast<std::size_t>(i)];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable "valid" filtering: output is (h - w + 1) x (w_img - w + 1).
std::vector<double> filter_valid(const std::vector<double>& src, int width, int height, const std::vector<double>& taps) {
  const int win = static_cast<int>(taps.size());
  const int ow = width - win + 1;
  const int oh = height - win + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int k = 0; k < win; ++k) acc += taps[static_cast<std::size_t>(k)] * src[static_cast<std::size_t>(r) * width + c + k];
      rows[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * static_cast<std::size_t>(oh));
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int k = 0; k < win; ++k) acc += taps[static_cast<std::size_t>(k)] * rows[static_cast<std::size_t>(r + k) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  return out;
}

}  // namespace

double mse(const GrayImage& reference, const GrayImage& test) {
  require_same_dims(reference.dims(), test.dims(), "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - test[i];
    acc += d * d;
  }
  return acc / static_cast<double>(reference.size());
}

QualityReport psnr(const GrayImage& reference, const GrayImage& test) {
  QualityReport q;
  q.mse = mse(reference, test);
  q.psnr_db = q.mse > 0.0 ? std::min(kPsnrCapDb, 10.0 * std::log10(kPeakIntensity * kPeakIntensity / q.mse)) : kPsnrCapDb;
  return q;
}

double ssim(const GrayImage& reference, const GrayImage& test, const SsimParams& params) {
  require_same_dims(reference.dims(), test.dims(), "ssim");
  if (reference.width() < params.window || reference.height() < params.window) {
    throw DimensionMismatch("ssim: image " + std::to_string(reference.width()) + "x" +
                            std::to_string(reference.height()) + " is smaller than the " +
                            std::to_string(params.window) + "x" + std::to_string(params.window) + " window");
  }
  const int w = reference.width();
  const int h = reference.height();
  const auto taps = gaussian_taps(params.window, params.sigma);

  const auto& x = reference.data();
  const auto& y = test.data();
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter_valid(x, w, h, taps);
  const auto mu_y = filter_valid(y, w, h, taps);
  const auto e_xx = filter_valid(xx, w, h, taps);
  const auto e_yy = filter_valid(yy, w, h, taps);
  const auto e_xy = filter_valid(xy, w, h, taps);

  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i], my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mu_x.size());
}

QualityReport evaluate(const GrayImage& reference, const GrayImage& test) {
  QualityReport q = psnr(reference, test);
  q.ssim = ssim(reference, test);
  return q;
}

}  // namespace marsense
