#pragma once

#include "marsense/image.hpp"

namespace marsense {

/// PSNR reported for identical images, where the true value is infinite.
inline constexpr double kPsnrCapDb = 100.0;
inline constexpr double kPeakIntensity = 255.0;

struct QualityReport {
  double mse = 0.0;
  double psnr_db = kPsnrCapDb;
  double ssim = 1.0;
};

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = kPeakIntensity;
};

double mse(const GrayImage& reference, const GrayImage& test);

/// Fills mse and psnr_db; ssim is left at its default.
QualityReport psnr(const GrayImage& reference, const GrayImage& test);

/// Mean single-scale SSIM over all window positions fully inside the image.
double ssim(const GrayImage& reference, const GrayImage& test, const SsimParams& params = {});

QualityReport evaluate(const GrayImage& reference, const GrayImage& test);

}  // namespace marsense
