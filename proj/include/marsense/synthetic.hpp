#pragma once

#include "marsense/image.hpp"

namespace marsense {

/// Modified Shepp-Logan head phantom, n x n, rescaled so the darkest region is
/// 0 and the brightest 255, rounded to whole intensity levels.
GrayImage shepp_logan(int n);

/// Bright disk of radius n/4 centred in an n x n dark field.
GrayImage ball_image(int n);

/// Keeps every factor-th pixel starting at (0, 0); output dims are ceil(dims / factor).
GrayImage downsample_decimate(const GrayImage& img, int factor);

}  // namespace marsense
