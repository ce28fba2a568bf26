#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "marsense/binary_map.hpp"
#include "marsense/image.hpp"
#include "marsense/mask_builder.hpp"

namespace marsense {

struct TvConfig {
  double alpha = 8.0;
  double eps_tv = 2.55;
  int max_iters = 300;
  /// Stop once ||grad|| <= grad_tol * ||grad at the initial estimate||.
  double grad_tol = 1e-4;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int restart_every = 50;

  void validate() const;
};

enum class InitMode { MeanFill, ZeroFill, BicubicFill };

InitMode init_mode_from_string(const std::string& name);

struct RecoveryResult {
  GrayImage image;
  int iterations = 0;
  /// objective_trace[0] is the initial estimate; one entry per accepted step after that.
  std::vector<double> objective_trace;
  std::vector<double> grad_norm_trace;
  std::vector<double> step_trace;
  bool converged = false;
  double final_grad_norm = 0.0;
};

/// S* g: measurement values at their positions, zero elsewhere.
GrayImage scatter_adjoint(const Measurements& meas);

/// Sum over pixels of sqrt(Dx^2 + Dy^2 + eps^2) with forward differences that
/// vanish on the last column / row.
double tv_value(const GrayImage& f, double eps_tv);

/// ||g - S f||^2 + alpha * tv_value(f, eps_tv). `mask` must be the support of `meas`.
double objective(const GrayImage& f, const Measurements& meas, const BinaryMap& mask, const TvConfig& cfg);

/// Exact gradient of `objective`.
GrayImage gradient(const GrayImage& f, const Measurements& meas, const BinaryMap& mask, const TvConfig& cfg);

/// Measured pixels keep their values; the rest are filled per `mode`.
/// BicubicFill needs the low-resolution grid at `factor` inside the mask.
GrayImage init_estimate(const Measurements& meas, const BinaryMap& mask, Dims dims, InitMode mode, int factor = 4);

/// Nonlinear conjugate gradient (Polak-Ribiere+, Armijo backtracking) on `objective`.
RecoveryResult recover(const Measurements& meas, const BinaryMap& mask, const TvConfig& cfg,
                       InitMode init_mode = InitMode::MeanFill);

/// CSV with columns iteration,objective,grad_norm,step_size.
void write_trace_csv(const RecoveryResult& result, const std::filesystem::path& path);

}  // namespace marsense
