#include "marsense/tv_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "marsense/edge_prior.hpp"
#include "marsense/errors.hpp"
#include "marsense/synthetic.hpp"

namespace marsense {

void TvConfig::validate() const {
  if (!(alpha > 0.0)) throw UsageError("TV weight alpha must be > 0");
  if (!(eps_tv > 0.0)) throw UsageError("TV smoothing eps must be > 0");
  if (max_iters < 1) throw UsageError("max_iters must be >= 1");
  if (!(grad_tol >= 0.0)) throw UsageError("grad_tol must be >= 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw UsageError("armijo constant must lie in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw UsageError("backtracking shrink factor must lie in (0, 1)");
  if (restart_every < 1) throw UsageError("restart period must be >= 1");
}

InitMode init_mode_from_string(const std::string& name) {
  if (name == "mean") return InitMode::MeanFill;
  if (name == "zero") return InitMode::ZeroFill;
  if (name == "bicubic") return InitMode::BicubicFill;
  throw UsageError("unknown init mode '" + name + "' (expected mean, zero or bicubic)");
}

GrayImage scatter_adjoint(const Measurements& meas) {
  GrayImage out(meas.dims().width, meas.dims().height);
  for (std::size_t i = 0; i < meas.count(); ++i) {
    const auto& p = meas.positions()[i];
    out(p.row, p.col) = meas.values()[i];
  }
  return out;
}

namespace {

// Data term weights (0/1) and the embedded measurements, plus the TV settings.
class TvProblem {
 public:
  TvProblem(const Measurements& meas, const BinaryMap& mask, double alpha, double eps)
      : width_(meas.dims().width), height_(meas.dims().height), alpha_(alpha), eps_(eps), g_(scatter_adjoint(meas)) {
    require_same_dims(meas.dims(), mask.dims(), "tv objective");
    if (!(meas.support_map() == mask)) throw DataError("tv objective: mask is not the support of the measurements");
    weight_.assign(mask.bits().begin(), mask.bits().end());
  }

  std::size_t size() const { return weight_.size(); }

  // Returns the objective; writes the gradient when `grad` is non-null.
  double evaluate(std::span<const double> f, std::span<double> grad) const {
    const bool want_grad = !grad.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    double data = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!weight_[i]) continue;
      const double r = f[i] - g_[i];
      data += r * r;
      if (want_grad) grad[i] = 2.0 * r;
    }
    double tv = 0.0;
    const double eps2 = eps_ * eps_;
    for (int r = 0; r < height_; ++r) {
      const std::size_t row = static_cast<std::size_t>(r) * static_cast<std::size_t>(width_);
      for (int c = 0; c < width_; ++c) {
        const std::size_t p = row + static_cast<std::size_t>(c);
        const double dx = c + 1 < width_ ? f[p + 1] - f[p] : 0.0;
        const double dy = r + 1 < height_ ? f[p + static_cast<std::size_t>(width_)] - f[p] : 0.0;
        const double s = std::sqrt(dx * dx + dy * dy + eps2);
        tv += s;
        if (!want_grad) continue;
        const double qx = alpha_ * dx / s;
        const double qy = alpha_ * dy / s;
        grad[p] -= qx + qy;
        if (c + 1 < width_) grad[p + 1] += qx;
        if (r + 1 < height_) grad[p + static_cast<std::size_t>(width_)] += qy;
      }
    }
    return data + alpha_ * tv;
  }

 private:
  int width_;
  int height_;
  double alpha_;
  double eps_;
  GrayImage g_;
  std::vector<std::uint8_t> weight_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

double tv_value(const GrayImage& f, double eps_tv) {
  if (!(eps_tv >= 0.0)) throw UsageError("tv_value: eps must be >= 0");
  const int w = f.width(), h = f.height();
  double tv = 0.0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double dx = c + 1 < w ? f(r, c + 1) - f(r, c) : 0.0;
      const double dy = r + 1 < h ? f(r + 1, c) - f(r, c) : 0.0;
      tv += std::sqrt(dx * dx + dy * dy + eps_tv * eps_tv);
    }
  return tv;
}

double objective(const GrayImage& f, const Measurements& meas, const BinaryMap& mask, const TvConfig& cfg) {
  require_same_dims(f.dims(), meas.dims(), "objective");
  if (!(cfg.alpha >= 0.0)) throw UsageError("objective: alpha must be >= 0");
  const TvProblem problem(meas, mask, cfg.alpha, cfg.eps_tv);
  return problem.evaluate(f.pixels(), {});
}

GrayImage gradient(const GrayImage& f, const Measurements& meas, const BinaryMap& mask, const TvConfig& cfg) {
  require_same_dims(f.dims(), meas.dims(), "gradient");
  if (!(cfg.alpha >= 0.0)) throw UsageError("gradient: alpha must be >= 0");
  if (!(cfg.eps_tv > 0.0)) throw UsageError("gradient: eps must be > 0");
  const TvProblem problem(meas, mask, cfg.alpha, cfg.eps_tv);
  GrayImage g(f.width(), f.height());
  problem.evaluate(f.pixels(), g.pixels());
  return g;
}

GrayImage init_estimate(const Measurements& meas, const BinaryMap& mask, Dims dims, InitMode mode, int factor) {
  require_same_dims(meas.dims(), dims, "init_estimate");
  require_same_dims(mask.dims(), dims, "init_estimate");
  GrayImage out = scatter_adjoint(meas);
  switch (mode) {
    case InitMode::ZeroFill:
      return out;
    case InitMode::MeanFill: {
      if (meas.empty()) throw DataError("init_estimate: mean fill needs at least one measurement");
      const double mean = std::accumulate(meas.values().begin(), meas.values().end(), 0.0) / static_cast<double>(meas.count());
      for (std::size_t i = 0; i < out.size(); ++i)
        if (!mask[i]) out[i] = mean;
      return out;
    }
    case InitMode::BicubicFill: {
      const GrayImage low_full = downsample_decimate(out, factor);
      for (int r = 0; r < dims.height; r += factor)
        for (int c = 0; c < dims.width; c += factor)
          if (!mask(r, c)) throw DataError("init_estimate: bicubic fill needs the full low-resolution grid in the mask");
      const GrayImage up = bicubic_upsample(low_full, factor);
      for (int r = 0; r < dims.height; ++r)
        for (int c = 0; c < dims.width; ++c)
          if (!mask(r, c)) out(r, c) = up(r, c);
      return out;
    }
  }
  return out;
}

RecoveryResult recover(const Measurements& meas, const BinaryMap& mask, const TvConfig& cfg, InitMode init_mode) {
  cfg.validate();
  if (mask.popcount() == 0) throw DataError("recover: sampling mask is empty");
  const TvProblem problem(meas, mask, cfg.alpha, cfg.eps_tv);
  const std::size_t n = problem.size();

  GrayImage x = init_estimate(meas, mask, meas.dims(), init_mode);
  std::vector<double> g(n), g_prev(n), d(n), trial(n), g_trial(n);
  double fx = problem.evaluate(x.pixels(), g);
  if (!std::isfinite(fx)) throw NumericalError("recover: non-finite objective at the initial estimate");

  RecoveryResult res;
  double gnorm = std::sqrt(dot(g, g));
  const double g0 = gnorm;
  res.objective_trace.push_back(fx);
  res.grad_norm_trace.push_back(gnorm);
  res.step_trace.push_back(0.0);

  for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
  // inverse of the gradient's Lipschitz bound: data term 2, TV term 8 * alpha / eps
  double step = 1.0 / (2.0 + 8.0 * cfg.alpha / cfg.eps_tv);
  double prev_slope = 0.0;

  res.converged = gnorm <= cfg.grad_tol * g0 || gnorm == 0.0;
  int since_restart = 0;
  while (!res.converged && res.iterations < cfg.max_iters) {
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = -gnorm * gnorm;
      since_restart = 0;
    }
    if (res.iterations > 0 && prev_slope < 0.0) step = std::min(step * prev_slope / slope * 2.0, 1e6);

    double f_trial = 0.0;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * d[i];
      f_trial = problem.evaluate(trial, g_trial);
      if (!std::isfinite(f_trial)) throw NumericalError("recover: non-finite objective during line search");
      if (f_trial <= fx + cfg.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.shrink;
    }
    if (!accepted || !(f_trial <= fx)) break;  // no further decrease available at this precision

    std::copy(trial.begin(), trial.end(), x.pixels().begin());
    g_prev.swap(g);
    g.swap(g_trial);
    fx = f_trial;
    gnorm = std::sqrt(dot(g, g));
    ++res.iterations;
    ++since_restart;
    res.objective_trace.push_back(fx);
    res.grad_norm_trace.push_back(gnorm);
    res.step_trace.push_back(step);
    prev_slope = slope;

    if (gnorm <= cfg.grad_tol * g0) {
      res.converged = true;
      break;
    }
    double beta = 0.0;
    if (since_restart < cfg.restart_every) {
      const double denom = dot(g_prev, g_prev);
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) num += g[i] * (g[i] - g_prev[i]);
      beta = std::max(0.0, num / denom);
    } else {
      since_restart = 0;
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] + beta * d[i];
  }
  res.final_grad_norm = gnorm;
  res.image = x.clamped();
  return res;
}

void write_trace_csv(const RecoveryResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write trace " + path.string());
  out << "iteration,objective,grad_norm,step_size\n";
  out.precision(17);
  for (std::size_t i = 0; i < result.objective_trace.size(); ++i) {
    out << i << ',' << result.objective_trace[i] << ',' << result.grad_norm_trace[i] << ',' << result.step_trace[i] << '\n';
  }
}

}  // namespace marsense
