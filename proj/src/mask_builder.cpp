#include "marsense/mask_builder.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include "marsense/errors.hpp"
#include "marsense/tv_recovery.hpp"

namespace marsense {

std::string to_string(MaskRole role) {
  switch (role) {
    case MaskRole::LowRes: return "lowres";
    case MaskRole::Adaptive: return "adaptive";
    case MaskRole::Random: return "random";
    case MaskRole::Mixed: return "mixed";
  }
  return "mixed";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "random") return Strategy::Random;
  if (name == "mar") return Strategy::Mar;
  if (name == "trps") return Strategy::Trps;
  throw UsageError("unknown strategy '" + name + "' (expected random, mar or trps)");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Random: return "random";
    case Strategy::Mar: return "mar";
    case Strategy::Trps: return "trps";
  }
  return "random";
}

EdgeSource edge_source_from_string(const std::string& name) {
  if (name == "predicted") return EdgeSource::Predicted;
  if (name == "true") return EdgeSource::GroundTruth;
  throw UsageError("unknown edge source '" + name + "' (expected predicted or true)");
}

std::string to_string(EdgeSource s) { return s == EdgeSource::Predicted ? "predicted" : "true"; }

void AcquisitionConfig::validate() const {
  if (!(target_eta1 > 0.0 && target_eta1 <= 1.0)) throw UsageError("target eta1 must lie in (0, 1]");
  if (target_eta2 && !(*target_eta2 >= 0.0 && *target_eta2 < 1.0)) throw UsageError("target eta2 must lie in [0, 1)");
  if (downsample_factor < 1) throw UsageError("downsample factor must be >= 1");
  if (se_radius < 0) throw UsageError("structuring element radius must be >= 0");
  if (!(trps_first_stage_fraction > 0.0 && trps_first_stage_fraction <= 1.0)) {
    throw UsageError("TRPS first-stage fraction must lie in (0, 1]");
  }
  if (trps_predict_iters < 1) throw UsageError("TRPS prediction needs at least one iteration");
}

std::size_t default_edge_budget(Dims dims) {
  return static_cast<std::size_t>(std::llround(0.0175 * static_cast<double>(dims.size())));
}

void MaskBundle::validate() const {
  const BinaryMap u = s_l.map | s_a.map | s_r.map;
  if (!(u == s_m.map)) throw DataError("mask bundle: s_m is not the union of s_l, s_a and s_r");
  const auto [e1, e2] = ratios(s_m.map, s_r.map);
  if (e1 != eta1 || e2 != eta2) throw DataError("mask bundle: stored ratios disagree with the masks");
}

Measurements::Measurements(Dims dims, std::vector<Position> positions, std::vector<double> values)
    : dims_(dims), positions_(std::move(positions)), values_(std::move(values)) {
  if (dims_.width < 1 || dims_.height < 1) throw DataError("measurements: image dimensions must be positive");
  if (positions_.size() != values_.size()) throw DataError("measurements: position and value counts differ");
  long long prev = -1;
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const auto& p = positions_[i];
    if (p.row < 0 || p.row >= dims_.height || p.col < 0 || p.col >= dims_.width) {
      throw DataError("measurements: position out of bounds");
    }
    const long long idx = static_cast<long long>(p.row) * dims_.width + p.col;
    if (idx <= prev) throw DataError("measurements: positions must be unique and sorted row-major");
    prev = idx;
    if (!std::isfinite(values_[i])) throw DataError("measurements: non-finite value");
  }
}

BinaryMap Measurements::support_map() const {
  BinaryMap map(dims_.width, dims_.height);
  for (const auto& p : positions_) map.set(p.row, p.col);
  return map;
}

SamplingMask lowres_grid_mask(Dims dims, int factor) {
  if (factor < 1) throw UsageError("lowres grid factor must be >= 1, got " + std::to_string(factor));
  BinaryMap map(dims.width, dims.height);
  for (int r = 0; r < dims.height; r += factor)
    for (int c = 0; c < dims.width; c += factor) map.set(r, c);
  return {std::move(map), MaskRole::LowRes};
}

SamplingMask random_mask(Dims dims, std::size_t count, std::uint64_t seed, const std::optional<BinaryMap>& exclude) {
  std::vector<std::size_t> free;
  free.reserve(dims.size());
  if (exclude) {
    require_same_dims(dims, exclude->dims(), "random_mask");
    for (std::size_t i = 0; i < dims.size(); ++i)
      if (!(*exclude)[i]) free.push_back(i);
  } else {
    free.resize(dims.size());
    std::iota(free.begin(), free.end(), std::size_t{0});
  }
  if (count > free.size()) {
    throw InfeasibleBudget("random_mask: requested " + std::to_string(count) + " samples but only " +
                           std::to_string(free.size()) + " positions are free");
  }
  // partial Fisher-Yates: the first `count` slots end up a uniform draw without replacement
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, free.size() - 1);
    std::swap(free[i], free[pick(rng)]);
  }
  BinaryMap map(dims.width, dims.height);
  for (std::size_t i = 0; i < count; ++i) map.set(free[i]);
  return {std::move(map), MaskRole::Random};
}

SamplingMask union_masks(const std::vector<SamplingMask>& masks) {
  if (masks.empty()) throw UsageError("union_masks: need at least one mask");
  BinaryMap acc = masks.front().map;
  for (std::size_t i = 1; i < masks.size(); ++i) acc = acc | masks[i].map;
  return {std::move(acc), MaskRole::Mixed};
}

std::pair<double, double> ratios(const BinaryMap& s_m, const BinaryMap& s_r) {
  if (!s_r.subset_of(s_m)) throw DataError("ratios: random pattern is not contained in the mixed pattern");
  const std::size_t m = s_m.popcount();
  if (m == 0) throw DataError("ratios: mixed pattern is empty");
  const double eta1 = static_cast<double>(m) / static_cast<double>(s_m.size());
  const double eta2 = 1.0 - static_cast<double>(s_r.popcount()) / static_cast<double>(m);
  return {eta1, eta2};
}

Measurements apply_mask(const GrayImage& f, const BinaryMap& mask) {
  require_same_dims(f.dims(), mask.dims(), "apply_mask");
  std::vector<Position> pos;
  std::vector<double> vals;
  for (int r = 0; r < f.height(); ++r)
    for (int c = 0; c < f.width(); ++c)
      if (mask(r, c)) {
        pos.push_back({r, c});
        vals.push_back(f(r, c));
      }
  return Measurements(f.dims(), std::move(pos), std::move(vals));
}

namespace {

std::size_t target_count(Dims dims, double eta1) {
  return static_cast<std::size_t>(std::llround(eta1 * static_cast<double>(dims.size())));
}

GrayImage crop(const GrayImage& img, Dims dims) {
  if (img.dims() == dims) return img;
  GrayImage out(dims.width, dims.height);
  for (int r = 0; r < dims.height; ++r)
    for (int c = 0; c < dims.width; ++c) out(r, c) = img(r, c);
  return out;
}

// Full priority order: ranked nonzero magnitudes, then zero-magnitude pixels by index.
std::vector<std::size_t> priority_order(const GrayImage& mag) {
  auto order = rank_by_magnitude(mag);
  for (std::size_t i = 0; i < mag.size(); ++i)
    if (!(mag[i] > 0.0)) order.push_back(i);
  return order;
}

struct AdaptiveSelector {
  const GrayImage& mag;
  std::vector<std::size_t> ranked;  // nonzero magnitudes only
  MorphOpKind morph;
  int radius;

  BinaryMap candidates(std::size_t k) const {
    BinaryMap top(mag.width(), mag.height());
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) top.set(ranked[i]);
    return apply_morph(top, morph, StructuringElement::square(radius));
  }

  std::size_t gain(std::size_t k, const BinaryMap& taken) const { return candidates(k).minus(taken).popcount(); }

  // Smallest edge budget whose morphed map adds at least `need` pixels outside `taken`.
  std::optional<std::size_t> budget_for(std::size_t need, const BinaryMap& taken) const {
    if (need == 0) return std::size_t{0};
    if (gain(ranked.size(), taken) < need) return std::nullopt;
    std::size_t lo = 1, hi = ranked.size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (gain(mid, taken) >= need) hi = mid;
      else lo = mid + 1;
    }
    return lo;
  }

  // Like budget_for, but once every ranked pixel is in use the structuring
  // element grows until the demand is met. Returns false if it never is.
  bool grow_until(std::size_t need, const BinaryMap& taken, std::size_t& k) {
    const int max_radius = std::max(mag.width(), mag.height());
    while (true) {
      if (auto found = budget_for(need, taken)) {
        k = *found;
        return true;
      }
      if (morph == MorphOpKind::None || radius >= max_radius) return false;
      ++radius;
    }
  }

  // Keeps at most `cap` pixels of `raw` outside `taken`, strongest magnitude first.
  BinaryMap trim(const BinaryMap& raw, const BinaryMap& taken, std::size_t cap) const {
    BinaryMap out = raw & taken;
    std::size_t kept = 0;
    for (std::size_t idx : priority_order(mag)) {
      if (kept == cap) break;
      if (raw[idx] && !taken[idx]) {
        out.set(idx);
        ++kept;
      }
    }
    return out;
  }
};

MaskBundle assemble(BinaryMap s_l, BinaryMap s_a, BinaryMap s_r) {
  MaskBundle b;
  b.s_m = {s_l | s_a | s_r, MaskRole::Mixed};
  b.s_l = {std::move(s_l), MaskRole::LowRes};
  b.s_a = {std::move(s_a), MaskRole::Adaptive};
  b.s_r = {std::move(s_r), MaskRole::Random};
  std::tie(b.eta1, b.eta2) = ratios(b.s_m.map, b.s_r.map);
  return b;
}

// Multi-source breadth-first fill: every unmeasured pixel copies its nearest
// (4-connected path length) measured neighbour, ties broken by queue order.
GrayImage nearest_fill(const Measurements& meas) {
  const Dims d = meas.dims();
  GrayImage out(d.width, d.height);
  std::vector<std::uint8_t> seen(d.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < meas.count(); ++i) {
    const auto& p = meas.positions()[i];
    const std::size_t idx = out.index(p.row, p.col);
    out[idx] = meas.values()[i];
    seen[idx] = 1;
    queue.push_back(idx);
  }
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    const int r = static_cast<int>(idx / static_cast<std::size_t>(d.width));
    const int c = static_cast<int>(idx % static_cast<std::size_t>(d.width));
    const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
    for (const auto& n : nbr) {
      if (n[0] < 0 || n[0] >= d.height || n[1] < 0 || n[1] >= d.width) continue;
      const std::size_t j = out.index(n[0], n[1]);
      if (seen[j]) continue;
      seen[j] = 1;
      out[j] = out[idx];
      queue.push_back(j);
    }
  }
  return out;
}

}  // namespace

MaskBundle build_random(const GrayImage& f, const AcquisitionConfig& cfg) {
  cfg.validate();
  const Dims dims = f.dims();
  const std::size_t total = target_count(dims, cfg.target_eta1);
  if (total == 0) throw InfeasibleBudget("random: target eta1 rounds to zero samples");
  auto s_r = random_mask(dims, total, cfg.seed);
  return assemble(BinaryMap(dims.width, dims.height), BinaryMap(dims.width, dims.height), std::move(s_r.map));
}

MaskBundle build_mar(const GrayImage& f, const AcquisitionConfig& cfg) {
  cfg.validate();
  const Dims dims = f.dims();
  const std::size_t total = target_count(dims, cfg.target_eta1);
  const int factor = cfg.downsample_factor;

  BinaryMap s_l = lowres_grid_mask(dims, factor).map;
  const std::size_t n_l = s_l.popcount();
  if (n_l > total) {
    throw InfeasibleBudget("mar: low-resolution grid needs " + std::to_string(n_l) + " samples but the eta1 budget is " +
                           std::to_string(total));
  }

  // The pre-scan is the only access to f on the predicted-edge path.
  const Measurements prescan = apply_mask(f, s_l);
  GrayImage mag;
  if (cfg.edge_source == EdgeSource::GroundTruth) {
    mag = sobel_magnitude(f);
  } else {
    GrayImage low((dims.width + factor - 1) / factor, (dims.height + factor - 1) / factor);
    for (std::size_t i = 0; i < prescan.count(); ++i) {
      const auto& p = prescan.positions()[i];
      low(p.row / factor, p.col / factor) = prescan.values()[i];
    }
    mag = sobel_magnitude(crop(bicubic_upsample(low, factor), dims));
  }

  AdaptiveSelector sel{mag, rank_by_magnitude(mag), cfg.morph, cfg.se_radius};
  std::size_t cap = total - n_l;
  BinaryMap raw(dims.width, dims.height);
  if (cfg.edge_budget || !cfg.target_eta2) {
    const std::size_t k = cfg.edge_budget.value_or(default_edge_budget(dims));
    if (k > dims.size()) throw UsageError("mar: edge budget exceeds the pixel count");
    raw = sel.candidates(k);
  } else {
    const auto wanted = static_cast<std::size_t>(std::llround(*cfg.target_eta2 * static_cast<double>(total)));
    if (wanted < n_l) {
      throw InfeasibleBudget("mar: eta2 " + std::to_string(*cfg.target_eta2) + " is below the low-resolution share " +
                             std::to_string(static_cast<double>(n_l) / static_cast<double>(total)));
    }
    cap = wanted - n_l;
    std::size_t k = 0;
    if (!sel.grow_until(cap, s_l, k)) {
      throw InfeasibleBudget("mar: edge map cannot supply " + std::to_string(cap) + " adaptive samples (maximum " +
                             std::to_string(sel.gain(sel.ranked.size(), s_l)) + ")");
    }
    raw = sel.candidates(k);
  }
  BinaryMap s_a = sel.trim(raw, s_l, cap);

  const BinaryMap taken = s_l | s_a;
  const std::size_t remaining = total - taken.popcount();
  BinaryMap s_r = random_mask(dims, remaining, cfg.seed, taken).map;
  return assemble(std::move(s_l), std::move(s_a), std::move(s_r));
}

MaskBundle build_trps(const GrayImage& f, const AcquisitionConfig& cfg) {
  cfg.validate();
  const Dims dims = f.dims();
  const std::size_t total = target_count(dims, cfg.target_eta1);
  const double first_fraction = cfg.target_eta2 ? 1.0 - *cfg.target_eta2 : cfg.trps_first_stage_fraction;
  const auto n1 = static_cast<std::size_t>(std::llround(first_fraction * static_cast<double>(total)));
  if (n1 == 0) throw InfeasibleBudget("trps: first random stage rounds to zero samples");

  BinaryMap s_r = random_mask(dims, n1, cfg.seed).map;
  BinaryMap s_a(dims.width, dims.height);
  const std::size_t need = total - n1;
  if (need > 0) {
    const Measurements first = apply_mask(f, s_r);
    GrayImage predicted;
    if (cfg.trps_predictor == TrpsPredictor::TvRecovery) {
      TvConfig tv;
      tv.max_iters = cfg.trps_predict_iters;
      predicted = recover(first, s_r, tv).image;
    } else {
      predicted = nearest_fill(first);
    }
    const GrayImage mag = sobel_magnitude(predicted);
    AdaptiveSelector sel{mag, rank_by_magnitude(mag), cfg.morph, cfg.se_radius};
    std::size_t k = 0;
    // the whole budget must be spent, so fall back to every free pixel in priority order
    const BinaryMap raw = sel.grow_until(need, s_r, k) ? sel.candidates(k) : s_r.complement();
    s_a = sel.trim(raw, s_r, need).minus(s_r);
  }
  return assemble(BinaryMap(dims.width, dims.height), std::move(s_a), std::move(s_r));
}

MaskBundle build_bundle(const GrayImage& f, const AcquisitionConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::Random: return build_random(f, cfg);
    case Strategy::Mar: return build_mar(f, cfg);
    case Strategy::Trps: return build_trps(f, cfg);
  }
  throw UsageError("unknown strategy");
}

}  // namespace marsense
