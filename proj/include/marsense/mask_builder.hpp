#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "marsense/binary_map.hpp"
#include "marsense/edge_prior.hpp"
#include "marsense/image.hpp"

namespace marsense {

enum class MaskRole { LowRes, Adaptive, Random, Mixed };

std::string to_string(MaskRole role);

struct SamplingMask {
  BinaryMap map;
  MaskRole role = MaskRole::Mixed;

  std::size_t popcount() const { return map.popcount(); }
  Dims dims() const { return map.dims(); }
};

/// One acquisition: the component patterns, their union, and the realized ratios.
struct MaskBundle {
  SamplingMask s_l;
  SamplingMask s_a;
  SamplingMask s_r;
  SamplingMask s_m;
  double eta1 = 0.0;
  double eta2 = 0.0;

  /// Throws DataError if the union or the stored ratios disagree with the masks.
  void validate() const;
};

enum class Strategy { Random, Mar, Trps };
enum class EdgeSource { Predicted, GroundTruth };
/// How TRPS turns its first-stage random samples into an image for edge detection.
enum class TrpsPredictor { TvRecovery, NearestFill };

Strategy strategy_from_string(const std::string& name);
std::string to_string(Strategy s);
EdgeSource edge_source_from_string(const std::string& name);
std::string to_string(EdgeSource s);

struct AcquisitionConfig {
  Strategy strategy = Strategy::Mar;
  double target_eta1 = 0.30;
  // Exactly one of these drives the adaptive share; edge_budget wins if both are set.
  std::optional<std::size_t> edge_budget;
  std::optional<double> target_eta2;
  int downsample_factor = 4;
  MorphOpKind morph = MorphOpKind::Dilate;
  int se_radius = 1;
  EdgeSource edge_source = EdgeSource::Predicted;
  std::uint64_t seed = 1;
  double trps_first_stage_fraction = 0.6;
  TrpsPredictor trps_predictor = TrpsPredictor::TvRecovery;
  int trps_predict_iters = 30;

  void validate() const;
};

/// Default edge budget for the sweeps: 1.75% of the image.
std::size_t default_edge_budget(Dims dims);

struct Position {
  int row = 0;
  int col = 0;
  friend bool operator==(const Position&, const Position&) = default;
};

/// Partial samples g: positions strictly increasing in row-major order.
class Measurements {
 public:
  Measurements() = default;
  Measurements(Dims dims, std::vector<Position> positions, std::vector<double> values);

  Dims dims() const { return dims_; }
  std::size_t count() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::vector<Position>& positions() const { return positions_; }
  const std::vector<double>& values() const { return values_; }

  BinaryMap support_map() const;

  friend bool operator==(const Measurements&, const Measurements&) = default;

 private:
  Dims dims_{};
  std::vector<Position> positions_;
  std::vector<double> values_;
};

SamplingMask lowres_grid_mask(Dims dims, int factor);

/// Exactly `count` positions drawn uniformly without replacement from those
/// not set in `exclude`, using a generator seeded with `seed`.
SamplingMask random_mask(Dims dims, std::size_t count, std::uint64_t seed,
                         const std::optional<BinaryMap>& exclude = std::nullopt);

SamplingMask union_masks(const std::vector<SamplingMask>& masks);

/// (eta1, eta2) from the mixed and random patterns.
std::pair<double, double> ratios(const BinaryMap& s_m, const BinaryMap& s_r);

MaskBundle build_random(const GrayImage& f, const AcquisitionConfig& cfg);
MaskBundle build_mar(const GrayImage& f, const AcquisitionConfig& cfg);
MaskBundle build_trps(const GrayImage& f, const AcquisitionConfig& cfg);
/// Dispatches on cfg.strategy.
MaskBundle build_bundle(const GrayImage& f, const AcquisitionConfig& cfg);

Measurements apply_mask(const GrayImage& f, const BinaryMap& mask);
inline Measurements apply_mask(const GrayImage& f, const SamplingMask& mask) { return apply_mask(f, mask.map); }

}  // namespace marsense
