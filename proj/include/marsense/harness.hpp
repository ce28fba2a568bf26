#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "marsense/baseline_cs.hpp"
#include "marsense/image.hpp"
#include "marsense/image_io.hpp"
#include "marsense/mask_builder.hpp"
#include "marsense/measurements_io.hpp"
#include "marsense/tv_recovery.hpp"

namespace marsense {

/// One sampling strategy as it appears in result tables, e.g. "mar:close" or "mar-true:dilate".
struct StrategySpec {
  Strategy strategy = Strategy::Mar;
  MorphOpKind morph = MorphOpKind::Dilate;
  EdgeSource edge_source = EdgeSource::Predicted;

  /// "random", "mar", "mar-true" or "trps".
  std::string label() const;
  static StrategySpec parse(const std::string& text, MorphOpKind default_morph = MorphOpKind::Dilate);
};

enum class OutputFormat { Csv, Json };
OutputFormat output_format_from_string(const std::string& name);

struct ExperimentSpec {
  /// "phantom", "ball" or a PGM path.
  std::string image = "phantom";
  /// Side length for the generated images.
  int generator_size = 256;
  AcquisitionConfig acquisition;
  TvConfig recovery;
  InitMode init = InitMode::MeanFill;
  std::vector<StrategySpec> strategies{StrategySpec{}};
  std::vector<double> eta1_grid;
  std::vector<double> eta2_grid;
  std::uint64_t seed = 1;
  /// OMP sparsity cap for the standard-CS baseline as a fraction of the measurement count.
  double omp_sparsity_fraction = 0.25;
  double omp_residual_tol = 1e-6;

  std::filesystem::path out_dir = "marsense_out";
  OutputFormat format = OutputFormat::Csv;
  MapFormat mask_format = MapFormat::Pbm;
  MeasurementFormat measurement_format = MeasurementFormat::Binary;
  /// Write masks, measurements and recovered images for every run.
  bool persist_artifacts = true;

  void validate() const;
  /// Stable digest of every field that influences results.
  std::string config_hash() const;
};

struct ResultRow {
  std::string image;
  std::string strategy;
  std::string morph;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  /// False if the solver's objective trace ever increased. Not serialized.
  bool objective_monotone = true;
};

/// CSV header. Wall time goes to a separate timings file so result tables
/// stay byte-reproducible.
/// Edge budget meaning "every pixel with nonzero edge magnitude"; resolved to N per image.
inline constexpr std::size_t kAllEdges = static_cast<std::size_t>(-1);

inline constexpr const char* kResultCsvHeader = "image,strategy,morph,eta1,eta2,psnr_db,ssim,iterations,seed";

GrayImage load_source(const std::string& name, int generator_size);
std::string source_label(const std::string& name);

/// Sort key: image, strategy, morph, eta1, eta2, seed.
void sort_rows(std::vector<ResultRow>& rows);

/// Acquire, recover and score one (strategy, grid point) combination using
/// spec.strategies.front() and spec.acquisition's targets.
ResultRow run_single(const ExperimentSpec& spec);

/// Fixed edge budget; one row per (strategy, eta1).
std::vector<ResultRow> sweep_eta1(const ExperimentSpec& spec);

/// Fixed eta1, one row per (non-random strategy, eta2); random strategies add a single reference row.
std::vector<ResultRow> sweep_eta2(const ExperimentSpec& spec);

/// Standard CS (Gaussian + OMP over Haar), random-partial TV and MAR TV on the same budget.
std::vector<ResultRow> compare_fig6(const ExperimentSpec& spec);

/// Random, MAR + dilated and MAR + closed predicted edges on each image at
/// spec.acquisition.target_eta1. Unreadable paths are skipped with a notice;
/// the phantom always runs.
std::vector<ResultRow> reproduce_table1(const ExperimentSpec& spec, const std::vector<std::string>& images,
                                        std::vector<std::string>* notices = nullptr);

/// Random reference, MAR at the best swept eta2, and MAR at the largest swept eta2.
std::vector<ResultRow> reproduce_table2(const ExperimentSpec& spec);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& text);

/// Writes <stem>.csv or <stem>.json into spec.out_dir plus <stem>_timings.csv
/// and <stem>_manifest.json; returns the table path.
std::filesystem::path write_table(const ExperimentSpec& spec, const std::vector<ResultRow>& rows, const std::string& stem);

/// Directory where run_single persists artifacts for a row.
std::filesystem::path run_directory(const ExperimentSpec& spec, const ResultRow& row);

}  // namespace marsense
