#include "marsense/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "marsense/errors.hpp"
#include "marsense/metrics.hpp"
#include "marsense/synthetic.hpp"

namespace marsense {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::vector<double> default_eta1_grid() { return {0.2, 0.3, 0.4, 0.5}; }
std::vector<double> default_eta2_grid() { return {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.74, 0.8, 0.9, 0.95, 0.98, 0.99}; }

void persist_bundle(const std::filesystem::path& dir, const MaskBundle& b, const Measurements& meas,
                    const ExperimentSpec& spec) {
  const std::string ext = spec.mask_format == MapFormat::Pbm ? ".pbm" : ".pgm";
  save_map(b.s_l.map, dir / ("s_l" + ext), spec.mask_format);
  save_map(b.s_a.map, dir / ("s_a" + ext), spec.mask_format);
  save_map(b.s_r.map, dir / ("s_r" + ext), spec.mask_format);
  save_map(b.s_m.map, dir / ("s_m" + ext), spec.mask_format);
  save_measurements(meas, dir / ("measurements" + extension_for(spec.measurement_format)), spec.measurement_format);
  nlohmann::json j;
  j["eta1"] = b.eta1;
  j["eta2"] = b.eta2;
  j["count_l"] = b.s_l.popcount();
  j["count_a"] = b.s_a.popcount();
  j["count_r"] = b.s_r.popcount();
  j["count_m"] = b.s_m.popcount();
  std::ofstream(dir / "bundle.json") << j.dump(2) << '\n';
}

ExperimentSpec with_strategy(ExperimentSpec spec, const StrategySpec& s) {
  spec.strategies = {s};
  return spec;
}

}  // namespace

std::string StrategySpec::label() const {
  if (strategy == Strategy::Mar && edge_source == EdgeSource::GroundTruth) return "mar-true";
  return to_string(strategy);
}

StrategySpec StrategySpec::parse(const std::string& text, MorphOpKind default_morph) {
  StrategySpec s;
  s.morph = default_morph;
  std::string head = text;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    head = text.substr(0, colon);
    s.morph = morph_from_string(text.substr(colon + 1));
  }
  if (head == "mar-true") {
    s.strategy = Strategy::Mar;
    s.edge_source = EdgeSource::GroundTruth;
  } else {
    s.strategy = strategy_from_string(head);
  }
  return s;
}

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw UsageError("unknown output format '" + name + "' (expected csv or json)");
}

void ExperimentSpec::validate() const {
  if (strategies.empty()) throw UsageError("experiment needs at least one strategy");
  for (double v : eta1_grid)
    if (!(v > 0.0 && v <= 1.0)) throw UsageError("eta1 grid values must lie in (0, 1]");
  for (double v : eta2_grid)
    if (!(v >= 0.0 && v < 1.0)) throw UsageError("eta2 grid values must lie in [0, 1)");
  if (!(omp_sparsity_fraction > 0.0 && omp_sparsity_fraction <= 1.0)) throw UsageError("OMP sparsity fraction must lie in (0, 1]");
  acquisition.validate();
  recovery.validate();
}

std::string ExperimentSpec::config_hash() const {
  std::ostringstream s;
  s.precision(17);
  s << image << '|' << generator_size << '|' << acquisition.target_eta1 << '|'
    << (acquisition.edge_budget ? std::to_string(*acquisition.edge_budget) : "-") << '|'
    << (acquisition.target_eta2 ? *acquisition.target_eta2 : -1.0) << '|' << acquisition.downsample_factor << '|'
    << acquisition.se_radius << '|' << acquisition.trps_first_stage_fraction << '|'
    << static_cast<int>(acquisition.trps_predictor) << '|' << acquisition.trps_predict_iters << '|' << recovery.alpha
    << '|' << recovery.eps_tv << '|' << recovery.max_iters << '|' << recovery.grad_tol << '|' << recovery.armijo_c << '|'
    << recovery.shrink << '|' << recovery.restart_every << '|' << static_cast<int>(init) << '|' << seed << '|'
    << omp_sparsity_fraction << '|' << omp_residual_tol;
  for (const auto& st : strategies) s << '|' << st.label() << ':' << to_string(st.morph);
  for (double v : eta1_grid) s << "|e1:" << v;
  for (double v : eta2_grid) s << "|e2:" << v;
  // FNV-1a, 64 bit
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GrayImage load_source(const std::string& name, int generator_size) {
  if (name == "phantom") return shepp_logan(generator_size);
  if (name == "ball") return ball_image(generator_size);
  return load_image(name);
}

std::string source_label(const std::string& name) {
  if (name == "phantom" || name == "ball") return name;
  return std::filesystem::path(name).stem().string();
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.image, a.strategy, a.morph, a.eta1, a.eta2, a.seed) <
           std::tie(b.image, b.strategy, b.morph, b.eta1, b.eta2, b.seed);
  });
}

std::filesystem::path run_directory(const ExperimentSpec& spec, const ResultRow& row) {
  const std::string name = row.image + "_" + row.strategy + "_" + row.morph + "_e1-" + fmt("%.4f", row.eta1) + "_e2-" +
                           fmt("%.4f", row.eta2) + "_s" + std::to_string(row.seed);
  return spec.out_dir / "runs" / name;
}

ResultRow run_single(const ExperimentSpec& spec) {
  spec.validate();
  const GrayImage f = load_source(spec.image, spec.generator_size);
  const StrategySpec& st = spec.strategies.front();
  AcquisitionConfig cfg = spec.acquisition;
  cfg.strategy = st.strategy;
  cfg.morph = st.morph;
  cfg.edge_source = st.edge_source;
  cfg.seed = spec.seed;
  if (cfg.edge_budget == kAllEdges) cfg.edge_budget = f.size();

  const auto t0 = Clock::now();
  const MaskBundle bundle = build_bundle(f, cfg);
  const Measurements meas = apply_mask(f, bundle.s_m);
  GrayImage recovered;
  int iterations = 0;
  bool monotone = true;
  if (bundle.s_m.popcount() == f.size()) {
    // lossless acquisition: the measurements are the image
    recovered = scatter_adjoint(meas);
  } else {
    RecoveryResult res = recover(meas, bundle.s_m.map, spec.recovery, spec.init);
    recovered = std::move(res.image);
    iterations = res.iterations;
    monotone = std::is_sorted(res.objective_trace.rbegin(), res.objective_trace.rend());
  }
  const QualityReport q = evaluate(f, recovered);

  ResultRow row;
  row.image = source_label(spec.image);
  row.strategy = st.label();
  row.morph = st.strategy == Strategy::Random ? "none" : to_string(st.morph);
  row.eta1 = bundle.eta1;
  row.eta2 = bundle.eta2;
  row.psnr_db = q.psnr_db;
  row.ssim = q.ssim;
  row.iterations = iterations;
  row.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  row.seed = spec.seed;
  row.objective_monotone = monotone;

  if (spec.persist_artifacts) {
    const auto dir = run_directory(spec, row);
    std::filesystem::create_directories(dir);
    persist_bundle(dir, bundle, meas, spec);
    save_image(recovered, dir / "recovered.pgm");
  }
  return row;
}

std::vector<ResultRow> sweep_eta1(const ExperimentSpec& spec) {
  const auto grid = spec.eta1_grid.empty() ? default_eta1_grid() : spec.eta1_grid;
  std::vector<ResultRow> rows;
  for (const auto& st : spec.strategies)
    for (double eta1 : grid) {
      ExperimentSpec point = with_strategy(spec, st);
      point.acquisition.target_eta1 = eta1;
      point.acquisition.target_eta2.reset();
      rows.push_back(run_single(point));
    }
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> sweep_eta2(const ExperimentSpec& spec) {
  const auto grid = spec.eta2_grid.empty() ? default_eta2_grid() : spec.eta2_grid;
  std::vector<ResultRow> rows;
  for (const auto& st : spec.strategies) {
    ExperimentSpec point = with_strategy(spec, st);
    if (st.strategy == Strategy::Random) {
      rows.push_back(run_single(point));
      continue;
    }
    for (double eta2 : grid) {
      point.acquisition.edge_budget.reset();
      point.acquisition.target_eta2 = eta2;
      rows.push_back(run_single(point));
    }
  }
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> compare_fig6(const ExperimentSpec& spec) {
  spec.validate();
  const GrayImage f = load_source(spec.image, spec.generator_size);
  std::vector<ResultRow> rows;

  const auto t0 = Clock::now();
  const int m = static_cast<int>(std::llround(spec.acquisition.target_eta1 * static_cast<double>(f.size())));
  const DenseSensingMatrix phi(m, static_cast<int>(f.size()), spec.seed);
  OmpOptions opts;
  opts.max_sparsity = std::max(1, static_cast<int>(std::floor(spec.omp_sparsity_fraction * m)));
  opts.residual_tol = spec.omp_residual_tol;
  const OmpResult cs = omp(gaussian_measure(f, phi), phi, f.dims(), opts);
  const GrayImage cs_image = cs.image.clamped();
  const QualityReport q = evaluate(f, cs_image);
  ResultRow row;
  row.image = source_label(spec.image);
  row.strategy = "standard-cs";
  row.morph = "none";
  row.eta1 = static_cast<double>(m) / static_cast<double>(f.size());
  row.eta2 = 0.0;
  row.psnr_db = q.psnr_db;
  row.ssim = q.ssim;
  row.iterations = cs.iterations;
  row.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  row.seed = spec.seed;
  if (spec.persist_artifacts) {
    const auto dir = run_directory(spec, row);
    std::filesystem::create_directories(dir);
    save_image(cs_image, dir / "recovered.pgm");
  }
  rows.push_back(row);

  StrategySpec random{Strategy::Random, MorphOpKind::None, EdgeSource::Predicted};
  StrategySpec mar{Strategy::Mar, MorphOpKind::Dilate, EdgeSource::Predicted};
  for (const auto& st : {random, mar}) {
    ExperimentSpec point = with_strategy(spec, st);
    point.acquisition.target_eta2.reset();
    rows.push_back(run_single(point));
  }
  return rows;
}

std::vector<ResultRow> reproduce_table1(const ExperimentSpec& spec, const std::vector<std::string>& images,
                                        std::vector<std::string>* notices) {
  std::vector<std::string> sources{"phantom"};
  for (const auto& img : images) {
    if (img == "phantom") continue;
    if (img != "ball" && !std::filesystem::exists(img)) {
      if (notices) notices->push_back("skipping missing image " + img);
      continue;
    }
    sources.push_back(img);
  }
  const std::vector<StrategySpec> strategies{{Strategy::Random, MorphOpKind::None, EdgeSource::Predicted},
                                             {Strategy::Mar, MorphOpKind::Dilate, EdgeSource::Predicted},
                                             {Strategy::Mar, MorphOpKind::Close, EdgeSource::Predicted}};
  std::vector<ResultRow> rows;
  for (const auto& src : sources) {
    for (const auto& st : strategies) {
      ExperimentSpec point = with_strategy(spec, st);
      point.image = src;
      point.acquisition.target_eta2.reset();
      try {
        rows.push_back(run_single(point));
      } catch (const ImageIoError& e) {
        if (src == "phantom") throw;
        if (notices) notices->push_back("skipping unreadable image " + src + ": " + e.what());
        break;
      }
    }
  }
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> reproduce_table2(const ExperimentSpec& spec) {
  ExperimentSpec mar = with_strategy(spec, {Strategy::Mar, MorphOpKind::Dilate, EdgeSource::Predicted});
  const auto swept = sweep_eta2(mar);
  const auto best = std::max_element(swept.begin(), swept.end(),
                                     [](const ResultRow& a, const ResultRow& b) { return a.psnr_db < b.psnr_db; });
  const auto largest = std::max_element(swept.begin(), swept.end(),
                                        [](const ResultRow& a, const ResultRow& b) { return a.eta2 < b.eta2; });
  ExperimentSpec random = with_strategy(spec, {Strategy::Random, MorphOpKind::None, EdgeSource::Predicted});
  std::vector<ResultRow> rows{run_single(random), *best};
  if (largest != best) rows.push_back(*largest);
  sort_rows(rows);
  return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kResultCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.image << ',' << r.strategy << ',' << r.morph << ',' << fmt("%.6f", r.eta1) << ',' << fmt("%.6f", r.eta2)
        << ',' << fmt("%.4f", r.psnr_db) << ',' << fmt("%.6f", r.ssim) << ',' << r.iterations << ',' << r.seed << '\n';
  }
  return out.str();
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kResultCsvHeader) throw DataError("result CSV: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw DataError("result CSV: expected 9 columns, got " + std::to_string(cells.size()));
    ResultRow r;
    try {
      r.image = cells[0];
      r.strategy = cells[1];
      r.morph = cells[2];
      r.eta1 = std::stod(cells[3]);
      r.eta2 = std::stod(cells[4]);
      r.psnr_db = std::stod(cells[5]);
      r.ssim = std::stod(cells[6]);
      r.iterations = std::stoi(cells[7]);
      r.seed = std::stoull(cells[8]);
    } catch (const std::logic_error&) {
      throw DataError("result CSV: malformed number in line '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

std::filesystem::path write_table(const ExperimentSpec& spec, const std::vector<ResultRow>& rows, const std::string& stem) {
  std::filesystem::create_directories(spec.out_dir);
  std::filesystem::path table;
  if (spec.format == OutputFormat::Csv) {
    table = spec.out_dir / (stem + ".csv");
    std::ofstream(table, std::ios::binary) << rows_to_csv(rows);
  } else {
    table = spec.out_dir / (stem + ".json");
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"image", r.image}, {"strategy", r.strategy}, {"morph", r.morph}, {"eta1", r.eta1},
                     {"eta2", r.eta2}, {"psnr_db", r.psnr_db}, {"ssim", r.ssim}, {"iterations", r.iterations},
                     {"wall_time_s", r.wall_time_s}, {"seed", r.seed}});
    }
    std::ofstream(table) << arr.dump(2) << '\n';
  }
  std::ofstream timings(spec.out_dir / (stem + "_timings.csv"));
  timings << "image,strategy,morph,eta1,eta2,seed,wall_time_s\n";
  for (const auto& r : rows) {
    timings << r.image << ',' << r.strategy << ',' << r.morph << ',' << fmt("%.6f", r.eta1) << ','
            << fmt("%.6f", r.eta2) << ',' << r.seed << ',' << fmt("%.3f", r.wall_time_s) << '\n';
  }
  nlohmann::json manifest{{"table", stem}, {"seed", spec.seed}, {"config_hash", spec.config_hash()}, {"rows", rows.size()}};
  std::ofstream(spec.out_dir / (stem + "_manifest.json")) << manifest.dump(2) << '\n';
  return table;
}

}  // namespace marsense
