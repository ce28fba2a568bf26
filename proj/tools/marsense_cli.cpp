// marsense: edge-guided adaptive sampling, TV recovery and experiment sweeps.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "marsense/errors.hpp"
#include "marsense/harness.hpp"
#include "marsense/metrics.hpp"

namespace fs = std::filesystem;
using namespace marsense;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct Options {
  std::string image = "phantom";
  int size = 0;
  double eta1 = 0.30;
  double eta2 = -1.0;
  std::string edge_budget;
  std::string strategy = "mar";
  std::string morph = "dilate";
  std::string edge_source = "predicted";
  int factor = 4;
  double alpha = 8.0;
  double eps_tv = 2.55;
  int iters = 300;
  double grad_tol = 1e-4;
  std::string init = "mean";
  std::uint64_t seed = 1;
  std::string out = "marsense_out";
  std::string format = "csv";
  std::string mask_format = "pbm";
  std::string meas_format = "bin";
  std::vector<double> grid;
  std::vector<std::string> strategies;
  std::vector<std::string> images;
  std::string meas;
  std::string trace;
  std::string reference;
  std::string test;
  bool no_artifacts = false;
};


ExperimentSpec make_spec(const Options& o, int default_size) {
  ExperimentSpec spec;
  spec.image = o.image;
  spec.generator_size = o.size > 0 ? o.size : default_size;
  spec.seed = o.seed;
  spec.out_dir = o.out;
  spec.format = output_format_from_string(o.format);
  spec.mask_format = map_format_from_string(o.mask_format);
  spec.measurement_format = measurement_format_from_string(o.meas_format);
  spec.persist_artifacts = !o.no_artifacts;
  spec.init = init_mode_from_string(o.init);

  auto& acq = spec.acquisition;
  acq.target_eta1 = o.eta1;
  acq.downsample_factor = o.factor;
  acq.seed = o.seed;
  if (o.eta2 >= 0.0) acq.target_eta2 = o.eta2;
  if (!o.edge_budget.empty()) {
    if (o.eta2 >= 0.0) throw UsageError("--eta2 and --edge-budget are mutually exclusive");
    if (o.edge_budget == "all") {
      acq.edge_budget = kAllEdges;
    } else {
      try {
        std::size_t used = 0;
        const long long k = std::stoll(o.edge_budget, &used);
        if (used != o.edge_budget.size() || k < 0) throw std::invalid_argument("budget");
        acq.edge_budget = static_cast<std::size_t>(k);
      } catch (const std::logic_error&) {
        throw UsageError("--edge-budget expects a non-negative integer or 'all'");
      }
    }
  }

  spec.recovery.alpha = o.alpha;
  spec.recovery.eps_tv = o.eps_tv;
  spec.recovery.max_iters = o.iters;
  spec.recovery.grad_tol = o.grad_tol;

  const MorphOpKind morph = morph_from_string(o.morph);
  spec.strategies.clear();
  if (o.strategies.empty()) {
    StrategySpec s = StrategySpec::parse(o.strategy, morph);
    s.edge_source = edge_source_from_string(o.edge_source);
    spec.strategies.push_back(s);
  } else {
    for (const auto& s : o.strategies) spec.strategies.push_back(StrategySpec::parse(s, morph));
  }
  spec.validate();
  return spec;
}

void resolve_budget(ExperimentSpec& spec, Dims dims) {
  if (spec.acquisition.edge_budget == kAllEdges) spec.acquisition.edge_budget = dims.size();
}

void print_rows(const std::vector<ResultRow>& rows) { std::cout << rows_to_csv(rows); }

int cmd_sample(const Options& o) {
  ExperimentSpec spec = make_spec(o, 256);
  const GrayImage f = load_source(spec.image, spec.generator_size);
  resolve_budget(spec, f.dims());
  AcquisitionConfig cfg = spec.acquisition;
  const StrategySpec& st = spec.strategies.front();
  cfg.strategy = st.strategy;
  cfg.morph = st.morph;
  cfg.edge_source = st.edge_source;
  const MaskBundle b = build_bundle(f, cfg);
  const Measurements meas = apply_mask(f, b.s_m);

  fs::create_directories(spec.out_dir);
  const std::string ext = spec.mask_format == MapFormat::Pbm ? ".pbm" : ".pgm";
  save_map(b.s_l.map, spec.out_dir / ("s_l" + ext), spec.mask_format);
  save_map(b.s_a.map, spec.out_dir / ("s_a" + ext), spec.mask_format);
  save_map(b.s_r.map, spec.out_dir / ("s_r" + ext), spec.mask_format);
  save_map(b.s_m.map, spec.out_dir / ("s_m" + ext), spec.mask_format);
  const fs::path meas_path = spec.out_dir / ("measurements" + extension_for(spec.measurement_format));
  save_measurements(meas, meas_path, spec.measurement_format);

  nlohmann::json j{{"image", source_label(spec.image)}, {"strategy", st.label()}, {"morph", to_string(st.morph)},
                   {"eta1", b.eta1}, {"eta2", b.eta2}, {"count_l", b.s_l.popcount()},
                   {"count_a", b.s_a.popcount()}, {"count_r", b.s_r.popcount()}, {"count_m", b.s_m.popcount()},
                   {"measurements", meas_path.string()}};
  std::ofstream(spec.out_dir / "bundle.json") << j.dump(2) << '\n';
  if (spec.format == OutputFormat::Json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "eta1,eta2,count_l,count_a,count_r,count_m\n"
              << b.eta1 << ',' << b.eta2 << ',' << b.s_l.popcount() << ',' << b.s_a.popcount() << ','
              << b.s_r.popcount() << ',' << b.s_m.popcount() << '\n';
  }
  return kOk;
}

int cmd_recover(const Options& o) {
  if (o.meas.empty()) throw UsageError("recover needs --meas <file>");
  ExperimentSpec spec = make_spec(o, 256);
  const Measurements meas = load_measurements(o.meas);
  const RecoveryResult res = recover(meas, meas.support_map(), spec.recovery, spec.init);
  fs::create_directories(spec.out_dir);
  const fs::path out = spec.out_dir / "recovered.pgm";
  save_image(res.image, out);
  if (!o.trace.empty()) write_trace_csv(res, o.trace);
  if (spec.format == OutputFormat::Json) {
    nlohmann::json j{{"output", out.string()}, {"iterations", res.iterations}, {"converged", res.converged},
                     {"final_grad_norm", res.final_grad_norm},
                     {"objective", res.objective_trace.empty() ? 0.0 : res.objective_trace.back()}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "output,iterations,converged,final_grad_norm\n"
              << out.string() << ',' << res.iterations << ',' << (res.converged ? 1 : 0) << ','
              << res.final_grad_norm << '\n';
  }
  return kOk;
}

int cmd_eval(const Options& o) {
  if (o.reference.empty() || o.test.empty()) throw UsageError("eval needs --reference and --test");
  const GrayImage ref = load_source(o.reference, o.size > 0 ? o.size : 256);
  const GrayImage test = load_image(o.test);
  const QualityReport q = evaluate(ref, test);
  if (output_format_from_string(o.format) == OutputFormat::Json) {
    std::cout << nlohmann::json{{"mse", q.mse}, {"psnr_db", q.psnr_db}, {"ssim", q.ssim}}.dump(2) << '\n';
  } else {
    char line[128];
    std::snprintf(line, sizeof line, "%.6f,%.4f,%.6f\n", q.mse, q.psnr_db, q.ssim);
    std::cout << "mse,psnr_db,ssim\n" << line;
  }
  return kOk;
}

int finish(const ExperimentSpec& spec, const std::vector<ResultRow>& rows, const std::string& stem) {
  const fs::path table = write_table(spec, rows, stem);
  print_rows(rows);
  std::cerr << "wrote " << table.string() << '\n';
  return kOk;
}

int cmd_table(const std::string& name, Options o) {
  if (name == "sweep-eta1") {
    if (o.strategies.empty()) o.strategies = {"random", "mar"};
    ExperimentSpec spec = make_spec(o, 256);
    spec.eta1_grid = o.grid;
    spec.acquisition.target_eta2.reset();
    return finish(spec, sweep_eta1(spec), "sweep_eta1");
  }
  if (name == "sweep-eta2") {
    if (o.strategies.empty()) o.strategies = {"random", "mar"};
    if (o.eta1 == 0.30 && o.grid.empty()) o.eta1 = 0.445;
    ExperimentSpec spec = make_spec(o, 256);
    spec.eta2_grid = o.grid;
    return finish(spec, sweep_eta2(spec), "sweep_eta2");
  }
  if (name == "table1") {
    ExperimentSpec spec = make_spec(o, 256);
    std::vector<std::string> notices;
    auto rows = reproduce_table1(spec, o.images, &notices);
    for (const auto& n : notices) std::cerr << "notice: " << n << '\n';
    return finish(spec, rows, "table1");
  }
  if (name == "table2") {
    ExperimentSpec spec = make_spec(o, 256);
    spec.eta2_grid = o.grid;
    return finish(spec, reproduce_table2(spec), "table2");
  }
  // fig6
  if (o.image == "phantom") o.image = "ball";
  ExperimentSpec spec = make_spec(o, 64);
  return finish(spec, compare_fig6(spec), "fig6");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-guided adaptive sampling and TV recovery"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; command-line flags take precedence");
  app.option_defaults()->always_capture_default();

  Options o;
  app.add_option("--image", o.image, "Input: PGM path, 'phantom' or 'ball'");
  app.add_option("--size", o.size, "Side length for generated images")->check(CLI::PositiveNumber);
  app.add_option("--eta1", o.eta1, "Total sampling ratio |S_m|/N");
  auto* eta2 = app.add_option("--eta2", o.eta2, "Adaptive share 1 - |S_r|/|S_m| (fixed-eta2 mode)");
  auto* budget = app.add_option("--edge-budget", o.edge_budget, "Edge pixel count, or 'all'");
  eta2->excludes(budget);
  app.add_option("--strategy", o.strategy, "random | mar | mar-true | trps");
  app.add_option("--strategies", o.strategies, "Comma-separated strategy[:morph] list for sweeps")->delimiter(',');
  app.add_option("--morph", o.morph, "none | dilate | close");
  app.add_option("--edge-source", o.edge_source, "predicted | true");
  app.add_option("--factor", o.factor, "Low-resolution prescan factor")->check(CLI::PositiveNumber);
  app.add_option("--alpha", o.alpha, "TV weight");
  app.add_option("--eps-tv", o.eps_tv, "TV smoothing");
  app.add_option("--iters", o.iters, "Maximum solver iterations");
  app.add_option("--grad-tol", o.grad_tol, "Relative gradient stopping tolerance");
  app.add_option("--init", o.init, "mean | zero | bicubic");
  app.add_option("--seed", o.seed, "RNG seed");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--format", o.format, "csv | json");
  app.add_option("--mask-format", o.mask_format, "pbm | pgm");
  app.add_option("--meas-format", o.meas_format, "bin | txt | json");
  app.add_option("--grid", o.grid, "Comma-separated sweep grid")->delimiter(',');
  app.add_option("--images", o.images, "Extra images for table1")->delimiter(',');
  app.add_option("--meas", o.meas, "Measurements file for recover");
  app.add_option("--trace", o.trace, "Write the solver trace CSV here");
  app.add_option("--reference", o.reference, "Reference image for eval");
  app.add_option("--test", o.test, "Test image for eval");
  app.add_flag("--no-artifacts", o.no_artifacts, "Skip per-run masks, measurements and images");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"sample", "Build a sampling mask bundle and measurements"},
      {"recover", "TV recovery from a measurements file"},
      {"eval", "PSNR and SSIM of --test against --reference"},
      {"sweep-eta1", "Total sampling ratio sweep with a fixed edge budget"},
      {"sweep-eta2", "Adaptive share sweep at fixed eta1"},
      {"table1", "Random vs MAR with dilated and closed predicted edges"},
      {"table2", "Random vs MAR at the best and the largest eta2"},
      {"fig6", "Standard CS vs random TV vs MAR TV on the ball"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "sample") return cmd_sample(o);
    if (name == "recover") return cmd_recover(o);
    if (name == "eval") return cmd_eval(o);
    return cmd_table(name, o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
}
