#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "marsense/baseline_cs.hpp"
#include "marsense/edge_prior.hpp"
#include "marsense/errors.hpp"
#include "marsense/harness.hpp"
#include "marsense/metrics.hpp"
#include "marsense/synthetic.hpp"
#include "marsense/tv_recovery.hpp"

namespace py = pybind11;
using namespace marsense;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

GrayImage to_image(const DoubleArray& a) {
  if (a.ndim() != 2) throw UsageError("expected a 2-D array");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  return GrayImage(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> from_image(const GrayImage& img) {
  py::array_t<double> out({img.height(), img.width()});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

BinaryMap to_map(const BoolArray& a) {
  if (a.ndim() != 2) throw UsageError("expected a 2-D mask");
  std::vector<std::uint8_t> bits(a.data(), a.data() + a.size());
  return BinaryMap(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::move(bits));
}

py::array_t<bool> from_map(const BinaryMap& m) {
  py::array_t<bool> out({m.height(), m.width()});
  bool* dst = out.mutable_data();
  for (std::size_t i = 0; i < m.size(); ++i) dst[i] = m[i];
  return out;
}

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["image"] = r.image;
  d["strategy"] = r.strategy;
  d["morph"] = r.morph;
  d["eta1"] = r.eta1;
  d["eta2"] = r.eta2;
  d["psnr_db"] = r.psnr_db;
  d["ssim"] = r.ssim;
  d["iterations"] = r.iterations;
  d["wall_time_s"] = r.wall_time_s;
  d["seed"] = r.seed;
  return d;
}

AcquisitionConfig acquisition(const std::string& strategy, double eta1, std::optional<double> eta2,
                              std::optional<std::size_t> edge_budget, const std::string& morph,
                              const std::string& edge_source, int factor, std::uint64_t seed) {
  AcquisitionConfig cfg;
  const StrategySpec s = StrategySpec::parse(strategy, morph_from_string(morph));
  cfg.strategy = s.strategy;
  cfg.morph = s.morph;
  cfg.edge_source = s.edge_source == EdgeSource::GroundTruth ? s.edge_source : edge_source_from_string(edge_source);
  cfg.target_eta1 = eta1;
  cfg.target_eta2 = eta2;
  cfg.edge_budget = edge_budget;
  cfg.downsample_factor = factor;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Edge-guided adaptive sampling masks, TV recovery and image metrics";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("shepp_logan", [](int n) { return from_image(shepp_logan(n)); }, py::arg("n") = 256);
  m.def("ball_image", [](int n) { return from_image(ball_image(n)); }, py::arg("n") = 64);
  m.def("load_image", [](const std::filesystem::path& p) { return from_image(load_image(p)); });
  m.def("save_image", [](const DoubleArray& a, const std::filesystem::path& p) { save_image(to_image(a), p); });

  m.def("psnr", [](const DoubleArray& ref, const DoubleArray& test) { return psnr(to_image(ref), to_image(test)).psnr_db; });
  m.def("ssim", [](const DoubleArray& ref, const DoubleArray& test) { return ssim(to_image(ref), to_image(test)); });

  m.def("sobel_magnitude", [](const DoubleArray& a) { return from_image(sobel_magnitude(to_image(a))); });
  m.def("bicubic_upsample", [](const DoubleArray& a, int factor) { return from_image(bicubic_upsample(to_image(a), factor)); },
        py::arg("low"), py::arg("factor") = 4);
  m.def("threshold_top_k", [](const DoubleArray& mag, std::size_t k) { return from_map(threshold_top_k(to_image(mag), k)); });
  m.def("morph", [](const BoolArray& a, const std::string& op, int radius) {
          return from_map(apply_morph(to_map(a), morph_from_string(op), StructuringElement::square(radius)));
        },
        py::arg("mask"), py::arg("op") = "dilate", py::arg("radius") = 1);

  m.def("build_masks",
        [](const DoubleArray& image, const std::string& strategy, double eta1, std::optional<double> eta2,
           std::optional<std::size_t> edge_budget, const std::string& morph, const std::string& edge_source, int factor,
           std::uint64_t seed) {
          const MaskBundle b = build_bundle(to_image(image),
                                            acquisition(strategy, eta1, eta2, edge_budget, morph, edge_source, factor, seed));
          py::dict d;
          d["s_l"] = from_map(b.s_l.map);
          d["s_a"] = from_map(b.s_a.map);
          d["s_r"] = from_map(b.s_r.map);
          d["s_m"] = from_map(b.s_m.map);
          d["eta1"] = b.eta1;
          d["eta2"] = b.eta2;
          return d;
        },
        py::arg("image"), py::arg("strategy") = "mar", py::arg("eta1") = 0.30, py::arg("eta2") = py::none(),
        py::arg("edge_budget") = py::none(), py::arg("morph") = "dilate", py::arg("edge_source") = "predicted",
        py::arg("factor") = 4, py::arg("seed") = 1);

  m.def("recover",
        [](const DoubleArray& image, const BoolArray& mask, double alpha, double eps_tv, int iters, const std::string& init) {
          const BinaryMap map = to_map(mask);
          TvConfig cfg;
          cfg.alpha = alpha;
          cfg.eps_tv = eps_tv;
          cfg.max_iters = iters;
          RecoveryResult res;
          {
            py::gil_scoped_release release;
            const Measurements meas = apply_mask(to_image(image), map);
            res = recover(meas, map, cfg, init_mode_from_string(init));
          }
          py::dict info;
          info["iterations"] = res.iterations;
          info["converged"] = res.converged;
          info["objective"] = res.objective_trace;
          return py::make_tuple(from_image(res.image), info);
        },
        py::arg("image"), py::arg("mask"), py::arg("alpha") = 8.0, py::arg("eps_tv") = 2.55, py::arg("iters") = 300,
        py::arg("init") = "mean",
        "TV recovery from the pixels of `image` selected by `mask`; the rest of `image` is ignored.");

  m.def("standard_cs",
        [](const DoubleArray& image, double ratio, std::uint64_t seed, double sparsity_fraction) {
          const GrayImage f = to_image(image);
          const int rows = static_cast<int>(std::llround(ratio * static_cast<double>(f.size())));
          const DenseSensingMatrix phi(rows, static_cast<int>(f.size()), seed);
          OmpOptions opts;
          opts.max_sparsity = std::max(1, static_cast<int>(sparsity_fraction * rows));
          return from_image(omp(gaussian_measure(f, phi), phi, f.dims(), opts).image.clamped());
        },
        py::arg("image"), py::arg("ratio") = 0.30, py::arg("seed") = 1, py::arg("sparsity_fraction") = 0.25);

  m.def("run",
        [](const std::string& image, int size, const std::string& strategy, double eta1, std::optional<double> eta2,
           int iters, std::uint64_t seed) {
          ExperimentSpec spec;
          spec.image = image;
          spec.generator_size = size;
          spec.strategies = {StrategySpec::parse(strategy)};
          spec.acquisition.target_eta1 = eta1;
          spec.acquisition.target_eta2 = eta2;
          spec.recovery.max_iters = iters;
          spec.seed = seed;
          spec.persist_artifacts = false;
          return row_dict(run_single(spec));
        },
        py::arg("image") = "phantom", py::arg("size") = 256, py::arg("strategy") = "mar", py::arg("eta1") = 0.30,
        py::arg("eta2") = py::none(), py::arg("iters") = 300, py::arg("seed") = 1);
}
