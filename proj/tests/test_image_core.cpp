#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "marsense/errors.hpp"
#include "marsense/image_io.hpp"
#include "marsense/metrics.hpp"
#include "marsense/synthetic.hpp"
#include "test_support.hpp"

using namespace marsense;

namespace {

GrayImage procedural(int n, int kind) {
  GrayImage img(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) img(r, c) = kind == 0 ? (r * 7 + c * 13) % 256 : (r * c) % 256;
  return img;
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST_CASE("GrayImage validates its inputs") {
  CHECK_THROWS_AS(GrayImage(0, 4), UsageError);
  CHECK_THROWS_AS(GrayImage(2, 2, std::vector<double>(3)), DimensionMismatch);
  CHECK_THROWS_AS(GrayImage(1, 1, std::vector<double>{std::numeric_limits<double>::quiet_NaN()}), DataError);

  GrayImage img(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(img(1, 0) == 4);
  CHECK(img.transposed()(0, 1) == 4);
  CHECK(img.transposed().dims() == Dims{2, 3});
  GrayImage wide(2, 1, std::vector<double>{-3, 300});
  CHECK(wide.clamped() == GrayImage(2, 1, std::vector<double>{0, 255}));
}

TEST_CASE("BinaryMap set algebra") {
  const BinaryMap a = testing::random_map(9, 7, 1), b = testing::random_map(9, 7, 2);
  CHECK((a | b).popcount() + (a & b).popcount() == a.popcount() + b.popcount());
  CHECK(a.minus(b).popcount() == a.popcount() - (a & b).popcount());
  CHECK((a & b).subset_of(a));
  CHECK(a.complement().popcount() == a.size() - a.popcount());
  CHECK(a.transposed().transposed() == a);
  for (std::size_t i : a.support()) CHECK(a[i]);
  CHECK(a.support().size() == a.popcount());
  CHECK_THROWS_AS(a | BinaryMap(7, 9), DimensionMismatch);
}

TEST_CASE("PSNR") {
  const GrayImage ref(8, 8, 100.0);
  GrayImage test = ref;
  CHECK(psnr(ref, test).psnr_db == kPsnrCapDb);
  test(0, 0) = 110.0;  // MSE = 100 / 64
  const QualityReport q = psnr(ref, test);
  CHECK(q.mse == doctest::Approx(100.0 / 64.0));
  CHECK(q.psnr_db == doctest::Approx(10.0 * std::log10(255.0 * 255.0 * 64.0 / 100.0)));
  CHECK_THROWS_AS(psnr(ref, GrayImage(8, 7)), DimensionMismatch);
}

TEST_CASE("SSIM against reference values") {
  // Gaussian window sigma 1.5, K1 0.01, K2 0.03, L 255, population statistics
  // over valid windows; values from scikit-image structural_similarity.
  CHECK(ssim(GrayImage(16, 16, 0.0), GrayImage(16, 16, 255.0)) == doctest::Approx(9.999000099990004e-05).epsilon(1e-9));
  const GrayImage p = procedural(32, 0), q = procedural(32, 1);
  GrayImage inv = p;
  for (double& v : inv.pixels()) v = 255.0 - v;
  CHECK(ssim(p, inv) == doctest::Approx(-0.6795355114442075).epsilon(1e-9));
  CHECK(ssim(p, q) == doctest::Approx(0.09816567625061137).epsilon(1e-9));
  CHECK(ssim(p, p) == doctest::Approx(1.0));
  CHECK(ssim(p, q) == doctest::Approx(ssim(q, p)));
  CHECK_THROWS_AS(ssim(GrayImage(10, 10), GrayImage(10, 10)), DimensionMismatch);
}

TEST_CASE("Shepp-Logan phantom matches an independent rendering") {
  // Reference: vectorized ellipse rasterization on linspace(-1, 1, 64) with the
  // y axis pointing up, rescaled to [0, 255] and rounded half up.
  const GrayImage p = shepp_logan(64);
  double sum = 0.0;
  std::size_t n0 = 0, n51 = 0, n77 = 0, n255 = 0;
  for (double v : p.pixels()) {
    sum += v;
    n0 += v == 0.0;
    n51 += v == 51.0;
    n77 += v == 77.0;
    n255 += v == 255.0;
  }
  CHECK(sum == 127691.0);
  CHECK(n0 == 2410);
  CHECK(n51 == 1322);
  CHECK(n77 == 173);
  CHECK(n255 == 182);
  CHECK(p(32, 32) == 51.0);
  CHECK_THROWS_AS(shepp_logan(8), UsageError);
}

TEST_CASE("ball and decimation") {
  const GrayImage b = ball_image(64);
  CHECK(b(31, 31) == 255.0);
  CHECK(b(0, 0) == 0.0);
  // radius 16 around (31.5, 31.5)
  CHECK(b(31, 47) == 255.0);
  CHECK(b(31, 48) == 0.0);
  const GrayImage d = downsample_decimate(GrayImage(10, 9, 1.0), 4);
  CHECK(d.dims() == Dims{3, 3});
}

TEST_CASE("PGM round trip and malformed inputs") {
  testing::TempDir dir("io");
  const GrayImage img = testing::random_image(13, 7, 5).clamped();
  GrayImage rounded = img;
  for (double& v : rounded.pixels()) v = std::round(v);
  save_image(img, dir.path() / "a.pgm");
  CHECK(load_image(dir.path() / "a.pgm") == rounded);

  write_bytes(dir.path() / "comment.pgm", std::string("P5\n# hi\n2 1\n255\n") + '\x01' + '\xff');
  CHECK(load_image(dir.path() / "comment.pgm") == GrayImage(2, 1, std::vector<double>{1, 255}));

  auto kind_of = [&](const std::string& name) {
    try {
      load_image(dir.path() / name);
    } catch (const ImageIoError& e) {
      return e.kind();
    }
    FAIL("expected ImageIoError");
    return ImageIoError::Kind::Unwritable;
  };
  CHECK(kind_of("missing.pgm") == ImageIoError::Kind::MissingFile);
  write_bytes(dir.path() / "p2.pgm", "P2\n2 1\n255\n1 2\n");
  CHECK(kind_of("p2.pgm") == ImageIoError::Kind::MalformedHeader);
  write_bytes(dir.path() / "deep.pgm", "P5\n2 1\n65535\nabcd");
  CHECK(kind_of("deep.pgm") == ImageIoError::Kind::UnsupportedDepth);
  write_bytes(dir.path() / "short.pgm", "P5\n4 4\n255\nabc");
  CHECK(kind_of("short.pgm") == ImageIoError::Kind::MalformedPayload);
}

TEST_CASE("binary map persistence") {
  testing::TempDir dir("maps");
  const BinaryMap m = testing::random_map(11, 5, 9);
  save_map(m, dir.path() / "m.pbm", MapFormat::Pbm);
  save_map(m, dir.path() / "m.pgm", MapFormat::Pgm);
  CHECK(load_map(dir.path() / "m.pbm") == m);
  CHECK(load_map(dir.path() / "m.pgm") == m);
  CHECK(map_format_from_string("pgm") == MapFormat::Pgm);
  CHECK_THROWS_AS(map_format_from_string("png"), UsageError);
}
