#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include <doctest.h>

#include "satseg/raster.hpp"
#include "satseg/rng.hpp"

using namespace satseg;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  auto dir = fs::temp_directory_path() / "satseg_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

MultispectralRaster random_u16_raster(int w, int h, int nbands, int bit_depth,
                                      uint64_t seed) {
  std::vector<BandName> bands;
  for (int i = 0; i < nbands; ++i)
    bands.push_back(i < kSensorBandCount ? BandName(Band(i))
                                         : BandName::index("x" + std::to_string(i)));
  MultispectralRaster r(w, h, bands, Dtype::u16, bit_depth);
  Rng rng(seed);
  for (auto& v : r.data<uint16_t>())
    v = uint16_t(rng.uniform_int(1u << bit_depth));
  return r;
}

}  // namespace

TEST_CASE("load_raster reads a hand-built minimal container") {
  // Smallest legal file: 1x1, one band, u8, single zero byte payload.
  std::string header =
      R"({"version":1,"width":1,"height":1,"bands":["Pan"],"dtype":"u8","bit_depth":8})";
  auto path = temp_file("minimal.msr");
  {
    std::ofstream out(path, std::ios::binary);
    out.write("MSRASTER\n", 9);
    uint64_t hlen = header.size();
    out.write(reinterpret_cast<const char*>(&hlen), 8);
    out.write(header.data(), std::streamsize(header.size()));
    char zero = 0;
    out.write(&zero, 1);
  }
  auto r = load_raster(path);
  CHECK(r.width() == 1);
  CHECK(r.height() == 1);
  CHECK(r.band_count() == 1);
  CHECK(r.bands()[0] == BandName(Band::Pan));
  CHECK(r.dtype() == Dtype::u8);
  CHECK(r.data<uint8_t>()[0] == 0);
}

TEST_CASE("load_raster rejects short payload with LengthMismatch") {
  std::string header =
      R"({"version":1,"width":4,"height":4,"bands":["Pan"],"dtype":"u8","bit_depth":8})";
  auto path = temp_file("short.msr");
  {
    std::ofstream out(path, std::ios::binary);
    out.write("MSRASTER\n", 9);
    uint64_t hlen = header.size();
    out.write(reinterpret_cast<const char*>(&hlen), 8);
    out.write(header.data(), std::streamsize(header.size()));
    char buf[3] = {0, 0, 0};  // declared 16 bytes, provide 3
    out.write(buf, 3);
  }
  CHECK_THROWS_WITH_AS(load_raster(path), doctest::Contains("payload"),
                       Error);
  try {
    load_raster(path);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("load_raster rejects bad magic and bad version") {
  auto path = temp_file("badmagic.msr");
  {
    std::ofstream out(path, std::ios::binary);
    out.write("NOTRASTER", 9);
  }
  CHECK_THROWS_AS(load_raster(path), Error);

  std::string header =
      R"({"version":2,"width":1,"height":1,"bands":["Pan"],"dtype":"u8","bit_depth":8})";
  auto path2 = temp_file("badver.msr");
  {
    std::ofstream out(path2, std::ios::binary);
    out.write("MSRASTER\n", 9);
    uint64_t hlen = header.size();
    out.write(reinterpret_cast<const char*>(&hlen), 8);
    out.write(header.data(), std::streamsize(header.size()));
    char zero = 0;
    out.write(&zero, 1);
  }
  try {
    load_raster(path2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedVersion);
  }
}

TEST_CASE("save/load round-trip is bit-identical for a random 16-band u16 raster") {
  auto r = random_u16_raster(32, 32, 16, 11, 1234);
  r.set_ground_resolution(1.24);
  auto path = temp_file("roundtrip.msr");
  save_raster(r, path);
  auto back = load_raster(path);
  CHECK(back == r);
}

TEST_CASE("round-trip preserves all dtypes") {
  for (Dtype dt : {Dtype::u8, Dtype::u16, Dtype::f32}) {
    MultispectralRaster r(5, 3, {BandName(Band::Red), BandName(Band::Green)},
                          dt, dt == Dtype::u8 ? 8 : dt == Dtype::u16 ? 11 : 32);
    Rng rng(7);
    switch (dt) {
      case Dtype::u8:
        for (auto& v : r.data<uint8_t>()) v = uint8_t(rng.uniform_int(256));
        break;
      case Dtype::u16:
        for (auto& v : r.data<uint16_t>()) v = uint16_t(rng.uniform_int(2048));
        break;
      case Dtype::f32:
        for (auto& v : r.data<float>()) v = float(rng.uniform(-2.0, 2.0));
        break;
    }
    auto path = temp_file("rt_dtype.msr");
    save_raster(r, path);
    CHECK(load_raster(path) == r);
  }
}

TEST_CASE("save_raster to unwritable path raises IoFailure") {
  MultispectralRaster r(1, 1, {BandName(Band::Pan)}, Dtype::u8, 8);
  try {
    save_raster(r, "/nonexistent-dir/sub/x.msr");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoFailure);
  }
}

TEST_CASE("two saves of the same raster are byte-identical") {
  auto r = random_u16_raster(16, 8, 4, 11, 99);
  auto p1 = temp_file("det1.msr");
  auto p2 = temp_file("det2.msr");
  save_raster(r, p1);
  save_raster(r, p2);
  CHECK(file_bytes(p1) == file_bytes(p2));
}

TEST_CASE("u16 bit-depth invariant is enforced") {
  MultispectralRaster r(2, 2, {BandName(Band::SWIR1)}, Dtype::u16, 11);
  r.data<uint16_t>()[3] = 4096;  // >= 2^11
  CHECK_THROWS_AS(r.validate(), Error);
  auto path = temp_file("depth.msr");
  CHECK_THROWS_AS(save_raster(r, path), Error);
}

TEST_CASE("normalize maps min to 0 and max to 1 for a uniform ramp") {
  MultispectralRaster r(64, 32, {BandName(Band::Blue)}, Dtype::u16, 11);
  auto d = r.data<uint16_t>();
  for (size_t i = 0; i < d.size(); ++i) d[i] = uint16_t(i);  // 0..2047
  auto out = normalize(r, 0.0, 1.0);
  auto v = out.data<float>();
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[2047] == doctest::Approx(1.0));
  CHECK(v[1024] == doctest::Approx(1024.0 / 2047.0).epsilon(1e-6));
  for (float x : v) {
    CHECK(x >= 0.0f);
    CHECK(x <= 1.0f);
  }
}

TEST_CASE("normalize is monotone and clips to [0,1] at tighter percentiles") {
  auto r = random_u16_raster(48, 48, 1, 11, 5);
  auto out = normalize(r, 0.01, 0.99);
  auto src = r.band_data<uint16_t>(0);
  auto dst = out.band_data<float>(0);
  for (size_t i = 0; i < src.size(); ++i)
    for (size_t j = 0; j < 50; ++j) {
      size_t k = (i * 131 + j * 17) % src.size();
      if (src[i] < src[k]) CHECK(dst[i] <= dst[k]);
    }
  for (float x : dst) {
    CHECK(x >= 0.0f);
    CHECK(x <= 1.0f);
  }
}

TEST_CASE("normalize degenerate bands map to zero with a warning") {
  MultispectralRaster r(4, 4, {BandName(Band::SWIR2)}, Dtype::u16, 14);
  for (auto& v : r.data<uint16_t>()) v = 777;
  std::vector<std::string> warnings;
  auto out = normalize(r, 0.01, 0.99, &warnings);
  for (float x : out.data<float>()) CHECK(x == 0.0f);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("DegenerateBand") != std::string::npos);

  MultispectralRaster single(1, 1, {BandName(Band::Red)}, Dtype::u8, 8);
  single.data<uint8_t>()[0] = 42;
  warnings.clear();
  auto out2 = normalize(single, 0.0, 1.0, &warnings);
  CHECK(out2.data<float>()[0] == 0.0f);
  CHECK(warnings.size() == 1);
}

TEST_CASE("nearest upsample 2x2 -> 4x4 replicates each pixel in a 2x2 block") {
  MultispectralRaster r(2, 2, {BandName(Band::Red)}, Dtype::u8, 8);
  auto d = r.data<uint8_t>();
  d[0] = 1; d[1] = 2; d[2] = 3; d[3] = 4;
  auto up = resample(r, 4, 4, Resample::nearest);
  auto u = up.data<uint8_t>();
  uint8_t expect[16] = {1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4};
  for (int i = 0; i < 16; ++i) CHECK(u[i] == expect[i]);
}

TEST_CASE("resample at identity dims returns an identical raster") {
  auto r = random_u16_raster(9, 7, 3, 11, 44);
  CHECK(resample(r, 9, 7, Resample::nearest) == r);
}

TEST_CASE("bilinear upsample of a constant band stays constant") {
  MultispectralRaster r(3, 3, {BandName(Band::NIR1)}, Dtype::f32, 32);
  for (auto& v : r.data<float>()) v = 0.625f;
  auto up = resample(r, 10, 7, Resample::bilinear);
  for (float v : up.data<float>()) CHECK(v == doctest::Approx(0.625f));
  CHECK(up.dtype() == Dtype::f32);
}

TEST_CASE("nearest resampling introduces no new values") {
  auto r = random_u16_raster(13, 11, 2, 11, 3);
  auto out = resample(r, 29, 5, Resample::nearest);
  for (size_t b = 0; b < 2; ++b) {
    std::set<uint16_t> src(r.band_data<uint16_t>(b).begin(),
                           r.band_data<uint16_t>(b).end());
    for (uint16_t v : out.band_data<uint16_t>(b))
      CHECK(src.count(v) == 1);
  }
}

TEST_CASE("stack concatenates band lists and select_bands un-stacks exactly") {
  auto rgb = random_u16_raster(8, 8, 3, 11, 1);    // Coastal, Blue, Green
  auto m = random_u16_raster(8, 8, 3, 11, 2);
  // Rename m's bands so names stay unique.
  auto m2 = MultispectralRaster(8, 8,
                                {BandName(Band::Red), BandName(Band::RedEdge),
                                 BandName(Band::NIR1)},
                                Dtype::u16, 11);
  std::copy(m.data<uint16_t>().begin(), m.data<uint16_t>().end(),
            m2.data<uint16_t>().begin());
  auto idx = MultispectralRaster(
      8, 8, {BandName::index("ndwi"), BandName::index("ccci")}, Dtype::u16, 11);

  auto stacked = stack({rgb, m2, idx});
  CHECK(stacked.band_count() == 8);
  for (size_t i = 0; i < 3; ++i) CHECK(stacked.bands()[i] == rgb.bands()[i]);
  for (size_t i = 0; i < 3; ++i) CHECK(stacked.bands()[3 + i] == m2.bands()[i]);
  CHECK(stacked.bands()[6] == BandName::index("ndwi"));

  auto back = select_bands(stacked, m2.bands());
  CHECK(back == m2);
}

TEST_CASE("stack of one raster is the same raster") {
  auto r = random_u16_raster(6, 6, 2, 11, 12);
  CHECK(stack({r}) == r);
}

TEST_CASE("stack rejects mismatched heights and duplicate names") {
  auto a = random_u16_raster(8, 8, 2, 11, 1);
  auto b = random_u16_raster(8, 4, 1, 11, 2);
  try {
    stack({a, b});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
  try {
    stack({a, a});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateBandName);
  }
}

TEST_CASE("label masks round-trip through the container with class names") {
  LabelMask m(6, 4, {ClassLabel::Waterway, ClassLabel::Buildings});
  auto w = m.plane_for(ClassLabel::Waterway);
  w[5] = 1;
  w[6] = 1;
  auto b = m.plane_for(ClassLabel::Buildings);
  b[0] = 1;
  auto path = temp_file("mask.msr");
  save_mask(m, path);
  auto back = load_mask(path);
  CHECK(back == m);

  // Container header carries "class:<label>" band names.
  auto bytes = file_bytes(path);
  CHECK(bytes.find("class:Waterway") != std::string::npos);
  CHECK(bytes.find("class:Buildings") != std::string::npos);
}

TEST_CASE("a pixel may carry multiple class bits") {
  LabelMask m(2, 2, {ClassLabel::Trees, ClassLabel::Crops});
  m.plane_for(ClassLabel::Trees)[0] = 1;
  m.plane_for(ClassLabel::Crops)[0] = 1;
  CHECK(m.plane(0)[0] + m.plane(1)[0] == 2);
}
