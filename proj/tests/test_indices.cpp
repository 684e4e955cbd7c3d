#include <cmath>

#include <doctest.h>

#include "satseg/indices.hpp"
#include "satseg/rng.hpp"

using namespace satseg;

namespace {

MultispectralRaster bands_raster(int w, int h,
                                 std::vector<std::pair<Band, float>> fills) {
  std::vector<BandName> names;
  for (auto& [b, v] : fills) names.push_back(BandName(b));
  MultispectralRaster r(w, h, names, Dtype::f32, 32);
  for (size_t i = 0; i < fills.size(); ++i) {
    auto d = r.band_data<float>(i);
    std::fill(d.begin(), d.end(), fills[i].second);
  }
  return r;
}

}  // namespace

TEST_CASE("ccci direct evaluation and degenerate pixels") {
  // NIR=0.8, RedEdge=0.4, Red=0.2 -> (0.4/1.2)*(1.0/0.6) = 5/9
  auto r = bands_raster(
      3, 3, {{Band::NIR1, 0.8f}, {Band::RedEdge, 0.4f}, {Band::Red, 0.2f}});
  auto m = ccci(r);
  for (float v : m.values) CHECK(v == doctest::Approx(5.0 / 9.0).epsilon(1e-6));

  // NIR == RedEdge (and NIR != Red): zero numerator
  auto rz = bands_raster(
      2, 2, {{Band::NIR1, 0.5f}, {Band::RedEdge, 0.5f}, {Band::Red, 0.2f}});
  for (float v : ccci(rz).values) CHECK(v == 0.0f);

  // NIR == Red: undefined
  auto rs = bands_raster(
      2, 2, {{Band::NIR1, 0.4f}, {Band::RedEdge, 0.3f}, {Band::Red, 0.4f}});
  for (float v : ccci(rs).values) CHECK(std::isnan(v));
}

TEST_CASE("ndwi direct evaluation and degenerate pixels") {
  auto r = bands_raster(4, 2, {{Band::Green, 0.6f}, {Band::NIR1, 0.2f}});
  for (float v : ndwi(r).values) CHECK(v == doctest::Approx(0.5).epsilon(1e-6));

  auto re = bands_raster(2, 2, {{Band::Green, 0.3f}, {Band::NIR1, 0.3f}});
  for (float v : ndwi(re).values) CHECK(v == 0.0f);

  auto rz = bands_raster(2, 2, {{Band::Green, 0.0f}, {Band::NIR1, 0.0f}});
  for (float v : ndwi(rz).values) CHECK(std::isnan(v));
}

TEST_CASE("ndvi direct evaluation") {
  auto r = bands_raster(2, 2, {{Band::NIR1, 0.9f}, {Band::Red, 0.1f}});
  for (float v : ndvi(r).values) CHECK(v == doctest::Approx(0.8).epsilon(1e-6));

  auto re = bands_raster(2, 2, {{Band::NIR1, 0.4f}, {Band::Red, 0.4f}});
  for (float v : ndvi(re).values) CHECK(v == 0.0f);

  auto rz = bands_raster(2, 2, {{Band::NIR1, 0.0f}, {Band::Red, 0.0f}});
  for (float v : ndvi(rz).values) CHECK(std::isnan(v));
}

TEST_CASE("missing bands are reported") {
  auto r = bands_raster(2, 2, {{Band::Green, 0.5f}});
  try {
    ndwi(r);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingBand);
  }
}

TEST_CASE("ndwi and ndvi stay within [-1,1]; all indices scale-invariant") {
  Rng rng(321);
  MultispectralRaster r(16, 16,
                        {BandName(Band::Green), BandName(Band::Red),
                         BandName(Band::RedEdge), BandName(Band::NIR1)},
                        Dtype::f32, 32);
  for (auto& v : r.data<float>()) v = float(rng.uniform(0.05, 1.0));

  for (auto* idx : {&ndwi, &ndvi}) {
    auto m = (*idx)(r, Band::NIR1);
    for (float v : m.values)
      if (!std::isnan(v)) {
        CHECK(v >= -1.0f);
        CHECK(v <= 1.0f);
      }
  }

  for (float k : {0.5f, 2.0f, 10.0f}) {
    MultispectralRaster scaled = r;
    for (auto& v : scaled.data<float>()) v *= k;
    for (auto compute : {&ccci, &ndwi, &ndvi}) {
      auto base = (*compute)(r, Band::NIR1);
      auto sc = (*compute)(scaled, Band::NIR1);
      for (size_t i = 0; i < base.values.size(); ++i) {
        if (std::isnan(base.values[i]) || std::isnan(sc.values[i])) continue;
        CHECK(sc.values[i] ==
              doctest::Approx(base.values[i]).epsilon(1e-4));
      }
    }
  }
}

TEST_CASE("ccci is finite wherever defined") {
  Rng rng(11);
  MultispectralRaster r(32, 32,
                        {BandName(Band::Red), BandName(Band::RedEdge),
                         BandName(Band::NIR1)},
                        Dtype::f32, 32);
  for (auto& v : r.data<float>()) v = float(rng.uniform());
  for (float v : ccci(r).values)
    if (!std::isnan(v)) CHECK(std::isfinite(v));
}

TEST_CASE("threshold is closed at the boundary and drops NaN pixels") {
  IndexMap m;
  m.width = 5;
  m.height = 1;
  m.index_name = "test";
  m.values = {-0.5f, 0.0f, 0.25f, std::nanf(""), 0.7f};

  auto above = threshold_index(m, 0.25f, Polarity::above);
  std::vector<uint8_t> want_above = {0, 0, 1, 0, 1};  // exactly-t included
  for (size_t i = 0; i < 5; ++i) CHECK(above.plane(0)[i] == want_above[i]);

  auto below = threshold_index(m, 0.0f, Polarity::below);
  std::vector<uint8_t> want_below = {1, 1, 0, 0, 0};
  for (size_t i = 0; i < 5; ++i) CHECK(below.plane(0)[i] == want_below[i]);

  // All values below t with polarity above: empty mask.
  auto empty = threshold_index(m, 2.0f, Polarity::above);
  for (uint8_t v : empty.plane(0)) CHECK(v == 0);
}

TEST_CASE("synthetic water patch thresholds to exactly the water pixels") {
  MultispectralRaster r(8, 8, {BandName(Band::Green), BandName(Band::NIR1)},
                        Dtype::f32, 32);
  auto g = r.band_data<float>(0);
  auto n = r.band_data<float>(1);
  std::vector<uint8_t> truth(64, 0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      bool water = x >= 2 && x < 5 && y >= 3 && y < 6;
      truth[size_t(y) * 8 + x] = water;
      // water: NDWI = 0.5; land: NDWI = -0.3 by construction
      g[size_t(y) * 8 + x] = water ? 0.6f : 0.35f;
      n[size_t(y) * 8 + x] = water ? 0.2f : 0.65f;
    }
  auto mask = threshold_index(ndwi(r), 0.0f, Polarity::above);
  for (size_t i = 0; i < truth.size(); ++i) CHECK(mask.plane(0)[i] == truth[i]);
}

TEST_CASE("connected components: L-shape, diagonal pixels, empty mask") {
  LabelMask m(4, 4, {ClassLabel::Waterway});
  auto p = m.plane(0);
  // L-shaped blob: (0,0), (0,1), (1,1) in (y,x)
  p[0] = 1;
  p[1] = 1;
  p[5] = 1;
  auto c4 = connected_components(m, 4);
  REQUIRE(c4.count() == 1);
  CHECK(c4.areas[0] == 3);

  LabelMask d(4, 4, {ClassLabel::Waterway});
  d.plane(0)[0] = 1;
  d.plane(0)[5] = 1;  // diagonal neighbors
  CHECK(connected_components(d, 4).count() == 2);
  CHECK(connected_components(d, 8).count() == 1);

  LabelMask e(4, 4, {ClassLabel::Waterway});
  CHECK(connected_components(e, 8).count() == 0);
}

TEST_CASE("component areas sum to the foreground and ids are dense") {
  Rng rng(77);
  LabelMask m(64, 64, {ClassLabel::Waterway});
  auto p = m.plane(0);
  int64_t fg = 0;
  for (auto& v : p) {
    v = rng.uniform() < 0.35 ? 1 : 0;
    fg += v;
  }
  auto cs = connected_components(m, 8);
  int64_t total = 0;
  for (auto a : cs.areas) total += a;
  CHECK(total == fg);
  int32_t max_id = 0;
  for (auto id : cs.labels) max_id = std::max(max_id, id);
  CHECK(size_t(max_id) == cs.count());
}

TEST_CASE("split_water_by_area partitions components by size") {
  LabelMask m(40, 40, {ClassLabel::Waterway});
  auto p = m.plane(0);
  // 600-px blob: 30x20 rectangle; 12-px blob: 3x4 rectangle, disjoint.
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 30; ++x) p[size_t(y) * 40 + x] = 1;
  for (int y = 30; y < 34; ++y)
    for (int x = 35; x < 38; ++x) p[size_t(y) * 40 + x] = 1;

  auto cs = connected_components(m, 8);
  REQUIRE(cs.count() == 2);
  auto [waterway, standing] = split_water_by_area(cs, 100);

  int64_t ww = 0, sw = 0;
  for (uint8_t v : waterway.plane(0)) ww += v;
  for (uint8_t v : standing.plane(0)) sw += v;
  CHECK(ww == 600);
  CHECK(sw == 12);
  // Disjoint and union equals the foreground.
  for (size_t i = 0; i < size_t(40) * 40; ++i) {
    CHECK(waterway.plane(0)[i] + standing.plane(0)[i] == (p[i] ? 1 : 0));
  }

  auto [all_water, none] = split_water_by_area(cs, 1);
  int64_t aw = 0;
  for (uint8_t v : all_water.plane(0)) aw += v;
  CHECK(aw == 612);

  auto [empty_w, all_standing] = split_water_by_area(cs, 100000);
  int64_t as = 0;
  for (uint8_t v : all_standing.plane(0)) as += v;
  CHECK(as == 612);
}

TEST_CASE("index maps round-trip through the raster container") {
  IndexMap m;
  m.width = 3;
  m.height = 2;
  m.index_name = "ndwi";
  m.values = {0.1f, -0.2f, std::nanf(""), 0.9f, 0.0f, -1.0f};
  auto r = index_to_raster(m);
  CHECK(r.bands()[0] == BandName::index("ndwi"));
  auto back = index_from_raster(r);
  CHECK(back.index_name == "ndwi");
  for (size_t i = 0; i < m.values.size(); ++i) {
    if (std::isnan(m.values[i]))
      CHECK(std::isnan(back.values[i]));
    else
      CHECK(back.values[i] == m.values[i]);
  }
}
