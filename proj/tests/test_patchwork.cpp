#include <algorithm>
#include <set>

#include <doctest.h>

#include "satseg/patchwork.hpp"
#include "satseg/rng.hpp"

using namespace satseg;

namespace {

std::vector<float> iota_plane(int s) {
  std::vector<float> v(size_t(s) * s);
  for (size_t i = 0; i < v.size(); ++i) v[i] = float(i);
  return v;
}

constexpr Dih4 kAll[] = {Dih4::id,    Dih4::rot90,     Dih4::rot180,
                         Dih4::rot270, Dih4::flipH,     Dih4::flipV,
                         Dih4::transpose, Dih4::antitranspose};

}  // namespace

TEST_CASE("dih4 basics: identity, rot90 order 4, flipH example") {
  auto a = iota_plane(4);
  auto same = apply_dih4<float>(a, 4, 4, Dih4::id);
  CHECK(same == a);

  auto r = a;
  for (int i = 0; i < 4; ++i) r = apply_dih4<float>(r, 4, 4, Dih4::rot90);
  CHECK(r == a);

  std::vector<float> m{1, 2, 3, 4};  // [[1,2],[3,4]]
  auto f = apply_dih4<float>(m, 2, 2, Dih4::flipH);
  CHECK(f == std::vector<float>{2, 1, 4, 3});  // [[2,1],[4,3]]

  auto ff = apply_dih4<float>(f, 2, 2, Dih4::flipH);
  CHECK(ff == m);
}

TEST_CASE("dih4 group axioms hold exhaustively on a distinct-valued probe") {
  auto probe = iota_plane(8);

  // Closure + composition table consistency: applying g1 then g2 equals
  // applying compose(g2, g1) directly.
  for (Dih4 g1 : kAll)
    for (Dih4 g2 : kAll) {
      auto two_step =
          apply_dih4<float>(apply_dih4<float>(probe, 8, 8, g1), 8, 8, g2);
      auto composed = apply_dih4<float>(probe, 8, 8, dih4_compose(g2, g1));
      CHECK(two_step == composed);
    }

  // Identity element.
  for (Dih4 g : kAll) {
    CHECK(dih4_compose(g, Dih4::id) == g);
    CHECK(dih4_compose(Dih4::id, g) == g);
  }

  // Inverses: apply(apply(a,g), inverse(g)) == a.
  for (Dih4 g : kAll) {
    Dih4 inv = dih4_inverse(g);
    CHECK(dih4_compose(inv, g) == Dih4::id);
    CHECK(dih4_compose(g, inv) == Dih4::id);
    auto back = apply_dih4<float>(apply_dih4<float>(probe, 8, 8, g), 8, 8, inv);
    CHECK(back == probe);
  }

  // Associativity spot-check over all triples (64*8 compositions).
  for (Dih4 a : kAll)
    for (Dih4 b : kAll)
      for (Dih4 c : kAll)
        CHECK(dih4_compose(dih4_compose(a, b), c) ==
              dih4_compose(a, dih4_compose(b, c)));
}

TEST_CASE("dih4 rejects non-square input") {
  std::vector<float> rect(6);
  CHECK_THROWS_AS(apply_dih4<float>(rect, 3, 2, Dih4::rot90), Error);
}

TEST_CASE("reflect_pad matches the hand-computed rows") {
  std::vector<float> row{1, 2, 3};
  auto p1 = reflect_pad<float>(row, 3, 1, 1);
  CHECK(p1 == std::vector<float>{2, 1, 2, 3, 2});

  auto p2 = reflect_pad<float>(row, 3, 1, 2);
  CHECK(p2 == std::vector<float>{3, 2, 1, 2, 3, 2, 1});

  auto p0 = reflect_pad<float>(row, 3, 1, 0);
  CHECK(p0 == row);

  CHECK_THROWS_AS(reflect_pad<float>(row, 3, 1, 3), Error);
}

TEST_CASE("reflect_pad introduces no new values and mirrors both axes") {
  Rng rng(15);
  int w = 7, h = 5;
  std::vector<float> a(size_t(w) * h);
  for (auto& v : a) v = float(rng.uniform_int(100));
  auto padded = reflect_pad<float>(a, w, h, 3);
  std::set<float> allowed(a.begin(), a.end());
  for (float v : padded) CHECK(allowed.count(v) == 1);

  // Interior restored exactly.
  int pw = w + 6;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      CHECK(padded[size_t(y + 3) * pw + (x + 3)] == a[size_t(y) * w + x]);
}

TEST_CASE("tile plan: exact multiples need no shifting") {
  PatchGeometry geom{112, 80};
  auto tiles = tile_plan(3600, 3600, geom);
  CHECK(tiles.size() == 45 * 45);
  for (const auto& t : tiles) {
    CHECK(t.write_x0 == t.out_x);
    CHECK(t.write_y0 == t.out_y);
    CHECK(t.write_x1 - t.write_x0 == 80);
  }
}

TEST_CASE("tile plan: non-multiples shift the last row/column inward") {
  PatchGeometry geom{112, 80};
  auto tiles = tile_plan(100, 100, geom);
  REQUIRE(tiles.size() == 4);
  CHECK(tiles[1].out_x == 20);   // shifted to end at 100
  CHECK(tiles[1].write_x0 == 80);  // duplicate strip trimmed
  CHECK(tiles[3].write_y0 == 80);
}

TEST_CASE("tile plan: image equal to output size gives a single tile") {
  PatchGeometry geom{112, 80};
  auto tiles = tile_plan(80, 80, geom);
  REQUIRE(tiles.size() == 1);
  CHECK(tiles[0].out_x == 0);
  CHECK(tiles[0].write_x1 == 80);
}

TEST_CASE("tile plan covers every pixel exactly once after trimming") {
  PatchGeometry geom{24, 16};
  for (auto [w, h] : std::vector<std::pair<int, int>>{
           {64, 48}, {50, 33}, {17, 90}, {16, 16}}) {
    auto tiles = tile_plan(w, h, geom);
    std::vector<int> hits(size_t(w) * h, 0);
    int64_t area = 0;
    for (const auto& t : tiles) {
      area += int64_t(t.write_x1 - t.write_x0) * (t.write_y1 - t.write_y0);
      for (int y = t.write_y0; y < t.write_y1; ++y)
        for (int x = t.write_x0; x < t.write_x1; ++x) ++hits[size_t(y) * w + x];
    }
    CHECK(area == int64_t(w) * h);
    for (int c : hits) CHECK(c == 1);
  }
}

TEST_CASE("stitch of identity-model tiles reconstructs the image bit-exactly") {
  PatchGeometry geom{24, 16};
  int w = 50, h = 33;
  Rng rng(8);
  std::vector<float> image(size_t(w) * h);
  for (auto& v : image) v = float(rng.uniform());

  // Identity model: each tile's output is the input's central crop, i.e. the
  // original pixels of its output window (served from the padded image).
  auto padded = reflect_pad<float>(image, w, h, geom.margin());
  int pw = w + 2 * geom.margin();
  auto tiles = tile_plan(w, h, geom);
  std::vector<std::vector<float>> patches;
  for (const auto& t : tiles) {
    std::vector<float> p(size_t(geom.output_size) * geom.output_size);
    for (int y = 0; y < geom.output_size; ++y)
      for (int x = 0; x < geom.output_size; ++x)
        p[size_t(y) * geom.output_size + x] =
            padded[size_t(t.out_y + geom.margin() + y) * pw +
                   (t.out_x + geom.margin() + x)];
    patches.push_back(std::move(p));
  }
  auto out = stitch(w, h, geom, tiles, patches);
  CHECK(out == image);
}

TEST_CASE("stitch reports gaps and conflicting overlaps") {
  PatchGeometry geom{24, 16};
  auto tiles = tile_plan(32, 32, geom);
  std::vector<std::vector<float>> patches(
      tiles.size(), std::vector<float>(16 * 16, 1.0f));

  auto missing_tiles = tiles;
  missing_tiles.pop_back();
  auto missing_patches = patches;
  missing_patches.pop_back();
  try {
    stitch(32, 32, geom, missing_tiles, missing_patches);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoverageGap);
  }

  // Duplicate tile with different values: conflict.
  auto dup_tiles = tiles;
  dup_tiles.push_back(tiles[0]);
  auto dup_patches = patches;
  dup_patches.push_back(std::vector<float>(16 * 16, 2.0f));
  try {
    stitch(32, 32, geom, dup_tiles, dup_patches);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoverageOverlapConflict);
  }

  // Constant tiles stitch to a constant image: zero seam gradient.
  auto flat = stitch(32, 32, geom, tiles, patches);
  for (float v : flat) CHECK(v == 1.0f);
}

TEST_CASE("sample_patches: determinism, emptiness, too-small images") {
  MultispectralRaster image(32, 32,
                            {BandName(Band::Red), BandName(Band::NIR1)},
                            Dtype::f32, 32);
  Rng rng(3);
  for (auto& v : image.data<float>()) v = float(rng.uniform());
  LabelMask mask(32, 32, {ClassLabel::Buildings});
  for (auto& v : mask.plane(0)) v = uint8_t(rng.uniform_int(2));

  PatchGeometry geom{16, 8};
  auto empty = sample_patches(image, mask, ClassLabel::Buildings, geom, 0, 1);
  CHECK(empty.count == 0);
  CHECK(empty.inputs.empty());

  auto a = sample_patches(image, mask, ClassLabel::Buildings, geom, 5, 42);
  auto b = sample_patches(image, mask, ClassLabel::Buildings, geom, 5, 42);
  CHECK(a.inputs == b.inputs);
  CHECK(a.targets == b.targets);
  auto c = sample_patches(image, mask, ClassLabel::Buildings, geom, 5, 43);
  CHECK(a.inputs != c.inputs);

  MultispectralRaster tiny(8, 8, {BandName(Band::Red)}, Dtype::f32, 32);
  LabelMask tiny_mask(8, 8, {ClassLabel::Buildings});
  CHECK_THROWS_AS(
      sample_patches(tiny, tiny_mask, ClassLabel::Buildings, geom, 1, 1),
      Error);
}

TEST_CASE("sample_patches targets equal the central mask window (inverse-transform oracle)") {
  MultispectralRaster image(40, 40, {BandName(Band::Green)}, Dtype::f32, 32);
  Rng rng(5);
  for (auto& v : image.data<float>()) v = float(rng.uniform());
  LabelMask mask(40, 40, {ClassLabel::Trees});
  for (auto& v : mask.plane(0)) v = uint8_t(rng.uniform_int(2));

  PatchGeometry geom{16, 10};
  auto batch = sample_patches(image, mask, ClassLabel::Trees, geom, 24, 777);
  const int out = geom.output_size;
  const int margin = geom.margin();
  for (int p = 0; p < batch.count; ++p) {
    const auto& origin = batch.origins[size_t(p)];
    std::span<const float> target(batch.targets.data() + size_t(p) * out * out,
                                  size_t(out) * out);
    // Undo the recorded transform, then compare against the raw mask window.
    auto restored =
        apply_dih4<float>(target, out, out, dih4_inverse(origin.transform));
    for (int y = 0; y < out; ++y)
      for (int x = 0; x < out; ++x) {
        float expect = float(
            mask.plane(0)[size_t(origin.y + margin + y) * 40 +
                          (origin.x + margin + x)]);
        CHECK(restored[size_t(y) * out + x] == expect);
      }
    // Inputs transform consistently with targets: inverse-transform the
    // input's central window and compare to the raw image window.
    std::span<const float> in_patch(
        batch.inputs.data() + size_t(p) * geom.input_size * geom.input_size,
        size_t(geom.input_size) * geom.input_size);
    auto in_restored = apply_dih4<float>(in_patch, geom.input_size,
                                         geom.input_size,
                                         dih4_inverse(origin.transform));
    auto band = image.band_data<float>(0);
    for (int y = 0; y < geom.input_size; ++y)
      for (int x = 0; x < geom.input_size; ++x)
        CHECK(in_restored[size_t(y) * geom.input_size + x] ==
              band[size_t(origin.y + y) * 40 + (origin.x + x)]);
  }
}
