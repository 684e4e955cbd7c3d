#include "satseg/patchwork.hpp"

#include <algorithm>
#include <cmath>

#include "satseg/rng.hpp"

namespace satseg {

void PatchGeometry::validate() const {
  if (input_size <= output_size)
    fail(ErrorCode::ConfigError, "input_size must exceed output_size");
  if (input_size % 2 != 0 || output_size % 2 != 0)
    fail(ErrorCode::ConfigError, "patch sizes must be even");
  if ((input_size - output_size) % 2 != 0)
    fail(ErrorCode::ConfigError, "margin must be integral");
  if (output_size < 1) fail(ErrorCode::ConfigError, "output_size must be >= 1");
}

namespace {

// Grid starts every `step` pixels; a final start is shifted inward so the
// windows end exactly at `extent`.
std::vector<int> cover_starts(int extent, int step) {
  std::vector<int> starts;
  for (int s = 0; s + step < extent; s += step) starts.push_back(s);
  starts.push_back(std::max(0, extent - step));
  return starts;
}

}  // namespace

std::vector<Tile> tile_plan(int image_w, int image_h,
                            const PatchGeometry& geom) {
  geom.validate();
  const int out = geom.output_size;
  if (image_w < out || image_h < out)
    fail(ErrorCode::ImageTooSmall, "image smaller than the output window");

  auto xs = cover_starts(image_w, out);
  auto ys = cover_starts(image_h, out);
  std::vector<Tile> tiles;
  tiles.reserve(xs.size() * ys.size());
  for (size_t iy = 0; iy < ys.size(); ++iy) {
    for (size_t ix = 0; ix < xs.size(); ++ix) {
      Tile t;
      t.out_x = xs[ix];
      t.out_y = ys[iy];
      // A shifted last tile overlaps its predecessor; it only writes the
      // strip beyond the predecessor's end.
      t.write_x0 = ix == 0 ? t.out_x : std::max(t.out_x, xs[ix - 1] + out);
      t.write_y0 = iy == 0 ? t.out_y : std::max(t.out_y, ys[iy - 1] + out);
      t.write_x1 = t.out_x + out;
      t.write_y1 = t.out_y + out;
      tiles.push_back(t);
    }
  }
  return tiles;
}

std::vector<float> stitch(int image_w, int image_h, const PatchGeometry& geom,
                          const std::vector<Tile>& tiles,
                          const std::vector<std::vector<float>>& patches) {
  if (tiles.size() != patches.size())
    fail(ErrorCode::ShapeMismatch, "tile/patch count mismatch");
  const int out = geom.output_size;
  std::vector<float> image(size_t(image_w) * image_h, 0.0f);
  std::vector<uint8_t> written(image.size(), 0);

  for (size_t i = 0; i < tiles.size(); ++i) {
    const Tile& t = tiles[i];
    const auto& patch = patches[i];
    if (patch.size() != size_t(out) * out)
      fail(ErrorCode::ShapeMismatch, "patch is not output_size^2");
    for (int y = t.write_y0; y < t.write_y1; ++y) {
      for (int x = t.write_x0; x < t.write_x1; ++x) {
        size_t dst = size_t(y) * image_w + x;
        float v = patch[size_t(y - t.out_y) * out + (x - t.out_x)];
        if (written[dst]) {
          if (image[dst] != v)
            fail(ErrorCode::CoverageOverlapConflict,
                 "pixel written twice with differing values");
          continue;  // first writer wins
        }
        image[dst] = v;
        written[dst] = 1;
      }
    }
  }
  for (uint8_t w : written)
    if (!w) fail(ErrorCode::CoverageGap, "stitch left uncovered pixels");
  return image;
}

PatchBatch sample_patches(const MultispectralRaster& image,
                          const LabelMask& mask, ClassLabel cls,
                          const PatchGeometry& geom, int n, uint64_t seed,
                          int image_id) {
  geom.validate();
  if (image.dtype() != Dtype::f32)
    fail(ErrorCode::UnsupportedDtype, "sample_patches expects f32 input");
  if (image.width() < geom.input_size || image.height() < geom.input_size)
    fail(ErrorCode::ImageTooSmall, "image smaller than the input patch");
  if (mask.width() != image.width() || mask.height() != image.height())
    fail(ErrorCode::ShapeMismatch, "mask not aligned to image");

  const int in = geom.input_size;
  const int out = geom.output_size;
  const int margin = geom.margin();
  const int C = int(image.band_count());
  const int W = image.width();

  PatchBatch batch;
  batch.count = n;
  batch.channels = C;
  batch.input_size = in;
  batch.output_size = out;
  batch.inputs.resize(size_t(n) * C * in * in);
  batch.targets.resize(size_t(n) * out * out);
  batch.origins.resize(size_t(n));

  auto target_plane = mask.plane_for(cls);
  Rng root(seed);
  std::vector<float> scratch_in(size_t(in) * in);
  std::vector<float> scratch_out(size_t(out) * out);

  for (int p = 0; p < n; ++p) {
    Rng rng = root.substream("patch", uint64_t(p));
    int x = int(rng.uniform_int(uint32_t(image.width() - in + 1)));
    int y = int(rng.uniform_int(uint32_t(image.height() - in + 1)));
    Dih4 g = Dih4(rng.uniform_int(kDih4Order));
    batch.origins[size_t(p)] = {image_id, x, y, g};

    for (int c = 0; c < C; ++c) {
      auto band = image.band_data<float>(size_t(c));
      for (int r = 0; r < in; ++r)
        std::copy_n(band.data() + size_t(y + r) * W + x, in,
                    scratch_in.data() + size_t(r) * in);
      std::span<float> dst(batch.inputs.data() +
                               (size_t(p) * C + c) * in * in,
                           size_t(in) * in);
      apply_dih4_into<float>(scratch_in, dst, in, g);
    }

    for (int r = 0; r < out; ++r)
      for (int c2 = 0; c2 < out; ++c2)
        scratch_out[size_t(r) * out + c2] =
            float(target_plane[size_t(y + margin + r) * W + (x + margin + c2)]);
    std::span<float> tdst(batch.targets.data() + size_t(p) * out * out,
                          size_t(out) * out);
    apply_dih4_into<float>(scratch_out, tdst, out, g);
  }
  return batch;
}

}  // namespace satseg
