#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "satseg/dih4.hpp"
#include "satseg/raster.hpp"

namespace satseg {

// Input/output patch geometry. The network consumes input_size^2 patches and
// emits the central output_size^2 region; the margin is cropped away.
struct PatchGeometry {
  int input_size = 112;
  int output_size = 80;

  int margin() const { return (input_size - output_size) / 2; }
  void validate() const;
};

// Mirror padding about the edge, excluding the edge pixel itself:
// row [1,2,3] with margin 2 becomes [3,2,1,2,3,2,1].
template <typename T>
std::vector<T> reflect_pad(std::span<const T> a, int width, int height,
                           int margin) {
  if (margin >= width || margin >= height)
    fail(ErrorCode::MarginTooLarge, "reflection margin must be < each dim");
  if (margin < 0) fail(ErrorCode::MarginTooLarge, "negative margin");
  int ow = width + 2 * margin, oh = height + 2 * margin;
  auto mirror = [](int p, int n) {
    if (p < 0) p = -p;
    if (p >= n) p = 2 * (n - 1) - p;
    return p;
  };
  std::vector<T> out(size_t(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    int sy = mirror(y - margin, height);
    for (int x = 0; x < ow; ++x) {
      int sx = mirror(x - margin, width);
      out[size_t(y) * ow + x] = a[size_t(sy) * width + sx];
    }
  }
  return out;
}

// One entry of a tiling plan. The output window sits at (out_x, out_y) with
// side output_size; its input window is the same origin in the reflect-padded
// image with side input_size. The write rect is the part of the output
// window this tile owns after edge-shift trimming (first writer wins in
// row-major tile order).
struct Tile {
  int out_x = 0, out_y = 0;
  int write_x0 = 0, write_y0 = 0, write_x1 = 0, write_y1 = 0;
};

// Exact-cover tiling: stride output_size, last row/column shifted inward when
// the image is not a multiple, duplicate strips pre-trimmed.
std::vector<Tile> tile_plan(int image_w, int image_h,
                            const PatchGeometry& geom);

// Assemble per-tile outputs (each output_size^2, row-major) into the full
// image. Every pixel must be written exactly once; conflicting double writes
// and uncovered pixels are errors.
std::vector<float> stitch(int image_w, int image_h, const PatchGeometry& geom,
                          const std::vector<Tile>& tiles,
                          const std::vector<std::vector<float>>& patches);

struct PatchOrigin {
  int image_id = 0;
  int x = 0;
  int y = 0;
  Dih4 transform = Dih4::id;
};

// A training batch: augmented input patches with their co-transformed
// center-crop targets.
struct PatchBatch {
  int count = 0;
  int channels = 0;
  int input_size = 0;
  int output_size = 0;
  std::vector<float> inputs;   // count x channels x input_size^2
  std::vector<float> targets;  // count x 1 x output_size^2
  std::vector<PatchOrigin> origins;
};

// Uniform random patch positions with independent Dih4 augmentation, one
// substream per patch index so results do not depend on sampling order.
PatchBatch sample_patches(const MultispectralRaster& image,
                          const LabelMask& mask, ClassLabel cls,
                          const PatchGeometry& geom, int n, uint64_t seed,
                          int image_id = 0);

}  // namespace satseg
