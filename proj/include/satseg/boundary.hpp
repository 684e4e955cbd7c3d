#pragma once

#include <string>
#include <vector>

#include "satseg/raster.hpp"
#include "satseg/unet.hpp"

namespace satseg {

// Per-ring loss profile of an uncropped model: per-pixel binary cross
// entropy binned by Chebyshev distance from the patch center (1-px rings,
// matching the square artifact the crop layer exists to remove).
struct BoundaryProfile {
  struct Row {
    int bin = 0;
    int64_t pixel_count = 0;
    double mean_bce = 0.0;
  };
  std::vector<Row> rows;
  // Spearman rank correlation between ring index and mean loss; positive
  // means the loss grows toward the patch edge. Informative only.
  double edge_trend = 0.0;

  std::string to_csv() const;
};

// `model` must be configured with output_crop 0 so every ring is observable.
// Patches are sampled uniformly (with Dih4 augmentation disabled; rings are
// rotation invariant) from the scene list.
BoundaryProfile boundary_profile(
    UNet<float>& model,
    const std::vector<std::pair<const MultispectralRaster*,
                                const LabelMask*>>& dataset,
    ClassLabel cls, int patch_size, int n_patches, uint64_t seed);

}  // namespace satseg
