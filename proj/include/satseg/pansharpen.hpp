#pragma once

#include "satseg/raster.hpp"

namespace satseg {

// Fusion of a high-resolution pan band with upsampled multispectral bands.
struct SharpenMethod {
  enum class Kind { brovey, weighted_mean };

  Kind kind = Kind::brovey;
  double weight = 0.5;  // weighted_mean only, in [0,1]

  static SharpenMethod brovey() { return {Kind::brovey, 0.0}; }
  static SharpenMethod weighted_mean(double w);
};

// Intensity for the Brovey transform is the mean of the bands overlapping
// the pan spectral range that are present in `ms`.
constexpr Band kBroveyIntensityBands[] = {Band::Blue, Band::Green, Band::Red,
                                          Band::RedEdge};

// Pixels where the Brovey intensity falls below this copy the upsampled
// multispectral value instead of dividing.
constexpr float kIntensityEps = 1e-6f;

// `pan` must hold exactly one band whose dims are integer multiples of the
// `ms` dims; both are expected normalized to [0,1]. Output carries the ms
// band set at pan resolution.
MultispectralRaster pansharpen(const MultispectralRaster& pan,
                               const MultispectralRaster& ms,
                               const SharpenMethod& method);

}  // namespace satseg
