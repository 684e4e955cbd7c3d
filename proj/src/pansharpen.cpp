#include "satseg/pansharpen.hpp"

namespace satseg {

SharpenMethod SharpenMethod::weighted_mean(double w) {
  if (!(w >= 0.0 && w <= 1.0))
    fail(ErrorCode::ConfigError, "weighted-mean weight must be in [0,1]");
  return {Kind::weighted_mean, w};
}

MultispectralRaster pansharpen(const MultispectralRaster& pan,
                               const MultispectralRaster& ms,
                               const SharpenMethod& method) {
  if (pan.band_count() != 1)
    fail(ErrorCode::ShapeMismatch, "pan raster must have exactly one band");
  if (pan.width() % ms.width() != 0 || pan.height() % ms.height() != 0)
    fail(ErrorCode::ResolutionMismatch,
         "pan dims must be integer multiples of ms dims");

  MultispectralRaster up = ms.dtype() == Dtype::f32 ? ms : to_f32(ms);
  if (up.width() != pan.width() || up.height() != pan.height())
    up = resample(up, pan.width(), pan.height(), Resample::bilinear);
  MultispectralRaster panf = to_f32(pan);
  auto p = panf.band_data<float>(0);

  MultispectralRaster out(pan.width(), pan.height(), ms.bands(), Dtype::f32,
                          32);
  if (pan.ground_resolution())
    out.set_ground_resolution(*pan.ground_resolution());
  const size_t n = out.pixels_per_band();

  if (method.kind == SharpenMethod::Kind::weighted_mean) {
    const float w = float(method.weight);
    for (size_t b = 0; b < up.band_count(); ++b) {
      auto src = up.band_data<float>(b);
      auto dst = out.band_data<float>(b);
      for (size_t i = 0; i < n; ++i)
        dst[i] = (1.0f - w) * src[i] + w * p[i];
    }
    return out;
  }

  // Brovey: out_i = up_i * pan / intensity over the visible-range bands.
  std::vector<size_t> intensity_bands;
  for (Band b : kBroveyIntensityBands) {
    int idx = up.band_index(BandName(b));
    if (idx >= 0) intensity_bands.push_back(size_t(idx));
  }
  if (intensity_bands.empty())
    fail(ErrorCode::MissingBand,
         "Brovey needs at least one of Blue/Green/Red/RedEdge");

  std::vector<float> intensity(n, 0.0f);
  for (size_t b : intensity_bands) {
    auto src = up.band_data<float>(b);
    for (size_t i = 0; i < n; ++i) intensity[i] += src[i];
  }
  const float inv = 1.0f / float(intensity_bands.size());
  for (auto& v : intensity) v *= inv;

  for (size_t b = 0; b < up.band_count(); ++b) {
    auto src = up.band_data<float>(b);
    auto dst = out.band_data<float>(b);
    for (size_t i = 0; i < n; ++i) {
      // Dark pixels keep the upsampled value instead of dividing by ~0.
      dst[i] = intensity[i] < kIntensityEps ? src[i]
                                            : src[i] * p[i] / intensity[i];
    }
  }
  return out;
}

}  // namespace satseg
