#include <algorithm>
#include <cmath>
#include <cstring>

#include "satseg/raster.hpp"

namespace satseg {

namespace {

// Order statistic at rank p*(n-1) with linear interpolation.
double percentile(std::vector<double>& sorted, double p) {
  double rank = p * double(sorted.size() - 1);
  size_t lo = size_t(rank);
  size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = rank - double(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

template <typename T>
void normalize_band(std::span<const T> src, std::span<float> dst,
                    double low_pct, double high_pct, const std::string& name,
                    std::vector<std::string>* warnings) {
  std::vector<double> sorted(src.begin(), src.end());
  std::sort(sorted.begin(), sorted.end());
  double lo = percentile(sorted, low_pct);
  double hi = percentile(sorted, high_pct);
  if (hi <= lo) {
    std::fill(dst.begin(), dst.end(), 0.0f);
    if (warnings)
      warnings->push_back("DegenerateBand: " + name +
                          " has equal percentiles, mapped to zero");
    return;
  }
  double scale = 1.0 / (hi - lo);
  for (size_t i = 0; i < src.size(); ++i) {
    double v = (double(src[i]) - lo) * scale;
    dst[i] = float(std::clamp(v, 0.0, 1.0));
  }
}

template <typename T>
void resample_nearest(std::span<const T> src, std::span<T> dst, int sw, int sh,
                      int tw, int th) {
  for (int y = 0; y < th; ++y) {
    int sy = std::min(int((int64_t(y) * 2 + 1) * sh / (2 * th)), sh - 1);
    for (int x = 0; x < tw; ++x) {
      int sx = std::min(int((int64_t(x) * 2 + 1) * sw / (2 * tw)), sw - 1);
      dst[size_t(y) * tw + x] = src[size_t(sy) * sw + sx];
    }
  }
}

template <typename T>
void resample_bilinear(std::span<const T> src, std::span<float> dst, int sw,
                       int sh, int tw, int th) {
  double fx = double(sw) / tw;
  double fy = double(sh) / th;
  for (int y = 0; y < th; ++y) {
    double syc = (y + 0.5) * fy - 0.5;
    int y0 = int(std::floor(syc));
    double wy = syc - y0;
    int y0c = std::clamp(y0, 0, sh - 1);
    int y1c = std::clamp(y0 + 1, 0, sh - 1);
    for (int x = 0; x < tw; ++x) {
      double sxc = (x + 0.5) * fx - 0.5;
      int x0 = int(std::floor(sxc));
      double wx = sxc - x0;
      int x0c = std::clamp(x0, 0, sw - 1);
      int x1c = std::clamp(x0 + 1, 0, sw - 1);
      double top = double(src[size_t(y0c) * sw + x0c]) * (1 - wx) +
                   double(src[size_t(y0c) * sw + x1c]) * wx;
      double bot = double(src[size_t(y1c) * sw + x0c]) * (1 - wx) +
                   double(src[size_t(y1c) * sw + x1c]) * wx;
      dst[size_t(y) * tw + x] = float(top * (1 - wy) + bot * wy);
    }
  }
}

}  // namespace

MultispectralRaster to_f32(const MultispectralRaster& r) {
  if (r.dtype() == Dtype::f32) return r;
  MultispectralRaster out(r.width(), r.height(), r.bands(), Dtype::f32, 32);
  if (r.ground_resolution()) out.set_ground_resolution(*r.ground_resolution());
  auto dst = out.data<float>();
  auto convert = [&](auto src) {
    for (size_t i = 0; i < src.size(); ++i) dst[i] = float(src[i]);
  };
  if (r.dtype() == Dtype::u8)
    convert(r.data<uint8_t>());
  else
    convert(r.data<uint16_t>());
  return out;
}

MultispectralRaster normalize(const MultispectralRaster& r, double low_pct,
                              double high_pct,
                              std::vector<std::string>* warnings) {
  if (!(0.0 <= low_pct && low_pct < high_pct && high_pct <= 1.0))
    fail(ErrorCode::ConfigError, "normalize requires 0 <= low < high <= 1");
  MultispectralRaster out(r.width(), r.height(), r.bands(), Dtype::f32, 32);
  if (r.ground_resolution()) out.set_ground_resolution(*r.ground_resolution());
  for (size_t b = 0; b < r.band_count(); ++b) {
    auto dst = out.band_data<float>(b);
    std::string name = r.bands()[b].str();
    switch (r.dtype()) {
      case Dtype::u8:
        normalize_band(r.band_data<uint8_t>(b), dst, low_pct, high_pct, name,
                       warnings);
        break;
      case Dtype::u16:
        normalize_band(r.band_data<uint16_t>(b), dst, low_pct, high_pct, name,
                       warnings);
        break;
      case Dtype::f32:
        normalize_band(r.band_data<float>(b), dst, low_pct, high_pct, name,
                       warnings);
        break;
    }
  }
  return out;
}

MultispectralRaster resample(const MultispectralRaster& r, int target_w,
                             int target_h, Resample method) {
  if (target_w < 1 || target_h < 1)
    fail(ErrorCode::ShapeMismatch, "target dims must be >= 1");
  if (target_w == r.width() && target_h == r.height() &&
      method == Resample::nearest)
    return r;

  Dtype out_dtype = method == Resample::bilinear ? Dtype::f32 : r.dtype();
  int out_depth = method == Resample::bilinear ? 32 : r.bit_depth();
  MultispectralRaster out(target_w, target_h, r.bands(), out_dtype, out_depth);
  if (r.ground_resolution()) {
    // Metadata scales with the horizontal factor.
    out.set_ground_resolution(*r.ground_resolution() * r.width() / target_w);
  }
  for (size_t b = 0; b < r.band_count(); ++b) {
    if (method == Resample::nearest) {
      switch (r.dtype()) {
        case Dtype::u8:
          resample_nearest(r.band_data<uint8_t>(b), out.band_data<uint8_t>(b),
                           r.width(), r.height(), target_w, target_h);
          break;
        case Dtype::u16:
          resample_nearest(r.band_data<uint16_t>(b), out.band_data<uint16_t>(b),
                           r.width(), r.height(), target_w, target_h);
          break;
        case Dtype::f32:
          resample_nearest(r.band_data<float>(b), out.band_data<float>(b),
                           r.width(), r.height(), target_w, target_h);
          break;
      }
    } else {
      auto dst = out.band_data<float>(b);
      switch (r.dtype()) {
        case Dtype::u8:
          resample_bilinear(r.band_data<uint8_t>(b), dst, r.width(), r.height(),
                            target_w, target_h);
          break;
        case Dtype::u16:
          resample_bilinear(r.band_data<uint16_t>(b), dst, r.width(),
                            r.height(), target_w, target_h);
          break;
        case Dtype::f32:
          resample_bilinear(r.band_data<float>(b), dst, r.width(), r.height(),
                            target_w, target_h);
          break;
      }
    }
  }
  return out;
}

MultispectralRaster stack(const std::vector<MultispectralRaster>& parts) {
  if (parts.empty()) fail(ErrorCode::ShapeMismatch, "stack of nothing");
  const auto& first = parts.front();
  std::vector<BandName> bands;
  int bit_depth = first.bit_depth();
  for (const auto& p : parts) {
    if (p.width() != first.width() || p.height() != first.height())
      fail(ErrorCode::ShapeMismatch, "stack parts differ in dims");
    if (p.dtype() != first.dtype())
      fail(ErrorCode::ShapeMismatch, "stack parts differ in dtype");
    bit_depth = std::max(bit_depth, p.bit_depth());
    for (const auto& b : p.bands()) bands.push_back(b);
  }
  // The raster constructor rejects duplicate names across parts.
  MultispectralRaster out(first.width(), first.height(), bands, first.dtype(),
                          bit_depth);
  if (first.ground_resolution())
    out.set_ground_resolution(*first.ground_resolution());

  size_t band_at = 0;
  auto copy_part = [&](const MultispectralRaster& p, auto tag) {
    using T = decltype(tag);
    for (size_t b = 0; b < p.band_count(); ++b) {
      auto src = p.band_data<T>(b);
      auto dst = out.band_data<T>(band_at++);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  };
  for (const auto& p : parts) {
    switch (first.dtype()) {
      case Dtype::u8: copy_part(p, uint8_t{}); break;
      case Dtype::u16: copy_part(p, uint16_t{}); break;
      case Dtype::f32: copy_part(p, float{}); break;
    }
  }
  return out;
}

MultispectralRaster select_bands(const MultispectralRaster& r,
                                 const std::vector<BandName>& names) {
  MultispectralRaster out(r.width(), r.height(), names, r.dtype(),
                          r.bit_depth());
  if (r.ground_resolution()) out.set_ground_resolution(*r.ground_resolution());
  auto copy_bands = [&](auto tag) {
    using T = decltype(tag);
    for (size_t i = 0; i < names.size(); ++i) {
      int src = r.band_index(names[i]);
      if (src < 0)
        fail(ErrorCode::MissingBand, "band not present: " + names[i].str());
      auto s = r.band_data<T>(size_t(src));
      auto d = out.band_data<T>(i);
      std::copy(s.begin(), s.end(), d.begin());
    }
  };
  switch (r.dtype()) {
    case Dtype::u8: copy_bands(uint8_t{}); break;
    case Dtype::u16: copy_bands(uint16_t{}); break;
    case Dtype::f32: copy_bands(float{}); break;
  }
  return out;
}

}  // namespace satseg
