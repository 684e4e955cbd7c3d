#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "satseg/band.hpp"
#include "satseg/error.hpp"

namespace satseg {

enum class Dtype : uint8_t { u8, u16, f32 };

std::string_view dtype_str(Dtype d);
Dtype dtype_from_str(std::string_view s);

// Planar multispectral image: band-major, row-major within a band.
class MultispectralRaster {
 public:
  MultispectralRaster() = default;
  MultispectralRaster(int width, int height, std::vector<BandName> bands,
                      Dtype dtype, int bit_depth);

  int width() const { return width_; }
  int height() const { return height_; }
  Dtype dtype() const { return dtype_; }
  int bit_depth() const { return bit_depth_; }
  size_t band_count() const { return bands_.size(); }
  size_t pixels_per_band() const { return size_t(width_) * height_; }
  size_t value_count() const { return pixels_per_band() * bands_.size(); }
  const std::vector<BandName>& bands() const { return bands_; }

  std::optional<double> ground_resolution() const { return ground_resolution_; }
  void set_ground_resolution(double m) { ground_resolution_ = m; }

  // Index of a band name, or -1 when absent.
  int band_index(const BandName& name) const;
  bool has_band(const BandName& name) const { return band_index(name) >= 0; }

  template <typename T>
  std::span<T> data() {
    return std::span<T>(std::get<std::vector<T>>(data_));
  }
  template <typename T>
  std::span<const T> data() const {
    return std::span<const T>(std::get<std::vector<T>>(data_));
  }

  template <typename T>
  std::span<T> band_data(size_t b) {
    return data<T>().subspan(b * pixels_per_band(), pixels_per_band());
  }
  template <typename T>
  std::span<const T> band_data(size_t b) const {
    return data<T>().subspan(b * pixels_per_band(), pixels_per_band());
  }

  // Checks the declared-length invariant and per-dtype value ranges.
  void validate() const;

  friend bool operator==(const MultispectralRaster& a,
                         const MultispectralRaster& b);

 private:
  friend MultispectralRaster load_raster(const std::filesystem::path&);

  int width_ = 0;
  int height_ = 0;
  std::vector<BandName> bands_;
  Dtype dtype_ = Dtype::u8;
  int bit_depth_ = 8;
  std::optional<double> ground_resolution_;
  std::variant<std::vector<uint8_t>, std::vector<uint16_t>, std::vector<float>>
      data_;
};

// Multi-hot ground truth / prediction mask: one u8 plane per class,
// values in {0,1}. Classes are not mutually exclusive.
class LabelMask {
 public:
  LabelMask() = default;
  LabelMask(int width, int height, std::vector<ClassLabel> classes);

  int width() const { return width_; }
  int height() const { return height_; }
  size_t plane_size() const { return size_t(width_) * height_; }
  const std::vector<ClassLabel>& classes() const { return classes_; }

  int class_index(ClassLabel c) const;
  bool has_class(ClassLabel c) const { return class_index(c) >= 0; }

  std::span<uint8_t> plane(size_t i) {
    return std::span<uint8_t>(data_).subspan(i * plane_size(), plane_size());
  }
  std::span<const uint8_t> plane(size_t i) const {
    return std::span<const uint8_t>(data_).subspan(i * plane_size(),
                                                   plane_size());
  }
  std::span<uint8_t> plane_for(ClassLabel c);
  std::span<const uint8_t> plane_for(ClassLabel c) const;

  friend bool operator==(const LabelMask& a, const LabelMask& b) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<ClassLabel> classes_;
  std::vector<uint8_t> data_;
};

// ---- MSR container I/O ----
// Layout: "MSRASTER\n" | u64 LE header length | JSON header | raw LE payload.

MultispectralRaster load_raster(const std::filesystem::path& path);
void save_raster(const MultispectralRaster& r,
                 const std::filesystem::path& path);

// Masks ride in the same container, dtype u8, band names "class:<label>".
LabelMask load_mask(const std::filesystem::path& path);
void save_mask(const LabelMask& m, const std::filesystem::path& path);

// ---- Pixel operations ----

// Per-band linear stretch: low percentile -> 0, high percentile -> 1,
// clipped to [0,1]. Constant bands map to zero and are reported through
// `warnings` when given.
MultispectralRaster normalize(const MultispectralRaster& r, double low_pct,
                              double high_pct,
                              std::vector<std::string>* warnings = nullptr);

enum class Resample { nearest, bilinear };

// Per-band resampling. Bilinear promotes to f32; nearest keeps the dtype
// (and therefore the value set — labels must not be interpolated).
MultispectralRaster resample(const MultispectralRaster& r, int target_w,
                             int target_h, Resample method);

// Band concatenation of co-registered parts.
MultispectralRaster stack(const std::vector<MultispectralRaster>& parts);

// Subset (and reorder) bands by name.
MultispectralRaster select_bands(const MultispectralRaster& r,
                                 const std::vector<BandName>& names);

MultispectralRaster to_f32(const MultispectralRaster& r);

}  // namespace satseg
