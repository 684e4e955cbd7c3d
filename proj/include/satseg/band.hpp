#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "satseg/error.hpp"

namespace satseg {

// WorldView-3 sensor bands: 8 multispectral, 8 short-wave infrared, 1 pan.
enum class Band : uint8_t {
  Coastal,
  Blue,
  Green,
  Yellow,
  Red,
  RedEdge,
  NIR1,
  NIR2,
  SWIR1,
  SWIR2,
  SWIR3,
  SWIR4,
  SWIR5,
  SWIR6,
  SWIR7,
  SWIR8,
  Pan,
};

constexpr int kSensorBandCount = 17;

std::string_view band_str(Band b);
Band band_from_str(std::string_view s);
std::optional<Band> band_from_str_opt(std::string_view s);

// Target classes, stable ids 0..9.
enum class ClassLabel : uint8_t {
  Buildings = 0,
  Structures,
  Road,
  Track,
  Trees,
  Crops,
  Waterway,
  StandingWater,
  VehicleLarge,
  VehicleSmall,
};

constexpr int kClassCount = 10;

std::string_view class_str(ClassLabel c);
ClassLabel class_from_str(std::string_view s);

constexpr std::array<ClassLabel, kClassCount> all_classes() {
  std::array<ClassLabel, kClassCount> out{};
  for (int i = 0; i < kClassCount; ++i) out[i] = static_cast<ClassLabel>(i);
  return out;
}

// A channel name inside a raster: either a sensor band or a derived channel
// carried verbatim ("index:<name>" for reflectance indices, "class:<label>"
// for mask planes, "prob:<label>" for predictions).
class BandName {
 public:
  BandName(Band b) : band_(b) {}

  static BandName named(std::string raw) {
    BandName n;
    n.name_ = std::move(raw);
    return n;
  }
  static BandName index(std::string name) {
    return named("index:" + std::move(name));
  }
  static BandName class_plane(ClassLabel c) {
    return named("class:" + std::string(class_str(c)));
  }

  bool is_sensor() const { return band_.has_value(); }
  bool is_index() const { return !band_.has_value(); }
  Band band() const { return *band_; }

  std::string str() const {
    return is_sensor() ? std::string(band_str(*band_)) : name_;
  }

  static BandName parse(std::string_view s) {
    if (auto b = band_from_str_opt(s)) return BandName(*b);
    return named(std::string(s));
  }

  friend bool operator==(const BandName& a, const BandName& b) {
    return a.band_ == b.band_ && a.name_ == b.name_;
  }

 private:
  BandName() = default;

  std::optional<Band> band_;
  std::string name_;
};

}  // namespace satseg
