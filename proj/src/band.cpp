#include "satseg/band.hpp"

namespace satseg {

namespace {

constexpr std::array<std::string_view, kSensorBandCount> kBandNames = {
    "Coastal", "Blue",  "Green", "Yellow", "Red",   "RedEdge",
    "NIR1",    "NIR2",  "SWIR1", "SWIR2",  "SWIR3", "SWIR4",
    "SWIR5",   "SWIR6", "SWIR7", "SWIR8",  "Pan"};

constexpr std::array<std::string_view, kClassCount> kClassNames = {
    "Buildings",    "Structures", "Road",     "Track",
    "Trees",        "Crops",      "Waterway", "StandingWater",
    "VehicleLarge", "VehicleSmall"};

}  // namespace

std::string_view band_str(Band b) { return kBandNames[static_cast<size_t>(b)]; }

std::optional<Band> band_from_str_opt(std::string_view s) {
  for (size_t i = 0; i < kBandNames.size(); ++i)
    if (kBandNames[i] == s) return static_cast<Band>(i);
  return std::nullopt;
}

Band band_from_str(std::string_view s) {
  if (auto b = band_from_str_opt(s)) return *b;
  fail(ErrorCode::MissingBand, "unknown band name: " + std::string(s));
}

std::string_view class_str(ClassLabel c) {
  return kClassNames[static_cast<size_t>(c)];
}

ClassLabel class_from_str(std::string_view s) {
  for (size_t i = 0; i < kClassNames.size(); ++i)
    if (kClassNames[i] == s) return static_cast<ClassLabel>(i);
  fail(ErrorCode::ConfigError, "unknown class label: " + std::string(s));
}

}  // namespace satseg
