#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "satseg/raster.hpp"

namespace satseg {

// Denominator guard shared by all reflectance indices.
constexpr float kIndexEps = 1e-6f;

// Per-pixel index values. Pixels where a denominator vanishes carry NaN and
// are excluded from statistics and thresholding.
struct IndexMap {
  int width = 0;
  int height = 0;
  std::string index_name;
  std::vector<float> values;

  size_t size() const { return values.size(); }
  static bool defined(float v) { return !std::isnan(v); }
};

// CCCI = ((NIR - RedEdge)/(NIR + RedEdge)) * ((NIR + Red)/(NIR - Red)).
// Unbounded; NaN where |NIR+RedEdge| <= eps or |NIR-Red| <= eps.
IndexMap ccci(const MultispectralRaster& r, Band nir = Band::NIR1);

// NDWI = (Green - NIR)/(Green + NIR), in [-1,1] where defined.
IndexMap ndwi(const MultispectralRaster& r, Band nir = Band::NIR1);

// NDVI = (NIR - Red)/(NIR + Red), in [-1,1] where defined.
IndexMap ndvi(const MultispectralRaster& r, Band nir = Band::NIR1);

// Dispatch by name ("ccci" | "ndwi" | "ndvi").
IndexMap compute_index(const MultispectralRaster& r, const std::string& name,
                       Band nir = Band::NIR1);

MultispectralRaster index_to_raster(const IndexMap& m);
IndexMap index_from_raster(const MultispectralRaster& r);

enum class Polarity { above, below };

// Closed threshold: `above` keeps v >= t, `below` keeps v <= t.
// NaN pixels never pass.
LabelMask threshold_index(const IndexMap& m, float t, Polarity polarity,
                          ClassLabel cls = ClassLabel::Waterway);

// Connected foreground components of a binary single-class mask.
struct ComponentSet {
  int width = 0;
  int height = 0;
  std::vector<int32_t> labels;  // 0 = background, components dense 1..K
  std::vector<int64_t> areas;   // areas[k-1] = pixel count of component k

  size_t count() const { return areas.size(); }
};

ComponentSet connected_components(const LabelMask& m, int connectivity = 8);

// Components with area >= threshold become waterway, smaller ones standing
// water. The two masks partition the input foreground.
std::pair<LabelMask, LabelMask> split_water_by_area(const ComponentSet& c,
                                                    int64_t area_threshold);

}  // namespace satseg
