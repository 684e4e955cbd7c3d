#include "satseg/indices.hpp"

#include <algorithm>
#include <limits>

namespace satseg {

namespace {

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

std::vector<float> band_as_f32(const MultispectralRaster& r, Band b) {
  int i = r.band_index(BandName(b));
  if (i < 0)
    fail(ErrorCode::MissingBand,
         std::string("index input lacks band ") + std::string(band_str(b)));
  std::vector<float> out(r.pixels_per_band());
  switch (r.dtype()) {
    case Dtype::u8: {
      auto s = r.band_data<uint8_t>(size_t(i));
      std::copy(s.begin(), s.end(), out.begin());
      break;
    }
    case Dtype::u16: {
      auto s = r.band_data<uint16_t>(size_t(i));
      std::copy(s.begin(), s.end(), out.begin());
      break;
    }
    case Dtype::f32: {
      auto s = r.band_data<float>(size_t(i));
      std::copy(s.begin(), s.end(), out.begin());
      break;
    }
  }
  return out;
}

IndexMap make_map(const MultispectralRaster& r, std::string name) {
  IndexMap m;
  m.width = r.width();
  m.height = r.height();
  m.index_name = std::move(name);
  m.values.assign(r.pixels_per_band(), kNaN);
  return m;
}

// (a - b)/(a + b), NaN where the sum is within the guard.
inline float norm_diff(float a, float b) {
  float den = a + b;
  return std::fabs(den) <= kIndexEps ? kNaN : (a - b) / den;
}

}  // namespace

IndexMap ccci(const MultispectralRaster& r, Band nir) {
  auto n = band_as_f32(r, nir);
  auto re = band_as_f32(r, Band::RedEdge);
  auto red = band_as_f32(r, Band::Red);
  IndexMap m = make_map(r, "ccci");
  for (size_t i = 0; i < n.size(); ++i) {
    float d1 = n[i] + re[i];
    float d2 = n[i] - red[i];
    if (std::fabs(d1) <= kIndexEps || std::fabs(d2) <= kIndexEps) continue;
    m.values[i] = ((n[i] - re[i]) / d1) * ((n[i] + red[i]) / d2);
  }
  return m;
}

IndexMap ndwi(const MultispectralRaster& r, Band nir) {
  auto g = band_as_f32(r, Band::Green);
  auto n = band_as_f32(r, nir);
  IndexMap m = make_map(r, "ndwi");
  for (size_t i = 0; i < n.size(); ++i) m.values[i] = norm_diff(g[i], n[i]);
  return m;
}

IndexMap ndvi(const MultispectralRaster& r, Band nir) {
  auto n = band_as_f32(r, nir);
  auto red = band_as_f32(r, Band::Red);
  IndexMap m = make_map(r, "ndvi");
  for (size_t i = 0; i < n.size(); ++i) m.values[i] = norm_diff(n[i], red[i]);
  return m;
}

IndexMap compute_index(const MultispectralRaster& r, const std::string& name,
                       Band nir) {
  if (name == "ccci") return ccci(r, nir);
  if (name == "ndwi") return ndwi(r, nir);
  if (name == "ndvi") return ndvi(r, nir);
  fail(ErrorCode::ConfigError, "unknown index: " + name);
}

MultispectralRaster index_to_raster(const IndexMap& m) {
  MultispectralRaster r(m.width, m.height, {BandName::index(m.index_name)},
                        Dtype::f32, 32);
  auto d = r.band_data<float>(0);
  std::copy(m.values.begin(), m.values.end(), d.begin());
  return r;
}

IndexMap index_from_raster(const MultispectralRaster& r) {
  if (r.dtype() != Dtype::f32 || r.band_count() != 1)
    fail(ErrorCode::ShapeMismatch, "index raster must be single-band f32");
  IndexMap m;
  m.width = r.width();
  m.height = r.height();
  std::string s = r.bands()[0].str();
  m.index_name = s.rfind("index:", 0) == 0 ? s.substr(6) : s;
  auto d = r.band_data<float>(0);
  m.values.assign(d.begin(), d.end());
  return m;
}

LabelMask threshold_index(const IndexMap& m, float t, Polarity polarity,
                          ClassLabel cls) {
  LabelMask out(m.width, m.height, {cls});
  auto plane = out.plane(0);
  for (size_t i = 0; i < m.values.size(); ++i) {
    float v = m.values[i];
    if (std::isnan(v)) continue;
    bool keep = polarity == Polarity::above ? v >= t : v <= t;
    plane[i] = keep ? 1 : 0;
  }
  return out;
}

ComponentSet connected_components(const LabelMask& m, int connectivity) {
  if (m.classes().size() != 1)
    fail(ErrorCode::ShapeMismatch,
         "connected_components expects a single-class mask");
  if (connectivity != 4 && connectivity != 8)
    fail(ErrorCode::ConfigError, "connectivity must be 4 or 8");

  const int w = m.width();
  const int h = m.height();
  auto fg = m.plane(0);
  ComponentSet cs;
  cs.width = w;
  cs.height = h;
  cs.labels.assign(size_t(w) * h, 0);

  static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int ndirs = connectivity == 4 ? 4 : 8;

  std::vector<size_t> stack;
  int32_t next = 0;
  for (size_t start = 0; start < fg.size(); ++start) {
    if (!fg[start] || cs.labels[start] != 0) continue;
    ++next;
    int64_t area = 0;
    stack.push_back(start);
    cs.labels[start] = next;
    while (!stack.empty()) {
      size_t p = stack.back();
      stack.pop_back();
      ++area;
      int y = int(p / w), x = int(p % w);
      for (int d = 0; d < ndirs; ++d) {
        int nx = x + dx8[d], ny = y + dy8[d];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        size_t q = size_t(ny) * w + nx;
        if (fg[q] && cs.labels[q] == 0) {
          cs.labels[q] = next;
          stack.push_back(q);
        }
      }
    }
    cs.areas.push_back(area);
  }
  return cs;
}

std::pair<LabelMask, LabelMask> split_water_by_area(const ComponentSet& c,
                                                    int64_t area_threshold) {
  if (area_threshold <= 0)
    fail(ErrorCode::ConfigError, "area threshold must be positive");
  LabelMask waterway(c.width, c.height, {ClassLabel::Waterway});
  LabelMask standing(c.width, c.height, {ClassLabel::StandingWater});
  auto wp = waterway.plane(0);
  auto sp = standing.plane(0);
  for (size_t i = 0; i < c.labels.size(); ++i) {
    int32_t id = c.labels[i];
    if (id == 0) continue;
    if (c.areas[size_t(id) - 1] >= area_threshold)
      wp[i] = 1;
    else
      sp[i] = 1;
  }
  return {std::move(waterway), std::move(standing)};
}

}  // namespace satseg
