#include "satseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "satseg/rng.hpp"

namespace satseg {

using json = nlohmann::json;

namespace {

// Reflectance means for the 16 bands, indexed as in synth_bands():
// Coastal, Blue, Green, Yellow, Red, RedEdge, NIR1, NIR2, Pan, SWIR1..SWIR7.
// Land surfaces keep RedEdge near NIR and NIR well above Red, which pins
// their CCCI below ~0.45; water inverts both gaps and lands above ~0.55.
struct Signature {
  float v[16];
};

constexpr Signature kBackground = {{0.26f, 0.28f, 0.33f, 0.34f, 0.35f, 0.52f,
                                    0.55f, 0.54f, 0.35f, 0.30f, 0.30f, 0.30f,
                                    0.30f, 0.30f, 0.30f, 0.30f}};
constexpr Signature kBuildings = {{0.45f, 0.47f, 0.48f, 0.48f, 0.42f, 0.57f,
                                   0.60f, 0.59f, 0.75f, 0.45f, 0.45f, 0.45f,
                                   0.45f, 0.45f, 0.45f, 0.45f}};
constexpr Signature kStructures = {{0.40f, 0.42f, 0.43f, 0.43f, 0.40f, 0.53f,
                                    0.56f, 0.55f, 0.65f, 0.40f, 0.40f, 0.40f,
                                    0.40f, 0.40f, 0.40f, 0.40f}};
constexpr Signature kRoad = {{0.38f, 0.39f, 0.40f, 0.40f, 0.38f, 0.50f, 0.52f,
                              0.51f, 0.55f, 0.38f, 0.38f, 0.38f, 0.38f, 0.38f,
                              0.38f, 0.38f}};
constexpr Signature kTrack = {{0.34f, 0.35f, 0.37f, 0.38f, 0.36f, 0.51f, 0.53f,
                               0.52f, 0.45f, 0.34f, 0.34f, 0.34f, 0.34f, 0.34f,
                               0.34f, 0.34f}};
constexpr Signature kTrees = {{0.20f, 0.22f, 0.30f, 0.28f, 0.20f, 0.58f, 0.62f,
                               0.61f, 0.30f, 0.25f, 0.25f, 0.25f, 0.25f, 0.25f,
                               0.25f, 0.25f}};
constexpr Signature kCrops = {{0.24f, 0.25f, 0.34f, 0.33f, 0.27f, 0.55f, 0.60f,
                               0.59f, 0.33f, 0.28f, 0.28f, 0.28f, 0.28f, 0.28f,
                               0.28f, 0.28f}};
constexpr Signature kWater = {{0.45f, 0.48f, 0.55f, 0.35f, 0.35f, 0.25f, 0.05f,
                               0.05f, 0.22f, 0.04f, 0.04f, 0.04f, 0.04f, 0.04f,
                               0.04f, 0.04f}};
constexpr Signature kVehicle = {{0.50f, 0.50f, 0.50f, 0.50f, 0.44f, 0.58f,
                                 0.61f, 0.60f, 0.70f, 0.42f, 0.42f, 0.42f,
                                 0.42f, 0.42f, 0.42f, 0.42f}};

constexpr float kNoiseSigma = 0.006f;
constexpr float kNoiseClip = 0.015f;

const Signature& signature_for(ClassLabel c) {
  switch (c) {
    case ClassLabel::Buildings: return kBuildings;
    case ClassLabel::Structures: return kStructures;
    case ClassLabel::Road: return kRoad;
    case ClassLabel::Track: return kTrack;
    case ClassLabel::Trees: return kTrees;
    case ClassLabel::Crops: return kCrops;
    case ClassLabel::Waterway:
    case ClassLabel::StandingWater: return kWater;
    case ClassLabel::VehicleLarge:
    case ClassLabel::VehicleSmall: return kVehicle;
  }
  return kBackground;
}

// Spectral priority when shapes overlap: higher wins the pixel.
int priority_of(ClassLabel c) {
  switch (c) {
    case ClassLabel::Waterway: return 100;
    case ClassLabel::StandingWater: return 99;
    case ClassLabel::VehicleLarge:
    case ClassLabel::VehicleSmall: return 90;
    case ClassLabel::Buildings: return 80;
    case ClassLabel::Structures: return 75;
    case ClassLabel::Trees: return 70;
    case ClassLabel::Track: return 60;
    case ClassLabel::Road: return 55;
    case ClassLabel::Crops: return 40;
  }
  return 0;
}

struct Painter {
  int size;
  std::vector<int> owner_priority;        // per pixel
  std::vector<const Signature*> surface;  // per pixel

  explicit Painter(int s)
      : size(s),
        owner_priority(size_t(s) * s, 0),
        surface(size_t(s) * s, &kBackground) {}

  void claim(int x, int y, ClassLabel c, std::span<uint8_t> plane) {
    if (x < 0 || y < 0 || x >= size || y >= size) return;
    size_t i = size_t(y) * size + x;
    plane[i] = 1;
    int p = priority_of(c);
    if (p >= owner_priority[i]) {
      owner_priority[i] = p;
      surface[i] = &signature_for(c);
    }
  }

  void disc(int cx, int cy, int r, ClassLabel c, std::span<uint8_t> plane) {
    for (int y = cy - r; y <= cy + r; ++y)
      for (int x = cx - r; x <= cx + r; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
          claim(x, y, c, plane);
  }

  void rect(int x0, int y0, int w, int h, ClassLabel c,
            std::span<uint8_t> plane) {
    for (int y = y0; y < y0 + h; ++y)
      for (int x = x0; x < x0 + w; ++x) claim(x, y, c, plane);
  }

  bool disc_clear_of(const std::vector<uint8_t>& other, int cx, int cy,
                     int r) const {
    for (int y = cy - r; y <= cy + r; ++y)
      for (int x = cx - r; x <= cx + r; ++x) {
        if (x < 0 || y < 0 || x >= size || y >= size) continue;
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
        if (other[size_t(y) * size + x]) return false;
      }
    return true;
  }
};

bool in_mix(const SynthConfig& cfg, ClassLabel c) {
  return std::find(cfg.class_mix.begin(), cfg.class_mix.end(), c) !=
         cfg.class_mix.end();
}

void draw_river(Painter& painter, Rng& rng, std::span<uint8_t> plane) {
  // Meandering brush stroke across the full width; thickness keeps the
  // component comfortably above any sane waterway area threshold.
  const int s = painter.size;
  const int radius = 6 + int(rng.uniform_int(3));  // half-width 6..8
  double y = rng.uniform(0.25, 0.75) * s;
  double heading = 0.0;
  for (int x = 0; x < s; ++x) {
    heading += rng.uniform(-0.18, 0.18);
    heading = std::clamp(heading, -0.9, 0.9);
    y += std::tan(heading) * 0.6;
    y = std::clamp(y, double(radius + 2), double(s - radius - 3));
    painter.disc(x, int(y), radius, ClassLabel::Waterway, plane);
  }
}

}  // namespace

const std::vector<BandName>& synth_bands() {
  static const std::vector<BandName> bands = {
      BandName(Band::Coastal), BandName(Band::Blue),  BandName(Band::Green),
      BandName(Band::Yellow),  BandName(Band::Red),   BandName(Band::RedEdge),
      BandName(Band::NIR1),    BandName(Band::NIR2),  BandName(Band::Pan),
      BandName(Band::SWIR1),   BandName(Band::SWIR2), BandName(Band::SWIR3),
      BandName(Band::SWIR4),   BandName(Band::SWIR5), BandName(Band::SWIR6),
      BandName(Band::SWIR7)};
  return bands;
}

std::pair<MultispectralRaster, LabelMask> synth_scene(const SynthConfig& cfg,
                                                      int scene_id) {
  const int s = cfg.scene_size;
  if (s < 32) fail(ErrorCode::ConfigError, "scene_size must be >= 32");
  Rng scene_rng = Rng(cfg.seed).substream("scene", uint64_t(scene_id));

  LabelMask mask(s, s, cfg.class_mix);
  Painter painter(s);

  // Water first so later placements can avoid it.
  std::vector<uint8_t> water_footprint(size_t(s) * s, 0);
  if (mask.has_class(ClassLabel::Waterway)) {
    Rng rng = scene_rng.substream("river");
    draw_river(painter, rng, mask.plane_for(ClassLabel::Waterway));
    auto p = mask.plane_for(ClassLabel::Waterway);
    for (size_t i = 0; i < p.size(); ++i) water_footprint[i] |= p[i];
  }
  if (mask.has_class(ClassLabel::StandingWater)) {
    Rng rng = scene_rng.substream("ponds");
    auto plane = mask.plane_for(ClassLabel::StandingWater);
    int placed = 0, attempts = 0;
    const int want = 3 + int(rng.uniform_int(3));
    while (placed < want && attempts < 200) {
      ++attempts;
      int r = 6 + int(rng.uniform_int(9));
      int cx = r + 2 + int(rng.uniform_int(uint32_t(s - 2 * r - 4)));
      int cy = r + 2 + int(rng.uniform_int(uint32_t(s - 2 * r - 4)));
      // A pond touching the river would merge into its component; keep a
      // margin so the area split stays exact.
      if (!painter.disc_clear_of(water_footprint, cx, cy, r + 6)) continue;
      painter.disc(cx, cy, r, ClassLabel::StandingWater, plane);
      for (int y = cy - r; y <= cy + r; ++y)
        for (int x = cx - r; x <= cx + r; ++x)
          if (x >= 0 && y >= 0 && x < s && y < s &&
              (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
            water_footprint[size_t(y) * s + x] = 1;
      ++placed;
    }
  }

  if (mask.has_class(ClassLabel::Crops)) {
    Rng rng = scene_rng.substream("crops");
    auto plane = mask.plane_for(ClassLabel::Crops);
    int fields = 1 + int(rng.uniform_int(3));
    for (int f = 0; f < fields; ++f) {
      int w = s / 5 + int(rng.uniform_int(uint32_t(s / 4)));
      int h = s / 5 + int(rng.uniform_int(uint32_t(s / 4)));
      int x0 = int(rng.uniform_int(uint32_t(s - w)));
      int y0 = int(rng.uniform_int(uint32_t(s - h)));
      painter.rect(x0, y0, w, h, ClassLabel::Crops, plane);
    }
  }
  if (mask.has_class(ClassLabel::Road)) {
    Rng rng = scene_rng.substream("road");
    auto plane = mask.plane_for(ClassLabel::Road);
    int w = 5 + int(rng.uniform_int(4));
    int y0 = int(rng.uniform_int(uint32_t(s - w)));
    painter.rect(0, y0, s, w, ClassLabel::Road, plane);
  }
  if (mask.has_class(ClassLabel::Track)) {
    Rng rng = scene_rng.substream("track");
    auto plane = mask.plane_for(ClassLabel::Track);
    int w = 2 + int(rng.uniform_int(2));
    int x0 = int(rng.uniform_int(uint32_t(s - w)));
    painter.rect(x0, 0, w, s, ClassLabel::Track, plane);
  }
  if (mask.has_class(ClassLabel::Trees)) {
    Rng rng = scene_rng.substream("trees");
    auto plane = mask.plane_for(ClassLabel::Trees);
    int count = s / 12;
    for (int t = 0; t < count; ++t) {
      int r = 3 + int(rng.uniform_int(6));
      int cx = int(rng.uniform_int(uint32_t(s)));
      int cy = int(rng.uniform_int(uint32_t(s)));
      if (!painter.disc_clear_of(water_footprint, cx, cy, r + 2)) continue;
      painter.disc(cx, cy, r, ClassLabel::Trees, plane);
    }
  }
  if (mask.has_class(ClassLabel::Buildings)) {
    Rng rng = scene_rng.substream("buildings");
    auto plane = mask.plane_for(ClassLabel::Buildings);
    // Aim for roughly a tenth of the scene so random crops usually carry
    // signal.
    int target = int(0.10 * double(s) * s);
    int covered = 0, attempts = 0;
    while (covered < target && attempts < 500) {
      ++attempts;
      int r = 10 + int(rng.uniform_int(16));
      int cx = r + int(rng.uniform_int(uint32_t(s - 2 * r)));
      int cy = r + int(rng.uniform_int(uint32_t(s - 2 * r)));
      if (!painter.disc_clear_of(water_footprint, cx, cy, r + 3)) continue;
      painter.disc(cx, cy, r, ClassLabel::Buildings, plane);
      covered += int(3.14159 * r * r);
    }
  }
  if (mask.has_class(ClassLabel::Structures)) {
    Rng rng = scene_rng.substream("structures");
    auto plane = mask.plane_for(ClassLabel::Structures);
    for (int i = 0; i < s / 40; ++i) {
      int w = 4 + int(rng.uniform_int(8));
      int h = 4 + int(rng.uniform_int(8));
      int x0 = int(rng.uniform_int(uint32_t(s - w)));
      int y0 = int(rng.uniform_int(uint32_t(s - h)));
      painter.rect(x0, y0, w, h, ClassLabel::Structures, plane);
    }
  }
  for (ClassLabel vc : {ClassLabel::VehicleLarge, ClassLabel::VehicleSmall}) {
    if (!mask.has_class(vc)) continue;
    Rng rng = scene_rng.substream(vc == ClassLabel::VehicleLarge
                                      ? "vehicles_large"
                                      : "vehicles_small");
    auto plane = mask.plane_for(vc);
    int count = vc == ClassLabel::VehicleLarge ? 4 : 10;
    int w = vc == ClassLabel::VehicleLarge ? 6 : 3;
    for (int i = 0; i < count; ++i) {
      int x0 = int(rng.uniform_int(uint32_t(s - w)));
      int y0 = int(rng.uniform_int(uint32_t(s - 2 * w)));
      painter.rect(x0, y0, w, 2 * w, vc, plane);
    }
  }

  // Render: per-pixel surface signature plus clipped gaussian noise.
  MultispectralRaster image(s, s, synth_bands(), Dtype::f32, 32);
  image.set_ground_resolution(0.31);
  Rng noise = scene_rng.substream("noise");
  for (int b = 0; b < 16; ++b) {
    auto plane = image.band_data<float>(size_t(b));
    for (size_t i = 0; i < plane.size(); ++i) {
      float n = float(noise.gaussian()) * kNoiseSigma;
      n = std::clamp(n, -kNoiseClip, kNoiseClip);
      plane[i] = std::clamp(painter.surface[i]->v[b] + n, 0.001f, 1.0f);
    }
  }
  return {std::move(image), std::move(mask)};
}

DatasetManifest synth_generate(const SynthConfig& cfg,
                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  DatasetManifest manifest;
  manifest.n_scenes = cfg.n_scenes;
  manifest.scene_size = cfg.scene_size;
  manifest.seed = cfg.seed;
  manifest.classes = cfg.class_mix;
  for (int i = 0; i < cfg.n_scenes; ++i) {
    auto [image, mask] = synth_scene(cfg, i);
    char img_name[32], mask_name[40];
    std::snprintf(img_name, sizeof(img_name), "scene_%04d.msr", i);
    std::snprintf(mask_name, sizeof(mask_name), "scene_%04d_mask.msr", i);
    save_raster(image, dir / img_name);
    save_mask(mask, dir / mask_name);
    manifest.scenes.push_back({i, img_name, mask_name});
  }
  save_manifest(manifest, dir);
  return manifest;
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& dir) {
  json j;
  j["version"] = 1;
  j["n_scenes"] = m.n_scenes;
  j["scene_size"] = m.scene_size;
  j["seed"] = m.seed;
  json classes = json::array();
  for (auto c : m.classes) classes.push_back(std::string(class_str(c)));
  j["classes"] = classes;
  json scenes = json::array();
  for (const auto& s : m.scenes)
    scenes.push_back({{"id", s.id}, {"image", s.image}, {"mask", s.mask}});
  j["scenes"] = scenes;
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot write manifest");
  out << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in)
    fail(ErrorCode::IoFailure, "no manifest.json in " + dir.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedHeader, std::string("bad manifest: ") + e.what());
  }
  if (j.value("version", 0) != 1)
    fail(ErrorCode::UnsupportedVersion, "unsupported manifest version");
  DatasetManifest m;
  m.n_scenes = j.at("n_scenes").get<int>();
  m.scene_size = j.at("scene_size").get<int>();
  m.seed = j.at("seed").get<uint64_t>();
  for (const auto& c : j.at("classes"))
    m.classes.push_back(class_from_str(c.get<std::string>()));
  for (const auto& s : j.at("scenes"))
    m.scenes.push_back({s.at("id").get<int>(),
                        s.at("image").get<std::string>(),
                        s.at("mask").get<std::string>()});
  return m;
}

}  // namespace satseg
