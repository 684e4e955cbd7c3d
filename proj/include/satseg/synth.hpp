#pragma once

#include <filesystem>
#include <vector>

#include "satseg/raster.hpp"

namespace satseg {

// Synthetic multispectral scene generator. Stands in for satellite imagery:
// 16 bands with class-consistent spectral signatures plus multi-hot ground
// truth. Water is spectrally separable by construction (NDWI > 0, high CCCI),
// land classes keep RedEdge close to NIR so their CCCI stays low.
struct SynthConfig {
  uint64_t seed = 0;
  int n_scenes = 20;
  int scene_size = 512;
  // Which classes to draw. Buildings are discs, Structures/Vehicles small
  // rectangles, Trees small discs, Crops field rectangles, Road/Track lines,
  // Waterway a meandering river, StandingWater ponds kept clear of the river.
  std::vector<ClassLabel> class_mix = {ClassLabel::Buildings, ClassLabel::Trees,
                                       ClassLabel::Crops, ClassLabel::Waterway,
                                       ClassLabel::StandingWater};
};

struct SceneEntry {
  int id = 0;
  std::string image;  // file names relative to the dataset dir
  std::string mask;
};

struct DatasetManifest {
  int n_scenes = 0;
  int scene_size = 0;
  uint64_t seed = 0;
  std::vector<ClassLabel> classes;
  std::vector<SceneEntry> scenes;
};

// The 16 bands every synthetic scene carries, in order.
const std::vector<BandName>& synth_bands();

// Generate one scene in memory (image + mask), deterministic in (seed, id).
std::pair<MultispectralRaster, LabelMask> synth_scene(const SynthConfig& cfg,
                                                      int scene_id);

// Write n_scenes scenes plus manifest.json into `dir`.
DatasetManifest synth_generate(const SynthConfig& cfg,
                               const std::filesystem::path& dir);

DatasetManifest load_manifest(const std::filesystem::path& dir);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& dir);

}  // namespace satseg
