#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "satseg/losses.hpp"
#include "satseg/patchwork.hpp"
#include "satseg/unet.hpp"

namespace satseg {

struct SchedulePhase {
  int epochs = 0;
  double lr = 0.0;
};

// Declarative description of a train/predict/evaluate run. Every field has a
// default; unknown JSON keys are rejected. in_channels and output_crop are
// derived from the band list and patch geometry rather than configured.
struct RunConfig {
  uint64_t seed = 42;
  ClassLabel target_class = ClassLabel::Buildings;
  std::string data_dir = "data";
  std::string out_dir = "runs";

  std::vector<BandName> bands;          // default: 8 M-bands + Pan
  std::vector<std::string> index_channels = {"ndvi", "ndwi", "ccci"};
  Band nir_band = Band::NIR1;

  PatchGeometry geometry{64, 48};
  int base_channels = 16;
  int depth = 3;
  float bn_epsilon = 1e-5f;
  float bn_momentum = 0.1f;
  float elu_alpha = 1.0f;

  std::vector<SchedulePhase> schedule = {{50, 1e-3}, {50, 1e-4}};
  int batches_per_epoch = 400;
  int batch_size = 128;

  double threshold = 0.5;
  SoftJaccardMode loss_mode = SoftJaccardMode::aggregate;
  std::optional<double> early_stop_jaccard;  // stop once val >= this
  bool water_via_network = false;

  RunConfig();

  int in_channels() const {
    return int(bands.size() + index_channels.size());
  }
  UNetConfig unet_config() const;
  void validate() const;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // FNV-1a over the canonical JSON dump; identifies the run in reports.
  std::string fingerprint() const;
};

}  // namespace satseg
