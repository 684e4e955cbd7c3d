#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "satseg/checkpoint.hpp"
#include "satseg/config.hpp"
#include "satseg/indices.hpp"
#include "satseg/synth.hpp"

namespace satseg {

// Stack the configured sensor bands and index channels of a normalized f32
// image into the network input raster.
MultispectralRaster build_input(const MultispectralRaster& image,
                                const std::vector<BandName>& bands,
                                const std::vector<std::string>& index_channels,
                                Band nir_band);

// Tiled inference over one channel-planar input: reflect-pad, tile, batch
// through the model, stitch. Returns the full-size probability plane.
std::vector<float> predict_plane(UNet<float>& model,
                                 const MultispectralRaster& input,
                                 const PatchGeometry& geom,
                                 int batch_size = 16);

struct Prediction {
  MultispectralRaster prob;  // single band "prob:<class>"
  LabelMask mask;
};

// Assemble channels per the input spec stored in the checkpoint and run
// tiled inference. `threshold` < 0 uses the stored training threshold.
Prediction predict(UNet<float>& model, const nlohmann::json& input_spec,
                   const MultispectralRaster& image, double threshold = -1.0);

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;
  double val_jaccard = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::filesystem::path checkpoint_path;
  std::filesystem::path log_path;
  std::vector<EpochLog> epochs;
  double best_val_jaccard = 0.0;
  int best_epoch = -1;
  bool early_stopped = false;
};

// Full training run per the config: sample -> augment -> forward ->
// joint loss -> backward -> nadam, with per-epoch validation on the held-out
// scenes (every fifth scene by index) and best-checkpoint selection.
TrainResult train(const RunConfig& cfg);

struct EvalReport {
  struct PerClass {
    ClassLabel cls;
    double jaccard = 0.0;
    int64_t truth_pixels = 0;
    int64_t pred_pixels = 0;
    int64_t intersection = 0;
    int64_t union_ = 0;
  };
  std::vector<PerClass> per_class;
  double micro_average = 0.0;
  std::string config_fingerprint;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

EvalReport evaluate(const LabelMask& pred, const LabelMask& truth,
                    const std::string& fingerprint = "",
                    double wall_seconds = 0.0);

struct ClassStat {
  ClassLabel cls;
  int64_t pixels = 0;
  int64_t total = 0;
  double fraction = 0.0;
};

// Pixel fraction per class over a mask set; classes absent everywhere report
// zero.
std::vector<ClassStat> class_stats(const std::vector<LabelMask>& masks);
std::string class_stats_csv(const std::vector<ClassStat>& stats);

}  // namespace satseg
