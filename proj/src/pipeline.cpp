#include "satseg/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "satseg/losses.hpp"
#include "satseg/nadam.hpp"
#include "satseg/patchwork.hpp"
#include "satseg/rng.hpp"

namespace satseg {

using json = nlohmann::json;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool is_water_class(ClassLabel c) {
  return c == ClassLabel::Waterway || c == ClassLabel::StandingWater;
}

struct LoadedScene {
  int id = 0;
  MultispectralRaster input;  // stacked channels, f32
  LabelMask mask;
};

}  // namespace

MultispectralRaster build_input(const MultispectralRaster& image,
                                const std::vector<BandName>& bands,
                                const std::vector<std::string>& index_channels,
                                Band nir_band) {
  if (image.dtype() != Dtype::f32)
    fail(ErrorCode::UnsupportedDtype,
         "network input must be normalized f32 (run normalize first)");
  for (const auto& b : bands)
    if (!image.has_band(b))
      fail(ErrorCode::BandMismatch, "image lacks configured band " + b.str());

  std::vector<MultispectralRaster> parts;
  parts.push_back(select_bands(image, bands));
  for (const auto& name : index_channels)
    parts.push_back(index_to_raster(compute_index(image, name, nir_band)));
  auto stacked = parts.size() == 1 ? std::move(parts[0]) : stack(parts);

  // Index maps may carry NaN on degenerate pixels; the network needs finite
  // inputs, so undefined index values become 0.
  auto d = stacked.data<float>();
  for (auto& v : d)
    if (std::isnan(v)) v = 0.0f;
  return stacked;
}

std::vector<float> predict_plane(UNet<float>& model,
                                 const MultispectralRaster& input,
                                 const PatchGeometry& geom, int batch_size) {
  geom.validate();
  const int W = input.width(), H = input.height();
  const int C = int(input.band_count());
  const int in = geom.input_size, out = geom.output_size;
  const int margin = geom.margin();
  if (model.config().in_channels != C)
    fail(ErrorCode::BandMismatch, "model expects " +
                                      std::to_string(model.config().in_channels) +
                                      " channels, input has " +
                                      std::to_string(C));
  if (model.config().output_crop != margin)
    fail(ErrorCode::ConfigError, "model crop does not match patch geometry");
  if (W < out || H < out)
    fail(ErrorCode::ImageTooSmall, "image smaller than the output window");

  // Pad every channel once.
  const int pw = W + 2 * margin;
  std::vector<std::vector<float>> padded;
  padded.resize(size_t(C));
  for (int c = 0; c < C; ++c)
    padded[size_t(c)] = reflect_pad<float>(input.band_data<float>(size_t(c)),
                                           W, H, margin);

  auto tiles = tile_plan(W, H, geom);
  std::vector<std::vector<float>> patches(tiles.size());

  for (size_t start = 0; start < tiles.size(); start += size_t(batch_size)) {
    size_t count = std::min(size_t(batch_size), tiles.size() - start);
    Tensor4<float> x(int(count), C, in, in);
    for (size_t t = 0; t < count; ++t) {
      const Tile& tile = tiles[start + t];
      for (int c = 0; c < C; ++c) {
        float* dst = x.plane(int(t), c);
        const auto& src = padded[size_t(c)];
        for (int y = 0; y < in; ++y)
          std::copy_n(src.data() + size_t(tile.out_y + y) * pw + tile.out_x,
                      in, dst + size_t(y) * in);
      }
    }
    Tensor4<float> yhat = model.forward(x, false);
    for (size_t t = 0; t < count; ++t) {
      const float* src = yhat.plane(int(t), 0);
      patches[start + t].assign(src, src + size_t(out) * out);
    }
  }
  return stitch(W, H, geom, tiles, patches);
}

Prediction predict(UNet<float>& model, const json& input_spec,
                   const MultispectralRaster& image, double threshold) {
  std::vector<BandName> bands;
  for (const auto& b : input_spec.at("bands"))
    bands.push_back(BandName::parse(b.get<std::string>()));
  std::vector<std::string> index_channels;
  for (const auto& s : input_spec.at("indices"))
    index_channels.push_back(s.get<std::string>());
  Band nir = band_from_str(input_spec.at("nir_band").get<std::string>());
  PatchGeometry geom{input_spec.at("geometry").at("input_size").get<int>(),
                     input_spec.at("geometry").at("output_size").get<int>()};
  ClassLabel cls = class_from_str(input_spec.at("class").get<std::string>());
  double thr = threshold >= 0.0 ? threshold
                                : input_spec.at("threshold").get<double>();

  auto input = build_input(image, bands, index_channels, nir);
  auto plane = predict_plane(model, input, geom);

  Prediction p{MultispectralRaster(
                   image.width(), image.height(),
                   {BandName::named("prob:" + std::string(class_str(cls)))},
                   Dtype::f32, 32),
               LabelMask(image.width(), image.height(), {cls})};
  auto prob = p.prob.band_data<float>(0);
  std::copy(plane.begin(), plane.end(), prob.begin());
  auto m = p.mask.plane(0);
  for (size_t i = 0; i < plane.size(); ++i) m[i] = plane[i] >= thr ? 1 : 0;
  return p;
}

TrainResult train(const RunConfig& cfg) {
  cfg.validate();
  if (is_water_class(cfg.target_class) && !cfg.water_via_network)
    fail(ErrorCode::ConfigError,
         "water classes use the index pipeline by default; set "
         "water_via_network=true to train a network instead");

  auto manifest = load_manifest(cfg.data_dir);
  if (manifest.scenes.empty())
    fail(ErrorCode::IoFailure, "dataset has no scenes");

  // Load and assemble scenes once; every fifth scene by index is held out.
  std::vector<LoadedScene> train_scenes, val_scenes;
  for (const auto& entry : manifest.scenes) {
    LoadedScene s;
    s.id = entry.id;
    auto image = load_raster(std::filesystem::path(cfg.data_dir) / entry.image);
    s.input = build_input(image, cfg.bands, cfg.index_channels, cfg.nir_band);
    s.mask = load_mask(std::filesystem::path(cfg.data_dir) / entry.mask);
    if (!s.mask.has_class(cfg.target_class))
      fail(ErrorCode::MissingBand,
           "dataset masks lack class " + std::string(class_str(cfg.target_class)));
    if (entry.id % 5 == 0)
      val_scenes.push_back(std::move(s));
    else
      train_scenes.push_back(std::move(s));
  }
  if (train_scenes.empty() || val_scenes.empty())
    fail(ErrorCode::ConfigError,
         "need at least 2 scenes (one training, one fifth-indexed held out)");

  UNet<float> model(cfg.unet_config(), cfg.seed);
  auto params = model.params();
  NadamState<float> opt(params);
  Rng root(cfg.seed);

  std::filesystem::create_directories(cfg.out_dir);
  std::string cls_name(class_str(cfg.target_class));
  TrainResult result;
  result.checkpoint_path =
      std::filesystem::path(cfg.out_dir) / ("model_" + cls_name + ".msmodel");
  result.log_path = std::filesystem::path(cfg.out_dir) /
                    ("train_log_" + cls_name + ".csv");

  json input_spec{{"bands", json::array()},
                  {"indices", json::array()},
                  {"nir_band", std::string(band_str(cfg.nir_band))},
                  {"geometry",
                   {{"input_size", cfg.geometry.input_size},
                    {"output_size", cfg.geometry.output_size}}},
                  {"class", cls_name},
                  {"threshold", cfg.threshold},
                  {"config_fingerprint", cfg.fingerprint()}};
  for (const auto& b : cfg.bands) input_spec["bands"].push_back(b.str());
  for (const auto& s : cfg.index_channels) input_spec["indices"].push_back(s);

  std::ofstream log(result.log_path, std::ios::trunc);
  log << "epoch,lr,mean_loss,val_jaccard,seconds\n";

  auto validate = [&]() {
    int64_t inter = 0, uni = 0;
    for (auto& scene : val_scenes) {
      auto plane = predict_plane(model, scene.input, cfg.geometry,
                                 std::max(16, cfg.batch_size));
      auto truth = scene.mask.plane_for(cfg.target_class);
      for (size_t i = 0; i < plane.size(); ++i) {
        bool p = plane[i] >= cfg.threshold;
        bool t = truth[i] != 0;
        inter += (p && t);
        uni += (p || t);
      }
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
  };

  int epoch = 0;
  int64_t global_step = 0;
  bool stop = false;
  for (const auto& phase : cfg.schedule) {
    for (int e = 0; e < phase.epochs && !stop; ++e, ++epoch) {
      double t0 = now_seconds();
      double loss_sum = 0.0;
      for (int b = 0; b < cfg.batches_per_epoch; ++b, ++global_step) {
        auto& scene = train_scenes[size_t(
            root.substream("scene_pick", uint64_t(global_step))
                .uniform_int(uint32_t(train_scenes.size())))];
        auto batch = sample_patches(
            scene.input, scene.mask, cfg.target_class, cfg.geometry,
            cfg.batch_size,
            root.substream_seed("batch", uint64_t(global_step)), scene.id);

        Tensor4<float> x(batch.count, batch.channels, batch.input_size,
                         batch.input_size);
        x.v = std::move(batch.inputs);
        Tensor4<float> y(batch.count, 1, batch.output_size, batch.output_size);
        y.v = std::move(batch.targets);

        model.zero_grad();
        auto yhat = model.forward(x, true);
        Tensor4<float> dLdy;
        float loss = joint_loss_grad(y, yhat, dLdy, cfg.loss_mode);
        if (!std::isfinite(loss))
          fail(ErrorCode::NaNGradient, "non-finite loss at step " +
                                           std::to_string(global_step));
        model.backward(dLdy);
        for (auto& p : params)
          for (float g : *p.grad)
            if (!std::isfinite(g))
              fail(ErrorCode::NaNGradient,
                   "non-finite gradient in " + p.name + " at step " +
                       std::to_string(global_step));
        opt.step(params, float(phase.lr));
        loss_sum += loss;
      }

      EpochLog entry;
      entry.epoch = epoch;
      entry.lr = phase.lr;
      entry.mean_loss = loss_sum / cfg.batches_per_epoch;
      entry.val_jaccard = validate();
      entry.seconds = now_seconds() - t0;
      result.epochs.push_back(entry);
      log << entry.epoch << "," << entry.lr << "," << entry.mean_loss << ","
          << entry.val_jaccard << "," << entry.seconds << "\n";
      log.flush();

      if (entry.val_jaccard > result.best_val_jaccard ||
          result.best_epoch < 0) {
        result.best_val_jaccard = entry.val_jaccard;
        result.best_epoch = entry.epoch;
        save_checkpoint(model, result.checkpoint_path, input_spec);
      }
      if (cfg.early_stop_jaccard &&
          entry.val_jaccard >= *cfg.early_stop_jaccard) {
        result.early_stopped = true;
        stop = true;
      }
    }
    if (stop) break;
  }
  return result;
}

json EvalReport::to_json() const {
  json classes = json::array();
  for (const auto& pc : per_class)
    classes.push_back({{"class", std::string(class_str(pc.cls))},
                       {"jaccard", pc.jaccard},
                       {"truth_pixels", pc.truth_pixels},
                       {"pred_pixels", pc.pred_pixels},
                       {"intersection", pc.intersection},
                       {"union", pc.union_}});
  return json{{"per_class", classes},
              {"micro_average", micro_average},
              {"config_fingerprint", config_fingerprint},
              {"wall_seconds", wall_seconds}};
}

EvalReport EvalReport::from_json(const json& j) {
  EvalReport r;
  for (const auto& pc : j.at("per_class")) {
    PerClass c;
    c.cls = class_from_str(pc.at("class").get<std::string>());
    c.jaccard = pc.at("jaccard").get<double>();
    c.truth_pixels = pc.at("truth_pixels").get<int64_t>();
    c.pred_pixels = pc.at("pred_pixels").get<int64_t>();
    c.intersection = pc.at("intersection").get<int64_t>();
    c.union_ = pc.at("union").get<int64_t>();
    r.per_class.push_back(c);
  }
  r.micro_average = j.at("micro_average").get<double>();
  r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  return r;
}

EvalReport evaluate(const LabelMask& pred, const LabelMask& truth,
                    const std::string& fingerprint, double wall_seconds) {
  if (pred.width() != truth.width() || pred.height() != truth.height())
    fail(ErrorCode::ShapeMismatch, "prediction/truth dims differ");
  for (auto c : truth.classes())
    if (!pred.has_class(c))
      fail(ErrorCode::ShapeMismatch,
           "prediction lacks class " + std::string(class_str(c)));

  EvalReport report;
  report.config_fingerprint = fingerprint;
  report.wall_seconds = wall_seconds;
  int64_t inter_total = 0, union_total = 0;
  for (auto c : truth.classes()) {
    auto tp = truth.plane_for(c);
    auto pp = pred.plane_for(c);
    EvalReport::PerClass pc;
    pc.cls = c;
    for (size_t i = 0; i < tp.size(); ++i) {
      bool t = tp[i] != 0, p = pp[i] != 0;
      pc.truth_pixels += t;
      pc.pred_pixels += p;
      pc.intersection += (t && p);
      pc.union_ += (t || p);
    }
    pc.jaccard = pc.union_ == 0 ? 1.0 : double(pc.intersection) / pc.union_;
    inter_total += pc.intersection;
    union_total += pc.union_;
    report.per_class.push_back(pc);
  }
  report.micro_average =
      union_total == 0 ? 1.0 : double(inter_total) / union_total;
  return report;
}

std::vector<ClassStat> class_stats(const std::vector<LabelMask>& masks) {
  std::vector<ClassStat> stats;
  int64_t total = 0;
  for (const auto& m : masks) total += int64_t(m.plane_size());
  for (auto c : all_classes()) {
    ClassStat s;
    s.cls = c;
    s.total = total;
    for (const auto& m : masks) {
      if (!m.has_class(c)) continue;
      for (uint8_t v : m.plane_for(c)) s.pixels += v;
    }
    s.fraction = total == 0 ? 0.0 : double(s.pixels) / double(total);
    stats.push_back(s);
  }
  return stats;
}

std::string class_stats_csv(const std::vector<ClassStat>& stats) {
  std::string out = "class,pixels,total,fraction\n";
  char line[128];
  for (const auto& s : stats) {
    std::snprintf(line, sizeof(line), "%s,%lld,%lld,%.6f\n",
                  std::string(class_str(s.cls)).c_str(),
                  (long long)s.pixels, (long long)s.total, s.fraction);
    out += line;
  }
  return out;
}

}  // namespace satseg
