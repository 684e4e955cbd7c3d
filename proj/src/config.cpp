#include "satseg/config.hpp"

#include <fstream>
#include <set>

namespace satseg {

using json = nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      fail(ErrorCode::ConfigError,
           "unknown config field \"" + it.key() + "\" in " + where);
}

}  // namespace

RunConfig::RunConfig() {
  bands = {BandName(Band::Coastal), BandName(Band::Blue),
           BandName(Band::Green),   BandName(Band::Yellow),
           BandName(Band::Red),     BandName(Band::RedEdge),
           BandName(Band::NIR1),    BandName(Band::NIR2),
           BandName(Band::Pan)};
}

UNetConfig RunConfig::unet_config() const {
  UNetConfig cfg;
  cfg.in_channels = in_channels();
  cfg.base_channels = base_channels;
  cfg.depth = depth;
  cfg.output_crop = geometry.margin();
  cfg.bn_epsilon = bn_epsilon;
  cfg.bn_momentum = bn_momentum;
  cfg.elu_alpha = elu_alpha;
  return cfg;
}

void RunConfig::validate() const {
  geometry.validate();
  unet_config().validate();
  if (schedule.empty())
    fail(ErrorCode::ConfigError, "schedule must have at least one phase");
  for (const auto& phase : schedule) {
    if (phase.epochs < 1)
      fail(ErrorCode::ConfigError, "schedule epochs must be >= 1");
    if (!(phase.lr > 0))
      fail(ErrorCode::ConfigError, "schedule lr must be > 0");
  }
  if (batch_size < 1) fail(ErrorCode::ConfigError, "batch_size must be >= 1");
  if (batches_per_epoch < 1)
    fail(ErrorCode::ConfigError, "batches_per_epoch must be >= 1");
  if (bands.empty()) fail(ErrorCode::ConfigError, "bands must not be empty");
  if (!(threshold >= 0.0 && threshold <= 1.0))
    fail(ErrorCode::ConfigError, "threshold must be in [0,1]");
  if (geometry.input_size % (1 << depth) != 0)
    fail(ErrorCode::ConfigError,
         "input_size must be divisible by 2^depth");
  for (const auto& name : index_channels)
    if (name != "ndvi" && name != "ndwi" && name != "ccci")
      fail(ErrorCode::ConfigError, "unknown index channel: " + name);
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  reject_unknown(j,
                 {"seed", "class", "data_dir", "out_dir", "bands", "indices",
                  "nir_band", "geometry", "model", "schedule",
                  "batches_per_epoch", "batch_size", "threshold", "loss_mode",
                  "early_stop_jaccard", "water_via_network"},
                 "run config");
  try {
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("class"))
      cfg.target_class = class_from_str(j["class"].get<std::string>());
    if (j.contains("data_dir")) cfg.data_dir = j["data_dir"].get<std::string>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("bands")) {
      cfg.bands.clear();
      for (const auto& b : j["bands"])
        cfg.bands.push_back(BandName(band_from_str(b.get<std::string>())));
    }
    if (j.contains("indices")) {
      cfg.index_channels.clear();
      for (const auto& s : j["indices"])
        cfg.index_channels.push_back(s.get<std::string>());
    }
    if (j.contains("nir_band"))
      cfg.nir_band = band_from_str(j["nir_band"].get<std::string>());
    if (j.contains("geometry")) {
      const auto& g = j["geometry"];
      reject_unknown(g, {"input_size", "output_size"}, "geometry");
      if (g.contains("input_size"))
        cfg.geometry.input_size = g["input_size"].get<int>();
      if (g.contains("output_size"))
        cfg.geometry.output_size = g["output_size"].get<int>();
    }
    if (j.contains("model")) {
      const auto& m = j["model"];
      reject_unknown(m,
                     {"base_channels", "depth", "bn_epsilon", "bn_momentum",
                      "elu_alpha"},
                     "model");
      if (m.contains("base_channels"))
        cfg.base_channels = m["base_channels"].get<int>();
      if (m.contains("depth")) cfg.depth = m["depth"].get<int>();
      if (m.contains("bn_epsilon"))
        cfg.bn_epsilon = m["bn_epsilon"].get<float>();
      if (m.contains("bn_momentum"))
        cfg.bn_momentum = m["bn_momentum"].get<float>();
      if (m.contains("elu_alpha")) cfg.elu_alpha = m["elu_alpha"].get<float>();
    }
    if (j.contains("schedule")) {
      cfg.schedule.clear();
      for (const auto& p : j["schedule"]) {
        reject_unknown(p, {"epochs", "lr"}, "schedule");
        cfg.schedule.push_back(
            {p.at("epochs").get<int>(), p.at("lr").get<double>()});
      }
    }
    if (j.contains("batches_per_epoch"))
      cfg.batches_per_epoch = j["batches_per_epoch"].get<int>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
    if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
    if (j.contains("loss_mode")) {
      std::string m = j["loss_mode"].get<std::string>();
      if (m == "aggregate")
        cfg.loss_mode = SoftJaccardMode::aggregate;
      else if (m == "per_pixel_mean")
        cfg.loss_mode = SoftJaccardMode::per_pixel_mean;
      else
        fail(ErrorCode::ConfigError, "loss_mode must be aggregate|per_pixel_mean");
    }
    if (j.contains("early_stop_jaccard") && !j["early_stop_jaccard"].is_null())
      cfg.early_stop_jaccard = j["early_stop_jaccard"].get<double>();
    if (j.contains("water_via_network"))
      cfg.water_via_network = j["water_via_network"].get<bool>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json bands_j = json::array();
  for (const auto& b : bands) bands_j.push_back(b.str());
  json idx_j = json::array();
  for (const auto& s : index_channels) idx_j.push_back(s);
  json sched = json::array();
  for (const auto& p : schedule)
    sched.push_back({{"epochs", p.epochs}, {"lr", p.lr}});
  json j{
      {"seed", seed},
      {"class", std::string(class_str(target_class))},
      {"data_dir", data_dir},
      {"out_dir", out_dir},
      {"bands", bands_j},
      {"indices", idx_j},
      {"nir_band", std::string(band_str(nir_band))},
      {"geometry",
       {{"input_size", geometry.input_size},
        {"output_size", geometry.output_size}}},
      {"model",
       {{"base_channels", base_channels},
        {"depth", depth},
        {"bn_epsilon", bn_epsilon},
        {"bn_momentum", bn_momentum},
        {"elu_alpha", elu_alpha}}},
      {"schedule", sched},
      {"batches_per_epoch", batches_per_epoch},
      {"batch_size", batch_size},
      {"threshold", threshold},
      {"loss_mode", loss_mode == SoftJaccardMode::aggregate
                        ? "aggregate"
                        : "per_pixel_mean"},
      {"water_via_network", water_via_network},
  };
  if (early_stop_jaccard) j["early_stop_jaccard"] = *early_stop_jaccard;
  return j;
}

std::string RunConfig::fingerprint() const {
  std::string s = to_json().dump();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return buf;
}

}  // namespace satseg
