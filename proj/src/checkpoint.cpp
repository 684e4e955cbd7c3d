#include "satseg/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace satseg {

using json = nlohmann::json;

namespace {
constexpr char kMagic[] = "MSMODEL\n";  // 8 bytes
constexpr size_t kMagicLen = 8;
}  // namespace

json unet_config_to_json(const UNetConfig& cfg) {
  return json{{"in_channels", cfg.in_channels},
              {"base_channels", cfg.base_channels},
              {"depth", cfg.depth},
              {"output_crop", cfg.output_crop},
              {"bn_epsilon", cfg.bn_epsilon},
              {"bn_momentum", cfg.bn_momentum},
              {"elu_alpha", cfg.elu_alpha}};
}

UNetConfig unet_config_from_json(const json& j) {
  UNetConfig cfg;
  cfg.in_channels = j.at("in_channels").get<int>();
  cfg.base_channels = j.at("base_channels").get<int>();
  cfg.depth = j.at("depth").get<int>();
  cfg.output_crop = j.at("output_crop").get<int>();
  cfg.bn_epsilon = j.at("bn_epsilon").get<float>();
  cfg.bn_momentum = j.at("bn_momentum").get<float>();
  cfg.elu_alpha = j.at("elu_alpha").get<float>();
  cfg.validate();
  return cfg;
}

void save_checkpoint(UNet<float>& model, const std::filesystem::path& path,
                     const json& extra) {
  auto tensors = model.all_tensors();
  json manifest = json::array();
  uint64_t offset = 0;
  for (const auto& t : tensors) {
    manifest.push_back(
        {{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
    offset += t.data->size() * sizeof(float);
  }
  json header{{"version", 1},
              {"config", unet_config_to_json(model.config())},
              {"params", manifest},
              {"extra", extra}};
  std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    fail(ErrorCode::IoFailure, "cannot open for writing: " + path.string());
  out.write(kMagic, kMagicLen);
  uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), std::streamsize(hs.size()));
  for (const auto& t : tensors)
    out.write(reinterpret_cast<const char*>(t.data->data()),
              std::streamsize(t.data->size() * sizeof(float)));
  if (!out) fail(ErrorCode::IoFailure, "write failed: " + path.string());
}

UNet<float> load_checkpoint(const std::filesystem::path& path, json* extra) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open: " + path.string());
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0)
    fail(ErrorCode::MalformedHeader, "missing MSMODEL magic: " + path.string());
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || hlen == 0 || hlen > (1ull << 24))
    fail(ErrorCode::MalformedHeader, "implausible header length");
  std::string hs(hlen, '\0');
  in.read(hs.data(), std::streamsize(hlen));
  if (!in) fail(ErrorCode::MalformedHeader, "truncated header");

  json header;
  try {
    header = json::parse(hs);
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedHeader, std::string("bad header JSON: ") + e.what());
  }
  if (header.at("version").get<int>() != 1)
    fail(ErrorCode::UnsupportedVersion, "unsupported model version");

  UNet<float> model(unet_config_from_json(header.at("config")), 0);
  auto tensors = model.all_tensors();

  for (const auto& entry : header.at("params")) {
    std::string name = entry.at("name").get<std::string>();
    auto shape = entry.at("shape").get<std::vector<int>>();
    uint64_t offset = entry.at("offset").get<uint64_t>();
    ParamView<float>* target = nullptr;
    for (auto& t : tensors)
      if (t.name == name) {
        target = &t;
        break;
      }
    if (!target)
      fail(ErrorCode::MalformedHeader, "unknown tensor in manifest: " + name);
    if (target->shape != shape)
      fail(ErrorCode::ShapeMismatch, "tensor shape mismatch for " + name);
    in.seekg(std::streamoff(kMagicLen + sizeof(uint64_t) + hlen + offset));
    in.read(reinterpret_cast<char*>(target->data->data()),
            std::streamsize(target->data->size() * sizeof(float)));
    if (!in) fail(ErrorCode::LengthMismatch, "payload truncated at " + name);
  }
  if (extra) *extra = header.value("extra", json::object());
  return model;
}

}  // namespace satseg
