#pragma once

#include <filesystem>

#include <json.hpp>

#include "satseg/unet.hpp"

namespace satseg {

// Model container: "MSMODEL\n" | u64 LE header length | JSON header
// {version, config, params manifest with names/shapes/offsets, extra} |
// raw f32 LE payload. The manifest covers trainable parameters and BN
// running statistics.

void save_checkpoint(UNet<float>& model, const std::filesystem::path& path,
                     const nlohmann::json& extra = nlohmann::json::object());

UNet<float> load_checkpoint(const std::filesystem::path& path,
                            nlohmann::json* extra = nullptr);

nlohmann::json unet_config_to_json(const UNetConfig& cfg);
UNetConfig unet_config_from_json(const nlohmann::json& j);

}  // namespace satseg
