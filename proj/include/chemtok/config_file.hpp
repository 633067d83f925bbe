#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "chemtok/encoder.hpp"

namespace chemtok {

/// Reads `key = value` lines into an encoder config. Blank lines and lines
/// starting with '#' are skipped. Keys are the EncoderConfig field names
/// (image_side, patch_side, embed_dim, num_heads, num_layers, ffn_hidden,
/// seed, use_cls) plus the reduction keys (reduction, tau, target_tokens,
/// force_mode, schedule). Unknown keys are an error.
EncoderConfig parse_config(std::istream& in, EncoderConfig base = {});
EncoderConfig load_config(const std::filesystem::path& path, EncoderConfig base = {});

/// Applies a single key/value pair; throws ConfigError on unknown keys or bad values.
void apply_config_value(EncoderConfig& cfg, const std::string& key, const std::string& value);

/// Writes every key in the same format `parse_config` reads.
std::string format_config(const EncoderConfig& cfg);

}  // namespace chemtok
