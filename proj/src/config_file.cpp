#include "chemtok/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "chemtok/errors.hpp"

namespace chemtok {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T to_number(const std::string& key, const std::string& v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError("bad value for " + key + ": '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

void apply_config_value(EncoderConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "image_side") {
    cfg.image_side = to_number<int>(key, value);
  } else if (key == "patch_side") {
    cfg.patch_side = to_number<int>(key, value);
  } else if (key == "embed_dim") {
    cfg.embed_dim = to_number<int>(key, value);
  } else if (key == "num_heads") {
    cfg.num_heads = to_number<int>(key, value);
  } else if (key == "num_layers") {
    cfg.num_layers = to_number<int>(key, value);
  } else if (key == "ffn_hidden") {
    cfg.ffn_hidden = to_number<int>(key, value);
  } else if (key == "seed") {
    cfg.seed = to_number<std::uint64_t>(key, value);
  } else if (key == "use_cls") {
    cfg.use_cls = to_bool(key, value);
  } else if (key == "reduction") {
    cfg.reduction.enabled = to_bool(key, value);
  } else if (key == "tau") {
    cfg.reduction.tau = to_number<double>(key, value);
    if (!(cfg.reduction.tau > 0.0)) throw ConfigError("tau must be > 0");
  } else if (key == "target_tokens") {
    cfg.reduction.target_tokens = to_number<int>(key, value);
  } else if (key == "force_mode") {
    cfg.reduction.force_mode = parse_force_mode(value);
  } else if (key == "schedule") {
    cfg.reduction.schedule_kind = parse_schedule_kind(value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

EncoderConfig parse_config(std::istream& in, EncoderConfig base) {
  std::string line;
  int lineno = 0;
  bool saw_embed = false;
  bool saw_hidden = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    apply_config_value(base, key, trim(t.substr(eq + 1)));
    saw_embed |= key == "embed_dim";
    saw_hidden |= key == "ffn_hidden";
  }
  // ffn_hidden follows embed_dim (4x) unless given explicitly.
  if (saw_embed && !saw_hidden) base.ffn_hidden = 4 * base.embed_dim;
  return base;
}

EncoderConfig load_config(const std::filesystem::path& path, EncoderConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in, std::move(base));
}

std::string format_config(const EncoderConfig& cfg) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "image_side = " << cfg.image_side << "\n"
     << "patch_side = " << cfg.patch_side << "\n"
     << "embed_dim = " << cfg.embed_dim << "\n"
     << "num_heads = " << cfg.num_heads << "\n"
     << "num_layers = " << cfg.num_layers << "\n"
     << "ffn_hidden = " << cfg.ffn_hidden << "\n"
     << "seed = " << cfg.seed << "\n"
     << "use_cls = " << (cfg.use_cls ? "true" : "false") << "\n"
     << "reduction = " << (cfg.reduction.enabled ? "true" : "false") << "\n"
     << "tau = " << cfg.reduction.tau << "\n"
     << "target_tokens = " << cfg.reduction.target_tokens << "\n"
     << "force_mode = " << to_string(cfg.reduction.force_mode) << "\n"
     << "schedule = " << to_string(cfg.reduction.schedule_kind) << "\n";
  return os.str();
}

}  // namespace chemtok
