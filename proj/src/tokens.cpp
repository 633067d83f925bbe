#include "chemtok/tokens.hpp"

#include <charconv>
#include <sstream>
#include <unordered_set>

#include "chemtok/errors.hpp"

namespace chemtok {

void TokenSet::validate() const {
  const Eigen::Index n = num_tokens();
  if (sizes.size() != n || static_cast<Eigen::Index>(origins.size()) != n) {
    throw ShapeError("token set fields disagree on token count");
  }
  if (n > 0 && (sizes.array() < 1).any()) throw ShapeError("token size below 1");
  if (has_cls && (n == 0 || sizes(0) != 1)) throw ShapeError("CLS token must have size 1");
  if (!features.allFinite()) throw ShapeError("non-finite token features");
  std::size_t covered = discarded.size();
  for (Eigen::Index i = first_patch(); i < n; ++i) covered += origins[i].size();
  if (static_cast<int>(covered) != original_patches) {
    throw ShapeError("origin bookkeeping does not cover the original patches");
  }
}

Matrix AttentionWorkspace::mean_attention() const {
  Matrix out = Matrix::Zero(attn.at(0).rows(), attn.at(0).cols());
  for (const Matrix& a : attn) out += a;
  return out / static_cast<double>(attn.size());
}

Vector AttentionWorkspace::mean_value_norms() const {
  Vector out = Vector::Zero(v.at(0).rows());
  for (const Matrix& m : v) out += m.rowwise().norm();
  return out / static_cast<double>(v.size());
}

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::prune:
      return "prune";
    case Policy::merge:
      return "merge";
    case Policy::none:
      break;
  }
  return "none";
}

std::string format_trace(const LayerTrace& t) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "layer=" << t.layer_index << " tokens_in=" << t.tokens_in << " tokens_out=" << t.tokens_out
     << " score_variance=" << t.score_variance << " policy=" << to_string(t.policy_chosen)
     << " attention_flops=" << t.attention_flops << " ffn_flops=" << t.ffn_flops;
  return os.str();
}

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw FormatError("bad value for " + std::string(key) + ": " + std::string(v));
  }
  return out;
}

}  // namespace

LayerTrace parse_trace(std::string_view line) {
  LayerTrace t;
  std::unordered_set<std::string> seen;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    const std::string_view field = line.substr(pos, end - pos);
    pos = end;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw FormatError("trace field without '=': " + std::string(field));
    const std::string_view key = field.substr(0, eq);
    const std::string_view val = field.substr(eq + 1);
    seen.emplace(key);
    if (key == "layer") {
      t.layer_index = parse_number<int>(key, val);
    } else if (key == "tokens_in") {
      t.tokens_in = parse_number<int>(key, val);
    } else if (key == "tokens_out") {
      t.tokens_out = parse_number<int>(key, val);
    } else if (key == "score_variance") {
      t.score_variance = parse_number<double>(key, val);
    } else if (key == "policy") {
      if (val == "prune") {
        t.policy_chosen = Policy::prune;
      } else if (val == "merge") {
        t.policy_chosen = Policy::merge;
      } else if (val == "none") {
        t.policy_chosen = Policy::none;
      } else {
        throw FormatError("unknown policy: " + std::string(val));
      }
    } else if (key == "attention_flops") {
      t.attention_flops = parse_number<std::int64_t>(key, val);
    } else if (key == "ffn_flops") {
      t.ffn_flops = parse_number<std::int64_t>(key, val);
    } else {
      throw FormatError("unknown trace field: " + std::string(key));
    }
  }
  if (seen.size() != 7) throw FormatError("trace record is missing fields");
  return t;
}

}  // namespace chemtok
