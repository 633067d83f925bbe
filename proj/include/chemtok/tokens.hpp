#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace chemtok {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SizeVector = Eigen::VectorXi;

/// The live visual tokens of one encoder pass.
///
/// Row 0 is the CLS token when `has_cls` is set; every other row is a patch
/// token that stands for `sizes(i)` original patches, listed in `origins[i]`.
/// Patches removed by pruning are kept in `discarded` so that the original
/// patch count can always be reconstructed.
struct TokenSet {
  Matrix features;
  SizeVector sizes;
  std::vector<std::vector<int>> origins;
  std::vector<int> discarded;
  bool has_cls = false;
  int original_patches = 0;

  Eigen::Index num_tokens() const { return features.rows(); }
  Eigen::Index first_patch() const { return has_cls ? 1 : 0; }
  Eigen::Index patch_count() const { return num_tokens() - first_patch(); }
  std::int64_t total_size() const { return sizes.cast<std::int64_t>().sum(); }
  std::int64_t patch_size_sum() const {
    return sizes.tail(patch_count()).cast<std::int64_t>().sum();
  }

  /// Throws ShapeError when any structural invariant is broken.
  void validate() const;
};

/// Per-head attention intermediates of one block, kept for token scoring.
struct AttentionWorkspace {
  std::vector<Matrix> q;
  std::vector<Matrix> k;
  std::vector<Matrix> v;
  std::vector<Matrix> attn;

  int num_heads() const { return static_cast<int>(attn.size()); }
  /// Attention averaged over heads.
  Matrix mean_attention() const;
  /// L2 norm of each token's value vector, averaged over heads.
  Vector mean_value_norms() const;
};

enum class Policy { none, prune, merge };

std::string_view to_string(Policy p);

/// Reduction telemetry for one encoder layer. Token counts exclude CLS.
struct LayerTrace {
  int layer_index = 0;
  int tokens_in = 0;
  int tokens_out = 0;
  double score_variance = 0.0;
  Policy policy_chosen = Policy::none;
  std::int64_t attention_flops = 0;
  std::int64_t ffn_flops = 0;
};

/// One line per trace: `layer=1 tokens_in=256 ... ffn_flops=...`.
std::string format_trace(const LayerTrace& t);
LayerTrace parse_trace(std::string_view line);

}  // namespace chemtok
