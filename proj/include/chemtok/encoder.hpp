#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "chemtok/image.hpp"
#include "chemtok/reduction.hpp"
#include "chemtok/tokens.hpp"

namespace chemtok {

struct EncoderConfig {
  int image_side = 448;
  int patch_side = 28;
  int embed_dim = 64;
  int num_heads = 4;
  int num_layers = 8;
  int ffn_hidden = 256;
  std::uint64_t seed = 0;
  bool use_cls = true;
  ReductionConfig reduction;

  int grid_side() const { return image_side / patch_side; }
  int num_patches() const { return grid_side() * grid_side(); }
  int head_dim() const { return embed_dim / num_heads; }
  /// Throws ConfigError on broken geometry.
  void validate() const;
};

struct EncodeResult {
  TokenSet tokens;
  std::vector<LayerTrace> traces;
};

/// Called once per layer after the reduction stage. `before` is the
/// post-attention token set the workspace belongs to.
struct LayerView {
  int layer;
  const TokenSet& before;
  const AttentionWorkspace& workspace;
  const TokenSet& after;
  const LayerTrace& trace;
};
using LayerObserver = std::function<void(const LayerView&)>;

/// Seeded pre-norm vision transformer with a token-reduction stage between
/// attention and FFN in every block.
///
/// Weights are drawn from a 64-bit Mersenne twister seeded with `cfg.seed`:
/// each entry is uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], built from
/// the top 53 bits of one draw. Draw order: patch projection, CLS vector,
/// then per layer Wq, Wk, Wv, Wo, W1, W2. There are no biases.
///
/// An Encoder is immutable after construction; `encode` may be called from
/// several threads at once.
class Encoder {
 public:
  explicit Encoder(EncoderConfig cfg);

  const EncoderConfig& config() const { return cfg_; }
  /// Patch tokens kept after each layer.
  const std::vector<int>& schedule() const { return cfg_.reduction.schedule; }

  TokenSet patch_embed(const Image& image) const;
  std::pair<TokenSet, AttentionWorkspace> attention_block(const TokenSet& tokens, int layer) const;
  TokenSet ffn_block(const TokenSet& tokens, int layer) const;
  EncodeResult encode(const Image& image, const LayerObserver& observer = {}) const;

  const Matrix& patch_projection() const { return patch_proj_; }

 private:
  struct Layer {
    Matrix wq, wk, wv, wo, w1, w2;
  };

  EncoderConfig cfg_;
  Matrix patch_proj_;
  Vector cls_;
  std::vector<Layer> layers_;
};

/// Attention cost of one block over n live tokens: 4*n*d^2 + 2*n^2*d.
std::int64_t attention_flops(std::int64_t n, std::int64_t d);
/// FFN cost of one block over n live tokens: 2*n*d*hidden*2.
std::int64_t ffn_flops(std::int64_t n, std::int64_t d, std::int64_t hidden);

/// Analytic FLOPs of an encoder pass. Attention runs over each layer's
/// incoming tokens and the FFN over the reduced set; CLS counts when enabled.
std::int64_t flops_estimate(std::span<const LayerTrace> traces, const EncoderConfig& cfg);

}  // namespace chemtok
