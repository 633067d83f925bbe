#include "chemtok/encoder.hpp"

#include <cmath>
#include <random>
#include <string>

#include "chemtok/errors.hpp"
#include "chemtok/kernels.hpp"

namespace chemtok {

void EncoderConfig::validate() const {
  if (image_side < 1 || patch_side < 1) throw ConfigError("image_side and patch_side must be positive");
  if (image_side % patch_side != 0) {
    throw ConfigError("image_side " + std::to_string(image_side) + " is not divisible by patch_side " +
                      std::to_string(patch_side));
  }
  if (embed_dim < 1 || num_heads < 1 || embed_dim % num_heads != 0) {
    throw ConfigError("embed_dim must be a positive multiple of num_heads");
  }
  if (num_layers < 1) throw ConfigError("num_layers must be >= 1");
  if (ffn_hidden < 1) throw ConfigError("ffn_hidden must be >= 1");
  if (reduction.enabled && !use_cls) throw ConfigError("token reduction requires use_cls = true");
}

namespace {

class WeightSource {
 public:
  explicit WeightSource(std::uint64_t seed) : gen_(seed) {}

  Matrix uniform(Eigen::Index rows, Eigen::Index cols, double fan_in) {
    const double bound = 1.0 / std::sqrt(fan_in);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = (2.0 * unit() - 1.0) * bound;
    }
    return m;
  }

 private:
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 gen_;
};

}  // namespace

Encoder::Encoder(EncoderConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  resolve_schedule(cfg_.reduction, cfg_.num_patches(), cfg_.num_layers);

  const int d = cfg_.embed_dim;
  const int patch_dim = cfg_.patch_side * cfg_.patch_side * 3;
  WeightSource rng(cfg_.seed);
  patch_proj_ = rng.uniform(patch_dim, d, patch_dim);
  cls_ = rng.uniform(1, d, d).row(0).transpose();
  layers_.reserve(cfg_.num_layers);
  for (int l = 0; l < cfg_.num_layers; ++l) {
    Layer layer;
    layer.wq = rng.uniform(d, d, d);
    layer.wk = rng.uniform(d, d, d);
    layer.wv = rng.uniform(d, d, d);
    layer.wo = rng.uniform(d, d, d);
    layer.w1 = rng.uniform(d, cfg_.ffn_hidden, d);
    layer.w2 = rng.uniform(cfg_.ffn_hidden, d, cfg_.ffn_hidden);
    layers_.push_back(std::move(layer));
  }
}

TokenSet Encoder::patch_embed(const Image& image) const {
  const int side = cfg_.image_side;
  if (image.width() != side || image.height() != side) {
    throw ConfigError("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                      ", encoder expects " + std::to_string(side) + "x" + std::to_string(side));
  }
  if (image.channels() != 3) throw ConfigError("encoder expects a 3-channel image");

  const int p = cfg_.patch_side;
  const int grid = cfg_.grid_side();
  const int n = cfg_.num_patches();
  Matrix patches(n, p * p * 3);
  for (int pr = 0; pr < grid; ++pr) {
    for (int pc = 0; pc < grid; ++pc) {
      const int row = pr * grid + pc;
      for (int y = 0; y < p; ++y) {
        for (int x = 0; x < p; ++x) {
          for (int c = 0; c < 3; ++c) {
            patches(row, (y * p + x) * 3 + c) = image.planes[c](pr * p + y, pc * p + x);
          }
        }
      }
    }
  }

  TokenSet tokens;
  tokens.has_cls = cfg_.use_cls;
  tokens.original_patches = n;
  const int first = cfg_.use_cls ? 1 : 0;
  tokens.features.resize(n + first, cfg_.embed_dim);
  tokens.features.bottomRows(n).noalias() = patches * patch_proj_;
  tokens.sizes = SizeVector::Ones(n + first);
  tokens.origins.resize(n + first);
  if (cfg_.use_cls) tokens.features.row(0) = cls_.transpose();
  for (int i = 0; i < n; ++i) tokens.origins[first + i] = {i};
  return tokens;
}

std::pair<TokenSet, AttentionWorkspace> Encoder::attention_block(const TokenSet& tokens, int layer) const {
  const Layer& w = layers_.at(layer);
  const int heads = cfg_.num_heads;
  const int hd = cfg_.head_dim();
  const Matrix x = layer_norm_rows(tokens.features);
  const Matrix q = x * w.wq;
  const Matrix k = x * w.wk;
  const Matrix v = x * w.wv;
  const Vector log_sizes = tokens.sizes.cast<double>().array().log().matrix();
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  AttentionWorkspace ws;
  Matrix context(tokens.num_tokens(), cfg_.embed_dim);
  for (int h = 0; h < heads; ++h) {
    ws.q.push_back(q.middleCols(h * hd, hd));
    ws.k.push_back(k.middleCols(h * hd, hd));
    ws.v.push_back(v.middleCols(h * hd, hd));
    ws.attn.push_back(softmax_rows(scale * (ws.q.back() * ws.k.back().transpose()), log_sizes));
    context.middleCols(h * hd, hd).noalias() = ws.attn.back() * ws.v.back();
  }

  TokenSet out = tokens;
  out.features.noalias() += context * w.wo;
  if (!out.features.allFinite()) throw NumericError(layer, "non-finite activations after attention");
  return {std::move(out), std::move(ws)};
}

TokenSet Encoder::ffn_block(const TokenSet& tokens, int layer) const {
  const Layer& w = layers_.at(layer);
  TokenSet out = tokens;
  out.features.noalias() += gelu(layer_norm_rows(tokens.features) * w.w1) * w.w2;
  if (!out.features.allFinite()) throw NumericError(layer, "non-finite activations after FFN");
  return out;
}

EncodeResult Encoder::encode(const Image& image, const LayerObserver& observer) const {
  EncodeResult result;
  result.tokens = patch_embed(image);
  const std::int64_t cls = cfg_.use_cls ? 1 : 0;
  for (int l = 0; l < cfg_.num_layers; ++l) {
    auto [attended, ws] = attention_block(result.tokens, l);
    TokenSet reduced;
    LayerTrace trace;
    if (cfg_.reduction.enabled) {
      std::tie(reduced, trace) = reduce_layer(attended, ws, l, cfg_.reduction);
    } else {
      reduced = attended;
      trace.layer_index = l;
      trace.tokens_in = trace.tokens_out = static_cast<int>(attended.patch_count());
      trace.score_variance = attended.has_cls ? ats_score(ws, attended).variance() : 0.0;
    }
    trace.attention_flops = attention_flops(trace.tokens_in + cls, cfg_.embed_dim);
    trace.ffn_flops = ffn_flops(trace.tokens_out + cls, cfg_.embed_dim, cfg_.ffn_hidden);
    if (observer) observer(LayerView{l, attended, ws, reduced, trace});
    result.tokens = ffn_block(reduced, l);
    result.traces.push_back(trace);
  }
  return result;
}

std::int64_t attention_flops(std::int64_t n, std::int64_t d) { return 4 * n * d * d + 2 * n * n * d; }

std::int64_t ffn_flops(std::int64_t n, std::int64_t d, std::int64_t hidden) { return 2 * n * d * hidden * 2; }

std::int64_t flops_estimate(std::span<const LayerTrace> traces, const EncoderConfig& cfg) {
  if (traces.empty()) throw UsageError("flops_estimate needs at least one layer trace");
  const std::int64_t cls = cfg.use_cls ? 1 : 0;
  std::int64_t total = 0;
  for (const LayerTrace& t : traces) {
    total += attention_flops(t.tokens_in + cls, cfg.embed_dim);
    total += ffn_flops(t.tokens_out + cls, cfg.embed_dim, cfg.ffn_hidden);
  }
  return total;
}

}  // namespace chemtok
