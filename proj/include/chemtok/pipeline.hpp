#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chemtok/encoder.hpp"
#include "chemtok/image.hpp"
#include "chemtok/tiling.hpp"

namespace chemtok {

/// Tiles an image and encodes every tile (thumbnail included).
struct ImageEncoding {
  TilingPlan plan;
  int raw_visual_tokens = 0;    // tiles x patches per tile
  int final_visual_tokens = 0;  // patch tokens left after the last layer
  std::int64_t flops = 0;
  double wall_ms = 0.0;
  std::vector<EncodeResult> tiles;
};

ImageEncoding encode_image(const Image& image, const Encoder& encoder, int max_tiles);

struct BenchInput {
  std::string name;
  Image image;
};

struct BenchRow {
  std::string name;
  int tiles = 0;
  int raw_visual_tokens = 0;
  int final_visual_tokens = 0;
  std::int64_t flops_baseline = 0;
  std::int64_t flops_reduced = 0;
  double wall_ms_baseline = 0.0;
  double wall_ms_reduced = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // sorted by name
  int text_tokens = 30;

  double mean_raw_tokens() const;
  double mean_final_tokens() const;
  /// Visual-token ratio raw / final over the whole batch.
  double visual_token_ratio() const;
  /// (raw + text) / (final + text), averaged per image.
  double total_token_ratio() const;
  /// Summed baseline FLOPs over summed reduced FLOPs.
  double flop_ratio() const;
  /// Summed baseline wall time over summed reduced wall time.
  double wall_speedup() const;
};

/// Worker count from CHEMTOK_WORKERS, falling back to the hardware
/// concurrency. Always at least 1.
int default_workers();

/// Runs the unreduced and reduced encoders over every input with a pool of
/// `workers` threads. Throws UsageError on an empty batch.
BenchReport run_bench(const std::vector<BenchInput>& inputs, const EncoderConfig& cfg, int max_tiles,
                      int text_tokens, int workers);

/// One row per image and a final `mean` row.
std::string bench_csv(const BenchReport& report);

}  // namespace chemtok
