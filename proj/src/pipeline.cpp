#include "chemtok/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "chemtok/errors.hpp"

namespace chemtok {

ImageEncoding encode_image(const Image& image, const Encoder& encoder, int max_tiles) {
  const auto start = std::chrono::steady_clock::now();
  const EncoderConfig& cfg = encoder.config();
  ImageEncoding out;
  out.plan = plan_tiles(image.width(), image.height(), max_tiles, cfg.image_side);
  for (const Image& tile : extract_tiles(image, out.plan)) {
    EncodeResult r = encoder.encode(tile);
    out.raw_visual_tokens += cfg.num_patches();
    out.final_visual_tokens += static_cast<int>(r.tokens.patch_count());
    out.flops += flops_estimate(r.traces, cfg);
    out.tiles.push_back(std::move(r));
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

double BenchReport::mean_raw_tokens() const {
  double s = 0;
  for (const auto& r : rows) s += r.raw_visual_tokens;
  return rows.empty() ? 0.0 : s / rows.size();
}

double BenchReport::mean_final_tokens() const {
  double s = 0;
  for (const auto& r : rows) s += r.final_visual_tokens;
  return rows.empty() ? 0.0 : s / rows.size();
}

double BenchReport::visual_token_ratio() const { return mean_raw_tokens() / mean_final_tokens(); }

double BenchReport::total_token_ratio() const {
  return (mean_raw_tokens() + text_tokens) / (mean_final_tokens() + text_tokens);
}

double BenchReport::flop_ratio() const {
  double base = 0, red = 0;
  for (const auto& r : rows) {
    base += static_cast<double>(r.flops_baseline);
    red += static_cast<double>(r.flops_reduced);
  }
  return base / red;
}

double BenchReport::wall_speedup() const {
  double base = 0, red = 0;
  for (const auto& r : rows) {
    base += r.wall_ms_baseline;
    red += r.wall_ms_reduced;
  }
  return base / red;
}

int default_workers() {
  if (const char* env = std::getenv("CHEMTOK_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BenchReport run_bench(const std::vector<BenchInput>& inputs, const EncoderConfig& cfg, int max_tiles,
                      int text_tokens, int workers) {
  if (inputs.empty()) throw UsageError("bench needs at least one image");
  EncoderConfig base_cfg = cfg;
  base_cfg.reduction.enabled = false;
  const Encoder baseline(base_cfg);
  const Encoder reduced(cfg);

  BenchReport report;
  report.text_tokens = text_tokens;
  report.rows.resize(inputs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        const ImageEncoding b = encode_image(inputs[i].image, baseline, max_tiles);
        const ImageEncoding r = encode_image(inputs[i].image, reduced, max_tiles);
        BenchRow& row = report.rows[i];
        row.name = inputs[i].name;
        row.tiles = r.plan.total_tiles();
        row.raw_visual_tokens = r.raw_visual_tokens;
        row.final_visual_tokens = r.final_visual_tokens;
        row.flops_baseline = b.flops;
        row.flops_reduced = r.flops;
        row.wall_ms_baseline = b.wall_ms;
        row.wall_ms_reduced = r.wall_ms;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::clamp(workers, 1, static_cast<int>(inputs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::sort(report.rows.begin(), report.rows.end(),
            [](const BenchRow& a, const BenchRow& b) { return a.name < b.name; });
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(6);
  os << std::fixed;
  os << "image,tiles,raw_visual_tokens,final_visual_tokens,flops_baseline,flops_reduced,wall_ms_baseline,"
        "wall_ms_reduced\n";
  double tiles = 0, fb = 0, fr = 0, wb = 0, wr = 0;
  for (const BenchRow& r : report.rows) {
    os << r.name << ',' << r.tiles << ',' << r.raw_visual_tokens << ',' << r.final_visual_tokens << ','
       << r.flops_baseline << ',' << r.flops_reduced << ',' << r.wall_ms_baseline << ',' << r.wall_ms_reduced
       << '\n';
    tiles += r.tiles;
    fb += static_cast<double>(r.flops_baseline);
    fr += static_cast<double>(r.flops_reduced);
    wb += r.wall_ms_baseline;
    wr += r.wall_ms_reduced;
  }
  const double n = static_cast<double>(report.rows.size());
  os << "mean," << tiles / n << ',' << report.mean_raw_tokens() << ',' << report.mean_final_tokens() << ','
     << fb / n << ',' << fr / n << ',' << wb / n << ',' << wr / n << '\n';
  return os.str();
}

}  // namespace chemtok
