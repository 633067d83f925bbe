#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "chemtok/config_file.hpp"
#include "chemtok/depict.hpp"
#include "chemtok/descriptors.hpp"
#include "chemtok/errors.hpp"
#include "chemtok/evalkit.hpp"
#include "chemtok/fingerprint.hpp"
#include "chemtok/pipeline.hpp"
#include "chemtok/smiles.hpp"

namespace fs = std::filesystem;
using namespace chemtok;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  int max_tiles = 12;
  std::string report;
};

struct ReductionFlags {
  bool no_reduction = false;
  std::optional<int> target;
  std::optional<std::string> force_mode;
  std::optional<std::string> schedule;
  std::optional<double> tau;
};

EncoderConfig build_config(const Globals& g, const ReductionFlags& r) {
  EncoderConfig cfg = g.config.empty() ? EncoderConfig{} : load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (r.no_reduction) cfg.reduction.enabled = false;
  if (r.target) cfg.reduction.target_tokens = *r.target;
  if (r.force_mode) cfg.reduction.force_mode = parse_force_mode(*r.force_mode);
  if (r.schedule) cfg.reduction.schedule_kind = parse_schedule_kind(*r.schedule);
  if (r.tau) cfg.reduction.tau = *r.tau;
  return cfg;
}

void add_reduction_flags(CLI::App* cmd, ReductionFlags& r) {
  cmd->add_flag("--no-reduction", r.no_reduction, "Disable token reduction");
  cmd->add_option("--target", r.target, "Visual tokens kept per tile");
  cmd->add_option("--force-mode", r.force_mode, "adaptive, prune_only or merge_only");
  cmd->add_option("--schedule", r.schedule, "halving or uniform");
  cmd->add_option("--tau", r.tau, "Variance threshold for pruning");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.imbue(std::locale::classic());
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  return in;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

int cmd_encode(const Globals& g, const ReductionFlags& r, const std::string& path) {
  const EncoderConfig cfg = build_config(g, r);
  const Encoder encoder(cfg);
  const Image image = to_float(read_image(path));
  const ImageEncoding enc = encode_image(image, encoder, g.max_tiles);

  std::cout << "image " << image.width() << "x" << image.height() << "\n";
  std::cout << "tiles " << enc.plan.grid_rows << "x" << enc.plan.grid_cols
            << (enc.plan.include_thumbnail ? " + thumbnail" : "") << " = " << enc.plan.total_tiles() << "\n";
  std::cout << "raw_visual_tokens " << enc.raw_visual_tokens << "\n";
  std::ostringstream traces;
  for (std::size_t t = 0; t < enc.tiles.size(); ++t) {
    std::cout << "tile " << t << "\n";
    for (const LayerTrace& tr : enc.tiles[t].traces) {
      std::cout << "  layer " << tr.layer_index << ": " << tr.tokens_in << " -> " << tr.tokens_out
                << " policy=" << to_string(tr.policy_chosen) << "\n";
      traces << "tile=" << t << ' ' << format_trace(tr) << '\n';
    }
  }
  std::cout << "final_visual_tokens " << enc.final_visual_tokens << "\n";
  std::cout << "flops " << enc.flops << "\n";
  if (!g.report.empty()) open_out(g.report) << traces.str();
  return 0;
}

int cmd_bench(const Globals& g, const ReductionFlags& r, const std::string& dir, int text_tokens) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
  }
  if (files.empty()) throw UsageError("no images in " + dir);
  std::sort(files.begin(), files.end());
  std::vector<BenchInput> inputs;
  for (const auto& f : files) inputs.push_back({f.filename().string(), to_float(read_image(f))});

  const BenchReport report = run_bench(inputs, build_config(g, r), g.max_tiles, text_tokens, default_workers());
  std::cout << std::fixed << std::setprecision(2);
  std::cout << "images " << report.rows.size() << "\n"
            << "avg_raw_visual_tokens " << report.mean_raw_tokens() << "\n"
            << "avg_final_visual_tokens " << report.mean_final_tokens() << "\n"
            << "avg_total_tokens_baseline " << report.mean_raw_tokens() + text_tokens << "\n"
            << "avg_total_tokens_reduced " << report.mean_final_tokens() + text_tokens << "\n"
            << "visual_token_ratio " << report.visual_token_ratio() << "\n"
            << "total_token_ratio " << report.total_token_ratio() << "\n"
            << "flop_ratio " << report.flop_ratio() << "\n"
            << "wall_speedup " << report.wall_speedup() << "\n";
  if (!g.report.empty()) open_out(g.report) << bench_csv(report);
  return 0;
}

int cmd_eval(const Globals& g, const std::string& task, const std::string& pred, const std::string& gold) {
  auto pin = open_in(pred);
  auto gin = open_in(gold);
  const MetricsReport report = run_eval(load_samples(pin, gin, parse_task(task)));
  std::cout << report_summary(report);
  if (!g.report.empty()) open_out(g.report) << report_json(report) << '\n';
  for (const PerSample& s : report.per_sample) {
    if (s.error) std::cerr << "warning: " << s.id << ": " << *s.error << "\n";
  }
  return 0;
}

struct Reported {};

/// Runs `f(text)`; a ParseError is printed with a caret under the offset.
template <class F>
auto with_caret(const std::string& text, F f) {
  try {
    return f(text);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n  " << text << "\n  " << std::string(e.offset(), ' ') << "^\n";
    throw Reported{};
  }
}

int cmd_render(const std::string& input, std::uint64_t seed, const std::string& out, bool plain) {
  const DepictStyle style = plain ? DepictStyle{} : random_style(seed);
  const Depiction d = input.find('>') != std::string::npos ? render_reaction(with_caret(input, parse_reaction), style, seed)
                                                           : render(with_caret(input, parse_smiles), style, seed);
  const fs::path path(out);
  write_image(d.image, path);
  fs::path mask_path = path;
  mask_path.replace_extension(".mask" + (path.extension() == ".ppm" ? std::string(".pgm") : std::string(".png")));
  std::vector<std::uint8_t> gray(d.mask.size());
  std::transform(d.mask.begin(), d.mask.end(), gray.begin(), [](std::uint8_t m) { return m ? 255 : 0; });
  write_gray(gray, d.width(), d.height(), mask_path);
  std::cout << out << " " << d.width() << "x" << d.height() << "\n" << mask_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual token reduction engine and chemistry evaluation tools", "chemtok"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  ReductionFlags rflags;
  app.add_option("--config", g.config, "Encoder config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Weight / rendering seed");
  app.add_option("--max-tiles", g.max_tiles, "Maximum grid tiles per image")->check(CLI::Range(1, 64));
  app.add_option("--report", g.report, "Machine-readable report path");

  std::string path, input, input2, task, pred_file, gold_file, out;
  int text_tokens = 30;
  bool plain = false;

  auto* encode = app.add_subcommand("encode", "Tile and encode one image");
  encode->add_option("image", path)->required();
  add_reduction_flags(encode, rflags);

  auto* bench = app.add_subcommand("bench", "Baseline vs reduced encoding over a directory of images");
  bench->add_option("dir", path)->required();
  bench->add_option("--text-tokens", text_tokens, "Text tokens added to every input")->check(CLI::NonNegativeNumber);
  add_reduction_flags(bench, rflags);

  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--task", task)->required()->check(CLI::IsMember({"mol", "rxn-rec", "rxn-pred"}));
  eval->add_option("--pred", pred_file)->required();
  eval->add_option("--gold", gold_file)->required();

  auto* canon = app.add_subcommand("canon", "Canonical SMILES");
  canon->add_option("smiles", input)->required();
  bool show_desc = false;
  canon->add_flag("--descriptors", show_desc, "Also print MW, HBD, HBA and rotatable bonds");

  auto* rxn = app.add_subcommand("rxn-parse", "Parse and canonicalize a reaction");
  rxn->add_option("reaction", input)->required();

  auto* fp = app.add_subcommand("fp", "Path fingerprint as hex");
  fp->add_option("smiles", input)->required();

  auto* sim = app.add_subcommand("sim", "Tanimoto similarity of two molecules");
  sim->add_option("a", input)->required();
  sim->add_option("b", input2)->required();

  auto* rend = app.add_subcommand("render", "Draw a molecule or reaction");
  rend->add_option("smiles", input)->required();
  rend->add_option("--out", out)->required();
  rend->add_flag("--plain-style", plain, "Black on white with fixed stroke width instead of a seeded style");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*encode) return cmd_encode(g, rflags, path);
    if (*bench) return cmd_bench(g, rflags, path, text_tokens);
    if (*eval) return cmd_eval(g, task, pred_file, gold_file);
    if (*rend) return cmd_render(input, g.seed.value_or(0), out, plain);
    if (*canon) {
      const Molecule m = with_caret(input, parse_smiles);
      std::cout << canonical_smiles_multi(m) << "\n";
      if (show_desc) {
        const Descriptors d = descriptors(m);
        std::cout << std::fixed << std::setprecision(3) << "mw " << d.molecular_weight << "\nhbd "
                  << d.hbond_donors << "\nhba " << d.hbond_acceptors << "\nrb " << d.rotatable_bonds << "\n";
      }
    } else if (*rxn) {
      std::cout << format_reaction(with_caret(input, parse_reaction)) << "\n";
    } else if (*fp) {
      std::cout << fingerprint(with_caret(input, parse_smiles)).to_hex() << "\n";
    } else if (*sim) {
      const Molecule a = with_caret(input, parse_smiles);
      const Molecule b = with_caret(input2, parse_smiles);
      std::cout << std::fixed << std::setprecision(4) << tanimoto(fingerprint(a), fingerprint(b)) << "\n";
    }
    return 0;
  } catch (const Reported&) {
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
