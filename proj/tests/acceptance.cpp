// Runs the ten acceptance criteria and prints one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chemtok/depict.hpp"
#include "chemtok/encoder.hpp"
#include "chemtok/errors.hpp"
#include "chemtok/evalkit.hpp"
#include "chemtok/fingerprint.hpp"
#include "chemtok/pipeline.hpp"
#include "chemtok/reduction.hpp"
#include "chemtok/smiles.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace chemtok;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Image noise_image(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Image img(side, side, 3);
  for (auto& p : img.planes) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
  }
  return img;
}

std::vector<std::string> molecule_pool() {
  std::vector<std::string> pool = fixtures::kSmall;
  pool.insert(pool.end(), fixtures::kLarge.begin(), fixtures::kLarge.end());
  return pool;
}

TokenSet make_tokens(const Matrix& patches) {
  TokenSet t;
  const int n = static_cast<int>(patches.rows());
  t.has_cls = true;
  t.original_patches = n;
  t.features = Matrix::Zero(n + 1, patches.cols());
  t.features.bottomRows(n) = patches;
  t.sizes = SizeVector::Ones(n + 1);
  t.origins.resize(n + 1);
  for (int i = 0; i < n; ++i) t.origins[1 + i] = {i};
  return t;
}

// ---------------------------------------------------------------------------

void ac1(Outcome& o) {
  const Encoder encoder(EncoderConfig{});
  auto t0 = Clock::now();
  const ImageEncoding tile = encode_image(noise_image(448, 1), encoder, 12);
  const double tile_s = seconds_since(t0);
  o.check(tile.raw_visual_tokens == 256 && tile.final_visual_tokens == 16, "448 tile not 256 -> 16");

  t0 = Clock::now();
  const ImageEncoding big = encode_image(noise_image(800, 2), encoder, 12);
  const double big_s = seconds_since(t0);
  o.check(big.raw_visual_tokens == 1280, "800x800 raw != 1280");
  o.check(big.final_visual_tokens == 80, "800x800 final != 80");
  o.check(tile_s < 1.0 && big_s < 1.0, "runtime >= 1 s");
  o.detail << "448: " << tile.raw_visual_tokens << "->" << tile.final_visual_tokens << " ("
           << tile.raw_visual_tokens / tile.final_visual_tokens << "x, " << tile_s << " s); 800x800: "
           << big.raw_visual_tokens << "->" << big.final_visual_tokens << " (" << big_s << " s)";
}

void ac2(Outcome& o) {
  for (int side : {448, 896}) {
    for (int target : {16, 4}) {
      EncoderConfig cfg;
      cfg.image_side = side;
      cfg.reduction.target_tokens = target;
      const Encoder encoder(cfg);
      const int n0 = cfg.num_patches();
      const auto& s = encoder.schedule();
      bool valid = !s.empty() && s.back() == target;
      int prev = n0;
      for (int k : s) {
        valid = valid && k <= prev && k >= target;
        prev = k;
      }
      o.check(valid, "schedule N0=" + std::to_string(n0) + " target=" + std::to_string(target));
      const EncodeResult r = encoder.encode(noise_image(side, 7 + side + target));
      o.check(r.tokens.patch_count() == target,
              "final count N0=" + std::to_string(n0) + " target=" + std::to_string(target));
      for (const LayerTrace& tr : r.traces) {
        o.check(tr.tokens_out == s[tr.layer_index], "trace count off schedule");
      }
      o.detail << "N0=" << n0 << " target " << target << " -> " << r.tokens.patch_count() << "; ";
    }
  }
}

void ac3(Outcome& o) {
  const auto t0 = Clock::now();
  const auto pool = molecule_pool();
  std::vector<BenchInput> inputs;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t seed = 1000 + i;
    Depiction d;
    if (i % 5 == 4) {
      const std::string rxn = pool[i % pool.size()] + ">>" + pool[(3 * i + 1) % pool.size()];
      d = render_reaction(parse_reaction(rxn), random_style(seed), seed);
    } else {
      d = render(parse_smiles(pool[i % pool.size()]), random_style(seed), seed);
    }
    char name[16];
    std::snprintf(name, sizeof name, "img%03d", i);
    inputs.push_back({name, to_float(d.image)});
  }
  const BenchReport r = run_bench(inputs, EncoderConfig{}, 12, 30, default_workers());
  const double elapsed = seconds_since(t0);
  int cheaper = 0;
  for (const BenchRow& row : r.rows) cheaper += row.flops_reduced < row.flops_baseline;
  o.check(cheaper == 100, "reduced FLOPs not below baseline for every image");
  o.check(r.flop_ratio() >= 4.0, "FLOP ratio < 4");
  o.check(r.wall_speedup() >= 1.2, "wall speedup < 1.2");
  o.check(elapsed < 120.0, "runtime >= 2 min");
  o.detail << cheaper << "/100 cheaper, flop ratio " << r.flop_ratio() << ", wall speedup " << r.wall_speedup()
           << ", " << elapsed << " s";
}

void ac4(Outcome& o) {
  double worst = 0.0;
  int layers = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (bool prune : {false, true}) {
      EncoderConfig cfg;
      cfg.seed = seed;
      if (prune) {
        cfg.reduction.force_mode = ForceMode::prune_only;
      } else {
        cfg.reduction.enabled = false;
      }
      const Encoder encoder(cfg);
      const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.head_dim()));
      encoder.encode(noise_image(448, 50 + seed), [&](const LayerView& v) {
        o.check((v.before.sizes.array() == 1).all(), "sizes not all one");
        for (int h = 0; h < v.workspace.num_heads(); ++h) {
          Matrix logits = v.workspace.q[h] * v.workspace.k[h].transpose() * scale;
          Matrix plain = (logits.colwise() - logits.rowwise().maxCoeff()).array().exp().matrix();
          plain = plain.array().colwise() / plain.rowwise().sum().array();
          worst = std::max(worst, (plain - v.workspace.attn[h]).cwiseAbs().maxCoeff());
        }
        ++layers;
      });
    }
  }
  o.check(worst <= 1e-6, "attention differs from plain softmax");
  o.detail << layers << " layers over 20 seeds, max abs diff " << worst;
}

void ac5(Outcome& o) {
  int merge_layers = 0, prune_layers = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    EncoderConfig merge;
    merge.seed = i;
    merge.reduction.force_mode = ForceMode::merge_only;
    Encoder(merge).encode(noise_image(448, 200 + i), [&](const LayerView& v) {
      o.check(v.after.patch_size_sum() == 256 && v.after.total_size() == 257, "merge lost mass");
      o.check(v.trace.policy_chosen != Policy::prune, "merge_only pruned");
      ++merge_layers;
    });
    EncoderConfig prune = merge;
    prune.reduction.force_mode = ForceMode::prune_only;
    const Encoder pe(prune);
    pe.encode(noise_image(448, 200 + i), [&](const LayerView& v) {
      o.check(v.after.patch_count() == pe.schedule()[v.layer], "prune count off schedule");
      o.check(v.after.patch_count() + static_cast<Eigen::Index>(v.after.discarded.size()) == 256,
              "pruned patches not accounted");
      ++prune_layers;
    });
  }
  o.detail << merge_layers << " merge layers with sum s = 256, " << prune_layers << " prune layers on schedule";
}

void ac6(Outcome& o) {
  const Encoder encoder(EncoderConfig{});
  double max_var = 0.0;
  int blank_layers = 0;
  for (float level : {1.0f, 0.0f, 0.5f}) {
    encoder.encode(Image(448, 448, 3, level), [&](const LayerView& v) {
      if (v.trace.tokens_in == v.trace.tokens_out) return;
      max_var = std::max(max_var, v.trace.score_variance);
      o.check(v.trace.score_variance <= encoder.config().reduction.tau, "blank variance above tau");
      o.check(v.trace.policy_chosen == Policy::prune, "blank layer not pruned");
      ++blank_layers;
    });
  }

  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  int merges = 0;
  double min_var = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 8 + static_cast<int>(rng() % 57);
    const int d = 4 + static_cast<int>(rng() % 5);
    Eigen::RowVectorXd c0(d), c1(d);
    for (int j = 0; j < d; ++j) {
      c0(j) = g(rng);
      c1(j) = g(rng);
    }
    Matrix x(n, d);
    std::vector<int> cluster(n);
    for (int i = 0; i < n; ++i) {
      cluster[i] = static_cast<int>(rng() % 2);
      x.row(i) = (cluster[i] ? c1 : c0);
      for (int j = 0; j < d; ++j) x(i, j) += 0.01 * g(rng);
    }
    const TokenSet t = make_tokens(x);
    // CLS attends mostly to cluster 0.
    AttentionWorkspace ws;
    for (int h = 0; h < 2; ++h) {
      Matrix a = Matrix::Constant(n + 1, n + 1, 1.0 / (n + 1));
      double total = 0;
      for (int i = 0; i < n; ++i) total += (a(0, i + 1) = cluster[i] ? 1.0 : 10.0);
      a(0, 0) = 1.0;
      a.row(0) /= total + 1.0;
      Matrix v = Matrix::Ones(n + 1, 3);
      ws.attn.push_back(a);
      ws.v.push_back(v);
    }
    ReductionConfig cfg;
    cfg.target_tokens = std::max(1, n / 4);
    resolve_schedule(cfg, n, 2);
    const auto [out, trace] = reduce_layer(t, ws, 0, cfg);
    min_var = std::min(min_var, trace.score_variance);
    const bool ok = trace.score_variance > cfg.tau && trace.policy_chosen == Policy::merge &&
                    out.patch_size_sum() == n;
    merges += ok;
  }
  o.check(max_var <= 1e-5 && blank_layers > 0, "blank layers");
  o.check(merges == 100, "two-cluster trials not all merge");
  o.detail << blank_layers << " blank layers pruned (max var " << max_var << "); two-cluster merge " << merges
           << "/100 (min var " << min_var << ")";
}

void ac7(Outcome& o) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  int prune_bad = 0, merge_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const int keep = 1 + static_cast<int>(rng() % n);
    std::vector<double> sc(n);
    for (double& v : sc) v = static_cast<double>(rng() % 5) / 8.0;
    ScoreVector s;
    s.values = Eigen::Map<Vector>(sc.data(), n);
    const TokenSet pruned = prune_topk(make_tokens(Matrix::Random(n, 2)), s, keep);
    const auto expected = oracle::topk(sc, keep);
    bool ok = pruned.patch_count() == keep;
    for (int i = 0; ok && i < keep; ++i) ok = pruned.origins[1 + i] == std::vector<int>{expected[i]};
    prune_bad += !ok;

    const int m = 2 + static_cast<int>(rng() % 7);
    Matrix x(m, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    if (rng() % 2) x.row(m - 1) = x.row(0);
    TokenSet t = make_tokens(x);
    std::vector<int> sizes(m);
    for (int i = 0; i < m; ++i) t.sizes(1 + i) = sizes[i] = 1 + static_cast<int>(rng() % 3);
    const int merges = static_cast<int>(rng() % (m / 2 + 1));
    const TokenSet merged = bsm_merge(t, merges);
    const auto ref = oracle::bsm(x, sizes, merges);
    ok = merged.patch_count() == m - merges;
    for (int i = 0; ok && i < m - merges; ++i) {
      std::vector<int> members = merged.origins[1 + i];
      std::sort(members.begin(), members.end());
      ok = merged.sizes(1 + i) == ref.sizes[i] && members == ref.members[i] &&
           (merged.features.row(1 + i) - ref.features.row(i)).cwiseAbs().maxCoeff() < 1e-12;
    }
    merge_bad += !ok;
  }
  o.check(prune_bad == 0, "prune_topk disagrees with oracle");
  o.check(merge_bad == 0, "bsm_merge disagrees with oracle");
  o.detail << "1000 trials: prune mismatches " << prune_bad << ", merge mismatches " << merge_bad;
}

void ac8(Outcome& o) {
  std::mt19937_64 rng(8);
  long perms = 0, violations = 0;
  for (const auto& s : fixtures::kSmall) {
    const Molecule m = parse_smiles(s);
    if (m.num_atoms() > 7) continue;
    const std::string ref = canonical_smiles(m);
    std::vector<int> perm(m.num_atoms());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      violations += canonical_smiles(permute_atoms(m, perm)) != ref;
      ++perms;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  for (const auto& s : fixtures::kLarge) {
    const Molecule m = parse_smiles(s);
    const std::string ref = canonical_smiles_multi(m);
    std::vector<int> perm(m.num_atoms());
    std::iota(perm.begin(), perm.end(), 0);
    for (int t = 0; t < 100; ++t) {
      std::shuffle(perm.begin(), perm.end(), rng);
      violations += canonical_smiles_multi(permute_atoms(m, perm)) != ref;
      ++perms;
    }
  }
  o.check(violations == 0, "canonical form depends on atom order");

  const auto pool = molecule_pool();
  std::vector<Fingerprint> fps;
  for (const auto& s : pool) fps.push_back(fingerprint(parse_smiles(s)));
  int bad_pairs = 0, em_pairs = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t i = rng() % pool.size();
    const std::size_t j = rng() % pool.size();
    const double ab = tanimoto(fps[i], fps[j]);
    const bool ok = ab == tanimoto(fps[j], fps[i]) && ab >= 0.0 && ab <= 1.0 && tanimoto(fps[i], fps[i]) == 1.0 &&
                    (i != j || ab == 1.0);
    // A random renumbering of the prediction spelled canonically.
    const Molecule mi = parse_smiles(pool[i]);
    std::vector<int> perm(mi.num_atoms());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const SampleScore sc = score_molecule(canonical_smiles_multi(permute_atoms(mi, perm)), pool[j]);
    em_pairs += sc.em;
    bad_pairs += !ok || (sc.em && sc.sim != 1.0) || (i == j && !sc.em);
  }
  o.check(bad_pairs == 0, "Tanimoto or em property violated");
  o.detail << perms << " orderings, " << violations << " canonical violations; 10000 pairs, " << bad_pairs
           << " property violations (" << em_pairs << " exact matches)";
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "." : "") + v[i];
  return out;
}

void ac9(Outcome& o) {
  const double scores[3] = {1.0, 0.5, 0.8};
  const int counts[3] = {2, 1, 1};
  const double w = weighted_reaction_score(scores, counts);
  o.check(std::abs(w - 0.825) <= 1e-12, "weighted score != 0.825");

  std::mt19937_64 rng(9);
  const auto pool = molecule_pool();
  auto pick = [&](int lo, int hi) {
    std::vector<std::string> v(lo + rng() % (hi - lo + 1));
    for (auto& s : v) s = pool[rng() % pool.size()];
    return v;
  };
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::string> gold[3] = {pick(1, 4), pick(0, 3), pick(1, 4)};
    std::vector<std::string> pred[3];
    for (int c = 0; c < 3; ++c) {
      pred[c] = gold[c];
      for (auto& s : pred[c]) {
        if (rng() % 3 == 0) s = pool[rng() % pool.size()];
      }
      if (rng() % 4 == 0) pred[c].push_back(pool[rng() % pool.size()]);
    }
    auto text = [&](std::vector<std::string>(&r)[3]) { return join(r[0]) + ">" + join(r[1]) + ">" + join(r[2]); };
    const std::string g0 = text(gold), p0 = text(pred);
    const SampleScore ref = score_reaction_recognition(p0, g0);
    for (int c = 0; c < 3; ++c) {
      std::shuffle(gold[c].begin(), gold[c].end(), rng);
      std::shuffle(pred[c].begin(), pred[c].end(), rng);
    }
    const SampleScore shuffled = score_reaction_recognition(text(pred), text(gold));
    worst = std::max(worst, std::abs(shuffled.sim - ref.sim));
    bad += std::abs(shuffled.sim - ref.sim) > 1e-12 || shuffled.em != ref.em;
  }
  o.check(bad == 0, "reaction score depends on within-component order");

  std::vector<EvalSample> samples;
  for (int i = 0; i < 200; ++i) {
    const std::string gold = pool[rng() % pool.size()];
    const std::string pred = rng() % 5 == 0 ? "C((" : rng() % 2 ? gold : pool[rng() % pool.size()];
    samples.push_back({"s" + std::to_string(i), pred, gold, EvalTask::mol_recognition});
  }
  const std::string ref = report_json(run_eval(samples));
  int differing = 0;
  for (int t = 0; t < 20; ++t) {
    std::shuffle(samples.begin(), samples.end(), rng);
    differing += report_json(run_eval(samples)) != ref;
  }
  o.check(differing == 0, "run_eval output depends on sample order");
  o.detail << "weighted " << w << "; 1000 permuted records, " << bad << " violations (max diff " << worst
           << "); 20 shuffles, " << differing << " differing reports";
}

void ac10(Outcome& o) {
  const Encoder encoder(EncoderConfig{});
  const EncoderConfig& cfg = encoder.config();
  const int p = cfg.patch_side;
  const int g = cfg.grid_side();
  const auto pool = molecule_pool();
  int checked = 0, bg_total = 0, feature_bad = 0, order_bad = 0, merge_bad = 0;
  for (int i = 0; i < 50; ++i) {
    const DepictStyle style = random_style(500 + i);
    const Depiction d = render(parse_smiles(pool[(7 * i) % pool.size()]), style, 500 + i);
    const TokenSet t = encoder.patch_embed(to_float(d.image));

    std::vector<char> background(g * g, 1);
    for (int y = 0; y < d.height(); ++y) {
      for (int x = 0; x < d.width(); ++x) {
        if (d.mask[static_cast<std::size_t>(y) * d.width() + x]) background[(y / p) * g + x / p] = 0;
      }
    }
    int first_bg = -1;
    for (int k = 0; k < g * g; ++k) {
      if (!background[k]) continue;
      ++bg_total;
      if (first_bg < 0) first_bg = k;
      feature_bad += t.features.row(t.first_patch() + k) != t.features.row(t.first_patch() + first_bg);
    }

    // Identical-feature edges come before every distinct edge.
    const auto edges = bipartite_edges(t);
    auto same = [&](const MatchEdge& e) {
      return t.features.row(t.first_patch() + e.a) == t.features.row(t.first_patch() + e.b);
    };
    bool seen_distinct = false;
    int identical = 0;
    for (const MatchEdge& e : edges) {
      if (same(e)) {
        order_bad += seen_distinct;
        ++identical;
      } else {
        seen_distinct = true;
      }
    }
    const TokenSet merged = bsm_merge(t, identical);
    for (Eigen::Index r = merged.first_patch(); r < merged.num_tokens(); ++r) {
      const auto& members = merged.origins[r];
      for (int m : members) merge_bad += t.features.row(t.first_patch() + m) != t.features.row(t.first_patch() + members[0]);
    }
    ++checked;
  }
  o.check(feature_bad == 0, "background patches differ");
  o.check(order_bad == 0, "distinct edge ranked before identical edge");
  o.check(merge_bad == 0, "merge folded distinct features");
  o.detail << checked << " depictions, " << bg_total << " background patches, " << feature_bad
           << " differing; " << order_bad << " ordering violations; " << merge_bad << " mixed merges";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"AC1 token ratio 256->16 and 1280->80", ac1},
      {"AC2 targets 16 and 4, N0 256 and 1024", ac2},
      {"AC3 efficiency on 100-image batch", ac3},
      {"AC4 unit sizes equal plain attention", ac4},
      {"AC5 merge conserves sizes, prune follows schedule", ac5},
      {"AC6 policy boundary", ac6},
      {"AC7 prune and merge match oracles", ac7},
      {"AC8 canonical invariance and Tanimoto properties", ac8},
      {"AC9 reaction scoring", ac9},
      {"AC10 depiction background tokens merge first", ac10},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
