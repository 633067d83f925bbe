#include "chemtok/reduction.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "chemtok/errors.hpp"
#include "chemtok/kernels.hpp"

namespace chemtok {

std::string_view to_string(ForceMode m) {
  switch (m) {
    case ForceMode::prune_only:
      return "prune_only";
    case ForceMode::merge_only:
      return "merge_only";
    case ForceMode::adaptive:
      break;
  }
  return "adaptive";
}

std::string_view to_string(ScheduleKind k) { return k == ScheduleKind::uniform ? "uniform" : "halving"; }

ForceMode parse_force_mode(std::string_view s) {
  if (s == "adaptive") return ForceMode::adaptive;
  if (s == "prune_only") return ForceMode::prune_only;
  if (s == "merge_only") return ForceMode::merge_only;
  throw ConfigError("unknown force_mode: " + std::string(s));
}

ScheduleKind parse_schedule_kind(std::string_view s) {
  if (s == "halving") return ScheduleKind::halving;
  if (s == "uniform") return ScheduleKind::uniform;
  throw ConfigError("unknown schedule: " + std::string(s));
}

std::vector<int> make_schedule(int initial, int target, int num_layers, ScheduleKind kind) {
  if (num_layers < 1) throw ScheduleError("schedule needs at least one layer");
  if (target < 1) throw ScheduleError("target_tokens must be >= 1");
  if (target > initial) {
    throw ScheduleError("target_tokens " + std::to_string(target) + " exceeds initial count " +
                        std::to_string(initial));
  }
  std::vector<int> keep(num_layers);
  if (kind == ScheduleKind::uniform) {
    const int total = initial - target;
    const int r = total / num_layers;
    const int extra = total % num_layers;
    int n = initial;
    for (int l = 0; l < num_layers; ++l) {
      n -= r + (l < extra ? 1 : 0);
      keep[l] = n;
    }
  } else {
    int n = initial;
    for (int l = 0; l < num_layers; ++l) {
      n -= std::min(n / 2, n - target);
      keep[l] = n;
    }
    keep.back() = target;
  }
  return keep;
}

void resolve_schedule(ReductionConfig& cfg, int initial_patches, int num_layers) {
  if (!(cfg.tau > 0.0)) throw ConfigError("tau must be > 0");
  if (!cfg.enabled) {
    cfg.schedule.assign(num_layers, initial_patches);
    return;
  }
  cfg.schedule = make_schedule(initial_patches, cfg.target_tokens, num_layers, cfg.schedule_kind);
}

double ScoreVector::variance() const { return population_variance(values); }

ScoreVector ats_score(const AttentionWorkspace& ws, const TokenSet& tokens) {
  if (!tokens.has_cls) throw ConfigError("token scoring requires a CLS token");
  if (ws.attn.empty()) throw ConfigError("empty attention workspace");
  const Eigen::Index n = tokens.patch_count();
  if (ws.attn.front().rows() != tokens.num_tokens()) {
    throw ShapeError("attention workspace does not match the token set");
  }
  Vector cls_row = Vector::Zero(n);
  for (const Matrix& a : ws.attn) cls_row += a.row(0).tail(n).transpose();
  cls_row /= static_cast<double>(ws.attn.size());
  const Vector value_norms = ws.mean_value_norms().tail(n);

  ScoreVector out;
  out.values = cls_row.cwiseProduct(value_norms);
  const double total = out.values.sum();
  if (total > 0.0) {
    out.values /= total;
  } else {
    out.values = Vector::Constant(n, n > 0 ? 1.0 / n : 0.0);
  }
  return out;
}

Policy choose_policy(const ScoreVector& scores, const ReductionConfig& cfg) {
  switch (cfg.force_mode) {
    case ForceMode::prune_only:
      return Policy::prune;
    case ForceMode::merge_only:
      return Policy::merge;
    case ForceMode::adaptive:
      break;
  }
  return scores.variance() <= cfg.tau ? Policy::prune : Policy::merge;
}

namespace {

TokenSet with_cls_of(const TokenSet& tokens, Eigen::Index patch_rows) {
  TokenSet out;
  out.has_cls = tokens.has_cls;
  out.original_patches = tokens.original_patches;
  out.discarded = tokens.discarded;
  const Eigen::Index rows = patch_rows + tokens.first_patch();
  out.features.resize(rows, tokens.features.cols());
  out.sizes.resize(rows);
  out.origins.reserve(rows);
  if (tokens.has_cls) {
    out.features.row(0) = tokens.features.row(0);
    out.sizes(0) = tokens.sizes(0);
    out.origins.push_back(tokens.origins[0]);
  }
  return out;
}

}  // namespace

TokenSet prune_topk(const TokenSet& tokens, const ScoreVector& scores, int keep) {
  const Eigen::Index n = tokens.patch_count();
  if (scores.values.size() != n) throw ShapeError("score vector does not match the token set");
  if (keep < 0 || keep > n) {
    throw ScheduleError("cannot keep " + std::to_string(keep) + " of " + std::to_string(n) + " tokens");
  }
  if (keep == 0 && !tokens.has_cls) throw ScheduleError("pruning would leave an empty token set");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores.values(a) > scores.values(b); });
  std::vector<char> kept(n, 0);
  for (int i = 0; i < keep; ++i) kept[order[i]] = 1;

  const Eigen::Index first = tokens.first_patch();
  TokenSet out = with_cls_of(tokens, keep);
  Eigen::Index row = first;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& origin = tokens.origins[first + i];
    if (kept[i]) {
      out.features.row(row) = tokens.features.row(first + i);
      out.sizes(row) = tokens.sizes(first + i);
      out.origins.push_back(origin);
      ++row;
    } else {
      out.discarded.insert(out.discarded.end(), origin.begin(), origin.end());
    }
  }
  std::sort(out.discarded.begin(), out.discarded.end());
  return out;
}

std::vector<MatchEdge> bipartite_edges(const TokenSet& tokens) {
  const Eigen::Index first = tokens.first_patch();
  const Eigen::Index n = tokens.patch_count();
  const Eigen::Index na = (n + 1) / 2;
  const Eigen::Index nb = n / 2;
  if (nb == 0) return {};
  Matrix a(na, tokens.features.cols());
  Matrix b(nb, tokens.features.cols());
  for (Eigen::Index i = 0; i < na; ++i) a.row(i) = tokens.features.row(first + 2 * i);
  for (Eigen::Index j = 0; j < nb; ++j) b.row(j) = tokens.features.row(first + 2 * j + 1);
  const Matrix sim = cosine_similarity(a, b);

  std::vector<MatchEdge> edges(na);
  for (Eigen::Index i = 0; i < na; ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < nb; ++j) {
      if (sim(i, j) > sim(i, best)) best = j;
    }
    edges[i] = {static_cast<int>(2 * i), static_cast<int>(2 * best + 1), sim(i, best)};
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const MatchEdge& x, const MatchEdge& y) { return x.similarity > y.similarity; });
  return edges;
}

TokenSet bsm_merge(const TokenSet& tokens, int merges) {
  const Eigen::Index n = tokens.patch_count();
  if (merges < 0 || merges > n / 2) {
    throw ScheduleError("cannot merge " + std::to_string(merges) + " pairs among " + std::to_string(n) +
                        " tokens");
  }
  if (merges == 0) return tokens;

  std::vector<MatchEdge> edges = bipartite_edges(tokens);
  edges.resize(merges);
  // Fold in ascending A order so the accumulation order is fixed.
  std::sort(edges.begin(), edges.end(), [](const MatchEdge& x, const MatchEdge& y) { return x.a < y.a; });

  const Eigen::Index first = tokens.first_patch();
  Matrix weighted = tokens.features.bottomRows(n).array().colwise() *
                    tokens.sizes.tail(n).cast<double>().array();
  SizeVector sizes = tokens.sizes.tail(n);
  std::vector<std::vector<int>> origins(tokens.origins.begin() + first, tokens.origins.end());
  std::vector<char> folded(n, 0);
  for (const MatchEdge& e : edges) {
    weighted.row(e.b) += weighted.row(e.a);
    sizes(e.b) += sizes(e.a);
    origins[e.b].insert(origins[e.b].end(), origins[e.a].begin(), origins[e.a].end());
    folded[e.a] = 1;
  }

  TokenSet out = with_cls_of(tokens, n - merges);
  Eigen::Index row = first;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (folded[i]) continue;
    // Untouched tokens keep their exact features.
    if (sizes(i) == tokens.sizes(first + i)) {
      out.features.row(row) = tokens.features.row(first + i);
    } else {
      out.features.row(row) = weighted.row(i) / static_cast<double>(sizes(i));
    }
    out.sizes(row) = sizes(i);
    std::sort(origins[i].begin(), origins[i].end());
    out.origins.push_back(std::move(origins[i]));
    ++row;
  }
  return out;
}

std::pair<TokenSet, LayerTrace> reduce_layer(const TokenSet& tokens, const AttentionWorkspace& ws, int layer,
                                             const ReductionConfig& cfg) {
  if (layer < 0 || layer >= static_cast<int>(cfg.schedule.size())) {
    throw ScheduleError("no schedule entry for layer " + std::to_string(layer));
  }
  const int n = static_cast<int>(tokens.patch_count());
  const int keep = std::min(cfg.schedule[layer], n);

  const ScoreVector scores = ats_score(ws, tokens);
  const Policy policy = choose_policy(scores, cfg);

  LayerTrace trace;
  trace.layer_index = layer;
  trace.tokens_in = n;
  trace.score_variance = scores.variance();

  if (keep == n) {
    trace.tokens_out = n;
    trace.policy_chosen = Policy::none;
    return {tokens, trace};
  }

  TokenSet out;
  if (policy == Policy::prune) {
    out = prune_topk(tokens, scores, keep);
  } else {
    out = tokens;
    while (out.patch_count() > keep) {
      const int cur = static_cast<int>(out.patch_count());
      out = bsm_merge(out, std::min(cur - keep, cur / 2));
    }
  }
  trace.tokens_out = static_cast<int>(out.patch_count());
  trace.policy_chosen = policy;
  return {std::move(out), trace};
}

}  // namespace chemtok
