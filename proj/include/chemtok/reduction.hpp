#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "chemtok/tokens.hpp"

namespace chemtok {

enum class ForceMode { adaptive, prune_only, merge_only };
enum class ScheduleKind { halving, uniform };

std::string_view to_string(ForceMode m);
std::string_view to_string(ScheduleKind k);
ForceMode parse_force_mode(std::string_view s);
ScheduleKind parse_schedule_kind(std::string_view s);

struct ReductionConfig {
  bool enabled = true;
  double tau = 1e-5;
  int target_tokens = 16;
  ScheduleKind schedule_kind = ScheduleKind::halving;
  ForceMode force_mode = ForceMode::adaptive;
  /// Patch tokens kept after each layer. Filled by `resolve_schedule`.
  std::vector<int> schedule;
};

/// Per-layer keep counts from `initial` patch tokens down to `target`.
///
/// halving: each layer removes min(floor(n/2), n - target), the most a
///   single bipartite matching pass can fold; if the target is not reached
///   by the last layer the last entry is clamped to it.
/// uniform: constant removal r = (initial - target) / layers, with the
///   remainder spread one-per-layer over the earliest layers.
std::vector<int> make_schedule(int initial, int target, int num_layers, ScheduleKind kind);

/// Validates `cfg` and fills `cfg.schedule` for the given geometry.
void resolve_schedule(ReductionConfig& cfg, int initial_patches, int num_layers);

/// Normalized importance of each patch token (CLS excluded).
struct ScoreVector {
  Vector values;
  double variance() const;
};

ScoreVector ats_score(const AttentionWorkspace& ws, const TokenSet& tokens);

/// Score variance <= tau selects pruning; otherwise merging. `force_mode` overrides.
Policy choose_policy(const ScoreVector& scores, const ReductionConfig& cfg);

/// Keeps the `keep` highest-scoring patch tokens (ties to the lower index)
/// plus CLS, in their original relative order.
TokenSet prune_topk(const TokenSet& tokens, const ScoreVector& scores, int keep);

/// One bipartite matching edge: A-side patch position -> B-side patch position.
struct MatchEdge {
  int a = 0;
  int b = 0;
  double similarity = 0.0;
};

/// Best B partner of every A-side token (A = even patch positions, B = odd),
/// sorted by similarity descending, ties by lower A position.
std::vector<MatchEdge> bipartite_edges(const TokenSet& tokens);

/// Folds the `merges` most similar A tokens into their B partners using
/// size-weighted feature averages. Surviving tokens keep their order.
TokenSet bsm_merge(const TokenSet& tokens, int merges);

/// Scores, picks a policy and reduces to `cfg.schedule[layer]` patch tokens.
std::pair<TokenSet, LayerTrace> reduce_layer(const TokenSet& tokens, const AttentionWorkspace& ws,
                                             int layer, const ReductionConfig& cfg);

}  // namespace chemtok
