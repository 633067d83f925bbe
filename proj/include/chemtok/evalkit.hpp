#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace chemtok {

enum class EvalTask { mol_recognition, rxn_recognition, rxn_prediction };

std::string_view to_string(EvalTask t);
/// Accepts the CLI names (mol, rxn-rec, rxn-pred) and the enum names.
EvalTask parse_task(std::string_view s);

struct EvalSample {
  std::string id;
  std::string prediction;
  std::string ground_truth;
  EvalTask task = EvalTask::mol_recognition;
};

struct SampleScore {
  double sim = 0.0;
  bool em = false;
  std::optional<std::string> error;

  bool tani1() const { return sim == 1.0; }
};

/// Tanimoto and canonical exact match between two molecule strings. A
/// '.'-separated string is fingerprinted as one combined graph. A failed
/// prediction scores 0; a failed gold throws DatasetError.
SampleScore score_molecule(std::string_view pred, std::string_view gold);

/// Product comparison for reaction prediction. Multi-molecule products are
/// compared through the union of their molecules' fingerprint bits.
SampleScore score_reaction_prediction(std::string_view pred, std::string_view gold);

/// Maximum-total-weight assignment of rows to columns (each used at most
/// once). Returns, per row, the assigned column or -1. Exhaustive when
/// both sides have at most 6 entries, Hungarian otherwise.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight);

/// Per-component alignment score: assignment-matched similarities summed
/// and divided by the gold molecule count.
double component_score(const std::vector<std::string>& pred, const std::vector<std::string>& gold);

/// Weighted mean of component scores by gold molecule counts.
double weighted_reaction_score(const double (&scores)[3], const int (&gold_counts)[3]);

SampleScore score_reaction_recognition(std::string_view pred, std::string_view gold);

struct PerSample {
  std::string id;
  double sim = 0.0;
  bool em = false;
  std::optional<std::string> error;
};

struct MetricsReport {
  EvalTask task = EvalTask::mol_recognition;
  double avg_sim = 0.0;
  double tani_at_1 = 0.0;
  double exact_match = 0.0;
  double parse_failure_rate = 0.0;
  std::vector<PerSample> per_sample;  // sorted by id
};

/// Scores every sample and aggregates. Samples are processed in id order,
/// so the report does not depend on input order.
MetricsReport run_eval(std::vector<EvalSample> samples);

/// Joins prediction and gold JSON-lines files by id. Each line is an object
/// with "id" and "prediction" (pred file) or "ground_truth" (gold file).
std::vector<EvalSample> load_samples(std::istream& pred, std::istream& gold, EvalTask task);

std::string report_json(const MetricsReport& r);
std::string report_summary(const MetricsReport& r);

}  // namespace chemtok
