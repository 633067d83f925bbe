#include "chemtok/evalkit.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chemtok/errors.hpp"
#include "chemtok/fingerprint.hpp"
#include "chemtok/smiles.hpp"

namespace chemtok {

std::string_view to_string(EvalTask t) {
  switch (t) {
    case EvalTask::rxn_recognition:
      return "rxn_recognition";
    case EvalTask::rxn_prediction:
      return "rxn_prediction";
    case EvalTask::mol_recognition:
      break;
  }
  return "mol_recognition";
}

EvalTask parse_task(std::string_view s) {
  if (s == "mol" || s == "mol_recognition") return EvalTask::mol_recognition;
  if (s == "rxn-rec" || s == "rxn_recognition") return EvalTask::rxn_recognition;
  if (s == "rxn-pred" || s == "rxn_prediction") return EvalTask::rxn_prediction;
  throw UsageError("unknown task: " + std::string(s));
}

namespace {

/// A '.'-separated molecule list with its combined fingerprint and the
/// sorted canonical strings of its molecules.
struct MoleculeList {
  std::vector<Fingerprint> fps;
  std::vector<std::string> canon;
  Fingerprint combined;
};

MoleculeList load_list(std::string_view text) {
  MoleculeList out;
  const auto parts = split_molecules(text);
  if (parts.empty()) throw ParseError(0, "empty molecule string");
  for (const std::string& p : parts) {
    const Molecule m = parse_smiles(p);
    out.fps.push_back(fingerprint(m));
    out.combined |= out.fps.back();
    out.canon.push_back(canonical_smiles_multi(m));
  }
  std::sort(out.canon.begin(), out.canon.end());
  return out;
}

SampleScore score_lists(std::string_view pred, std::string_view gold) {
  MoleculeList g;
  try {
    g = load_list(gold);
  } catch (const Error& e) {
    throw DatasetError(std::string("ground truth does not parse: ") + e.what());
  }
  SampleScore s;
  try {
    const MoleculeList p = load_list(pred);
    s.sim = tanimoto(p.combined, g.combined);
    s.em = p.canon == g.canon;
  } catch (const Error& e) {
    s.error = e.what();
  }
  return s;
}

double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

double component_score_fps(const std::vector<Fingerprint>& pred, const std::vector<Fingerprint>& gold) {
  if (gold.empty()) return 0.0;
  if (pred.empty()) return 0.0;
  Eigen::MatrixXd w(gold.size(), pred.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (std::size_t j = 0; j < pred.size(); ++j) w(i, j) = tanimoto(gold[i], pred[j]);
  }
  const auto assign = max_weight_assignment(w);
  std::vector<double> matched;
  for (std::size_t i = 0; i < assign.size(); ++i) {
    if (assign[i] >= 0) matched.push_back(w(i, assign[i]));
  }
  return sorted_sum(std::move(matched)) / static_cast<double>(gold.size());
}

std::vector<int> exhaustive_assignment(const Eigen::MatrixXd& w) {
  const int rows = static_cast<int>(w.rows());
  const int cols = static_cast<int>(w.cols());
  std::vector<int> cur(rows, -1);
  std::vector<int> best(rows, -1);
  double best_total = -1.0;
  std::vector<char> used(cols, 0);
  std::function<void(int, double)> rec = [&](int r, double total) {
    if (r == rows) {
      if (total > best_total) {
        best_total = total;
        best = cur;
      }
      return;
    }
    for (int c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      cur[r] = c;
      rec(r + 1, total + w(r, c));
      used[c] = 0;
    }
    cur[r] = -1;
    rec(r + 1, total);
  };
  rec(0, 0.0);
  return best;
}

// Hungarian algorithm (potentials form) on the square padding of -w.
std::vector<int> hungarian_assignment(const Eigen::MatrixXd& w) {
  const int rows = static_cast<int>(w.rows());
  const int cols = static_cast<int>(w.cols());
  const int n = std::max(rows, cols);
  const double inf = std::numeric_limits<double>::infinity();
  auto cost = [&](int i, int j) { return (i < rows && j < cols) ? -w(i, j) : 0.0; };
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> done(n + 1, 0);
    do {
      done[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (done[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (done[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = p[j] - 1;
    if (i >= 0 && i < rows && j - 1 < cols) out[i] = j - 1;
  }
  return out;
}

}  // namespace

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight) {
  if (weight.rows() == 0) return {};
  if (weight.cols() == 0) return std::vector<int>(weight.rows(), -1);
  if (weight.rows() <= 6 && weight.cols() <= 6) return exhaustive_assignment(weight);
  return hungarian_assignment(weight);
}

SampleScore score_molecule(std::string_view pred, std::string_view gold) { return score_lists(pred, gold); }

SampleScore score_reaction_prediction(std::string_view pred, std::string_view gold) {
  return score_lists(pred, gold);
}

double component_score(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  std::vector<Fingerprint> p, g;
  for (const auto& s : pred) p.push_back(fingerprint(parse_smiles(s)));
  for (const auto& s : gold) g.push_back(fingerprint(parse_smiles(s)));
  return component_score_fps(p, g);
}

double weighted_reaction_score(const double (&scores)[3], const int (&gold_counts)[3]) {
  double num = 0.0;
  int den = 0;
  for (int c = 0; c < 3; ++c) {
    num += gold_counts[c] * scores[c];
    den += gold_counts[c];
  }
  return den == 0 ? 0.0 : num / den;
}

namespace {

struct ParsedReaction {
  std::vector<Fingerprint> fps[3];
  std::vector<std::string> canon[3];
};

ParsedReaction load_reaction(std::string_view text) {
  const ReactionRecord rxn = parse_reaction(text);
  ParsedReaction out;
  const std::vector<Molecule>* comps[] = {&rxn.reactants, &rxn.agents, &rxn.products};
  for (int c = 0; c < 3; ++c) {
    for (const Molecule& m : *comps[c]) {
      out.fps[c].push_back(fingerprint(m));
      out.canon[c].push_back(canonical_smiles_multi(m));
    }
    std::sort(out.canon[c].begin(), out.canon[c].end());
  }
  return out;
}

}  // namespace

SampleScore score_reaction_recognition(std::string_view pred, std::string_view gold) {
  ParsedReaction g;
  try {
    g = load_reaction(gold);
  } catch (const Error& e) {
    throw DatasetError(std::string("ground-truth reaction does not parse: ") + e.what());
  }
  if (g.fps[2].empty()) throw DatasetError("ground-truth reaction has no products");

  SampleScore s;
  ParsedReaction p;
  try {
    p = load_reaction(pred);
  } catch (const Error& e) {
    s.error = e.what();
    return s;
  }
  double scores[3];
  int counts[3];
  bool em = true;
  for (int c = 0; c < 3; ++c) {
    scores[c] = component_score_fps(p.fps[c], g.fps[c]);
    counts[c] = static_cast<int>(g.fps[c].size());
    em = em && p.canon[c] == g.canon[c];
  }
  s.sim = weighted_reaction_score(scores, counts);
  s.em = em;
  return s;
}

MetricsReport run_eval(std::vector<EvalSample> samples) {
  if (samples.empty()) throw UsageError("no samples to evaluate");
  const EvalTask task = samples.front().task;
  for (const EvalSample& s : samples) {
    if (s.task != task) throw UsageError("samples mix tasks; evaluate one task per run");
  }
  std::sort(samples.begin(), samples.end(), [](const EvalSample& a, const EvalSample& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].id == samples[i - 1].id) throw UsageError("duplicate sample id: " + samples[i].id);
  }

  MetricsReport r;
  r.task = task;
  double sim_total = 0.0;
  int tani = 0;
  int em = 0;
  int failures = 0;
  for (const EvalSample& s : samples) {
    SampleScore score;
    try {
      switch (task) {
        case EvalTask::mol_recognition:
          score = score_molecule(s.prediction, s.ground_truth);
          break;
        case EvalTask::rxn_prediction:
          score = score_reaction_prediction(s.prediction, s.ground_truth);
          break;
        case EvalTask::rxn_recognition:
          score = score_reaction_recognition(s.prediction, s.ground_truth);
          break;
      }
    } catch (const DatasetError& e) {
      throw DatasetError("sample " + s.id + ": " + e.what());
    }
    sim_total += score.sim;
    tani += score.tani1() ? 1 : 0;
    em += score.em ? 1 : 0;
    failures += score.error ? 1 : 0;
    r.per_sample.push_back({s.id, score.sim, score.em, score.error});
  }
  const double n = static_cast<double>(samples.size());
  r.avg_sim = sim_total / n;
  r.tani_at_1 = tani / n;
  r.exact_match = em / n;
  r.parse_failure_rate = failures / n;
  return r;
}

std::vector<EvalSample> load_samples(std::istream& pred, std::istream& gold, EvalTask task) {
  auto read = [](std::istream& in, const char* field, const char* what) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
      }
      if (!j.is_object() || !j.contains("id") || !j.contains(field) || !j["id"].is_string() ||
          !j[field].is_string()) {
        throw FormatError(std::string(what) + " line " + std::to_string(lineno) + ": expected string fields id and " +
                          field);
      }
      const std::string id = j["id"];
      if (!out.emplace(id, j[field].get<std::string>()).second) {
        throw UsageError("duplicate sample id: " + id);
      }
    }
    return out;
  };
  const auto preds = read(pred, "prediction", "prediction file");
  const auto golds = read(gold, "ground_truth", "gold file");
  for (const auto& [id, _] : preds) {
    if (!golds.count(id)) throw UsageError("prediction for unknown sample id: " + id);
  }
  std::vector<EvalSample> out;
  for (const auto& [id, truth] : golds) {
    const auto it = preds.find(id);
    out.push_back({id, it == preds.end() ? std::string() : it->second, truth, task});
  }
  return out;
}

std::string report_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(r.task));
  j["samples"] = r.per_sample.size();
  j["avg_sim"] = r.avg_sim;
  j["tani_at_1"] = r.tani_at_1;
  j["exact_match"] = r.exact_match;
  j["parse_failure_rate"] = r.parse_failure_rate;
  auto& rows = j["per_sample"] = nlohmann::ordered_json::array();
  for (const PerSample& s : r.per_sample) {
    nlohmann::ordered_json row;
    row["id"] = s.id;
    row["sim"] = s.sim;
    row["em"] = s.em;
    if (s.error) row["error"] = *s.error;
    rows.push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string report_summary(const MetricsReport& r) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "task                " << to_string(r.task) << "\n"
     << "samples             " << r.per_sample.size() << "\n"
     << "avg_sim             " << r.avg_sim << "\n"
     << "tani_at_1           " << r.tani_at_1 << "\n"
     << "exact_match         " << r.exact_match << "\n"
     << "parse_failure_rate  " << r.parse_failure_rate << "\n";
  return os.str();
}

}  // namespace chemtok
