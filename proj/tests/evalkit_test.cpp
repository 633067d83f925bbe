#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "chemtok/errors.hpp"
#include "chemtok/evalkit.hpp"
#include "chemtok/fingerprint.hpp"
#include "chemtok/smiles.hpp"
#include "oracles.hpp"

using namespace chemtok;

namespace {

double sim(const std::string& a, const std::string& b) {
  return tanimoto(fingerprint(parse_smiles(a)), fingerprint(parse_smiles(b)));
}

double brute_assignment_value(const Eigen::MatrixXd& w) {
  const int rows = static_cast<int>(w.rows());
  const int cols = static_cast<int>(w.cols());
  std::vector<int> perm(std::max(rows, cols));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0;
  do {
    double v = 0;
    for (int r = 0; r < rows; ++r) {
      if (perm[r] < cols) v += w(r, perm[r]);
    }
    best = std::max(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

EvalSample sample(std::string id, std::string pred, std::string gold, EvalTask task = EvalTask::mol_recognition) {
  return {std::move(id), std::move(pred), std::move(gold), task};
}

}  // namespace

TEST(ScoreMolecule, IdenticalAndFailed) {
  const SampleScore same = score_molecule("CCO", "OCC");
  EXPECT_EQ(same.sim, 1.0);
  EXPECT_TRUE(same.em);
  EXPECT_TRUE(same.tani1());
  EXPECT_FALSE(same.error);

  const SampleScore bad = score_molecule("C((", "CCO");
  EXPECT_EQ(bad.sim, 0.0);
  EXPECT_FALSE(bad.em);
  EXPECT_TRUE(bad.error);

  EXPECT_THROW(score_molecule("CCO", "C(("), DatasetError);
}

TEST(ScoreMolecule, AgreesWithFingerprintOracle) {
  const SampleScore s = score_molecule("CCN", "CCO");
  EXPECT_DOUBLE_EQ(s.sim, sim("CCN", "CCO"));
  EXPECT_FALSE(s.em);
  EXPECT_GT(s.sim, 0.0);
  EXPECT_LT(s.sim, 1.0);
}

TEST(ScoreReactionPrediction, UnionFingerprint) {
  EXPECT_EQ(score_reaction_prediction("CCOC(C)=O.O", "O.CCOC(C)=O").sim, 1.0);
  const SampleScore empty = score_reaction_prediction("", "CCO");
  EXPECT_EQ(empty.sim, 0.0);
  EXPECT_TRUE(empty.error);

  Fingerprint gold = fingerprint(parse_smiles("CCOC(C)=O"));
  gold |= fingerprint(parse_smiles("N"));
  const double expected = tanimoto(fingerprint(parse_smiles("CCOC(C)=O")), gold);
  const SampleScore partial = score_reaction_prediction("CCOC(C)=O", "CCOC(C)=O.N");
  EXPECT_DOUBLE_EQ(partial.sim, expected);
  EXPECT_GT(partial.sim, 0.0);
  EXPECT_LT(partial.sim, 1.0);
}

TEST(Assignment, MatchesPermutationSearch) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 8);
    const int cols = 1 + static_cast<int>(rng() % 8);
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
    const auto a = max_weight_assignment(w);
    ASSERT_EQ(static_cast<int>(a.size()), rows);
    std::vector<int> used;
    double v = 0;
    for (int r = 0; r < rows; ++r) {
      if (a[r] < 0) continue;
      used.push_back(a[r]);
      v += w(r, a[r]);
    }
    std::sort(used.begin(), used.end());
    EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());
    EXPECT_NEAR(v, brute_assignment_value(w), 1e-12) << rows << "x" << cols;
  }
}

TEST(ComponentScore, UnmatchedGoldCountsZero) {
  EXPECT_DOUBLE_EQ(component_score({"CCO"}, {"CCO", "O"}), 0.5);
  EXPECT_DOUBLE_EQ(component_score({"O", "CCO"}, {"CCO", "O"}), 1.0);
  EXPECT_DOUBLE_EQ(component_score({}, {"CCO"}), 0.0);
  EXPECT_DOUBLE_EQ(component_score({"CCN"}, {"CCO"}), sim("CCN", "CCO"));
}

TEST(WeightedScore, HandExample) {
  const double scores[3] = {1.0, 0.5, 0.8};
  const int counts[3] = {2, 1, 1};
  EXPECT_NEAR(weighted_reaction_score(scores, counts), 0.825, 1e-12);
  const int equal[3] = {2, 2, 2};
  EXPECT_NEAR(weighted_reaction_score(scores, equal), (1.0 + 0.5 + 0.8) / 3, 1e-12);
}

TEST(ScoreReactionRecognition, Cases) {
  const std::string gold = "CC(=O)O.OCC>[H+]>CC(=O)OCC.O";
  const SampleScore same = score_reaction_recognition(gold, gold);
  EXPECT_EQ(same.sim, 1.0);
  EXPECT_TRUE(same.em);
  const SampleScore swapped = score_reaction_recognition("OCC.CC(=O)O>[H+]>O.CC(=O)OCC", gold);
  EXPECT_EQ(swapped.sim, 1.0);
  EXPECT_TRUE(swapped.em);
  const SampleScore bad = score_reaction_recognition("CCO>CC", gold);
  EXPECT_EQ(bad.sim, 0.0);
  EXPECT_FALSE(bad.em);
  EXPECT_TRUE(bad.error);

  // Missing agent: reactants and products perfect, agents 0; weights 2, 1, 2.
  const SampleScore no_agent = score_reaction_recognition("CC(=O)O.OCC>>CC(=O)OCC.O", gold);
  EXPECT_NEAR(no_agent.sim, 4.0 / 5.0, 1e-12);
  EXPECT_FALSE(no_agent.em);
  EXPECT_THROW(score_reaction_recognition(gold, "C>C"), DatasetError);
}

TEST(RunEval, Aggregates) {
  std::vector<EvalSample> s = {sample("a", "CCO", "CCO"), sample("b", "CCN", "CCO"), sample("c", "C((", "CCO")};
  const MetricsReport r = run_eval(s);
  const double mid = sim("CCN", "CCO");
  EXPECT_NEAR(r.avg_sim, (1.0 + mid + 0.0) / 3, 1e-15);
  EXPECT_NEAR(r.tani_at_1, 1.0 / 3, 1e-15);
  EXPECT_NEAR(r.exact_match, 1.0 / 3, 1e-15);
  EXPECT_NEAR(r.parse_failure_rate, 1.0 / 3, 1e-15);
  ASSERT_EQ(r.per_sample.size(), 3u);
  EXPECT_TRUE(r.per_sample[2].error);
}

TEST(RunEval, Errors) {
  EXPECT_THROW(run_eval({}), UsageError);
  EXPECT_THROW(run_eval({sample("a", "C", "C"), sample("b", "C>>C", "C>>C", EvalTask::rxn_recognition)}), UsageError);
  try {
    run_eval({sample("x1", "C", "C"), sample("x1", "O", "O")});
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("x1"), std::string::npos);
  }
  try {
    run_eval({sample("g7", "C", "C(")});
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("g7"), std::string::npos);
  }
}

TEST(RunEval, OrderInvariant) {
  std::vector<EvalSample> s;
  const char* preds[] = {"CCO", "CCN", "c1ccccc1", "C((", "CC(=O)O", "CCCC", "O"};
  const char* golds[] = {"CCO", "CCO", "c1ccccc1C", "CCO", "CC(=O)O", "CCC", "N"};
  for (int i = 0; i < 7; ++i) s.push_back(sample("s" + std::to_string(i), preds[i], golds[i]));
  const std::string ref = report_json(run_eval(s));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(s.begin(), s.end(), rng);
    EXPECT_EQ(report_json(run_eval(s)), ref);
  }
}

TEST(LoadSamples, JoinsById) {
  std::istringstream pred(R"({"id": "2", "prediction": "CCO"}
{"id": "1", "prediction": "C"}
)");
  std::istringstream gold(R"({"id": "1", "ground_truth": "C"}
{"id": "2", "ground_truth": "CCO"}
{"id": "3", "ground_truth": "O"}
)");
  const auto s = load_samples(pred, gold, EvalTask::mol_recognition);
  ASSERT_EQ(s.size(), 3u);
  const MetricsReport r = run_eval(s);
  EXPECT_NEAR(r.avg_sim, 2.0 / 3, 1e-15);
  EXPECT_NEAR(r.parse_failure_rate, 1.0 / 3, 1e-15);

  std::istringstream stray(R"({"id": "9", "prediction": "C"})");
  std::istringstream gold2(R"({"id": "1", "ground_truth": "C"})");
  EXPECT_THROW(load_samples(stray, gold2, EvalTask::mol_recognition), UsageError);
  std::istringstream broken("{not json");
  std::istringstream gold3(R"({"id": "1", "ground_truth": "C"})");
  EXPECT_THROW(load_samples(broken, gold3, EvalTask::mol_recognition), FormatError);
}

TEST(Report, JsonFields) {
  const MetricsReport r = run_eval({sample("a", "CCO", "CCO"), sample("b", "C((", "CCO")});
  const auto j = nlohmann::json::parse(report_json(r));
  for (const char* k : {"task", "avg_sim", "tani_at_1", "exact_match", "parse_failure_rate", "per_sample"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j["per_sample"][1]["id"], "b");
  EXPECT_TRUE(j["per_sample"][1].contains("error"));
  EXPECT_FALSE(j["per_sample"][0].contains("error"));
}

TEST(Fixture, BundledSamplesScore) {
  for (const auto& [task, stem] : {std::pair{EvalTask::mol_recognition, "mol"},
                                   std::pair{EvalTask::rxn_recognition, "rxn_rec"},
                                   std::pair{EvalTask::rxn_prediction, "rxn_pred"}}) {
    std::ifstream pred(std::string(CHEMTOK_TEST_DATA) + "/" + stem + "_pred.jsonl");
    std::ifstream gold(std::string(CHEMTOK_TEST_DATA) + "/" + stem + "_gold.jsonl");
    ASSERT_TRUE(pred && gold) << stem;
    const MetricsReport r = run_eval(load_samples(pred, gold, task));
    EXPECT_EQ(r.per_sample.size(), 50u) << stem;
    EXPECT_GT(r.avg_sim, 0.0);
    EXPECT_LT(r.avg_sim, 1.0);
    EXPECT_GT(r.parse_failure_rate, 0.0);
    for (const auto& s : r.per_sample) {
      if (s.em) EXPECT_EQ(s.sim, 1.0) << s.id;
    }
  }
}
