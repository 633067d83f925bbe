#include <gtest/gtest.h>

#include <sstream>

#include "chemtok/depict.hpp"
#include "chemtok/errors.hpp"
#include "chemtok/pipeline.hpp"
#include "chemtok/smiles.hpp"

using namespace chemtok;

TEST(EncodeImage, SquareImageTokens) {
  const Encoder encoder(EncoderConfig{});
  const ImageEncoding e = encode_image(Image(800, 800, 3, 1.0f), encoder, 12);
  EXPECT_EQ(e.plan.total_tiles(), 5);
  EXPECT_EQ(e.raw_visual_tokens, 1280);
  EXPECT_EQ(e.final_visual_tokens, 80);
  ASSERT_EQ(e.tiles.size(), 5u);
  for (const auto& t : e.tiles) EXPECT_EQ(t.tokens.num_tokens() - 1, 16);
  EXPECT_GT(e.flops, 0);
}

TEST(EncodeImage, NoReductionKeepsAll) {
  EncoderConfig cfg;
  cfg.reduction.enabled = false;
  const ImageEncoding e = encode_image(Image(448, 448, 3, 0.5f), Encoder(cfg), 12);
  EXPECT_EQ(e.raw_visual_tokens, 256);
  EXPECT_EQ(e.final_visual_tokens, 256);
}

namespace {

std::vector<BenchInput> depictions(int n) {
  const char* smiles[] = {"CCO", "c1ccccc1", "CC(=O)Oc1ccccc1C(=O)O", "C1CCNCC1"};
  std::vector<BenchInput> out;
  for (int i = 0; i < n; ++i) {
    const Depiction d = render(parse_smiles(smiles[i % 4]), random_style(i), i);
    out.push_back({"img" + std::to_string(i), to_float(d.image)});
  }
  return out;
}

std::string without_wall(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::size_t cut = line.size();
    for (int k = 0; k < 2; ++k) cut = line.rfind(',', cut - 1);
    out += line.substr(0, cut) + "\n";
  }
  return out;
}

}  // namespace

TEST(Bench, ReportShape) {
  const auto inputs = depictions(3);
  const BenchReport r = run_bench(inputs, EncoderConfig{}, 2, 30, 2);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].name, "img0");
  for (const BenchRow& row : r.rows) {
    EXPECT_EQ(row.raw_visual_tokens, 256 * row.tiles);
    EXPECT_EQ(row.final_visual_tokens, 16 * row.tiles);
    EXPECT_LT(row.flops_reduced, row.flops_baseline);
  }
  EXPECT_DOUBLE_EQ(r.visual_token_ratio(), 16.0);
  EXPECT_GT(r.flop_ratio(), 1.0);

  const std::string csv = bench_csv(r);
  EXPECT_EQ(csv.rfind("image,tiles,raw_visual_tokens,final_visual_tokens,flops_baseline,flops_reduced,"
                      "wall_ms_baseline,wall_ms_reduced\n",
                      0),
            0u);
  EXPECT_NE(csv.find("\nmean,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Bench, DeterministicCounts) {
  const auto inputs = depictions(4);
  const std::string a = without_wall(bench_csv(run_bench(inputs, EncoderConfig{}, 2, 30, 1)));
  const std::string b = without_wall(bench_csv(run_bench(inputs, EncoderConfig{}, 2, 30, 3)));
  EXPECT_EQ(a, b);
}

TEST(Bench, Errors) {
  EXPECT_THROW(run_bench({}, EncoderConfig{}, 12, 30, 1), UsageError);
  EXPECT_GE(default_workers(), 1);
}
