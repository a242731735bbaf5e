#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/naive_oracles.hpp"

using namespace yolo_assist;

namespace {

Detection det(int cls, float conf, BBox box) { return {cls, {}, conf, box}; }

double ap_of(const std::vector<Detection>& dets, const std::vector<LabeledBox>& gts, int cls = 0) {
  return average_precision(match_detections(dets, gts), cls).value();
}

// Random single-class scene with distinct confidences; returns matches plus
// the (confidence, tp) list for the oracle.
struct Scene {
  MatchResult match;
  std::vector<oracle::Scored> scored;
  int gt = 0;
};

Scene random_scene(std::mt19937& rng) {
  std::uniform_int_distribution<int> ngt(0, 5), ndet(0, 10);
  std::uniform_real_distribution<float> pos(0, 50), size(5, 25), jitter(-6, 6);
  std::vector<LabeledBox> gts;
  for (int i = ngt(rng); i > 0; --i) {
    gts.push_back({0, BBox::from_center(pos(rng), pos(rng), size(rng), size(rng))});
  }
  const int n = ndet(rng);
  std::vector<int> ranks(static_cast<std::size_t>(n));
  std::iota(ranks.begin(), ranks.end(), 1);
  std::shuffle(ranks.begin(), ranks.end(), rng);
  std::vector<Detection> dets;
  for (int i = 0; i < n; ++i) {
    const float conf = static_cast<float>(ranks[static_cast<std::size_t>(i)]) / 16.0f;
    BBox b = BBox::from_center(pos(rng), pos(rng), size(rng), size(rng));
    if (!gts.empty() && i % 2 == 0) {
      const BBox& g = gts[static_cast<std::size_t>(i) % gts.size()].box;
      b = {g.x_min + jitter(rng), g.y_min + jitter(rng), g.x_max + jitter(rng), g.y_max + jitter(rng)};
    }
    dets.push_back(det(0, conf, b));
  }
  Scene s;
  s.match = match_detections(dets, gts);
  s.gt = static_cast<int>(gts.size());
  for (const auto& d : s.match.per_class[0]) s.scored.push_back({d.confidence, d.is_tp});
  return s;
}

}  // namespace

TEST(Matching, HandCases) {
  const std::vector<LabeledBox> gt{{0, {0, 0, 10, 10}}};
  // IoU 0.6: box (0,0,10,6) overlaps 60 of union 100.
  auto m = match_detections(std::vector<Detection>{det(0, 0.9f, {0, 0, 10, 6})}, gt);
  EXPECT_EQ(m.true_positives(0), 1);
  // IoU 0.4.
  m = match_detections(std::vector<Detection>{det(0, 0.9f, {0, 0, 10, 4})}, gt);
  EXPECT_EQ(m.true_positives(0), 0);
  // Two detections on one ground truth: only the more confident one counts.
  m = match_detections(std::vector<Detection>{det(0, 0.6f, {0, 0, 10, 10}), det(0, 0.9f, {0, 0, 10, 9})}, gt);
  ASSERT_EQ(m.per_class[0].size(), 2u);
  EXPECT_FALSE(m.per_class[0][0].is_tp);
  EXPECT_TRUE(m.per_class[0][1].is_tp);
  // Class must agree.
  m = match_detections(std::vector<Detection>{det(1, 0.9f, {0, 0, 10, 10})}, gt);
  EXPECT_EQ(m.true_positives(1), 0);
}

TEST(Matching, PrefersHighestIouAmongUnmatched) {
  const std::vector<LabeledBox> gt{{0, {0, 0, 10, 10}}, {0, {2, 0, 12, 10}}};
  const auto m = match_detections(
      std::vector<Detection>{det(0, 0.9f, {2, 0, 12, 10}), det(0, 0.8f, {0, 0, 10, 10})}, gt);
  EXPECT_EQ(m.true_positives(0), 2);
}

TEST(AveragePrecision, HandCases) {
  const std::vector<LabeledBox> gt{{0, {0, 0, 10, 10}}};
  EXPECT_DOUBLE_EQ(ap_of({det(0, 0.9f, {0, 0, 10, 10})}, gt), 1.0);
  EXPECT_DOUBLE_EQ(ap_of({det(0, 0.9f, {50, 50, 60, 60}), det(0, 0.8f, {0, 0, 10, 10})}, gt), 0.5);
  EXPECT_DOUBLE_EQ(ap_of({}, gt), 0.0);
}

TEST(AveragePrecision, ClassInclusionRules) {
  MatchResult empty;
  EXPECT_FALSE(average_precision(empty, 0).has_value());
  const auto only_fp = match_detections(std::vector<Detection>{det(2, 0.9f, {0, 0, 1, 1})}, {});
  EXPECT_EQ(average_precision(only_fp, 2), 0.0);
}

TEST(AveragePrecision, MatchesConfidenceCutOracle) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const Scene s = random_scene(rng);
    const auto got = average_precision(s.match, 0);
    if (s.gt == 0 && s.scored.empty()) {
      EXPECT_FALSE(got.has_value());
      continue;
    }
    EXPECT_NEAR(got.value(), oracle::average_precision(s.scored, s.gt), 1e-12) << trial;
  }
}

TEST(MeanAveragePrecision, Averages) {
  EXPECT_DOUBLE_EQ(mean_average_precision(std::vector<double>{1.0, 0.5}), 0.75);
  EXPECT_DOUBLE_EQ(mean_average_precision(std::vector<double>{0.3}), 0.3);
  EXPECT_THROW(mean_average_precision(std::vector<double>{}), FormatError);
}

TEST(MeanAveragePrecision, SkipsAbsentClasses) {
  MatchResult all;
  all.merge(match_detections(std::vector<Detection>{det(0, 0.9f, {0, 0, 10, 10})},
                             std::vector<LabeledBox>{{0, {0, 0, 10, 10}}}));
  all.merge(match_detections(std::vector<Detection>{det(2, 0.9f, {50, 50, 60, 60}), det(2, 0.8f, {0, 0, 10, 10})},
                             std::vector<LabeledBox>{{2, {0, 0, 10, 10}}}));
  const auto scores = score_classes(all, 4);
  EXPECT_FALSE(scores.ap[1].has_value());
  EXPECT_FALSE(scores.ap[3].has_value());
  EXPECT_DOUBLE_EQ(scores.map, 0.75);
}

TEST(Experiment, OracleDetectorScoresPerfectly) {
  fixtures::TempDir dir("exp");
  const auto data = fixtures::write_synthetic_dataset(dir.path(), 8);
  const auto split = load_split(load_data_file(data), Split::valid);
  ExperimentOptions opts;
  opts.subsets = {4, 8};
  const auto names = split.class_names;
  const auto report = run_experiment(
      split, [&](int) { return std::make_unique<GroundTruthReplayDetector>(names); }, opts);
  ASSERT_EQ(report.rows.size(), 4u);
  for (const auto& row : report.rows) {
    ASSERT_EQ(row.cells.size(), 2u);
    for (const auto& c : row.cells) EXPECT_DOUBLE_EQ(c.map_percent, 100.0);
  }
  EXPECT_EQ(report.rows[0].size, 416);
  EXPECT_EQ(report.rows[3].size, 832);

  const std::string table = format_table(report);
  EXPECT_NE(table.find("Size 608*608"), std::string::npos) << table;
  EXPECT_NE(table.find("100.00"), std::string::npos);
  EXPECT_NE(table.find("Detect obj"), std::string::npos);
  const auto j = to_json(report);
  EXPECT_EQ(j["rows"].size(), 4u);
  EXPECT_EQ(j["rows"][0]["cells"][1]["images"], 8);
  EXPECT_EQ(j["metadata"]["interpolation"], "all-points");
}

TEST(Experiment, PerturbedDetectorIsSeededAndImperfect) {
  fixtures::TempDir dir("exp_noise");
  const auto data = fixtures::write_synthetic_dataset(dir.path(), 20);
  const auto split = load_split(load_data_file(data), Split::valid);
  const auto names = split.class_names;
  ExperimentOptions opts;
  auto run = [&] {
    return run_experiment(
        split,
        [&](int size) { return std::make_unique<PerturbedOracleDetector>(names, 5, static_cast<std::uint64_t>(size)); },
        opts);
  };
  const auto a = run();
  const auto b = run();
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    EXPECT_EQ(a.rows[r].cells[0].map_percent, b.rows[r].cells[0].map_percent);
    EXPECT_EQ(a.rows[r].cells[0].detected_objects, b.rows[r].cells[0].detected_objects);
    EXPECT_LT(a.rows[r].cells[0].map_percent, 100.0);
    EXPECT_GT(a.rows[r].cells[0].map_percent, 20.0);
  }
}

TEST(Experiment, InputErrors) {
  DatasetSplit empty;
  ExperimentOptions opts;
  auto factory = [](int) { return std::make_unique<GroundTruthReplayDetector>(std::vector<std::string>{}); };
  try {
    run_experiment(empty, factory, opts);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("empty split"), std::string::npos);
  }
  DatasetSplit one;
  one.images.push_back({"x.ppm", {}});
  opts.sizes = {600};
  EXPECT_THROW(run_experiment(one, factory, opts), UsageError);
  opts.sizes = {416};
  opts.subsets = {2};
  EXPECT_THROW(run_experiment(one, factory, opts), UsageError);
}
