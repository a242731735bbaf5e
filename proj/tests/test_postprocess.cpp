#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/naive_oracles.hpp"

using namespace yolo_assist;

namespace {

// One-anchor, one-class head of the given grid with all logits set to `fill`.
Tensor head(int grid, float fill, int classes = 1, int anchors = 1) {
  return Tensor(Shape{1, (classes + 5) * anchors, grid, grid}, fill);
}

Detection det(int cls, float conf, BBox box) { return {cls, {}, conf, box}; }

std::vector<Detection> random_boxes(std::mt19937& rng, int n, int classes) {
  std::uniform_real_distribution<float> pos(0, 100), size(5, 40);
  std::uniform_int_distribution<int> cls(0, classes - 1), conf(1, 20);
  std::vector<Detection> out;
  for (int i = 0; i < n; ++i) {
    // Coarse confidences force ties through the tie-break rule.
    out.push_back(det(cls(rng), static_cast<float>(conf(rng)) / 20.0f,
                      BBox::from_center(pos(rng), pos(rng), size(rng), size(rng))));
  }
  return out;
}

}  // namespace

TEST(Iou, HandCases) {
  const BBox a{0, 0, 2, 2};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, BBox{5, 5, 6, 6}), 0.0);
  EXPECT_DOUBLE_EQ(iou(a, BBox{1, 1, 3, 3}), 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(iou(a, BBox{2, 0, 4, 2}), 0.0);  // touching edges
  EXPECT_DOUBLE_EQ(iou(BBox{1, 1, 1, 1}, BBox{1, 1, 1, 1}), 0.0);
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937 rng(3);
  const auto boxes = random_boxes(rng, 200, 1);
  for (std::size_t i = 1; i < boxes.size(); ++i) {
    const double v = iou(boxes[i].box, boxes[i - 1].box);
    EXPECT_DOUBLE_EQ(v, iou(boxes[i - 1].box, boxes[i].box));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, oracle::box_iou(boxes[i].box, boxes[i - 1].box), 1e-12);
  }
}

TEST(DecodeHead, ZeroOffsetsCenterInFirstCell) {
  Tensor raw = head(2, 0.0f);
  raw.at(0, 4, 0, 0) = 10.0f;  // objectness
  raw.at(0, 5, 0, 0) = 10.0f;  // class
  const std::vector<Anchor> anchors{{50, 30}};
  const auto dets = decode_head(raw, anchors, 32, 1, 0.5f);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_FLOAT_EQ(dets[0].box.center_x(), 16.0f);
  EXPECT_FLOAT_EQ(dets[0].box.center_y(), 16.0f);
  EXPECT_FLOAT_EQ(dets[0].box.width(), 50.0f);
  EXPECT_FLOAT_EQ(dets[0].box.height(), 30.0f);
  EXPECT_NEAR(dets[0].confidence, sigmoid(10.0f) * sigmoid(10.0f), 1e-7);
}

TEST(DecodeHead, LowObjectnessFiltered) {
  Tensor raw = head(3, 0.0f);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) {
      raw.at(0, 4, y, x) = -20.0f;
      raw.at(0, 5, y, x) = 20.0f;
    }
  const std::vector<Anchor> anchors{{10, 10}};
  EXPECT_TRUE(decode_head(raw, anchors, 8, 1, 0.01f).empty());
}

TEST(DecodeHead, PicksBestClassAndCellOffset) {
  Tensor raw = head(4, -5.0f, 3, 2);
  const int base = 8;  // second anchor
  raw.at(0, base + 0, 2, 3) = 0.0f;
  raw.at(0, base + 1, 2, 3) = 0.0f;
  raw.at(0, base + 2, 2, 3) = std::log(2.0f);
  raw.at(0, base + 3, 2, 3) = 0.0f;
  raw.at(0, base + 4, 2, 3) = 8.0f;
  raw.at(0, base + 6, 2, 3) = 6.0f;
  const std::vector<Anchor> anchors{{1, 1}, {20, 40}};
  const auto dets = decode_head(raw, anchors, 16, 3, 0.5f);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].class_id, 1);
  EXPECT_FLOAT_EQ(dets[0].box.center_x(), 3.5f * 16);
  EXPECT_FLOAT_EQ(dets[0].box.center_y(), 2.5f * 16);
  EXPECT_NEAR(dets[0].box.width(), 40.0f, 1e-4);
  EXPECT_NEAR(dets[0].box.height(), 40.0f, 1e-4);
}

TEST(DecodeHead, RejectsWrongDepth) {
  const std::vector<Anchor> anchors{{1, 1}};
  EXPECT_THROW(decode_head(head(2, 0.0f, 2), anchors, 8, 1, 0.5f), ShapeError);
}

TEST(Nms, SingleAndCoincident) {
  const std::vector<Detection> one{det(0, 0.7f, {0, 0, 10, 10})};
  EXPECT_EQ(nms(one, 0.45), one);
  const std::vector<Detection> two{det(0, 0.8f, {0, 0, 10, 10}), det(0, 0.9f, {0, 0, 10, 10})};
  const auto kept = nms(two, 0.45);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_FLOAT_EQ(kept[0].confidence, 0.9f);
}

TEST(Nms, DifferentClassesDoNotSuppress) {
  const std::vector<Detection> in{det(0, 0.9f, {0, 0, 10, 10}), det(1, 0.8f, {0, 0, 10, 10})};
  EXPECT_EQ(nms(in, 0.45).size(), 2u);
}

TEST(Nms, TieBreakByClassThenPosition) {
  const std::vector<Detection> in{det(1, 0.5f, {0, 0, 1, 1}), det(0, 0.5f, {5, 5, 6, 6}),
                                  det(0, 0.5f, {8, 8, 9, 9})};
  const auto kept = nms(in, 0.45);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[0].box, in[1].box);
  EXPECT_EQ(kept[1].box, in[2].box);
  EXPECT_EQ(kept[2].box, in[0].box);
}

TEST(Nms, TwelveBoxesMatchBruteForce) {
  std::mt19937 rng(12);
  const auto in = random_boxes(rng, 12, 2);
  EXPECT_EQ(nms(in, 0.45), oracle::nms(in, 0.45));
}

TEST(Nms, Idempotent) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto once = nms(random_boxes(rng, 15, 3), 0.3);
    EXPECT_EQ(nms(once, 0.3), once);
  }
}

TEST(Unletterbox, IdentityAndInversion) {
  LetterboxTransform id;
  id.original_width = id.original_height = 100;
  const std::vector<Detection> in{det(0, 0.9f, {10, 20, 30, 40})};
  EXPECT_EQ(unletterbox(in, id), in);

  LetterboxTransform t;
  t.scale = 0.5f;
  t.pad_y = 152;
  t.original_width = 1216;
  t.original_height = 608;
  const auto out = unletterbox(std::vector<Detection>{det(0, 0.9f, {0, 152, 100, 200})}, t);
  EXPECT_FLOAT_EQ(out[0].box.y_min, 0.0f);
  EXPECT_FLOAT_EQ(out[0].box.y_max, 96.0f);
  EXPECT_FLOAT_EQ(out[0].box.x_max, 200.0f);
}

TEST(Unletterbox, ClampsToImage) {
  LetterboxTransform t;
  t.original_width = 50;
  t.original_height = 40;
  const auto out = unletterbox(std::vector<Detection>{det(0, 0.9f, {-10, -5, 70, 45})}, t);
  EXPECT_EQ(out[0].box, (BBox{0, 0, 50, 40}));
}
