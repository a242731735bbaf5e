#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"

using namespace yolo_assist;

namespace {

std::string conv_yolo_cfg(int classes, int filters, int mask_size = 3) {
  std::string mask, anchors;
  for (int i = 0; i < mask_size; ++i) {
    mask += (i ? "," : "") + std::to_string(i);
    anchors += (i ? ", " : "") + std::to_string(10 + i) + "," + std::to_string(12 + i);
  }
  return "[net]\nwidth=608\nheight=608\nchannels=3\n"
         "[convolutional]\nfilters=" + std::to_string(filters) +
         "\nsize=1\nstride=1\npad=1\nactivation=linear\n"
         "[yolo]\nmask=" + mask + "\nanchors=" + anchors + "\nclasses=" + std::to_string(classes) +
         "\nnum=" + std::to_string(mask_size) + "\n";
}

}  // namespace

TEST(ParseCfg, MinimalSingleConvolution) {
  const auto cfg = parse_cfg(
      "[net]\nwidth=608\nheight=608\nchannels=3\n[convolutional]\nfilters=27\nsize=1\nstride=1\n"
      "activation=linear");
  EXPECT_EQ(cfg.net.width, 608);
  EXPECT_EQ(cfg.net.height, 608);
  EXPECT_EQ(cfg.net.channels, 3);
  ASSERT_EQ(cfg.layers.size(), 1u);
  EXPECT_EQ(cfg.layers[0].conv().filters, 27);
  EXPECT_EQ(cfg.layers[0].conv().activation, Activation::linear);
}

TEST(ParseCfg, RelativeRouteResolvesToAbsoluteIndex) {
  const auto cfg = parse_cfg(
      "[net]\nwidth=32\nheight=32\nchannels=3\n"
      "[convolutional]\nfilters=4\n[convolutional]\nfilters=4\n[convolutional]\nfilters=4\n"
      "[route]\nlayers=-1\n");
  const auto& ref = cfg.layers[3].route().layers.at(0);
  EXPECT_EQ(ref.written, -1);
  EXPECT_EQ(ref.resolved, 2);
}

TEST(ParseCfg, CommentsAndDuplicateKeys) {
  const auto cfg = parse_cfg(
      "# header comment\n[net]\n; semicolon comment\nwidth=32\nheight=32\nchannels=3\n"
      "[convolutional]\nfilters=4\nfilters=8\n");
  EXPECT_EQ(cfg.layers[0].conv().filters, 8);
  EXPECT_EQ(cfg.net.width, 32);
}

TEST(ParseCfg, UnknownKeysKeptWithWarning) {
  const auto cfg = parse_cfg(
      "[net]\nwidth=32\nheight=32\nchannels=3\nmosaic=1\n[convolutional]\nfilters=4\nxnor=0\n");
  ASSERT_EQ(cfg.net.extras.size(), 1u);
  EXPECT_EQ(cfg.net.extras[0], (KeyValue{"mosaic", "1"}));
  EXPECT_EQ(cfg.layers[0].extras.at(0).key, "xnor");
  EXPECT_EQ(cfg.warnings.size(), 2u);
}

TEST(ParseCfg, ErrorsCarryLineNumbers) {
  try {
    parse_cfg("[net]\nwidth=32\nheight=abc\n");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseCfg, RejectsMalformedInput) {
  EXPECT_THROW(parse_cfg("[convolutional]\nfilters=4\n"), FormatError);
  EXPECT_THROW(parse_cfg("[net]\nwidth=32\n[net]\n"), FormatError);
  EXPECT_THROW(parse_cfg("[net]\nwidth=32\n[maxpool]\nsize=2\n"), FormatError);
  EXPECT_THROW(parse_cfg("[net]\nwidth=32\n[route]\nlayers=-5\n"), FormatError);
  EXPECT_THROW(parse_cfg("[net]\nwidth=32\n[convolutional]\nactivation=mish\n"), FormatError);
  EXPECT_THROW(parse_cfg("[net]\nwidth 32\n"), FormatError);
}

TEST(ParseCfg, CanonicalFixtureTopology) {
  const auto cfg = fixtures::canonical_config();
  EXPECT_EQ(cfg.layers.size(), 107u);
  EXPECT_EQ(cfg.yolo_layer_indices(), (std::vector<int>{82, 94, 106}));
  EXPECT_EQ(cfg.net.width, 608);
  EXPECT_EQ(cfg.net.batch, 64);
  EXPECT_EQ(cfg.net.subdivisions, 16);
  EXPECT_EQ(cfg.net.max_batches, 60000);
  EXPECT_EQ(cfg.net.steps, (std::vector<int>{45000, 50000}));
  EXPECT_FLOAT_EQ(cfg.net.learning_rate, 0.001f);
  for (int idx : cfg.yolo_layer_indices()) {
    EXPECT_EQ(cfg.layers[static_cast<std::size_t>(idx)].yolo().classes, 4);
    EXPECT_EQ(cfg.layers[static_cast<std::size_t>(idx - 1)].conv().filters, 27);
  }
  EXPECT_TRUE(validate(cfg).ok()) << validate(cfg).str();
}

TEST(Validate, HeadFilterRule) {
  EXPECT_TRUE(validate(parse_cfg(conv_yolo_cfg(4, 27))).ok());
  EXPECT_TRUE(validate(parse_cfg(conv_yolo_cfg(80, 255))).ok());
  const auto report = validate(parse_cfg(conv_yolo_cfg(4, 30)));
  ASSERT_FALSE(report.ok());
  ASSERT_EQ(report.for_layer(0).size(), 1u);
  EXPECT_NE(report.for_layer(0)[0].find("expected 27, found 30"), std::string::npos);
}

TEST(Validate, HeadFilterRuleAcrossClassCounts) {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> delta(1, 12);
  for (int classes = 1; classes <= 80; ++classes) {
    const int want = (classes + 5) * 3;
    EXPECT_TRUE(validate(parse_cfg(conv_yolo_cfg(classes, want))).ok()) << classes;
    EXPECT_FALSE(validate(parse_cfg(conv_yolo_cfg(classes, want + delta(rng)))).ok()) << classes;
    EXPECT_FALSE(validate(parse_cfg(conv_yolo_cfg(classes, want - delta(rng)))).ok()) << classes;
  }
}

TEST(Validate, NetSectionRules) {
  auto cfg = parse_cfg(conv_yolo_cfg(4, 27));
  cfg.net.width = 600;
  EXPECT_EQ(validate(cfg).for_layer(-1).size(), 1u);

  cfg = parse_cfg(conv_yolo_cfg(4, 27));
  cfg.net.policy = LearningPolicy::steps;
  cfg.net.max_batches = 100;
  cfg.net.steps = {80, 50};
  cfg.net.scales = {0.1f, 0.1f};
  EXPECT_FALSE(validate(cfg).ok());
  cfg.net.steps = {50, 80};
  EXPECT_TRUE(validate(cfg).ok()) << validate(cfg).str();
  cfg.net.scales = {0.1f};
  EXPECT_FALSE(validate(cfg).ok());
}

TEST(Validate, YoloSectionRules) {
  auto cfg = parse_cfg(conv_yolo_cfg(4, 27));
  std::get<YoloParams>(cfg.layers[1].params).mask = {0, 1, 7};
  EXPECT_FALSE(validate(cfg).ok());
  EXPECT_FALSE(validate(parse_cfg("[net]\nwidth=32\nheight=32\nchannels=3\n[convolutional]\nfilters=4\n")).ok());
}

TEST(Shapes, SamePaddingAndStride) {
  auto cfg = parse_cfg(
      "[net]\nwidth=608\nheight=608\nchannels=3\n"
      "[convolutional]\nfilters=32\nsize=3\nstride=1\npad=1\n"
      "[convolutional]\nfilters=64\nsize=3\nstride=2\npad=1\n");
  const auto shapes = output_shapes(cfg, input_shape(cfg));
  EXPECT_EQ(shapes[0], (FeatureShape{32, 608, 608}));
  EXPECT_EQ(shapes[1], (FeatureShape{64, 304, 304}));
}

TEST(Shapes, UpsampleAndRouteMismatch) {
  auto cfg = parse_cfg(
      "[net]\nwidth=32\nheight=32\nchannels=3\n"
      "[convolutional]\nfilters=8\nsize=3\nstride=2\npad=1\n"
      "[upsample]\nstride=2\n"
      "[route]\nlayers=-1,-2\n");
  const auto up = parse_cfg("[net]\nwidth=32\nheight=32\nchannels=3\n[upsample]\nstride=2\n");
  EXPECT_EQ(output_shapes(up, {128, 19, 19})[0], (FeatureShape{128, 38, 38}));
  EXPECT_THROW(output_shapes(cfg, input_shape(cfg)), ShapeError);
}

TEST(Shapes, CanonicalHeadGridsAtSweepSizes) {
  const auto base = fixtures::canonical_config();
  for (int size : {416, 512, 608, 832}) {
    const auto cfg = with_input_size(base, size, size);
    const auto shapes = output_shapes(cfg, input_shape(cfg));
    const auto heads = cfg.yolo_layer_indices();
    const int divisors[] = {32, 16, 8};
    for (std::size_t h = 0; h < 3; ++h) {
      const auto& s = shapes[static_cast<std::size_t>(heads[h])];
      EXPECT_EQ(s.channels, 27);
      EXPECT_EQ(s.height, size / divisors[h]);
      EXPECT_EQ(s.width, size / divisors[h]);
    }
  }
}

TEST(Serialize, MinimalRoundTrip) {
  const auto cfg = parse_cfg(conv_yolo_cfg(4, 27));
  EXPECT_EQ(parse_cfg(serialize_cfg(cfg)), cfg);
}

TEST(Serialize, KeepsRelativeReferences) {
  const auto cfg = parse_cfg(fixtures::route_cfg_text());
  const std::string text = serialize_cfg(cfg);
  EXPECT_NE(text.find("layers=-1,0"), std::string::npos) << text;
}

TEST(Serialize, CanonicalIsByteStable) {
  const auto cfg = fixtures::canonical_config();
  const std::string once = serialize_cfg(cfg);
  const auto again = parse_cfg(once);
  EXPECT_EQ(again, cfg);
  EXPECT_EQ(serialize_cfg(again), once);
}
