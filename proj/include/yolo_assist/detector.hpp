#pragma once

// End-to-end detectors: the network pipeline (letterbox, forward, decode,
// NMS, unletterbox) and ground-truth replay detectors for harness checks.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "yolo_assist/annotations.hpp"
#include "yolo_assist/image.hpp"
#include "yolo_assist/network.hpp"
#include "yolo_assist/postprocess.hpp"

namespace yolo_assist {

struct DetectorOptions {
  float conf_threshold = kDefaultConfThreshold;
  float nms_threshold = kDefaultNmsThreshold;
};

class ObjectDetector {
 public:
  virtual ~ObjectDetector() = default;
  // Detections in original-image pixels, sorted by descending confidence.
  virtual std::vector<Detection> detect(const LabeledImage& item) = 0;
};

inline std::string class_label(const std::vector<std::string>& names, int class_id) {
  if (class_id >= 0 && static_cast<std::size_t>(class_id) < names.size()) {
    return names[static_cast<std::size_t>(class_id)];
  }
  return "class_" + std::to_string(class_id);
}

class NetworkDetector final : public ObjectDetector {
 public:
  NetworkDetector(Network net, std::vector<std::string> names, DetectorOptions opts = {})
      : net_(std::move(net)), names_(std::move(names)), opts_(opts) {}

  [[nodiscard]] const Network& network() const { return net_; }

  [[nodiscard]] std::vector<Detection> detect_image(const Image& image) const {
    const FeatureShape dims = net_.input_dims();
    auto [input, transform] = letterbox(image, dims.width, dims.height);
    const auto raw = net_.forward(input);
    std::vector<Detection> candidates;
    for (std::size_t h = 0; h < raw.size(); ++h) {
      auto part = decode_head(raw[h], net_.heads()[h], opts_.conf_threshold);
      candidates.insert(candidates.end(), part.begin(), part.end());
    }
    auto kept = unletterbox(nms(candidates, opts_.nms_threshold), transform);
    for (auto& d : kept) d.class_name = class_label(names_, d.class_id);
    return kept;
  }

  std::vector<Detection> detect(const LabeledImage& item) override {
    return detect_image(load_image(item.image_path.string()));
  }

 private:
  Network net_;
  std::vector<std::string> names_;
  DetectorOptions opts_;
};

// Image size in pixels; decodes the file.
inline std::pair<int, int> image_dimensions(const fs::path& path) {
  const Image img = load_image(path.string());
  return {img.width, img.height};
}

// Emits every ground-truth box verbatim at confidence 1.
class GroundTruthReplayDetector final : public ObjectDetector {
 public:
  explicit GroundTruthReplayDetector(std::vector<std::string> names) : names_(std::move(names)) {}

  std::vector<Detection> detect(const LabeledImage& item) override {
    const auto [w, h] = image_dimensions(item.image_path);
    std::vector<Detection> out;
    for (const auto& gt : item.objects) {
      out.push_back({gt.class_id, class_label(names_, gt.class_id), 1.0f, to_pixel_box(gt, w, h)});
    }
    return out;
  }

 private:
  std::vector<std::string> names_;
};

struct PerturbationOptions {
  double center_jitter = 0.08;  // fraction of box size, std dev
  double size_jitter = 0.10;    // relative, std dev
  double drop_rate = 0.10;
  double false_positive_rate = 0.30;  // expected spurious boxes per image
};

inline std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Ground truth with seeded noise: jittered boxes, random misses and
// spurious detections. Noise depends on (seed, salt, image path) only.
class PerturbedOracleDetector final : public ObjectDetector {
 public:
  PerturbedOracleDetector(std::vector<std::string> names, std::uint64_t seed, std::uint64_t salt,
                          PerturbationOptions opts = {})
      : names_(std::move(names)), seed_(seed), salt_(salt), opts_(opts) {}

  std::vector<Detection> detect(const LabeledImage& item) override {
    const auto [w, h] = image_dimensions(item.image_path);
    std::mt19937_64 rng(fnv1a(item.image_path.generic_string(), seed_ * 1000003ull + salt_));
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Detection> out;
    for (const auto& gt : item.objects) {
      if (unit(rng) < opts_.drop_rate) continue;
      GroundTruthBox moved = gt;
      moved.cx = std::clamp(gt.cx + noise(rng) * opts_.center_jitter * gt.w, 0.0, 1.0);
      moved.cy = std::clamp(gt.cy + noise(rng) * opts_.center_jitter * gt.h, 0.0, 1.0);
      moved.w = std::clamp(gt.w * (1.0 + noise(rng) * opts_.size_jitter), 0.0, 1.0);
      moved.h = std::clamp(gt.h * (1.0 + noise(rng) * opts_.size_jitter), 0.0, 1.0);
      const auto conf = static_cast<float>(0.5 + 0.5 * unit(rng));
      out.push_back({gt.class_id, class_label(names_, gt.class_id), conf, to_pixel_box(moved, w, h)});
    }
    std::poisson_distribution<int> spurious(opts_.false_positive_rate);
    const int extra = spurious(rng);
    for (int i = 0; i < extra; ++i) {
      GroundTruthBox fake;
      fake.class_id = static_cast<int>(rng() % std::max<std::size_t>(1, names_.size()));
      fake.w = 0.05 + 0.25 * unit(rng);
      fake.h = 0.05 + 0.25 * unit(rng);
      fake.cx = unit(rng);
      fake.cy = unit(rng);
      const auto conf = static_cast<float>(0.3 + 0.6 * unit(rng));
      out.push_back({fake.class_id, class_label(names_, fake.class_id), conf, to_pixel_box(fake, w, h)});
    }
    std::vector<Detection> sorted;
    for (std::size_t idx : confidence_order(out)) sorted.push_back(out[idx]);
    return sorted;
  }

 private:
  std::vector<std::string> names_;
  std::uint64_t seed_;
  std::uint64_t salt_;
  PerturbationOptions opts_;
};

}  // namespace yolo_assist
