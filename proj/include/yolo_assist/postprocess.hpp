#pragma once

// YOLO head decoding, IoU, class-wise NMS and letterbox inversion.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "yolo_assist/error.hpp"
#include "yolo_assist/model_config.hpp"
#include "yolo_assist/network.hpp"
#include "yolo_assist/tensor.hpp"

namespace yolo_assist {

inline constexpr float kDefaultConfThreshold = 0.5f;
inline constexpr float kDefaultNmsThreshold = 0.45f;

struct BBox {
  float x_min = 0.0f;
  float y_min = 0.0f;
  float x_max = 0.0f;
  float y_max = 0.0f;

  [[nodiscard]] float width() const { return x_max - x_min; }
  [[nodiscard]] float height() const { return y_max - y_min; }
  [[nodiscard]] double area() const {
    return std::max(0.0, static_cast<double>(x_max) - x_min) *
           std::max(0.0, static_cast<double>(y_max) - y_min);
  }
  [[nodiscard]] float center_x() const { return 0.5f * (x_min + x_max); }
  [[nodiscard]] float center_y() const { return 0.5f * (y_min + y_max); }

  static BBox from_center(float cx, float cy, float w, float h) {
    return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
  }
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
  int class_id = 0;
  std::string class_name;
  float confidence = 0.0f;
  BBox box;
  friend bool operator==(const Detection&, const Detection&) = default;
};

inline float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

// Intersection over union; 0 for disjoint boxes or an empty union.
inline double iou(const BBox& a, const BBox& b) {
  const double iw = std::min<double>(a.x_max, b.x_max) - std::max<double>(a.x_min, b.x_min);
  const double ih = std::min<double>(a.y_max, b.y_max) - std::max<double>(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

// Decodes one head into candidates in network-input pixels. Channel layout
// per anchor: tx, ty, tw, th, objectness, then one logit per class.
inline std::vector<Detection> decode_head(const Tensor& raw, std::span<const Anchor> anchors,
                                          int stride, int classes, float conf_threshold) {
  const Shape& s = raw.shape();
  const int per_anchor = classes + 5;
  if (s.c != per_anchor * static_cast<int>(anchors.size())) {
    throw ShapeError("head depth " + std::to_string(s.c) + " != (classes + 5) * anchors = " +
                     std::to_string(per_anchor * static_cast<int>(anchors.size())));
  }
  std::vector<Detection> out;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const int base = static_cast<int>(a) * per_anchor;
    for (int cy = 0; cy < s.h; ++cy) {
      for (int cx = 0; cx < s.w; ++cx) {
        const float objectness = sigmoid(raw.at(0, base + 4, cy, cx));
        if (objectness < conf_threshold) continue;  // confidence <= objectness
        int best = 0;
        float best_score = -1.0f;
        for (int k = 0; k < classes; ++k) {
          const float score = sigmoid(raw.at(0, base + 5 + k, cy, cx));
          if (score > best_score) {
            best_score = score;
            best = k;
          }
        }
        const float confidence = objectness * best_score;
        if (confidence < conf_threshold) continue;
        const float bx = (sigmoid(raw.at(0, base, cy, cx)) + static_cast<float>(cx)) * static_cast<float>(stride);
        const float by = (sigmoid(raw.at(0, base + 1, cy, cx)) + static_cast<float>(cy)) * static_cast<float>(stride);
        const float bw = anchors[a].w * std::exp(raw.at(0, base + 2, cy, cx));
        const float bh = anchors[a].h * std::exp(raw.at(0, base + 3, cy, cx));
        out.push_back({best, {}, confidence, BBox::from_center(bx, by, bw, bh)});
      }
    }
  }
  return out;
}

inline std::vector<Detection> decode_head(const Tensor& raw, const YoloHead& head,
                                          float conf_threshold) {
  return decode_head(raw, head.anchors, head.stride, head.classes, conf_threshold);
}

// Orders by descending confidence, then lower class id, then input position.
inline std::vector<std::size_t> confidence_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].confidence != dets[b].confidence) return dets[a].confidence > dets[b].confidence;
    return dets[a].class_id < dets[b].class_id;
  });
  return order;
}

// Greedy class-wise suppression: a candidate is dropped when its IoU with an
// already kept box of the same class exceeds the threshold.
inline std::vector<Detection> nms(std::span<const Detection> candidates, double iou_threshold) {
  std::vector<Detection> kept;
  for (std::size_t idx : confidence_order(candidates)) {
    const Detection& d = candidates[idx];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.class_id == d.class_id && iou(k.box, d.box) > iou_threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

inline std::vector<Detection> unletterbox(std::span<const Detection> detections,
                                          const LetterboxTransform& t) {
  std::vector<Detection> out(detections.begin(), detections.end());
  const auto w = static_cast<float>(t.original_width);
  const auto h = static_cast<float>(t.original_height);
  for (auto& d : out) {
    auto [x0, y0] = t.to_original(d.box.x_min, d.box.y_min);
    auto [x1, y1] = t.to_original(d.box.x_max, d.box.y_max);
    d.box = {std::clamp(x0, 0.0f, w), std::clamp(y0, 0.0f, h),
             std::clamp(x1, 0.0f, w), std::clamp(y1, 0.0f, h)};
  }
  return out;
}

}  // namespace yolo_assist
