#pragma once

// Detection matching, all-points interpolated AP / mAP, and the input-size
// sweep experiment that reports mAP, detection count and time per subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "yolo_assist/annotations.hpp"
#include "yolo_assist/detector.hpp"
#include "yolo_assist/error.hpp"
#include "yolo_assist/postprocess.hpp"

namespace yolo_assist {

inline constexpr double kDefaultEvalIou = 0.5;
inline const std::vector<int> kSweepSizes{416, 512, 608, 832};

struct LabeledBox {
  int class_id = 0;
  BBox box;
};

struct ScoredDetection {
  float confidence = 0.0f;
  bool is_tp = false;
  std::size_t order = 0;  // arrival index, breaks confidence ties
};

struct MatchResult {
  std::map<int, std::vector<ScoredDetection>> per_class;
  std::map<int, int> gt_count;
  std::size_t next_order = 0;

  // Appends another image's matches; arrival order continues from ours.
  void merge(const MatchResult& other) {
    for (const auto& [cls, dets] : other.per_class) {
      auto& dst = per_class[cls];
      for (auto d : dets) {
        d.order += next_order;
        dst.push_back(d);
      }
    }
    for (const auto& [cls, n] : other.gt_count) gt_count[cls] += n;
    next_order += other.next_order;
  }

  [[nodiscard]] int true_positives(int cls) const {
    auto it = per_class.find(cls);
    if (it == per_class.end()) return 0;
    return static_cast<int>(std::count_if(it->second.begin(), it->second.end(),
                                          [](const ScoredDetection& d) { return d.is_tp; }));
  }
  [[nodiscard]] int ground_truth(int cls) const {
    auto it = gt_count.find(cls);
    return it == gt_count.end() ? 0 : it->second;
  }
};

// Matches one image. Per class, detections are visited by descending
// confidence; each takes the unmatched ground truth of highest IoU if that
// IoU reaches the threshold, otherwise it is a false positive.
inline MatchResult match_detections(std::span<const Detection> detections,
                                    std::span<const LabeledBox> ground_truth,
                                    double iou_threshold = kDefaultEvalIou) {
  MatchResult result;
  for (const auto& gt : ground_truth) ++result.gt_count[gt.class_id];
  std::vector<bool> taken(ground_truth.size(), false);
  std::vector<ScoredDetection> slots(detections.size());
  for (std::size_t idx : confidence_order(detections)) {
    const Detection& d = detections[idx];
    double best = -1.0;
    std::size_t best_gt = ground_truth.size();
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (taken[g] || ground_truth[g].class_id != d.class_id) continue;
      const double overlap = iou(d.box, ground_truth[g].box);
      if (overlap > best) {
        best = overlap;
        best_gt = g;
      }
    }
    const bool tp = best_gt < ground_truth.size() && best >= iou_threshold;
    if (tp) taken[best_gt] = true;
    slots[idx] = {d.confidence, tp, idx};
  }
  for (std::size_t i = 0; i < detections.size(); ++i) {
    result.per_class[detections[i].class_id].push_back(slots[i]);
  }
  result.next_order = detections.size();
  return result;
}

// Area under the precision-recall curve after making precision
// non-increasing from the right. nullopt when the class has neither ground
// truth nor detections (it is left out of the mean).
inline std::optional<double> average_precision(const MatchResult& matches, int class_id) {
  const int gt = matches.ground_truth(class_id);
  auto it = matches.per_class.find(class_id);
  const bool has_dets = it != matches.per_class.end() && !it->second.empty();
  if (gt == 0) return has_dets ? std::optional<double>(0.0) : std::nullopt;
  if (!has_dets) return 0.0;

  std::vector<ScoredDetection> dets = it->second;
  std::sort(dets.begin(), dets.end(), [](const ScoredDetection& a, const ScoredDetection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.order < b.order;
  });
  std::vector<double> recall{0.0};
  std::vector<double> precision{0.0};
  int tp = 0;
  int fp = 0;
  for (const auto& d : dets) {
    (d.is_tp ? tp : fp) += 1;
    recall.push_back(static_cast<double>(tp) / gt);
    precision.push_back(static_cast<double>(tp) / (tp + fp));
  }
  recall.push_back(1.0);
  precision.push_back(0.0);
  for (std::size_t i = precision.size() - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  for (std::size_t i = 1; i < recall.size(); ++i) {
    if (recall[i] != recall[i - 1]) ap += (recall[i] - recall[i - 1]) * precision[i];
  }
  return ap;
}

inline double mean_average_precision(std::span<const double> per_class) {
  if (per_class.empty()) {
    throw FormatError("mAP undefined: no class has ground truth or detections");
  }
  return std::accumulate(per_class.begin(), per_class.end(), 0.0) /
         static_cast<double>(per_class.size());
}

struct ClassScores {
  std::vector<std::optional<double>> ap;  // indexed by class id
  double map = 0.0;
};

inline ClassScores score_classes(const MatchResult& matches, int num_classes) {
  ClassScores out;
  std::vector<double> included;
  for (int c = 0; c < num_classes; ++c) {
    out.ap.push_back(average_precision(matches, c));
    if (out.ap.back()) included.push_back(*out.ap.back());
  }
  out.map = mean_average_precision(included);
  return out;
}

inline std::vector<LabeledBox> pixel_ground_truth(const std::vector<GroundTruthBox>& objects,
                                                  int width, int height) {
  std::vector<LabeledBox> out;
  out.reserve(objects.size());
  for (const auto& gt : objects) out.push_back({gt.class_id, to_pixel_box(gt, width, height)});
  return out;
}

// ---------------------------------------------------------------------------
// Size sweep

struct ExperimentOptions {
  std::vector<int> sizes = kSweepSizes;
  std::vector<int> subsets;  // leading image counts; empty = whole split
  double eval_iou = kDefaultEvalIou;
  float conf_threshold = kDefaultConfThreshold;
  float nms_threshold = kDefaultNmsThreshold;
  std::string detector = "network";
};

struct ExperimentCell {
  int images = 0;
  double map_percent = 0.0;
  std::size_t detected_objects = 0;
  double elapsed_seconds = 0.0;
};

struct ExperimentRow {
  int size = 0;
  std::vector<ExperimentCell> cells;
};

struct ExperimentReport {
  ExperimentOptions options;
  std::vector<int> subsets;
  std::vector<ExperimentRow> rows;
};

// Builds the detector for one input size; model loading happens here and
// is excluded from timing.
using DetectorFactory = std::function<std::unique_ptr<ObjectDetector>(int size)>;

inline void require_input_size(int size) {
  if (size <= 0 || size % 32 != 0) {
    throw UsageError("input size " + std::to_string(size) + " must be a positive multiple of 32");
  }
}

inline ExperimentReport run_experiment(const DatasetSplit& split, const DetectorFactory& factory,
                                       const ExperimentOptions& options) {
  if (split.images.empty()) throw FormatError("empty split");
  if (options.sizes.empty()) throw UsageError("no input sizes given");
  for (int s : options.sizes) require_input_size(s);
  ExperimentReport report;
  report.options = options;
  report.subsets = options.subsets;
  if (report.subsets.empty()) report.subsets.push_back(static_cast<int>(split.images.size()));
  for (int n : report.subsets) {
    if (n < 1 || static_cast<std::size_t>(n) > split.images.size()) {
      throw UsageError("subset of " + std::to_string(n) + " images does not fit a split of " +
                       std::to_string(split.images.size()));
    }
  }
  const int num_classes = static_cast<int>(split.class_names.size());

  // Image sizes are needed to place ground truth in pixels.
  std::vector<std::vector<LabeledBox>> truth;
  truth.reserve(split.images.size());
  for (const auto& item : split.images) {
    const auto [w, h] = image_dimensions(item.image_path);
    truth.push_back(pixel_ground_truth(item.objects, w, h));
  }

  for (int size : options.sizes) {
    auto detector = factory(size);
    ExperimentRow row{size, {}};
    for (int n : report.subsets) {
      MatchResult all;
      std::size_t detected = 0;
      const auto start = std::chrono::steady_clock::now();
      for (int i = 0; i < n; ++i) {
        const auto dets = detector->detect(split.images[static_cast<std::size_t>(i)]);
        detected += dets.size();
        all.merge(match_detections(dets, truth[static_cast<std::size_t>(i)], options.eval_iou));
      }
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      const ClassScores scores = score_classes(all, num_classes);
      row.cells.push_back({n, scores.map * 100.0, detected,
                           std::round(elapsed.count() * 100.0) / 100.0});
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : row.cells) {
      cells.push_back({{"images", c.images},
                       {"map_percent", round2(c.map_percent)},
                       {"detected_objects", c.detected_objects},
                       {"elapsed_seconds", round2(c.elapsed_seconds)}});
    }
    rows.push_back({{"size", row.size},
                    {"input", std::to_string(row.size) + "*" + std::to_string(row.size)},
                    {"cells", cells}});
  }
  return {{"metadata",
           {{"detector", r.options.detector},
            {"eval_iou_threshold", r.options.eval_iou},
            {"eval_iou_threshold_source", "default (mAP@0.5); not stated for the original experiment"},
            {"interpolation", "all-points"},
            {"conf_threshold", r.options.conf_threshold},
            {"nms_threshold", r.options.nms_threshold},
            {"timing", "wall clock of the detection loop, seconds"}}},
          {"subsets", r.subsets},
          {"rows", rows}};
}

// Plain-text layout: one block of three metric lines per input size, one
// column per image subset.
inline std::string format_table(const ExperimentReport& r) {
  constexpr int kLabel = 13;
  constexpr int kMetric = 12;
  constexpr int kCol = 10;
  std::string out;
  char buf[64];
  auto pad = [](std::string s, int width) {
    if (static_cast<int>(s.size()) < width) s.append(static_cast<std::size_t>(width) - s.size(), ' ');
    return s;
  };
  out += pad("Images count", kLabel + kMetric);
  for (int n : r.subsets) {
    std::snprintf(buf, sizeof(buf), "%*d", kCol, n);
    out += buf;
  }
  out += '\n';
  for (const auto& row : r.rows) {
    const std::string label = "Size " + std::to_string(row.size) + "*" + std::to_string(row.size);
    out += pad(label, kLabel) + pad("mAP %", kMetric);
    for (const auto& c : row.cells) {
      std::snprintf(buf, sizeof(buf), "%*.2f", kCol, round2(c.map_percent));
      out += buf;
    }
    out += '\n' + pad("", kLabel) + pad("Detect obj", kMetric);
    for (const auto& c : row.cells) {
      std::snprintf(buf, sizeof(buf), "%*zu", kCol, c.detected_objects);
      out += buf;
    }
    out += '\n' + pad("", kLabel) + pad("Time sec", kMetric);
    for (const auto& c : row.cells) {
      std::snprintf(buf, sizeof(buf), "%*.2f", kCol, round2(c.elapsed_seconds));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace yolo_assist
