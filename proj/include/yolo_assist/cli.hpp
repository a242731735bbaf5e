#pragma once

// Command implementations behind the yolo-assist executable. Each command
// takes a plain request struct and writes to caller-provided streams, so
// tests can drive them without spawning processes.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "yolo_assist/annotations.hpp"
#include "yolo_assist/detector.hpp"
#include "yolo_assist/evaluation.hpp"
#include "yolo_assist/feedback.hpp"
#include "yolo_assist/image.hpp"
#include "yolo_assist/model_config.hpp"
#include "yolo_assist/network.hpp"
#include "yolo_assist/weights_io.hpp"

namespace yolo_assist::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

inline constexpr const char* kAssetDirEnv = "YOLO_ASSIST_ASSET_DIR";
inline constexpr const char* kPlayerEnv = "YOLO_ASSIST_PLAYER";

inline void require_threshold(float value, const char* name) {
  if (!(value > 0.0f && value < 1.0f)) {
    throw UsageError(std::string(name) + " must be in (0,1)");
  }
}

inline void require_size(int size) {
  if (size <= 0 || size % 32 != 0) {
    throw UsageError("--size " + std::to_string(size) + ": must be multiple of 32");
  }
}

inline NetworkConfig load_cfg(const std::string& path) {
  try {
    return parse_cfg(read_text_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw FormatError("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

// ---------------------------------------------------------------------------
// Frame sources

struct Frame {
  fs::path path;
  double timestamp = 0.0;
};

inline bool is_image_path(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".ppm" || ext == ".pnm" || ext == ".png";
}

// A scripted stream file holds "<seconds> <image path>" per line; relative
// paths resolve against the stream file's directory.
inline std::vector<Frame> parse_stream_file(const fs::path& path) {
  std::vector<Frame> frames;
  std::istringstream in(read_text_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = cfg_detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::istringstream fields{std::string(trimmed)};
    Frame f;
    std::string image;
    if (!(fields >> f.timestamp >> image)) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected '<seconds> <image path>'");
    }
    if (!frames.empty() && f.timestamp < frames.back().timestamp) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": timestamps must not decrease");
    }
    f.path = fs::path(image).is_absolute() ? fs::path(image) : path.parent_path() / image;
    frames.push_back(std::move(f));
  }
  return frames;
}

// Image file, directory of images (lexicographic, spaced 1/fps apart), or
// scripted stream file.
inline std::vector<Frame> enumerate_frames(const fs::path& input, double fps) {
  if (!fs::exists(input)) throw FormatError("input '" + input.string() + "' does not exist");
  if (fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.is_regular_file() && is_image_path(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Frame> frames;
    for (std::size_t i = 0; i < files.size(); ++i) {
      frames.push_back({files[i], static_cast<double>(i) / fps});
    }
    return frames;
  }
  if (is_image_path(input)) return {{input, 0.0}};
  return parse_stream_file(input);
}

// ---------------------------------------------------------------------------
// detect

struct DetectRequest {
  std::string cfg;
  std::string weights;
  std::string names;
  std::string input;
  std::optional<int> size;
  float conf_threshold = kDefaultConfThreshold;
  float iou_threshold = kDefaultNmsThreshold;
  bool feedback = false;
  std::string out;       // JSON destination; stdout when empty
  std::string log;       // announcement log; derived from `out` when empty
  std::string annotate;  // directory for images with drawn boxes
  std::uint64_t seed = 0;
  double fps = 10.0;
  std::string player;
};

inline nlohmann::ordered_json detection_json(const Detection& d) {
  return {{"class", d.class_name},
          {"class_id", d.class_id},
          {"confidence", d.confidence},
          {"box", {{"x_min", d.box.x_min}, {"y_min", d.box.y_min},
                   {"x_max", d.box.x_max}, {"y_max", d.box.y_max}}}};
}

inline Network load_network(const std::string& cfg_path, const std::string& weights_path,
                            std::optional<int> size) {
  NetworkConfig config = load_cfg(cfg_path);
  if (size) config = with_input_size(std::move(config), *size, *size);
  const WeightStore store = load_weights(weights_path, config);
  return build_network(config, store);
}

inline int cmd_detect(const DetectRequest& req, std::ostream& out, std::ostream& err) {
  if (req.cfg.empty() || req.weights.empty() || req.names.empty() || req.input.empty()) {
    throw UsageError("detect needs --cfg, --weights, --names and --input");
  }
  if (req.size) require_size(*req.size);
  require_threshold(req.conf_threshold, "--conf");
  require_threshold(req.iou_threshold, "--iou");
  if (!(req.fps > 0.0)) throw UsageError("--fps must be positive");

  const auto names = parse_names(read_text_file(req.names));
  NetworkDetector detector(load_network(req.cfg, req.weights, req.size), names,
                           {req.conf_threshold, req.iou_threshold});
  const auto frames = enumerate_frames(req.input, req.fps);

  std::unique_ptr<std::ofstream> log_file;
  std::ostream* log = nullptr;
  std::unique_ptr<AudioSink> sink;
  std::unique_ptr<FeedbackPipeline> feedback;
  if (req.feedback) {
    std::string log_path = req.log;
    if (log_path.empty() && !req.out.empty() && req.out != "-") {
      log_path = fs::path(req.out).replace_extension(".announcements.ndjson").string();
    }
    if (log_path.empty() || log_path == "-") {
      log = &err;
    } else {
      log_file = std::make_unique<std::ofstream>(log_path, std::ios::binary);
      if (!*log_file) throw FormatError("cannot write '" + log_path + "'");
      log = log_file.get();
    }
    std::string player = req.player;
    if (player.empty()) {
      if (const char* env = std::getenv(kPlayerEnv)) player = env;
    }
    if (!player.empty()) {
      const char* dir = std::getenv(kAssetDirEnv);
      sink = std::make_unique<CommandSink>(player, dir ? dir : "");
    }
    feedback = std::make_unique<FeedbackPipeline>(build_phrase_catalog(names), SchedulerConfig{},
                                                  log, sink.get());
  }
  if (!req.annotate.empty()) fs::create_directories(req.annotate);

  auto records = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Image image = load_image(frames[i].path.string());
    const auto dets = detector.detect_image(image);
    auto list = nlohmann::ordered_json::array();
    for (const auto& d : dets) list.push_back(detection_json(d));
    records.push_back({{"frame", i},
                       {"source", frames[i].path.generic_string()},
                       {"t", frames[i].timestamp},
                       {"width", image.width},
                       {"height", image.height},
                       {"detections", list}});
    if (feedback) feedback->on_frame(dets, image.width, image.height, frames[i].timestamp);
    if (!req.annotate.empty()) {
      Image drawn = image;
      for (const auto& d : dets) {
        draw_rect(drawn, d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max,
                  class_color(d.class_id, req.seed));
      }
      const fs::path dst = fs::path(req.annotate) / (frames[i].path.stem().string() + ".detections.ppm");
      save_image(dst.string(), drawn);
    }
  }
  if (feedback) {
    feedback->stop();
    err << "announced " << feedback->emitted() << ", dropped " << feedback->dropped() << '\n';
  }
  OutputTarget target(req.out, out);
  *target << records.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalRequest {
  std::string data;
  std::string cfg;
  std::string weights;
  std::vector<int> sizes = kSweepSizes;
  std::vector<int> subsets;
  float conf_threshold = kDefaultConfThreshold;
  float iou_threshold = kDefaultNmsThreshold;
  double map_iou = kDefaultEvalIou;
  std::string format = "table";
  std::string out;
  std::string detector = "network";  // network | oracle | perturbed
  std::string split = "valid";
  std::uint64_t seed = 0;
};

inline ExperimentReport evaluate(const EvalRequest& req) {
  if (req.data.empty()) throw UsageError("eval needs --data");
  if (req.format != "json" && req.format != "table") {
    throw UsageError("--format must be json or table");
  }
  if (req.split != "valid" && req.split != "train") throw UsageError("--split must be valid or train");
  for (int s : req.sizes) require_size(s);
  require_threshold(req.conf_threshold, "--conf");
  require_threshold(req.iou_threshold, "--iou");
  if (!(req.map_iou > 0.0 && req.map_iou <= 1.0)) throw UsageError("--map-iou must be in (0,1]");

  const DatasetDescriptor descriptor = load_data_file(req.data);
  const DatasetSplit split = load_split(descriptor, req.split == "train" ? Split::train : Split::valid);

  ExperimentOptions options;
  options.sizes = req.sizes;
  options.subsets = req.subsets;
  options.eval_iou = req.map_iou;
  options.conf_threshold = req.conf_threshold;
  options.nms_threshold = req.iou_threshold;
  options.detector = req.detector;

  DetectorFactory factory;
  const auto& names = split.class_names;
  if (req.detector == "network") {
    if (req.cfg.empty() || req.weights.empty()) {
      throw UsageError("eval with the network detector needs --cfg and --weights");
    }
    auto config = std::make_shared<NetworkConfig>(load_cfg(req.cfg));
    auto store = std::make_shared<WeightStore>(load_weights(req.weights, *config));
    DetectorOptions opts{req.conf_threshold, req.iou_threshold};
    factory = [config, store, names, opts](int size) -> std::unique_ptr<ObjectDetector> {
      return std::make_unique<NetworkDetector>(
          build_network(with_input_size(*config, size, size), *store), names, opts);
    };
  } else if (req.detector == "oracle") {
    factory = [names](int) -> std::unique_ptr<ObjectDetector> {
      return std::make_unique<GroundTruthReplayDetector>(names);
    };
  } else if (req.detector == "perturbed") {
    const std::uint64_t seed = req.seed;
    factory = [names, seed](int size) -> std::unique_ptr<ObjectDetector> {
      return std::make_unique<PerturbedOracleDetector>(names, seed, static_cast<std::uint64_t>(size));
    };
  } else {
    throw UsageError("--detector must be network, oracle or perturbed");
  }
  return run_experiment(split, factory, options);
}

inline int cmd_eval(const EvalRequest& req, std::ostream& out) {
  const ExperimentReport report = evaluate(req);
  OutputTarget target(req.out, out);
  if (req.format == "json") {
    *target << to_json(report).dump(2) << '\n';
  } else {
    *target << format_table(report);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// inspect

struct InspectRequest {
  std::string cfg;
  std::string weights;
  std::optional<int> size;
};

inline std::string layer_params(const LayerSpec& l) {
  std::ostringstream s;
  switch (l.kind) {
    case LayerKind::convolutional: {
      const auto& c = l.conv();
      s << c.filters << " " << c.size << "x" << c.size << "/" << c.stride
        << (c.batch_normalize ? " bn" : "") << " " << to_string(c.activation);
      break;
    }
    case LayerKind::upsample:
      s << "x" << l.upsample().stride;
      break;
    case LayerKind::route:
      for (std::size_t i = 0; i < l.route().layers.size(); ++i) {
        s << (i ? "," : "") << l.route().layers[i].resolved;
      }
      break;
    case LayerKind::shortcut:
      s << "from " << l.shortcut().from.resolved;
      break;
    case LayerKind::yolo: {
      const auto& y = l.yolo();
      s << "classes " << y.classes << " mask ";
      for (std::size_t i = 0; i < y.mask.size(); ++i) s << (i ? "," : "") << y.mask[i];
      break;
    }
  }
  return s.str();
}

// Per-layer table. Validation problems are shown, not fatal.
inline int cmd_inspect(const InspectRequest& req, std::ostream& out) {
  if (req.cfg.empty()) throw UsageError("inspect needs --cfg");
  if (req.size) require_size(*req.size);
  NetworkConfig config = load_cfg(req.cfg);
  if (req.size) config = with_input_size(std::move(config), *req.size, *req.size);
  const ValidationReport report = validate(config);
  std::vector<FeatureShape> shapes;
  std::string shape_error;
  try {
    shapes = output_shapes(config, input_shape(config));
  } catch (const ShapeError& e) {
    shape_error = e.what();
  }
  const auto counts = expected_weight_count(config);
  std::optional<WeightStore> store;
  std::string weights_error;
  if (!req.weights.empty()) {
    try {
      store = load_weights(req.weights, config);
    } catch (const FormatError& e) {
      weights_error = e.what();
    }
  }

  out << "input " << config.net.width << "x" << config.net.height << "x" << config.net.channels << "\n";
  out << std::left << std::setw(6) << "idx" << std::setw(15) << "kind" << std::setw(26) << "params"
      << std::setw(26) << "output" << std::setw(12) << "weights";
  if (!req.weights.empty()) out << std::setw(10) << "check";
  out << "violations\n";
  std::size_t total = 0;
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    const auto& l = config.layers[i];
    std::string shape = i < shapes.size() ? shapes[i].str() : "?";
    if (l.kind == LayerKind::yolo && i < shapes.size()) {
      shape += " grid " + std::to_string(shapes[i].height);
    }
    out << std::setw(6) << i << std::setw(15) << to_string(l.kind) << std::setw(26) << layer_params(l)
        << std::setw(26) << shape << std::setw(12) << counts[i];
    if (!req.weights.empty()) {
      std::string check = "-";
      if (l.kind == LayerKind::convolutional) {
        const ConvWeights* w = store ? store->find(static_cast<int>(i)) : nullptr;
        check = (w != nullptr && w->count() == counts[i]) ? "ok" : "MISMATCH";
      }
      out << std::setw(10) << check;
    }
    std::string violations;
    for (const auto& m : report.for_layer(static_cast<int>(i))) {
      violations += (violations.empty() ? "" : "; ") + m;
    }
    out << violations << "\n";
    total += counts[i];
  }
  out << "total weights " << total << " (" << config.layers.size() << " layers, "
      << config.yolo_layer_indices().size() << " yolo heads)\n";
  for (const auto& m : report.for_layer(-1)) out << "[net] " << m << "\n";
  if (!shape_error.empty()) out << "shape error: " << shape_error << "\n";
  if (!weights_error.empty()) out << "weights error: " << weights_error << "\n";
  for (const auto& w : config.warnings) out << "warning: " << w << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchRequest {
  std::string cfg;
  std::string weights;  // random seeded weights when empty
  std::optional<int> size;
  int iterations = 10;
  std::uint64_t seed = 0;
};

struct BenchStats {
  std::vector<double> samples_ms;
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  double stddev_ms = 0.0;
  double cv = 0.0;  // stddev / mean
};

inline BenchStats summarize(std::vector<double> samples) {
  BenchStats s;
  s.samples_ms = std::move(samples);
  const double n = static_cast<double>(s.samples_ms.size());
  s.mean_ms = std::accumulate(s.samples_ms.begin(), s.samples_ms.end(), 0.0) / n;
  s.min_ms = *std::min_element(s.samples_ms.begin(), s.samples_ms.end());
  s.max_ms = *std::max_element(s.samples_ms.begin(), s.samples_ms.end());
  double var = 0.0;
  for (double v : s.samples_ms) var += (v - s.mean_ms) * (v - s.mean_ms);
  s.stddev_ms = std::sqrt(var / n);
  s.cv = s.mean_ms > 0.0 ? s.stddev_ms / s.mean_ms : 0.0;
  return s;
}

// One warmup forward, then `iterations` timed forwards on a fixed input.
inline BenchStats run_bench(const BenchRequest& req) {
  if (req.cfg.empty()) throw UsageError("bench needs --cfg");
  if (req.iterations < 1) throw UsageError("--iterations must be >= 1");
  if (req.size) require_size(*req.size);
  NetworkConfig config = load_cfg(req.cfg);
  if (req.size) config = with_input_size(std::move(config), *req.size, *req.size);
  const WeightStore store = req.weights.empty()
                                ? random_weights(config, static_cast<std::uint32_t>(req.seed))
                                : load_weights(req.weights, config);
  const Network net = build_network(config, store);
  const FeatureShape dims = net.input_dims();
  std::mt19937 rng(static_cast<std::uint32_t>(req.seed));
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  Tensor input(Shape{1, dims.channels, dims.height, dims.width});
  for (float& v : input.data()) v = unit(rng);

  (void)net.forward(input);
  std::vector<double> samples;
  for (int i = 0; i < req.iterations; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const auto heads = net.forward(input);
    const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
    if (heads.empty()) throw Error("forward produced no heads");
    samples.push_back(took.count());
  }
  return summarize(std::move(samples));
}

inline int cmd_bench(const BenchRequest& req, std::ostream& out) {
  const BenchStats s = run_bench(req);
  nlohmann::ordered_json j{{"iterations", s.samples_ms.size()},
                           {"mean_ms", s.mean_ms},
                           {"min_ms", s.min_ms},
                           {"max_ms", s.max_ms},
                           {"stddev_ms", s.stddev_ms},
                           {"cv", s.cv},
                           {"samples_ms", s.samples_ms}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// manifest

struct ManifestRequest {
  std::string names;
  std::string out;
  std::string extension = "mp3";
};

inline int cmd_manifest(const ManifestRequest& req, std::ostream& out) {
  if (req.names.empty()) throw UsageError("manifest needs --names");
  const auto names = parse_names(read_text_file(req.names));
  const PhraseCatalog catalog = build_phrase_catalog(names, req.extension);
  OutputTarget target(req.out, out);
  *target << manifest_json(catalog).dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Argument parsing

inline std::vector<int> parse_size_list(const std::string& text) {
  std::vector<int> out;
  for (auto piece : cfg_detail::split_list(text)) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (ec != std::errc() || ptr != piece.data() + piece.size()) {
      throw UsageError("'" + std::string(piece) + "' is not an integer");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"YOLOv3 object detection with spoken location feedback", "yolo-assist"};
  app.require_subcommand(1);

  DetectRequest det;
  std::optional<int> det_size;
  std::string det_feedback = "off";
  auto* detect = app.add_subcommand("detect", "Run detection on an image, a directory or a stream file");
  detect->add_option("--cfg", det.cfg, "darknet .cfg file")->required();
  detect->add_option("--weights", det.weights, "darknet .weights file")->required();
  detect->add_option("--names", det.names, "class names file")->required();
  detect->add_option("--input", det.input, "image, directory of images, or stream file")->required();
  detect->add_option("--size", det_size, "network input size (multiple of 32)");
  detect->add_option("--conf", det.conf_threshold, "confidence threshold");
  detect->add_option("--iou", det.iou_threshold, "NMS IoU threshold");
  detect->add_option("--feedback", det_feedback, "on|off")->check(CLI::IsMember({"on", "off"}));
  detect->add_option("--out", det.out, "JSON output path (stdout by default)");
  detect->add_option("--log", det.log, "announcement log path");
  detect->add_option("--annotate", det.annotate, "directory for annotated images");
  detect->add_option("--seed", det.seed, "palette seed");
  detect->add_option("--fps", det.fps, "frame rate assumed for directory input");
  detect->add_option("--player", det.player, "audio player command for live playback");

  EvalRequest ev;
  std::string ev_sizes = "416,512,608,832";
  std::string ev_subsets;
  auto* eval = app.add_subcommand("eval", "Size-sweep mAP / detection count / time report");
  eval->add_option("--data", ev.data, "darknet .data file")->required();
  eval->add_option("--cfg", ev.cfg, "darknet .cfg file");
  eval->add_option("--weights", ev.weights, "darknet .weights file");
  eval->add_option("--sizes", ev_sizes, "comma-separated input sizes");
  eval->add_option("--subsets", ev_subsets, "comma-separated leading image counts");
  eval->add_option("--conf", ev.conf_threshold, "confidence threshold");
  eval->add_option("--iou", ev.iou_threshold, "NMS IoU threshold");
  eval->add_option("--map-iou", ev.map_iou, "IoU needed for a true positive");
  eval->add_option("--format", ev.format, "json|table");
  eval->add_option("--out", ev.out, "report path (stdout by default)");
  eval->add_option("--detector", ev.detector, "network|oracle|perturbed");
  eval->add_option("--split", ev.split, "valid|train");
  eval->add_option("--seed", ev.seed, "seed for the perturbed detector");

  InspectRequest ins;
  std::optional<int> ins_size;
  auto* inspect = app.add_subcommand("inspect", "Per-layer table for a cfg");
  inspect->add_option("--cfg", ins.cfg, "darknet .cfg file")->required();
  inspect->add_option("--weights", ins.weights, "check a .weights file against the cfg");
  inspect->add_option("--size", ins_size, "override input size");

  BenchRequest bench_req;
  std::optional<int> bench_size;
  auto* bench = app.add_subcommand("bench", "Time forward passes");
  bench->add_option("--cfg", bench_req.cfg, "darknet .cfg file")->required();
  bench->add_option("--weights", bench_req.weights, "weights (seeded random when omitted)");
  bench->add_option("--size", bench_size, "input size");
  bench->add_option("--iterations,-n", bench_req.iterations, "timed iterations");
  bench->add_option("--seed", bench_req.seed, "seed for input and random weights");

  ManifestRequest man;
  auto* manifest = app.add_subcommand("manifest", "Phrase manifest for offline audio generation");
  manifest->add_option("--names", man.names, "class names file")->required();
  manifest->add_option("--out", man.out, "manifest path (stdout by default)");
  manifest->add_option("--ext", man.extension, "audio file extension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*detect) {
      det.size = det_size;
      det.feedback = det_feedback == "on";
      return cmd_detect(det, out, err);
    }
    if (*eval) {
      ev.sizes = parse_size_list(ev_sizes);
      if (!ev_subsets.empty()) ev.subsets = parse_size_list(ev_subsets);
      return cmd_eval(ev, out);
    }
    if (*inspect) {
      ins.size = ins_size;
      return cmd_inspect(ins, out);
    }
    if (*bench) {
      bench_req.size = bench_size;
      return cmd_bench(bench_req, out);
    }
    if (*manifest) return cmd_manifest(man, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace yolo_assist::cli
