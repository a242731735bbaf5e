#pragma once

// Darknet .cfg parsing, validation, shape propagation and serialization.

#include <charconv>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "yolo_assist/error.hpp"
#include "yolo_assist/kernels.hpp"

namespace yolo_assist {

enum class LayerKind { convolutional, upsample, route, shortcut, yolo };
enum class Activation { leaky, linear };
enum class LearningPolicy { steps, constant };

inline std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::convolutional: return "convolutional";
    case LayerKind::upsample: return "upsample";
    case LayerKind::route: return "route";
    case LayerKind::shortcut: return "shortcut";
    case LayerKind::yolo: return "yolo";
  }
  return "?";
}

inline std::string_view to_string(Activation a) {
  return a == Activation::leaky ? "leaky" : "linear";
}

inline std::string_view to_string(LearningPolicy p) {
  return p == LearningPolicy::steps ? "steps" : "constant";
}

struct KeyValue {
  std::string key;
  std::string value;
  friend bool operator==(const KeyValue&, const KeyValue&) = default;
};

struct NetParams {
  int batch = 1;
  int subdivisions = 1;
  int width = 0;
  int height = 0;
  int channels = 0;
  float learning_rate = 0.001f;
  int max_batches = 0;
  LearningPolicy policy = LearningPolicy::constant;
  std::vector<int> steps;
  std::vector<float> scales;
  // Augmentation ranges are only checked when present in the file.
  std::optional<float> hue;
  std::optional<float> saturation;
  std::optional<float> exposure;
  float momentum = 0.9f;
  float decay = 0.0001f;
  std::vector<KeyValue> extras;

  friend bool operator==(const NetParams&, const NetParams&) = default;
};

// A layer reference as written in the file plus its absolute index.
struct LayerRef {
  int written = 0;
  int resolved = 0;
  friend bool operator==(const LayerRef&, const LayerRef&) = default;
};

struct ConvParams {
  int filters = 1;
  int size = 1;
  int stride = 1;
  bool pad = false;
  bool batch_normalize = false;
  Activation activation = Activation::linear;

  // pad=1 means "same" padding of size/2, not a literal pad of one.
  [[nodiscard]] int pad_amount() const { return pad ? size / 2 : 0; }
  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

struct UpsampleParams {
  int stride = 2;
  friend bool operator==(const UpsampleParams&, const UpsampleParams&) = default;
};

struct RouteParams {
  std::vector<LayerRef> layers;
  friend bool operator==(const RouteParams&, const RouteParams&) = default;
};

struct ShortcutParams {
  LayerRef from;
  Activation activation = Activation::linear;
  friend bool operator==(const ShortcutParams&, const ShortcutParams&) = default;
};

struct Anchor {
  float w = 0.0f;
  float h = 0.0f;
  friend bool operator==(const Anchor&, const Anchor&) = default;
};

struct YoloParams {
  std::vector<int> mask;
  std::vector<Anchor> anchors;
  int classes = 20;
  int num = 1;
  float ignore_thresh = 0.5f;

  // Anchors selected by this head's mask; out-of-range indices are skipped.
  [[nodiscard]] std::vector<Anchor> masked_anchors() const {
    std::vector<Anchor> out;
    for (int m : mask) {
      if (m >= 0 && static_cast<std::size_t>(m) < anchors.size()) {
        out.push_back(anchors[static_cast<std::size_t>(m)]);
      }
    }
    return out;
  }
  friend bool operator==(const YoloParams&, const YoloParams&) = default;
};

using LayerParams = std::variant<ConvParams, UpsampleParams, RouteParams,
                                 ShortcutParams, YoloParams>;

struct LayerSpec {
  LayerKind kind = LayerKind::convolutional;
  int index = 0;
  LayerParams params;
  std::vector<KeyValue> extras;
  int line = 0;  // 1-based line of the section header; 0 when synthesized

  [[nodiscard]] const ConvParams& conv() const {
    return std::get<ConvParams>(params);
  }
  [[nodiscard]] const UpsampleParams& upsample() const {
    return std::get<UpsampleParams>(params);
  }
  [[nodiscard]] const RouteParams& route() const {
    return std::get<RouteParams>(params);
  }
  [[nodiscard]] const ShortcutParams& shortcut() const {
    return std::get<ShortcutParams>(params);
  }
  [[nodiscard]] const YoloParams& yolo() const {
    return std::get<YoloParams>(params);
  }

  // Structural equality; source line numbers are ignored.
  friend bool operator==(const LayerSpec& a, const LayerSpec& b) {
    return a.kind == b.kind && a.index == b.index && a.params == b.params &&
           a.extras == b.extras;
  }
};

struct NetworkConfig {
  NetParams net;
  std::vector<LayerSpec> layers;
  std::vector<std::string> warnings;

  [[nodiscard]] std::vector<int> yolo_layer_indices() const {
    std::vector<int> out;
    for (const auto& l : layers) {
      if (l.kind == LayerKind::yolo) out.push_back(l.index);
    }
    return out;
  }

  // Warnings are diagnostics, not structure.
  friend bool operator==(const NetworkConfig& a, const NetworkConfig& b) {
    return a.net == b.net && a.layers == b.layers;
  }
};

// ---------------------------------------------------------------------------
// Parsing

namespace cfg_detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
  throw FormatError("cfg line " + std::to_string(line) + ": " + msg);
}

inline int parse_int(std::string_view text, int line, std::string_view key) {
  text = trim(text);
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(line, "expected integer for '" + std::string(key) + "', got '" +
                   std::string(text) + "'");
  }
  return value;
}

inline float parse_float(std::string_view text, int line,
                         std::string_view key) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  float value = 0.0f;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(line, "expected number for '" + std::string(key) + "', got '" +
                   std::string(text) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<int> parse_int_list(std::string_view text, int line,
                                       std::string_view key) {
  std::vector<int> out;
  for (auto piece : split_list(text)) out.push_back(parse_int(piece, line, key));
  return out;
}

inline std::vector<float> parse_float_list(std::string_view text, int line,
                                           std::string_view key) {
  std::vector<float> out;
  for (auto piece : split_list(text)) {
    out.push_back(parse_float(piece, line, key));
  }
  return out;
}

inline Activation parse_activation(std::string_view text, int line) {
  text = trim(text);
  if (text == "leaky") return Activation::leaky;
  if (text == "linear") return Activation::linear;
  fail(line, "unsupported activation '" + std::string(text) + "'");
}

inline std::string format_float(float v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

// One `[section]` with its keys in first-seen order; a repeated key keeps
// its position but takes the later value.
struct RawSection {
  std::string name;
  int line = 0;
  std::vector<KeyValue> entries;
  std::vector<int> entry_lines;

  void set(std::string key, std::string value, int at) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].key == key) {
        entries[i].value = std::move(value);
        entry_lines[i] = at;
        return;
      }
    }
    entries.push_back({std::move(key), std::move(value)});
    entry_lines.push_back(at);
  }
};

// Hands out section keys to the typed parser and remembers which were used.
class SectionReader {
 public:
  explicit SectionReader(const RawSection& s)
      : section_(s), used_(s.entries.size(), false) {}

  std::optional<std::pair<std::string_view, int>> take(std::string_view key) {
    for (std::size_t i = 0; i < section_.entries.size(); ++i) {
      if (section_.entries[i].key == key) {
        used_[i] = true;
        return std::pair<std::string_view, int>{section_.entries[i].value,
                                                section_.entry_lines[i]};
      }
    }
    return std::nullopt;
  }

  int take_int(std::string_view key, int fallback) {
    if (auto v = take(key)) return parse_int(v->first, v->second, key);
    return fallback;
  }
  float take_float(std::string_view key, float fallback) {
    if (auto v = take(key)) return parse_float(v->first, v->second, key);
    return fallback;
  }
  std::optional<float> take_optional_float(std::string_view key) {
    if (auto v = take(key)) return parse_float(v->first, v->second, key);
    return std::nullopt;
  }

  std::vector<KeyValue> leftovers(std::vector<std::string>& warnings) const {
    std::vector<KeyValue> out;
    for (std::size_t i = 0; i < section_.entries.size(); ++i) {
      if (used_[i]) continue;
      out.push_back(section_.entries[i]);
      if (is_training_only(section_.entries[i].key)) continue;
      warnings.push_back("line " + std::to_string(section_.entry_lines[i]) +
                         ": ignoring key '" + section_.entries[i].key +
                         "' in [" + section_.name + "]");
    }
    return out;
  }

 private:
  // Standard darknet training keys: kept verbatim, not worth a warning.
  static bool is_training_only(std::string_view key) {
    return key == "jitter" || key == "random" || key == "truth_thresh" || key == "burn_in" ||
           key == "angle";
  }

  const RawSection& section_;
  std::vector<bool> used_;
};

inline std::vector<RawSection> split_sections(std::string_view text) {
  std::vector<RawSection> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        fail(line_no, "malformed section header '" + std::string(line) + "'");
      }
      sections.push_back({std::string(trim(line.substr(1, line.size() - 2))),
                          line_no, {}, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(line_no, "expected key=value, got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    if (sections.empty()) fail(line_no, "key outside of any section");
    sections.back().set(std::string(key), std::string(trim(line.substr(eq + 1))),
                        line_no);
  }
  return sections;
}

inline LayerRef resolve_ref(int written, int self, int line) {
  const int resolved = written < 0 ? self + written : written;
  if (resolved < 0 || resolved >= self) {
    fail(line, "layer reference " + std::to_string(written) + " from layer " +
                   std::to_string(self) + " does not resolve to an earlier layer");
  }
  return {written, resolved};
}

inline NetParams parse_net(const RawSection& s,
                           std::vector<std::string>& warnings) {
  SectionReader r(s);
  NetParams net;
  net.batch = r.take_int("batch", net.batch);
  net.subdivisions = r.take_int("subdivisions", net.subdivisions);
  net.width = r.take_int("width", net.width);
  net.height = r.take_int("height", net.height);
  net.channels = r.take_int("channels", net.channels);
  net.learning_rate = r.take_float("learning_rate", net.learning_rate);
  net.max_batches = r.take_int("max_batches", net.max_batches);
  if (auto p = r.take("policy")) {
    const auto v = trim(p->first);
    if (v == "steps") {
      net.policy = LearningPolicy::steps;
    } else if (v == "constant") {
      net.policy = LearningPolicy::constant;
    } else {
      fail(p->second, "unsupported learning policy '" + std::string(v) + "'");
    }
  }
  if (auto v = r.take("steps")) net.steps = parse_int_list(v->first, v->second, "steps");
  if (auto v = r.take("scales")) net.scales = parse_float_list(v->first, v->second, "scales");
  net.hue = r.take_optional_float("hue");
  net.saturation = r.take_optional_float("saturation");
  net.exposure = r.take_optional_float("exposure");
  net.momentum = r.take_float("momentum", net.momentum);
  net.decay = r.take_float("decay", net.decay);
  net.extras = r.leftovers(warnings);
  return net;
}

inline LayerSpec parse_layer(const RawSection& s, int index,
                             std::vector<std::string>& warnings) {
  SectionReader r(s);
  LayerSpec spec;
  spec.index = index;
  spec.line = s.line;
  if (s.name == "convolutional") {
    spec.kind = LayerKind::convolutional;
    ConvParams p;
    p.filters = r.take_int("filters", p.filters);
    p.size = r.take_int("size", p.size);
    p.stride = r.take_int("stride", p.stride);
    p.pad = r.take_int("pad", 0) != 0;
    p.batch_normalize = r.take_int("batch_normalize", 0) != 0;
    if (auto a = r.take("activation")) p.activation = parse_activation(a->first, a->second);
    spec.params = p;
  } else if (s.name == "upsample") {
    spec.kind = LayerKind::upsample;
    UpsampleParams p;
    p.stride = r.take_int("stride", p.stride);
    spec.params = p;
  } else if (s.name == "route") {
    spec.kind = LayerKind::route;
    RouteParams p;
    auto v = r.take("layers");
    if (!v) fail(s.line, "[route] requires 'layers'");
    for (int ref : parse_int_list(v->first, v->second, "layers")) {
      p.layers.push_back(resolve_ref(ref, index, v->second));
    }
    if (p.layers.empty()) fail(v->second, "[route] 'layers' is empty");
    spec.params = p;
  } else if (s.name == "shortcut") {
    spec.kind = LayerKind::shortcut;
    ShortcutParams p;
    auto v = r.take("from");
    if (!v) fail(s.line, "[shortcut] requires 'from'");
    p.from = resolve_ref(parse_int(v->first, v->second, "from"), index, v->second);
    if (auto a = r.take("activation")) p.activation = parse_activation(a->first, a->second);
    spec.params = p;
  } else if (s.name == "yolo") {
    spec.kind = LayerKind::yolo;
    YoloParams p;
    p.classes = r.take_int("classes", p.classes);
    if (auto v = r.take("anchors")) {
      const auto values = parse_float_list(v->first, v->second, "anchors");
      if (values.size() % 2 != 0) fail(v->second, "anchors must come in (w,h) pairs");
      for (std::size_t i = 0; i < values.size(); i += 2) {
        p.anchors.push_back({values[i], values[i + 1]});
      }
    }
    p.num = r.take_int("num", static_cast<int>(p.anchors.empty() ? 1 : p.anchors.size()));
    if (auto v = r.take("mask")) {
      p.mask = parse_int_list(v->first, v->second, "mask");
    } else {
      for (int i = 0; i < p.num; ++i) p.mask.push_back(i);
    }
    p.ignore_thresh = r.take_float("ignore_thresh", p.ignore_thresh);
    spec.params = p;
  } else {
    fail(s.line, "unsupported layer kind [" + s.name + "]");
  }
  spec.extras = r.leftovers(warnings);
  return spec;
}

}  // namespace cfg_detail

inline NetworkConfig parse_cfg(std::string_view text) {
  using namespace cfg_detail;
  auto sections = split_sections(text);
  if (sections.empty() ||
      (sections.front().name != "net" && sections.front().name != "network")) {
    throw FormatError("cfg: missing [net] section at the top of the file");
  }
  NetworkConfig config;
  config.net = parse_net(sections.front(), config.warnings);
  for (std::size_t i = 1; i < sections.size(); ++i) {
    const auto& s = sections[i];
    if (s.name == "net" || s.name == "network") {
      fail(s.line, "duplicate [net] section");
    }
    config.layers.push_back(
        parse_layer(s, static_cast<int>(i - 1), config.warnings));
  }
  return config;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  int layer = -1;  // -1 refers to the [net] section
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::vector<std::string> for_layer(int layer) const {
    std::vector<std::string> out;
    for (const auto& v : violations) {
      if (v.layer == layer) out.push_back(v.message);
    }
    return out;
  }
  [[nodiscard]] std::string str() const {
    std::string out;
    for (const auto& v : violations) {
      out += v.layer < 0 ? std::string("[net]")
                         : "layer " + std::to_string(v.layer);
      out += ": " + v.message + "\n";
    }
    return out;
  }
};

// Filters the convolution feeding a yolo head must produce.
inline int expected_head_filters(int classes, std::size_t mask_size) {
  return (classes + 5) * static_cast<int>(mask_size);
}

inline ValidationReport validate(const NetworkConfig& config) {
  ValidationReport report;
  auto add = [&](int layer, std::string msg) {
    report.violations.push_back({layer, std::move(msg)});
  };
  const NetParams& net = config.net;
  if (net.width <= 0 || net.width % 32 != 0) {
    add(-1, "width must be a positive multiple of 32, found " + std::to_string(net.width));
  }
  if (net.height <= 0 || net.height % 32 != 0) {
    add(-1, "height must be a positive multiple of 32, found " + std::to_string(net.height));
  }
  if (net.channels < 1) add(-1, "channels must be >= 1");
  if (net.batch < 1) add(-1, "batch must be >= 1");
  if (net.subdivisions < 1) add(-1, "subdivisions must be >= 1");
  if (net.policy == LearningPolicy::steps) {
    for (std::size_t i = 0; i < net.steps.size(); ++i) {
      if (i > 0 && net.steps[i] <= net.steps[i - 1]) {
        add(-1, "steps must be strictly increasing");
      }
      if (net.steps[i] >= net.max_batches) {
        add(-1, "step " + std::to_string(net.steps[i]) + " is not below max_batches " +
                    std::to_string(net.max_batches));
      }
    }
    if (net.scales.size() != net.steps.size()) {
      add(-1, "scales count must equal steps count");
    }
  }
  const std::pair<const char*, const std::optional<float>*> ranges[] = {
      {"hue", &net.hue}, {"saturation", &net.saturation}, {"exposure", &net.exposure}};
  for (const auto& [name, value] : ranges) {
    if (*value && !(**value > 0.0f)) add(-1, std::string(name) + " must be positive");
  }

  bool has_yolo = false;
  for (const auto& layer : config.layers) {
    switch (layer.kind) {
      case LayerKind::convolutional: {
        const auto& c = layer.conv();
        if (c.filters < 1) add(layer.index, "filters must be >= 1");
        if (c.size < 1) add(layer.index, "size must be >= 1");
        if (c.stride < 1) add(layer.index, "stride must be >= 1");
        break;
      }
      case LayerKind::upsample:
        if (layer.upsample().stride < 1) add(layer.index, "upsample stride must be >= 1");
        break;
      case LayerKind::route:
      case LayerKind::shortcut:
        break;
      case LayerKind::yolo: {
        has_yolo = true;
        const auto& y = layer.yolo();
        if (y.classes < 1) add(layer.index, "classes must be >= 1");
        if (y.anchors.size() != static_cast<std::size_t>(y.num)) {
          add(layer.index, "anchors count " + std::to_string(y.anchors.size()) +
                               " != num " + std::to_string(y.num));
        }
        if (y.mask.empty()) add(layer.index, "mask is empty");
        for (int m : y.mask) {
          if (m < 0 || m >= y.num) {
            add(layer.index, "mask index " + std::to_string(m) + " outside [0, num)");
          }
        }
        const int prev = layer.index - 1;
        if (prev < 0 || config.layers[static_cast<std::size_t>(prev)].kind !=
                            LayerKind::convolutional) {
          add(layer.index, "yolo layer must follow a convolutional layer");
        } else {
          const int want = expected_head_filters(y.classes, y.mask.size());
          const int found = config.layers[static_cast<std::size_t>(prev)].conv().filters;
          if (found != want) {
            add(prev, "filters before yolo layer " + std::to_string(layer.index) +
                          ": expected " + std::to_string(want) + ", found " +
                          std::to_string(found));
          }
        }
        break;
      }
    }
  }
  if (!has_yolo) add(-1, "network has no yolo layer");
  return report;
}

// ---------------------------------------------------------------------------
// Shapes

struct FeatureShape {
  int channels = 0;
  int height = 0;
  int width = 0;
  friend bool operator==(const FeatureShape&, const FeatureShape&) = default;
  [[nodiscard]] std::string str() const {
    return std::to_string(channels) + "x" + std::to_string(height) + "x" +
           std::to_string(width);
  }
};

inline FeatureShape input_shape(const NetworkConfig& config) {
  return {config.net.channels, config.net.height, config.net.width};
}

inline NetworkConfig with_input_size(NetworkConfig config, int width,
                                     int height) {
  config.net.width = width;
  config.net.height = height;
  return config;
}

inline std::vector<FeatureShape> output_shapes(const NetworkConfig& config,
                                               FeatureShape input) {
  std::vector<FeatureShape> shapes;
  shapes.reserve(config.layers.size());
  FeatureShape prev = input;
  for (const auto& layer : config.layers) {
    FeatureShape out = prev;
    const std::string where = "layer " + std::to_string(layer.index);
    switch (layer.kind) {
      case LayerKind::convolutional: {
        const auto& c = layer.conv();
        out.channels = c.filters;
        out.height = conv_output_dim(prev.height, c.size, c.stride, c.pad_amount());
        out.width = conv_output_dim(prev.width, c.size, c.stride, c.pad_amount());
        if (out.height < 1 || out.width < 1) {
          throw ShapeError(where + ": convolution output is empty for input " + prev.str());
        }
        break;
      }
      case LayerKind::upsample:
        out.height = prev.height * layer.upsample().stride;
        out.width = prev.width * layer.upsample().stride;
        break;
      case LayerKind::route: {
        out.channels = 0;
        bool first = true;
        for (const auto& ref : layer.route().layers) {
          const auto& src = shapes[static_cast<std::size_t>(ref.resolved)];
          if (first) {
            out.height = src.height;
            out.width = src.width;
            first = false;
          } else if (src.height != out.height || src.width != out.width) {
            throw ShapeError(where + ": route operands have mismatched spatial dims (" +
                             src.str() + " vs " + out.str() + ")");
          }
          out.channels += src.channels;
        }
        break;
      }
      case LayerKind::shortcut: {
        const auto& src = shapes[static_cast<std::size_t>(layer.shortcut().from.resolved)];
        if (src != prev) {
          throw ShapeError(where + ": shortcut operand " + src.str() +
                           " does not match " + prev.str());
        }
        break;
      }
      case LayerKind::yolo:
        break;
    }
    shapes.push_back(out);
    prev = out;
  }
  return shapes;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string serialize_cfg(const NetworkConfig& config) {
  using cfg_detail::format_float;
  using cfg_detail::join;
  std::ostringstream out;
  auto kv = [&](std::string_view k, const std::string& v) {
    out << k << '=' << v << '\n';
  };
  auto extras = [&](const std::vector<KeyValue>& items) {
    for (const auto& e : items) kv(e.key, e.value);
  };
  const NetParams& n = config.net;
  out << "[net]\n";
  kv("batch", std::to_string(n.batch));
  kv("subdivisions", std::to_string(n.subdivisions));
  kv("width", std::to_string(n.width));
  kv("height", std::to_string(n.height));
  kv("channels", std::to_string(n.channels));
  kv("momentum", format_float(n.momentum));
  kv("decay", format_float(n.decay));
  if (n.saturation) kv("saturation", format_float(*n.saturation));
  if (n.exposure) kv("exposure", format_float(*n.exposure));
  if (n.hue) kv("hue", format_float(*n.hue));
  kv("learning_rate", format_float(n.learning_rate));
  kv("max_batches", std::to_string(n.max_batches));
  kv("policy", std::string(to_string(n.policy)));
  if (!n.steps.empty()) kv("steps", join(n.steps, [](int s) { return std::to_string(s); }));
  if (!n.scales.empty()) kv("scales", join(n.scales, format_float));
  extras(n.extras);

  for (const auto& layer : config.layers) {
    out << "\n[" << to_string(layer.kind) << "]\n";
    switch (layer.kind) {
      case LayerKind::convolutional: {
        const auto& c = layer.conv();
        if (c.batch_normalize) kv("batch_normalize", "1");
        kv("filters", std::to_string(c.filters));
        kv("size", std::to_string(c.size));
        kv("stride", std::to_string(c.stride));
        kv("pad", c.pad ? "1" : "0");
        kv("activation", std::string(to_string(c.activation)));
        break;
      }
      case LayerKind::upsample:
        kv("stride", std::to_string(layer.upsample().stride));
        break;
      case LayerKind::route:
        kv("layers", join(layer.route().layers,
                          [](const LayerRef& r) { return std::to_string(r.written); }));
        break;
      case LayerKind::shortcut:
        kv("from", std::to_string(layer.shortcut().from.written));
        kv("activation", std::string(to_string(layer.shortcut().activation)));
        break;
      case LayerKind::yolo: {
        const auto& y = layer.yolo();
        kv("mask", join(y.mask, [](int m) { return std::to_string(m); }));
        std::string anchors;
        for (std::size_t i = 0; i < y.anchors.size(); ++i) {
          if (i) anchors += ", ";
          anchors += format_float(y.anchors[i].w) + "," + format_float(y.anchors[i].h);
        }
        kv("anchors", anchors);
        kv("classes", std::to_string(y.classes));
        kv("num", std::to_string(y.num));
        kv("ignore_thresh", format_float(y.ignore_thresh));
        break;
      }
    }
    extras(layer.extras);
  }
  return out.str();
}

}  // namespace yolo_assist
