#pragma once

// Executable YOLOv3-style network built from a parsed cfg and a weight
// store, plus letterbox preprocessing from RGB images to input tensors.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "yolo_assist/error.hpp"
#include "yolo_assist/image.hpp"
#include "yolo_assist/kernels.hpp"
#include "yolo_assist/model_config.hpp"
#include "yolo_assist/tensor.hpp"
#include "yolo_assist/weights_io.hpp"

namespace yolo_assist {

inline constexpr float kLetterboxFill = 0.5f;

struct LetterboxTransform {
  float scale = 1.0f;
  int pad_x = 0;
  int pad_y = 0;
  int original_width = 0;
  int original_height = 0;
  int target_width = 0;
  int target_height = 0;
  int content_width = 0;
  int content_height = 0;

  [[nodiscard]] std::pair<float, float> to_network(float x, float y) const {
    return {x * scale + static_cast<float>(pad_x), y * scale + static_cast<float>(pad_y)};
  }
  [[nodiscard]] std::pair<float, float> to_original(float x, float y) const {
    return {(x - static_cast<float>(pad_x)) / scale, (y - static_cast<float>(pad_y)) / scale};
  }
};

// Aspect-preserving nearest-neighbour resize into a gray-padded canvas.
inline std::pair<Tensor, LetterboxTransform> letterbox(const Image& image,
                                                       int target_width,
                                                       int target_height) {
  if (target_width < 1 || target_height < 1) {
    throw UsageError("letterbox target must be positive");
  }
  LetterboxTransform t;
  t.original_width = image.width;
  t.original_height = image.height;
  t.target_width = target_width;
  t.target_height = target_height;
  t.scale = std::min(static_cast<float>(target_width) / static_cast<float>(image.width),
                     static_cast<float>(target_height) / static_cast<float>(image.height));
  t.content_width = std::clamp(static_cast<int>(std::lround(image.width * t.scale)), 1, target_width);
  t.content_height = std::clamp(static_cast<int>(std::lround(image.height * t.scale)), 1, target_height);
  t.pad_x = (target_width - t.content_width) / 2;
  t.pad_y = (target_height - t.content_height) / 2;

  Tensor out(Shape{1, 3, target_height, target_width}, kLetterboxFill);
  std::vector<int> src_x(static_cast<std::size_t>(t.content_width));
  for (int x = 0; x < t.content_width; ++x) {
    const double sx = (x + 0.5) * image.width / t.content_width;
    src_x[static_cast<std::size_t>(x)] = std::min(image.width - 1, static_cast<int>(sx));
  }
  for (int y = 0; y < t.content_height; ++y) {
    const double sy_f = (y + 0.5) * image.height / t.content_height;
    const int sy = std::min(image.height - 1, static_cast<int>(sy_f));
    for (int x = 0; x < t.content_width; ++x) {
      const int sx = src_x[static_cast<std::size_t>(x)];
      for (int c = 0; c < 3; ++c) {
        out.at(0, c, y + t.pad_y, x + t.pad_x) = static_cast<float>(image.at(sx, sy, c)) / 255.0f;
      }
    }
  }
  return {std::move(out), t};
}

struct YoloHead {
  int layer = 0;
  int classes = 0;
  std::vector<Anchor> anchors;  // already selected by the layer's mask
  FeatureShape grid;            // channels = (classes + 5) * anchors
  int stride = 0;               // input pixels per grid cell
};

class Network {
 public:
  [[nodiscard]] const NetworkConfig& config() const { return config_; }
  [[nodiscard]] FeatureShape input_dims() const { return input_; }
  [[nodiscard]] const std::vector<YoloHead>& heads() const { return heads_; }
  [[nodiscard]] const std::vector<FeatureShape>& layer_shapes() const { return shapes_; }

  // One raw tensor per yolo head, in cfg order. Thread-safe: all scratch
  // state lives on the caller's stack.
  [[nodiscard]] std::vector<Tensor> forward(const Tensor& input) const {
    const Shape want{1, input_.channels, input_.height, input_.width};
    if (input.shape() != want) {
      throw ShapeError("network input must be " + want.str() + ", got " + input.shape().str());
    }
    require_finite(input, "network input");

    const auto& layers = config_.layers;
    std::vector<std::optional<Tensor>> outputs(layers.size());
    std::vector<Tensor> heads;
    const Tensor* prev = &input;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const LayerSpec& spec = layers[i];
      Tensor out;
      switch (spec.kind) {
        case LayerKind::convolutional:
          out = run_conv(spec, params_[i], *prev);
          break;
        case LayerKind::upsample:
          out = upsample_nearest(*prev, spec.upsample().stride);
          break;
        case LayerKind::route: {
          std::vector<const Tensor*> parts;
          for (const auto& ref : spec.route().layers) {
            parts.push_back(&*outputs[static_cast<std::size_t>(ref.resolved)]);
          }
          out = parts.size() == 1 ? *parts.front()
                                  : concat_channels(std::span<const Tensor* const>(parts));
          break;
        }
        case LayerKind::shortcut: {
          const auto& s = spec.shortcut();
          out = add_elementwise(*prev, *outputs[static_cast<std::size_t>(s.from.resolved)]);
          if (s.activation == Activation::leaky) out = leaky_relu(std::move(out));
          break;
        }
        case LayerKind::yolo:
          out = *prev;
          heads.push_back(out);
          break;
      }
      require_finite(out, "layer " + std::to_string(i) + " output");
      outputs[i] = std::move(out);
      prev = &*outputs[i];
      release_finished(outputs, i);
    }
    return heads;
  }

 private:
  struct ConvParamsBlock {
    Tensor kernel;
    std::vector<float> biases;
    std::vector<float> scales;
    std::vector<float> mean;
    std::vector<float> variance;
  };

  friend Network build_network(const NetworkConfig& config, const WeightStore& weights);

  static Tensor run_conv(const LayerSpec& spec, const ConvParamsBlock& p, const Tensor& in) {
    const auto& c = spec.conv();
    Tensor out = conv2d(in, p.kernel, c.stride, c.pad_amount());
    if (c.batch_normalize) {
      out = batchnorm(std::move(out), p.scales, p.biases, p.mean, p.variance);
    } else {
      out = add_channel_bias(std::move(out), p.biases);
    }
    if (c.activation == Activation::leaky) out = leaky_relu(std::move(out));
    return out;
  }

  // Drops intermediate outputs once no later layer reads them.
  void release_finished(std::vector<std::optional<Tensor>>& outputs, std::size_t step) const {
    for (std::size_t j = 0; j <= step; ++j) {
      if (outputs[j] && last_use_[j] <= static_cast<int>(step)) outputs[j].reset();
    }
  }

  NetworkConfig config_;
  FeatureShape input_;
  std::vector<FeatureShape> shapes_;
  std::vector<ConvParamsBlock> params_;
  std::vector<YoloHead> heads_;
  std::vector<int> last_use_;
};

inline Network build_network(const NetworkConfig& config, const WeightStore& weights) {
  const ValidationReport report = validate(config);
  if (!report.ok()) {
    throw FormatError("invalid network config:\n" + report.str());
  }
  Network net;
  net.config_ = config;
  net.input_ = input_shape(config);
  net.shapes_ = output_shapes(config, net.input_);
  const auto counts = expected_weight_count(config, net.input_);
  const auto in_channels = layer_input_channels(config, net.input_.channels);

  const auto& layers = config.layers;
  net.params_.resize(layers.size());
  net.last_use_.assign(layers.size(), -1);
  for (const auto& w : weights.layers) {
    if (w.layer < 0 || static_cast<std::size_t>(w.layer) >= layers.size() ||
        layers[static_cast<std::size_t>(w.layer)].kind != LayerKind::convolutional) {
      throw FormatError("weights supplied for non-convolutional layer " + std::to_string(w.layer));
    }
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& spec = layers[i];
    const int idx = static_cast<int>(i);
    switch (spec.kind) {
      case LayerKind::convolutional: {
        const ConvWeights* w = weights.find(idx);
        if (w == nullptr) {
          throw FormatError("missing weights for layer " + std::to_string(idx));
        }
        if (w->count() != counts[i] || w->batch_normalize != spec.conv().batch_normalize) {
          throw FormatError("layer " + std::to_string(idx) + ": expected " +
                            std::to_string(counts[i]) + " weights, found " +
                            std::to_string(w->count()));
        }
        const auto& c = spec.conv();
        auto& p = net.params_[i];
        p.kernel = Tensor(Shape{c.filters, in_channels[i], c.size, c.size}, w->kernel);
        p.biases = w->biases;
        p.scales = w->scales;
        p.mean = w->rolling_mean;
        p.variance = w->rolling_variance;
        break;
      }
      case LayerKind::route:
        for (const auto& ref : spec.route().layers) {
          auto& use = net.last_use_[static_cast<std::size_t>(ref.resolved)];
          use = std::max(use, idx);
        }
        break;
      case LayerKind::shortcut: {
        auto& use = net.last_use_[static_cast<std::size_t>(spec.shortcut().from.resolved)];
        use = std::max(use, idx);
        break;
      }
      case LayerKind::yolo: {
        const auto& y = spec.yolo();
        YoloHead head;
        head.layer = idx;
        head.classes = y.classes;
        head.anchors = y.masked_anchors();
        head.grid = net.shapes_[i];
        head.stride = net.input_.width / head.grid.width;
        net.heads_.push_back(std::move(head));
        break;
      }
      case LayerKind::upsample:
        break;
    }
    // Every layer is read by its successor.
    if (i > 0) {
      auto& use = net.last_use_[i - 1];
      use = std::max(use, idx);
    }
  }
  return net;
}

}  // namespace yolo_assist
