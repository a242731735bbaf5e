#pragma once

// Darknet .weights binary format: little-endian header followed by the raw
// float32 parameters of every convolutional layer in network order.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "yolo_assist/error.hpp"
#include "yolo_assist/model_config.hpp"

namespace yolo_assist {

using Bytes = std::vector<std::uint8_t>;

struct WeightsHeader {
  std::int32_t major = 0;
  std::int32_t minor = 2;
  std::int32_t revision = 0;
  std::uint64_t seen = 0;

  // Newer headers store the seen counter as 64 bits.
  [[nodiscard]] bool wide_seen() const { return major * 10 + minor >= 2; }
  [[nodiscard]] std::size_t byte_size() const { return wide_seen() ? 20 : 16; }
  friend bool operator==(const WeightsHeader&, const WeightsHeader&) = default;
};

// Parameter blocks of one convolutional layer. With batch normalization the
// `biases` vector holds the BN shift; without it, the convolution bias.
struct ConvWeights {
  int layer = 0;
  bool batch_normalize = false;
  std::vector<float> biases;
  std::vector<float> scales;
  std::vector<float> rolling_mean;
  std::vector<float> rolling_variance;
  std::vector<float> kernel;  // (out, in, kh, kw)

  [[nodiscard]] std::size_t count() const {
    return biases.size() + scales.size() + rolling_mean.size() +
           rolling_variance.size() + kernel.size();
  }
  friend bool operator==(const ConvWeights&, const ConvWeights&) = default;
};

struct WeightStore {
  WeightsHeader header;
  std::vector<ConvWeights> layers;

  [[nodiscard]] const ConvWeights* find(int layer) const {
    for (const auto& w : layers) {
      if (w.layer == layer) return &w;
    }
    return nullptr;
  }
  [[nodiscard]] std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& w : layers) n += w.count();
    return n;
  }
  friend bool operator==(const WeightStore&, const WeightStore&) = default;
};

// Channel count entering each layer, given the network input channels.
inline std::vector<int> layer_input_channels(const NetworkConfig& config,
                                             int input_channels) {
  std::vector<int> in(config.layers.size());
  std::vector<int> out(config.layers.size());
  int prev = input_channels;
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    const auto& layer = config.layers[i];
    in[i] = prev;
    switch (layer.kind) {
      case LayerKind::convolutional:
        out[i] = layer.conv().filters;
        break;
      case LayerKind::route:
        out[i] = 0;
        for (const auto& ref : layer.route().layers) {
          out[i] += out[static_cast<std::size_t>(ref.resolved)];
        }
        break;
      default:
        out[i] = prev;
        break;
    }
    prev = out[i];
  }
  return in;
}

inline std::size_t conv_weight_count(const ConvParams& c, int in_channels) {
  const auto filters = static_cast<std::size_t>(c.filters);
  const std::size_t kernel = filters * static_cast<std::size_t>(in_channels) *
                             static_cast<std::size_t>(c.size) *
                             static_cast<std::size_t>(c.size);
  return (c.batch_normalize ? 4 * filters : filters) + kernel;
}

// Floats each layer consumes from a weights file; zero for parameterless
// layers. Only the input channel count matters.
inline std::vector<std::size_t> expected_weight_count(
    const NetworkConfig& config, FeatureShape input) {
  const auto in = layer_input_channels(config, input.channels);
  std::vector<std::size_t> counts(config.layers.size(), 0);
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    if (config.layers[i].kind == LayerKind::convolutional) {
      counts[i] = conv_weight_count(config.layers[i].conv(), in[i]);
    }
  }
  return counts;
}

inline std::vector<std::size_t> expected_weight_count(
    const NetworkConfig& config) {
  return expected_weight_count(config, input_shape(config));
}

namespace weights_detail {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }

  bool u32(std::uint32_t& v) {
    if (remaining() < 4) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return true;
  }
  bool u64(std::uint64_t& v) {
    if (remaining() < 8) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return true;
  }
  bool floats(std::vector<float>& out, std::size_t n) {
    if (remaining() / 4 < n) return false;
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = 0;
      u32(bits);
      out[i] = std::bit_cast<float>(bits);
    }
    return true;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_floats(Bytes& out, const std::vector<float>& values) {
  for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

}  // namespace weights_detail

inline bool supported_weights_version(const WeightsHeader& h) {
  return h.major == 0 && h.minor >= 0 && h.minor <= 2 && h.revision >= 0;
}

inline WeightStore read_weights(std::span<const std::uint8_t> bytes,
                                const NetworkConfig& config) {
  weights_detail::Reader in(bytes);
  WeightStore store;
  std::uint32_t major = 0, minor = 0, revision = 0;
  if (!in.u32(major) || !in.u32(minor) || !in.u32(revision)) {
    throw FormatError("weights truncated in header");
  }
  store.header.major = static_cast<std::int32_t>(major);
  store.header.minor = static_cast<std::int32_t>(minor);
  store.header.revision = static_cast<std::int32_t>(revision);
  if (!supported_weights_version(store.header)) {
    throw FormatError("unsupported weights version " + std::to_string(major) +
                      "." + std::to_string(minor) + "." +
                      std::to_string(revision));
  }
  if (store.header.wide_seen()) {
    if (!in.u64(store.header.seen)) throw FormatError("weights truncated in header");
  } else {
    std::uint32_t seen = 0;
    if (!in.u32(seen)) throw FormatError("weights truncated in header");
    store.header.seen = seen;
  }

  const auto in_channels = layer_input_channels(config, config.net.channels);
  for (const auto& layer : config.layers) {
    if (layer.kind != LayerKind::convolutional) continue;
    const auto& c = layer.conv();
    const auto filters = static_cast<std::size_t>(c.filters);
    ConvWeights w;
    w.layer = layer.index;
    w.batch_normalize = c.batch_normalize;
    bool ok = in.floats(w.biases, filters);
    if (ok && c.batch_normalize) {
      ok = in.floats(w.scales, filters) && in.floats(w.rolling_mean, filters) &&
           in.floats(w.rolling_variance, filters);
    }
    const std::size_t kernel = conv_weight_count(c, in_channels[static_cast<std::size_t>(layer.index)]) -
                               (c.batch_normalize ? 4 : 1) * filters;
    ok = ok && in.floats(w.kernel, kernel);
    if (!ok) {
      throw FormatError("weights truncated at layer " + std::to_string(layer.index));
    }
    store.layers.push_back(std::move(w));
  }
  if (in.remaining() != 0) {
    throw FormatError(std::to_string(in.remaining()) +
                      " trailing bytes after final layer");
  }
  return store;
}

inline Bytes write_weights(const WeightStore& store) {
  using namespace weights_detail;
  Bytes out;
  out.reserve(store.header.byte_size() + 4 * store.total_count());
  put_u32(out, static_cast<std::uint32_t>(store.header.major));
  put_u32(out, static_cast<std::uint32_t>(store.header.minor));
  put_u32(out, static_cast<std::uint32_t>(store.header.revision));
  if (store.header.wide_seen()) {
    put_u64(out, store.header.seen);
  } else {
    put_u32(out, static_cast<std::uint32_t>(store.header.seen));
  }
  for (const auto& w : store.layers) {
    put_floats(out, w.biases);
    if (w.batch_normalize) {
      put_floats(out, w.scales);
      put_floats(out, w.rolling_mean);
      put_floats(out, w.rolling_variance);
    }
    put_floats(out, w.kernel);
  }
  return out;
}

inline Bytes read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

inline WeightStore load_weights(const std::string& path, const NetworkConfig& config) {
  const Bytes bytes = read_file_bytes(path);
  return read_weights(bytes, config);
}

// Seeded synthetic parameters for fixtures and benchmarks. Kernel values are
// scaled by fan-in so activations stay bounded through deep stacks.
inline WeightStore random_weights(const NetworkConfig& config, std::uint32_t seed) {
  std::mt19937 rng(seed);
  WeightStore store;
  const auto in_channels = layer_input_channels(config, config.net.channels);
  for (const auto& layer : config.layers) {
    if (layer.kind != LayerKind::convolutional) continue;
    const auto& c = layer.conv();
    const auto filters = static_cast<std::size_t>(c.filters);
    const int fan_in = in_channels[static_cast<std::size_t>(layer.index)] * c.size * c.size;
    const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
    std::uniform_real_distribution<float> kernel_dist(-bound, bound);
    std::uniform_real_distribution<float> small(-0.1f, 0.1f);
    std::uniform_real_distribution<float> positive(0.5f, 1.5f);
    ConvWeights w;
    w.layer = layer.index;
    w.batch_normalize = c.batch_normalize;
    w.biases.resize(filters);
    for (auto& v : w.biases) v = small(rng);
    if (c.batch_normalize) {
      w.scales.resize(filters);
      w.rolling_mean.resize(filters);
      w.rolling_variance.resize(filters);
      for (auto& v : w.scales) v = positive(rng);
      for (auto& v : w.rolling_mean) v = small(rng);
      for (auto& v : w.rolling_variance) v = positive(rng);
    }
    w.kernel.resize(filters * static_cast<std::size_t>(fan_in));
    for (auto& v : w.kernel) v = kernel_dist(rng);
    store.layers.push_back(std::move(w));
  }
  return store;
}

}  // namespace yolo_assist
