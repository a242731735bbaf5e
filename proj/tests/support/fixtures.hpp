#pragma once

// Shared fixture builders: small network configs, a slimmed copy of the
// canonical topology, seeded tensors and an on-disk synthetic dataset.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "yolo_assist/yolo_assist.hpp"

#ifndef YOLO_ASSIST_DATA_DIR
#define YOLO_ASSIST_DATA_DIR "data"
#endif

namespace fixtures {

namespace fs = std::filesystem;
using namespace yolo_assist;

inline fs::path data_dir() { return YOLO_ASSIST_DATA_DIR; }
inline fs::path canonical_cfg_path() { return data_dir() / "yolov3-4class.cfg"; }
inline fs::path names_path() { return data_dir() / "assist.names"; }

inline NetworkConfig canonical_config() { return parse_cfg(read_text_file(canonical_cfg_path())); }

// Canonical topology with every non-head convolution narrowed by `divisor`,
// so deep forwards stay cheap while keeping all strides, routes and heads.
inline NetworkConfig slim_config(int divisor = 8) {
  NetworkConfig cfg = canonical_config();
  for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
    auto& l = cfg.layers[i];
    if (l.kind != LayerKind::convolutional) continue;
    const bool feeds_head = i + 1 < cfg.layers.size() && cfg.layers[i + 1].kind == LayerKind::yolo;
    if (!feeds_head) {
      auto& c = std::get<ConvParams>(l.params);
      c.filters = std::max(4, c.filters / divisor);
    }
  }
  return cfg;
}

inline const char* kNetHeader =
    "[net]\nbatch=1\nsubdivisions=1\nwidth=64\nheight=64\nchannels=3\n"
    "learning_rate=0.001\nmax_batches=100\npolicy=constant\n";

inline const char* kYolo4 =
    "[yolo]\nmask=0,1,2\nanchors=10,13, 16,30, 33,23\nclasses=4\nnum=3\n";

// conv -> conv -> yolo
inline std::string tiny_cfg_text() {
  return std::string(kNetHeader) +
         "[convolutional]\nbatch_normalize=1\nfilters=16\nsize=3\nstride=1\npad=1\nactivation=leaky\n"
         "[convolutional]\nfilters=27\nsize=1\nstride=1\npad=1\nactivation=linear\n" +
         kYolo4;
}

// Six layers: strided conv, upsample and a two-way route.
inline std::string route_cfg_text() {
  return std::string(kNetHeader) +
         "[convolutional]\nbatch_normalize=1\nfilters=8\nsize=3\nstride=1\npad=1\nactivation=leaky\n"
         "[convolutional]\nbatch_normalize=1\nfilters=8\nsize=3\nstride=2\npad=1\nactivation=leaky\n"
         "[upsample]\nstride=2\n"
         "[route]\nlayers=-1, 0\n"
         "[convolutional]\nfilters=27\nsize=1\nstride=1\npad=1\nactivation=linear\n" +
         kYolo4;
}

// Six layers: strided conv, upsample and a residual shortcut.
inline std::string shortcut_cfg_text() {
  return std::string(kNetHeader) +
         "[convolutional]\nbatch_normalize=1\nfilters=8\nsize=3\nstride=1\npad=1\nactivation=leaky\n"
         "[convolutional]\nbatch_normalize=1\nfilters=8\nsize=3\nstride=2\npad=1\nactivation=leaky\n"
         "[upsample]\nstride=2\n"
         "[shortcut]\nfrom=-3\nactivation=linear\n"
         "[convolutional]\nfilters=27\nsize=3\nstride=1\npad=1\nactivation=linear\n" +
         kYolo4;
}

inline Tensor random_tensor(Shape shape, std::mt19937& rng, float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  Tensor t(shape);
  for (float& v : t.data()) v = dist(rng);
  return t;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("yolo_assist_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const fs::path& path() const { return path_; }
  [[nodiscard]] fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Writes `count` PPM images with 1-3 colored rectangles each, YOLO label
// files, a names file, train/valid lists and a .data descriptor. Returns the
// .data path. Every class appears at least once.
inline fs::path write_synthetic_dataset(const fs::path& root, int count = 20, std::uint32_t seed = 7) {
  const std::vector<std::string> names{"door", "stair", "person", "mobile phone"};
  fs::create_directories(root / "images");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::string list;
  for (int i = 0; i < count; ++i) {
    const int w = i % 2 == 0 ? 160 : 120;
    const int h = i % 2 == 0 ? 120 : 160;
    Image img(w, h, Rgb{40, 40, 40});
    std::string labels;
    const int objects = 1 + i % 3;
    for (int k = 0; k < objects; ++k) {
      GroundTruthBox gt;
      gt.class_id = (i + k) % 4;
      gt.w = 0.15 + 0.3 * unit(rng);
      gt.h = 0.15 + 0.3 * unit(rng);
      gt.cx = gt.w / 2 + (1.0 - gt.w) * unit(rng);
      gt.cy = gt.h / 2 + (1.0 - gt.h) * unit(rng);
      const BBox px = to_pixel_box(gt, w, h);
      draw_rect(img, px.x_min, px.y_min, px.x_max - 1, px.y_max - 1, class_color(gt.class_id, seed));
      labels += write_label_line(gt) + "\n";
    }
    char stem[32];
    std::snprintf(stem, sizeof(stem), "img_%03d", i);
    write_file_bytes((root / "images" / (std::string(stem) + ".ppm")).string(), encode_ppm(img));
    write_text(root / "images" / (std::string(stem) + ".txt"), labels);
    list += "images/" + std::string(stem) + ".ppm\n";
  }
  std::string names_text;
  for (const auto& n : names) names_text += n + "\n";
  write_text(root / "assist.names", names_text);
  write_text(root / "valid.txt", list);
  write_text(root / "train.txt", list);
  write_text(root / "assist.data",
             "classes = 4\ntrain = train.txt\nvalid = valid.txt\nnames = assist.names\nbackup = backup/\n");
  return root / "assist.data";
}

struct ScriptedFrame {
  double t = 0.0;
  std::vector<Detection> detections;
};

// Seeded stream of detection frames 0.1 s apart on a 640x480 frame.
inline std::vector<ScriptedFrame> scripted_stream(int frames, std::uint32_t seed) {
  const std::vector<std::string> names{"door", "stair", "person", "mobile phone"};
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> count(0, 4), cls(0, 3);
  std::uniform_real_distribution<float> x(0, 640), y(0, 480), conf(0.5f, 1.0f);
  std::vector<ScriptedFrame> out;
  for (int i = 0; i < frames; ++i) {
    ScriptedFrame f;
    f.t = 0.1 * i;
    for (int k = count(rng); k > 0; --k) {
      const int c = cls(rng);
      f.detections.push_back({c, names[static_cast<std::size_t>(c)], conf(rng),
                              BBox::from_center(x(rng), y(rng), 40, 40)});
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace fixtures
