#pragma once

// YOLO label files and darknet dataset descriptors (.names, .data, lists).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "yolo_assist/error.hpp"
#include "yolo_assist/model_config.hpp"
#include "yolo_assist/postprocess.hpp"

namespace yolo_assist {

namespace fs = std::filesystem;

// One labeled object; coordinates are fractions of the image size.
struct GroundTruthBox {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  [[nodiscard]] bool degenerate() const { return w <= 0.0 || h <= 0.0; }
  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

inline GroundTruthBox parse_label_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  if (fields.size() != 5) {
    throw FormatError("label line needs 5 fields, found " + std::to_string(fields.size()));
  }
  GroundTruthBox gt;
  {
    const auto f = fields[0];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), gt.class_id);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
      throw FormatError("label class id '" + std::string(f) + "' is not an integer");
    }
    if (gt.class_id < 0) throw FormatError("label class id must be non-negative");
  }
  double* coords[] = {&gt.cx, &gt.cy, &gt.w, &gt.h};
  for (int k = 0; k < 4; ++k) {
    const auto f = fields[static_cast<std::size_t>(k + 1)];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), *coords[k]);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
      throw FormatError("label coordinate '" + std::string(f) + "' is not a number");
    }
    if (!(*coords[k] >= 0.0 && *coords[k] <= 1.0)) {
      throw FormatError("label coordinate " + std::string(f) + " outside [0,1]");
    }
  }
  return gt;
}

inline std::string write_label_line(const GroundTruthBox& gt) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f", gt.class_id, gt.cx, gt.cy, gt.w, gt.h);
  return buf;
}

// Blank lines are skipped; an empty file is an image with no objects.
inline std::vector<GroundTruthBox> parse_label_file(std::string_view text) {
  std::vector<GroundTruthBox> out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = cfg_detail::trim(text.substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty()) continue;
    try {
      out.push_back(parse_label_line(line));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline BBox to_pixel_box(const GroundTruthBox& gt, int width, int height) {
  const double w = width;
  const double h = height;
  auto cl = [](double v, double hi) { return static_cast<float>(std::clamp(v, 0.0, hi)); };
  return {cl((gt.cx - gt.w / 2) * w, w), cl((gt.cy - gt.h / 2) * h, h),
          cl((gt.cx + gt.w / 2) * w, w), cl((gt.cy + gt.h / 2) * h, h)};
}

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> parse_names(std::string_view text) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = cfg_detail::trim(text.substr(pos, nl - pos));
    if (!line.empty()) names.emplace_back(line);
    pos = nl + 1;
  }
  return names;
}

struct DatasetDescriptor {
  int classes = 0;
  std::vector<std::string> class_names;
  fs::path names_path;
  fs::path train_list;
  fs::path valid_list;
};

enum class Split { train, valid };

// Relative paths inside a .data file resolve against the file's directory.
inline DatasetDescriptor parse_data(std::string_view text, const fs::path& base_dir) {
  DatasetDescriptor d;
  bool have_classes = false;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = cfg_detail::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("data line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = cfg_detail::trim(line.substr(0, eq));
    const std::string value(cfg_detail::trim(line.substr(eq + 1)));
    auto resolve = [&](const std::string& p) {
      const fs::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };
    if (key == "classes") {
      d.classes = cfg_detail::parse_int(value, line_no, "classes");
      have_classes = true;
    } else if (key == "names") {
      d.names_path = resolve(value);
    } else if (key == "train") {
      d.train_list = resolve(value);
    } else if (key == "valid" || key == "test") {
      d.valid_list = resolve(value);
    }
  }
  if (!have_classes) throw FormatError("data file has no 'classes' entry");
  if (d.names_path.empty()) throw FormatError("data file has no 'names' entry");
  d.class_names = parse_names(read_text_file(d.names_path));
  if (static_cast<int>(d.class_names.size()) != d.classes) {
    throw FormatError("data file declares " + std::to_string(d.classes) + " classes but '" +
                      d.names_path.string() + "' lists " + std::to_string(d.class_names.size()));
  }
  return d;
}

inline DatasetDescriptor load_data_file(const fs::path& path) {
  return parse_data(read_text_file(path), path.parent_path());
}

inline fs::path label_path_for(const fs::path& image) {
  fs::path p = image;
  p.replace_extension(".txt");
  return p;
}

struct LabeledImage {
  fs::path image_path;
  std::vector<GroundTruthBox> objects;
};

struct DatasetSplit {
  std::vector<std::string> class_names;
  std::vector<LabeledImage> images;
  std::vector<std::string> warnings;
};

// Loads the listed images' labels in listing order.
inline DatasetSplit load_split(const DatasetDescriptor& d, Split split) {
  const fs::path& list = split == Split::train ? d.train_list : d.valid_list;
  if (list.empty()) {
    throw FormatError(std::string("data file has no '") +
                      (split == Split::train ? "train" : "valid") + "' list");
  }
  DatasetSplit out;
  out.class_names = d.class_names;
  const std::string text = read_text_file(list);
  for (const auto& entry : parse_names(text)) {
    fs::path image(entry);
    if (image.is_relative()) image = list.parent_path() / image;
    const fs::path label = label_path_for(image);
    if (!fs::exists(label)) {
      throw FormatError("missing label file '" + label.string() + "'");
    }
    LabeledImage item{image, {}};
    try {
      item.objects = parse_label_file(read_text_file(label));
    } catch (const FormatError& e) {
      throw FormatError(label.string() + ": " + e.what());
    }
    for (const auto& gt : item.objects) {
      if (gt.class_id >= d.classes) {
        throw FormatError(label.string() + ": class id " + std::to_string(gt.class_id) +
                          " >= classes " + std::to_string(d.classes));
      }
      if (gt.degenerate()) {
        out.warnings.push_back(label.string() + ": zero-size box kept (it can never match)");
      }
    }
    out.images.push_back(std::move(item));
  }
  return out;
}

}  // namespace yolo_assist
