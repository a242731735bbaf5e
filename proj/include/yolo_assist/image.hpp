#pragma once

// 8-bit RGB images: PPM (P3/P6) always, PNG when built with libpng.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "yolo_assist/error.hpp"
#include "yolo_assist/weights_io.hpp"

#ifdef YOLO_ASSIST_HAVE_PNG
#include <png.h>
#endif

namespace yolo_assist {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // RGB interleaved, row-major

  Image() = default;
  Image(int w, int h, Rgb fill = {}) : width(w), height(h) {
    if (w < 1 || h < 1) throw ShapeError("image dims must be >= 1");
    pixels.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
      pixels[i] = fill.r;
      pixels[i + 1] = fill.g;
      pixels[i + 2] = fill.b;
    }
  }

  [[nodiscard]] std::uint8_t at(int x, int y, int channel) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }
  void set(int x, int y, Rgb c) {
    auto* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
  friend bool operator==(const Image&, const Image&) = default;
};

namespace image_detail {

// Reads whitespace-separated PPM header tokens, skipping '#' comments.
class PnmTokens {
 public:
  explicit PnmTokens(std::span<const std::uint8_t> b) : bytes_(b) {}

  int next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw FormatError("ppm: malformed header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000) throw FormatError("ppm: header value too large");
    }
    return static_cast<int>(value);
  }
  void skip_one_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("ppm: missing separator before raster");
    }
    ++pos_;
  }
  [[nodiscard]] std::size_t pos() const { return pos_; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline bool ends_with(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == b;
  });
}

}  // namespace image_detail

inline Image decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '6' && bytes[1] != '3')) {
    throw FormatError("not a P3/P6 ppm image");
  }
  const bool binary = bytes[1] == '6';
  image_detail::PnmTokens tok(bytes.subspan(2));
  const int w = tok.next_int();
  const int h = tok.next_int();
  const int maxval = tok.next_int();
  if (w < 1 || h < 1) throw FormatError("ppm: zero-sized image");
  if (maxval < 1 || maxval > 255) throw FormatError("ppm: only 8-bit images are supported");
  Image img(w, h);
  const std::size_t n = img.pixels.size();
  if (binary) {
    tok.skip_one_space();
    const std::size_t start = 2 + tok.pos();
    if (bytes.size() - start < n) throw FormatError("ppm: truncated raster");
    for (std::size_t i = 0; i < n; ++i) {
      img.pixels[i] = static_cast<std::uint8_t>(bytes[start + i] * 255 / maxval);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const int v = tok.next_int();
      if (v > maxval) throw FormatError("ppm: sample exceeds maxval");
      img.pixels[i] = static_cast<std::uint8_t>(v * 255 / maxval);
    }
  }
  return img;
}

inline Bytes encode_ppm(const Image& img) {
  const std::string header = "P6\n" + std::to_string(img.width) + " " +
                             std::to_string(img.height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

inline bool png_supported() {
#ifdef YOLO_ASSIST_HAVE_PNG
  return true;
#else
  return false;
#endif
}

inline bool is_png(std::span<const std::uint8_t> bytes) {
  static constexpr std::array<std::uint8_t, 8> kSig{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return bytes.size() >= kSig.size() && std::equal(kSig.begin(), kSig.end(), bytes.begin());
}

#ifdef YOLO_ASSIST_HAVE_PNG
inline Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw FormatError(std::string("png: ") + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    png_image_free(&png);
    throw FormatError(std::string("png: ") + png.message);
  }
  return img;
}
#endif

inline Image decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) {
#ifdef YOLO_ASSIST_HAVE_PNG
    return decode_png(bytes);
#else
    throw FormatError("png support not compiled in; convert to ppm");
#endif
  }
  return decode_ppm(bytes);
}

inline Image load_image(const std::string& path) {
  const Bytes bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void save_image(const std::string& path, const Image& img) {
  if (image_detail::ends_with(path, ".png")) {
#ifdef YOLO_ASSIST_HAVE_PNG
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width);
    png.height = static_cast<png_uint_32>(img.height);
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
      throw FormatError("png: cannot write '" + path + "'");
    }
    return;
#else
    throw FormatError("png support not compiled in; write .ppm instead");
#endif
  }
  write_file_bytes(path, encode_ppm(img));
}

// Deterministic per-class color: splitmix64 over (seed, class id).
inline Rgb class_color(int class_id, std::uint64_t seed) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(class_id + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  // Keep channels away from black so boxes stay visible.
  return {static_cast<std::uint8_t>(64 + (z & 0xFF) % 192),
          static_cast<std::uint8_t>(64 + ((z >> 8) & 0xFF) % 192),
          static_cast<std::uint8_t>(64 + ((z >> 16) & 0xFF) % 192)};
}

// Outline a rectangle given in pixel coordinates; clipped to the image.
inline void draw_rect(Image& img, float x_min, float y_min, float x_max, float y_max,
                      Rgb color, int thickness = 2) {
  auto clampi = [](float v, int hi) {
    return std::clamp(static_cast<int>(v), 0, hi);
  };
  const int x0 = clampi(x_min, img.width - 1);
  const int x1 = clampi(x_max, img.width - 1);
  const int y0 = clampi(y_min, img.height - 1);
  const int y1 = clampi(y_max, img.height - 1);
  for (int t = 0; t < thickness; ++t) {
    for (int x = x0; x <= x1; ++x) {
      img.set(x, std::min(y0 + t, img.height - 1), color);
      img.set(x, std::max(y1 - t, 0), color);
    }
    for (int y = y0; y <= y1; ++y) {
      img.set(std::min(x0 + t, img.width - 1), y, color);
      img.set(std::max(x1 - t, 0), y, color);
    }
  }
}

}  // namespace yolo_assist
