#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bws/error.hpp"

namespace bws::imaging {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major single-channel plane.
template <typename T>
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Plane() = default;
  Plane(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  T& at(int x, int y) { return data[index(x, y)]; }
  const T& at(int x, int y) const { return data[index(x, y)]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
};

using GrayImage = Plane<std::uint8_t>;

/// 8-bit sRGB image, row-major RGB triples.
struct ImageRGB {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  ImageRGB() = default;
  ImageRGB(int w, int h, Rgb fill = {});

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  Rgb at(int x, int y) const { return at(static_cast<std::size_t>(y) * width + x); }
  Rgb at(std::size_t i) const { return {pixels[3 * i], pixels[3 * i + 1], pixels[3 * i + 2]}; }
  void set(int x, int y, Rgb c) { set(static_cast<std::size_t>(y) * width + x, c); }
  void set(std::size_t i, Rgb c) {
    pixels[3 * i] = c.r;
    pixels[3 * i + 1] = c.g;
    pixels[3 * i + 2] = c.b;
  }
};

/// Decodes PNG or JPEG. Gray and gray+alpha inputs are expanded to RGB,
/// alpha is dropped, and 16-bit samples keep only their high byte.
ImageRGB load_image(const std::filesystem::path& path);

void save_png(const std::filesystem::path& path, const ImageRGB& image);
/// 16-bit single-channel PNG (region ids, 0 = excluded).
void save_label_png(const std::filesystem::path& path, const Plane<std::uint16_t>& labels);
Plane<std::uint16_t> load_label_png(const std::filesystem::path& path);

/// round(0.299 R + 0.587 G + 0.114 B).
std::uint8_t luma(Rgb c);
GrayImage to_gray(const ImageRGB& image);

}  // namespace bws::imaging
