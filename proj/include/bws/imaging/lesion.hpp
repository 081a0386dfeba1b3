#pragma once

#include <array>
#include <cstdint>

#include "bws/imaging/image.hpp"

namespace bws::imaging {

using GrayHistogram = std::array<std::uint64_t, 256>;

GrayHistogram gray_histogram(const GrayImage& gray);

/// Otsu's threshold: the t maximising the between-class variance of the
/// split {<= t} | {> t}. Ties go to the smallest t; a histogram with a
/// single populated level returns 0.
int otsu_threshold(const GrayHistogram& hist);

/// Between-class variance for threshold t (0 when either class is empty).
double between_class_variance(const GrayHistogram& hist, int t);

struct LesionMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> inside;  // 0/1 per pixel
  std::size_t lesion_area = 0;

  bool at(int x, int y) const { return inside[static_cast<std::size_t>(y) * width + x] != 0; }
  bool at(std::size_t i) const { return inside[i] != 0; }
};

LesionMask make_mask(int width, int height, std::vector<std::uint8_t> inside);

/// Dark Otsu class, reduced to its largest 8-connected component (lowest
/// label on ties) with holes filled. Throws EmptyLesionError on images
/// with no gray-level contrast.
LesionMask lesion_mask(const ImageRGB& image);

/// Largest 8-connected component of a binary mask (ties: first in raster order).
std::vector<std::uint8_t> largest_component(int width, int height, const std::vector<std::uint8_t>& fg);

/// Sets every background pixel not 4-connected to the border.
std::vector<std::uint8_t> fill_holes(int width, int height, std::vector<std::uint8_t> fg);

}  // namespace bws::imaging
