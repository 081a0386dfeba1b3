#pragma once

#include <cstdint>
#include <vector>

#include "bws/imaging/image.hpp"
#include "bws/imaging/regions.hpp"

namespace bws::baselines {

struct DetectionMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> positive;  // 0/1 per pixel
  std::size_t positive_count = 0;

  DetectionMask() = default;
  DetectionMask(int w, int h) : width(w), height(h), positive(static_cast<std::size_t>(w) * h, 0) {}

  bool at(std::size_t i) const { return positive[i] != 0; }
  void mark(std::size_t i) {
    if (!positive[i]) {
      positive[i] = 1;
      ++positive_count;
    }
  }
};

/// Marks every pixel of the given regions.
DetectionMask mask_from_regions(const imaging::RegionMap& regions, const std::vector<int>& region_ids);

/// Copy of the image with detected pixels blended halfway towards pure red.
imaging::ImageRGB red_overlay(const imaging::ImageRGB& image, const DetectionMask& mask);

}  // namespace bws::baselines
