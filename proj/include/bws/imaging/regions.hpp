#pragma once

#include <cstdint>
#include <vector>

#include "bws/imaging/image.hpp"
#include "bws/imaging/lesion.hpp"

namespace bws::imaging {

struct Region {
  int id = 0;
  std::vector<std::uint32_t> pixels;  // linear indices, ascending
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  bool in_lesion = true;

  std::size_t area() const { return pixels.size(); }
};

/// Per-pixel region ids (0 = excluded) plus the regions themselves,
/// ordered by ascending id 1..R.
struct RegionMap {
  int width = 0;
  int height = 0;
  std::vector<int> region_id;
  std::vector<Region> regions;

  const Region* find(int id) const;
};

/// Builds regions from a label plane. Labels <= 0 are excluded; positive
/// labels are renumbered 1..R in raster order of their first pixel.
RegionMap region_map_from_labels(int width, int height, const std::vector<int>& labels);

/// Tiles the lesion bounding box with cell x cell windows (clipped at the
/// image edge) and keeps windows at least half covered by the lesion.
RegionMap grid_regions(const ImageRGB& image, const LesionMask& mask, int cell);

/// Marks a region in_lesion iff at least half of its pixels lie inside the mask.
RegionMap filter_regions(RegionMap regions, const LesionMask& mask);

Plane<std::uint16_t> label_plane(const RegionMap& regions);
Plane<std::uint16_t> mask_plane(const LesionMask& mask);

}  // namespace bws::imaging
