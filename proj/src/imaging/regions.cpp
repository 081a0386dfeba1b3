#include "bws/imaging/regions.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace bws::imaging {

const Region* RegionMap::find(int id) const {
  if (id < 1 || id > static_cast<int>(regions.size())) return nullptr;
  const Region& r = regions[static_cast<std::size_t>(id) - 1];
  return r.id == id ? &r : nullptr;
}

RegionMap region_map_from_labels(int width, int height, const std::vector<int>& labels) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  require(width >= 1 && height >= 1, "region map dimensions must be positive");
  require(labels.size() == n, "label plane size does not match dimensions");
  RegionMap map;
  map.width = width;
  map.height = height;
  map.region_id.assign(n, 0);
  std::unordered_map<int, int> renumber;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] <= 0) continue;
    auto [it, inserted] = renumber.try_emplace(labels[i], static_cast<int>(map.regions.size()) + 1);
    if (inserted) {
      Region r;
      r.id = it->second;
      map.regions.push_back(std::move(r));
    }
    map.region_id[i] = it->second;
    map.regions[static_cast<std::size_t>(it->second) - 1].pixels.push_back(static_cast<std::uint32_t>(i));
  }
  for (Region& r : map.regions) {
    double sx = 0.0, sy = 0.0;
    for (std::uint32_t p : r.pixels) {
      sx += p % width;
      sy += p / width;
    }
    r.centroid_x = sx / static_cast<double>(r.area());
    r.centroid_y = sy / static_cast<double>(r.area());
  }
  return map;
}

RegionMap grid_regions(const ImageRGB& image, const LesionMask& mask, int cell) {
  require(cell >= 4, "grid cell must be at least 4 pixels");
  require(image.width == mask.width && image.height == mask.height, "mask does not match image");
  require(mask.lesion_area > 0, "grid regions need a non-empty lesion mask");
  int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
  std::vector<int> labels(static_cast<std::size_t>(mask.width) * mask.height, 0);
  int next = 1;
  for (int wy = y0; wy <= y1; wy += cell)
    for (int wx = x0; wx <= x1; wx += cell) {
      const int ex = std::min(wx + cell, mask.width), ey = std::min(wy + cell, mask.height);
      std::size_t inside = 0;
      for (int y = wy; y < ey; ++y)
        for (int x = wx; x < ex; ++x) inside += mask.at(x, y);
      const std::size_t area = static_cast<std::size_t>(ex - wx) * (ey - wy);
      if (2 * inside < area) continue;
      for (int y = wy; y < ey; ++y)
        for (int x = wx; x < ex; ++x) labels[static_cast<std::size_t>(y) * mask.width + x] = next;
      ++next;
    }
  return region_map_from_labels(mask.width, mask.height, labels);
}

RegionMap filter_regions(RegionMap regions, const LesionMask& mask) {
  if (regions.width != mask.width || regions.height != mask.height)
    throw ContractError("region map and lesion mask dimensions differ");
  for (Region& r : regions.regions) {
    std::size_t inside = 0;
    for (std::uint32_t p : r.pixels) inside += mask.at(static_cast<std::size_t>(p));
    r.in_lesion = 2 * inside >= r.area();
  }
  return regions;
}

Plane<std::uint16_t> label_plane(const RegionMap& regions) {
  require(regions.regions.size() <= std::numeric_limits<std::uint16_t>::max(), "too many regions for a 16-bit label image");
  Plane<std::uint16_t> plane(regions.width, regions.height);
  for (std::size_t i = 0; i < plane.size(); ++i) plane.data[i] = static_cast<std::uint16_t>(regions.region_id[i]);
  return plane;
}

Plane<std::uint16_t> mask_plane(const LesionMask& mask) {
  Plane<std::uint16_t> plane(mask.width, mask.height);
  for (std::size_t i = 0; i < plane.size(); ++i) plane.data[i] = mask.inside[i] ? 1 : 0;
  return plane;
}

}  // namespace bws::imaging
