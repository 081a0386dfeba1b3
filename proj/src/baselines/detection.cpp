#include "bws/baselines/detection.hpp"

#include "bws/error.hpp"

namespace bws::baselines {

DetectionMask mask_from_regions(const imaging::RegionMap& regions, const std::vector<int>& region_ids) {
  DetectionMask mask(regions.width, regions.height);
  for (int id : region_ids) {
    const imaging::Region* r = regions.find(id);
    if (!r) throw ContractError("unknown region id " + std::to_string(id));
    for (std::uint32_t p : r->pixels) mask.mark(p);
  }
  return mask;
}

imaging::ImageRGB red_overlay(const imaging::ImageRGB& image, const DetectionMask& mask) {
  if (image.width != mask.width || image.height != mask.height)
    throw ContractError("overlay mask does not match image dimensions");
  imaging::ImageRGB out = image;
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    if (!mask.at(i)) continue;
    const imaging::Rgb c = out.at(i);
    out.set(i, {static_cast<std::uint8_t>((c.r + 256) / 2), static_cast<std::uint8_t>(c.g / 2),
                static_cast<std::uint8_t>(c.b / 2)});
  }
  return out;
}

}  // namespace bws::baselines
