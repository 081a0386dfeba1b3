#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bws/baselines/detection.hpp"
#include "bws/features/color.hpp"
#include "bws/imaging/regions.hpp"

namespace bws::baselines {

/// One entry of the colour lookup table (e.g. a Munsell chip).
struct ColorPatch {
  std::string id;
  features::LabPixel lab;
};

struct PalettePatch {
  std::string id;
  features::LabPixel lab;
  bool is_bws = true;
};

struct Palette {
  std::vector<PalettePatch> patches;
  double match_threshold = 10.0;
};

struct AnnotatedPixel {
  features::LabPixel lab;
  bool is_bws = false;
};

struct NearestPatch {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Exhaustive Euclidean nearest neighbour in Lab; the lowest index wins
/// ties. Throws ContractError on an empty list.
NearestPatch nearest_patch(const std::vector<ColorPatch>& table, const features::LabPixel& q);
NearestPatch nearest_patch(const Palette& palette, const features::LabPixel& q);

/// Maps annotated pixels to their nearest table patch, keeps the most
/// frequent BWS patches up to 98% cumulative BWS frequency (ties: lower
/// table index first), then drops any kept patch that a non-BWS pixel also
/// maps to. Throws DataError if no BWS patch survives.
Palette palette_build(const std::vector<AnnotatedPixel>& pixels, const std::vector<ColorPatch>& table,
                      double match_threshold = 10.0);

/// Marks every region whose mean Lab colour is within match_threshold of
/// its nearest palette patch, when that patch is a BWS patch.
DetectionMask palette_detect(const imaging::ImageRGB& image, const imaging::RegionMap& regions,
                             const Palette& palette);

/// CSV with header `id,L,a,b`.
std::vector<ColorPatch> load_color_table(const std::filesystem::path& path);
/// CSV with header `L,a,b,is_bws` (is_bws 0/1).
std::vector<AnnotatedPixel> load_annotations(const std::filesystem::path& path);

/// {version, match_threshold, patches: [{id, L, a, b, is_bws}]}
std::string palette_to_json(const Palette& palette);
Palette palette_from_json(const std::string& text);
void save_palette(const std::filesystem::path& path, const Palette& palette);
/// A missing file is a ConfigError.
Palette load_palette(const std::filesystem::path& path);

}  // namespace bws::baselines
