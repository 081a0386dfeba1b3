#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bws/features/color.hpp"
#include "bws/features/config.hpp"
#include "bws/features/mr8.hpp"
#include "bws/imaging/lesion.hpp"
#include "bws/imaging/meanshift.hpp"
#include "bws/imaging/regions.hpp"
#include "bws/mil/types.hpp"

namespace bws::features {

/// Per-image data shared by all of its regions.
struct PreparedImage {
  int width = 0;
  int height = 0;
  std::vector<LabPixel> lab;
  imaging::GrayImage gray;
  Mr8Responses mr8;  ///< empty when texture is disabled
};

PreparedImage prepare_image(const imaging::ImageRGB& image, const FeatureConfig& cfg);

struct RegionFeatures {
  mil::Instance instance;
  bool degenerate = false;  ///< some texture block had no usable pixel
};

/// [lab | lbp | mr8] for the enabled families.
RegionFeatures region_feature_vector(const PreparedImage& image, const imaging::Region& region,
                                     const FeatureConfig& cfg);

enum class Segmentation { MeanShift, Grid };

std::string to_string(Segmentation mode);
/// "meanshift" | "grid"; throws ConfigError.
Segmentation segmentation_from_string(const std::string& name);

struct ExtractionOptions {
  Segmentation mode = Segmentation::MeanShift;
  imaging::MeanShiftParams meanshift;
  int grid_cell = 32;
  int threads = 1;
};

struct BagExtraction {
  mil::Bag bag;
  imaging::LesionMask mask;
  imaging::RegionMap regions;  ///< after filter_regions
  std::vector<std::string> warnings;
};

/// lesion mask, regions, one instance per in-lesion region (ascending id).
/// Throws EmptyBagError (naming the bag) when no region survives or no
/// lesion is found.
BagExtraction bag_from_image(const imaging::ImageRGB& image, std::optional<mil::Label> label,
                             const FeatureConfig& cfg, const ExtractionOptions& options,
                             const std::string& bag_id = {});

}  // namespace bws::features
