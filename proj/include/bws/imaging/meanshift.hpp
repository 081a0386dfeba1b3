#pragma once

#include "bws/imaging/image.hpp"
#include "bws/imaging/regions.hpp"

namespace bws::imaging {

struct MeanShiftParams {
  double spatial_bandwidth = 7.0;  ///< pixels
  double range_bandwidth = 6.5;    ///< CIE Lab units
  double min_region_area = 0.01;   ///< fraction of the image area
  int max_iterations = 100;
  double convergence = 0.01;       ///< mode shift, in bandwidth-normalised units
  int threads = 1;

  void validate() const;
};

struct LabPlanes {
  int width = 0;
  int height = 0;
  std::vector<float> L, a, b;
};

LabPlanes to_lab_planes(const ImageRGB& image);

/// Joint spatial-range mean-shift filtering with flat kernels: each pixel
/// climbs to the mean of the pixels within h_s (spatially) and h_r (in Lab).
/// Returns the converged Lab mode of every pixel.
LabPlanes meanshift_filter(const LabPlanes& lab, const MeanShiftParams& params);

/// Mean-shift segmentation: filtering, fusion of adjacent pixels whose
/// modes are within (h_s, h_r), and merging of regions smaller than the
/// minimum area into the adjacent region with the closest Lab mode.
RegionMap meanshift_segment(const ImageRGB& image, const MeanShiftParams& params);

}  // namespace bws::imaging
