#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bws/features/color.hpp"
#include "bws/features/config.hpp"
#include "bws/imaging/image.hpp"

namespace bws::features {

/// A feature block. `degenerate` marks an all-zero block emitted when no
/// sample was usable (it is then not normalised).
struct HistogramBlock {
  std::vector<double> values;
  bool degenerate = false;
};

/// Bin index of v in [lo, hi] split into `bins` cells of width `width`;
/// out-of-range values clamp to the end bins, the top edge is closed.
std::size_t clamped_bin(double v, double lo, double width, std::size_t bins);

/// Three per-channel Lab histograms concatenated, each L1-normalised.
/// Throws ContractError on empty input.
std::vector<double> lab_histogram(std::span<const LabPixel> pixels, const FeatureConfig& cfg);

/// Rotation-invariant uniform LBP code (0..P+1) of pixel (x, y), or -1 when
/// a neighbour falls outside the image.
int lbp_riu2_code(const imaging::GrayImage& gray, int x, int y, const LbpVariant& variant);

/// Concatenated riu2 histograms for every configured variant, each
/// L1-normalised. A variant with no usable pixel gives a zero block and
/// sets `degenerate`.
HistogramBlock lbp_histogram(const imaging::GrayImage& gray, std::span<const std::uint32_t> pixels,
                             const FeatureConfig& cfg);

}  // namespace bws::features
