#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bws/features/config.hpp"
#include "bws/features/histograms.hpp"
#include "bws/imaging/image.hpp"

namespace bws::features {

inline constexpr int kMr8Support = 49;

/// A square filter kernel, row-major, kMr8Support x kMr8Support. Row 0 is the
/// top of the kernel (positive y).
struct Kernel {
  std::vector<double> taps;
  double at(int x, int y) const { return taps[static_cast<std::size_t>(y) * kMr8Support + x]; }
};

/// The 38-filter root bank: 18 edge filters (3 scales x 6 orientations), 18
/// bar filters, then a Gaussian and a Laplacian of Gaussian. Edge and bar
/// filters are zero-mean with unit L1 norm.
std::vector<Kernel> mr8_filter_bank();

/// Eight response planes: max-over-orientation response magnitudes of the
/// edge filters at scales 1, 2, 4, then of the bar filters at the same
/// scales, then the Gaussian and LoG responses.
struct Mr8Responses {
  int width = 0;
  int height = 0;
  std::array<std::vector<float>, 8> planes;
  bool degenerate = false;  ///< constant image; every response is zero
};

/// Throws DataError when the image is smaller than the filter support.
Mr8Responses mr8_responses(const imaging::GrayImage& gray, const FeatureConfig& cfg);

/// Per-channel clipped histograms, each L1-normalised. Empty region throws.
HistogramBlock mr8_histogram(const Mr8Responses& responses, std::span<const std::uint32_t> pixels,
                             const FeatureConfig& cfg);

}  // namespace bws::features
