#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bws/baselines/detection.hpp"
#include "bws/imaging/lesion.hpp"

namespace bws::baselines {

struct SkinStats {
  double mean_red = 0.0;
  std::size_t healthy_pixel_count = 0;
};

/// R > 90 and R > B and R > G.
bool is_healthy_skin(imaging::Rgb c);

/// nB = B / (R + G + B) >= 0.3 (evaluated in integers) and
/// -194 <= R - mean_red < -51. Black pixels have no defined nB and fail.
bool celebi_pixel_is_bws(imaging::Rgb c, double mean_red);

/// Outside-lesion band used for the skin estimate: pixels whose distance to
/// the lesion lies in (r1, r1 + r2] with r1 = 0.1 A/P and r2 = 0.2 A/P
/// (A lesion area, P boundary pixel count).
std::vector<std::uint8_t> skin_band(const imaging::LesionMask& mask);

/// Mean red over healthy-skin pixels of the band; nullopt when there are none.
std::optional<SkinStats> skin_stats(const imaging::ImageRGB& image, const imaging::LesionMask& mask);

/// Classifies every pixel with the given skin statistics.
DetectionMask celebi_classify(const imaging::ImageRGB& image, const SkinStats& stats);

struct CelebiResult {
  DetectionMask mask;
  std::optional<SkinStats> stats;
  std::vector<std::string> warnings;  ///< non-empty when the detector abstained
};

/// Estimates skin statistics from the band around the lesion and classifies
/// every pixel. With no healthy pixel the detector abstains (empty mask).
CelebiResult celebi_detect(const imaging::ImageRGB& image, const imaging::LesionMask& mask);

}  // namespace bws::baselines
