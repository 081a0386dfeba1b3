#include "bws/baselines/celebi.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "bws/error.hpp"

namespace bws::baselines {

bool is_healthy_skin(imaging::Rgb c) { return c.r > 90 && c.r > c.b && c.r > c.g; }

bool celebi_pixel_is_bws(imaging::Rgb c, double mean_red) {
  const int sum = c.r + c.g + c.b;
  if (sum == 0) return false;
  if (10 * c.b < 3 * sum) return false;
  const double relative_red = static_cast<double>(c.r) - mean_red;
  return relative_red >= -194.0 && relative_red < -51.0;
}

std::vector<std::uint8_t> skin_band(const imaging::LesionMask& mask) {
  const int w = mask.width, h = mask.height;
  std::vector<std::uint8_t> band(mask.inside.size(), 0);
  if (mask.lesion_area == 0) return band;
  std::size_t perimeter = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1 || !mask.at(x - 1, y) || !mask.at(x + 1, y) ||
                        !mask.at(x, y - 1) || !mask.at(x, y + 1);
      perimeter += edge ? 1 : 0;
    }
  const double ratio = static_cast<double>(mask.lesion_area) / static_cast<double>(perimeter);
  const double inner = 0.1 * ratio, outer = inner + 0.2 * ratio;

  // distanceTransform measures the distance to the nearest zero pixel.
  cv::Mat outside(h, w, CV_8U);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) outside.at<std::uint8_t>(y, x) = mask.at(x, y) ? 0 : 255;
  cv::Mat dist;
  cv::distanceTransform(outside, dist, cv::DIST_L2, cv::DIST_MASK_PRECISE, CV_32F);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = dist.at<float>(y, x);
      if (d > inner && d <= outer) band[static_cast<std::size_t>(y) * w + x] = 1;
    }
  return band;
}

std::optional<SkinStats> skin_stats(const imaging::ImageRGB& image, const imaging::LesionMask& mask) {
  if (image.width != mask.width || image.height != mask.height)
    throw ContractError("lesion mask does not match image dimensions");
  const auto band = skin_band(mask);
  std::uint64_t sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < band.size(); ++i) {
    if (!band[i]) continue;
    const imaging::Rgb c = image.at(i);
    if (!is_healthy_skin(c)) continue;
    sum += c.r;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return SkinStats{static_cast<double>(sum) / static_cast<double>(count), count};
}

DetectionMask celebi_classify(const imaging::ImageRGB& image, const SkinStats& stats) {
  DetectionMask out(image.width, image.height);
  for (std::size_t i = 0; i < image.pixel_count(); ++i)
    if (celebi_pixel_is_bws(image.at(i), stats.mean_red)) out.mark(i);
  return out;
}

CelebiResult celebi_detect(const imaging::ImageRGB& image, const imaging::LesionMask& mask) {
  CelebiResult out;
  out.stats = skin_stats(image, mask);
  if (!out.stats) {
    out.mask = DetectionMask(image.width, image.height);
    out.warnings.push_back("no healthy skin pixels around the lesion; detector abstained");
    return out;
  }
  out.mask = celebi_classify(image, *out.stats);
  return out;
}

}  // namespace bws::baselines
