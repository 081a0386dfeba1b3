#include "bws/features/mr8.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "bws/error.hpp"

namespace bws::features {

namespace {

constexpr int kHalf = (kMr8Support - 1) / 2;

double gauss1d(double sigma, double x, int order) {
  const double variance = sigma * sigma;
  const double g = std::exp(-x * x / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
  switch (order) {
    case 1:
      return -g * x / variance;
    case 2:
      return g * (x * x - variance) / (variance * variance);
    default:
      return g;
  }
}

void zero_mean_unit_l1(Kernel& k) {
  double mean = 0.0;
  for (double v : k.taps) mean += v;
  mean /= static_cast<double>(k.taps.size());
  double l1 = 0.0;
  for (double& v : k.taps) {
    v -= mean;
    l1 += std::abs(v);
  }
  for (double& v : k.taps) v /= l1;
}

// Elongated derivative filter: sigma 3s along the (rotated) x axis,
// derivative of the given order with sigma s along y.
Kernel oriented(double scale, int order, double angle) {
  Kernel k;
  k.taps.resize(kMr8Support * kMr8Support);
  const double c = std::cos(angle), s = std::sin(angle);
  for (int row = 0; row < kMr8Support; ++row)
    for (int col = 0; col < kMr8Support; ++col) {
      const double x = col - kHalf, y = kHalf - row;
      const double rx = c * x - s * y, ry = s * x + c * y;
      k.taps[static_cast<std::size_t>(row) * kMr8Support + col] = gauss1d(3.0 * scale, rx, 0) * gauss1d(scale, ry, order);
    }
  zero_mean_unit_l1(k);
  return k;
}

Kernel isotropic(bool laplacian) {
  constexpr double sigma = 10.0;
  Kernel k;
  k.taps.resize(kMr8Support * kMr8Support);
  for (int row = 0; row < kMr8Support; ++row)
    for (int col = 0; col < kMr8Support; ++col) {
      const double x = col - kHalf, y = kHalf - row;
      const double r2 = x * x + y * y;
      const double g = std::exp(-r2 / (2.0 * sigma * sigma));
      k.taps[static_cast<std::size_t>(row) * kMr8Support + col] =
          laplacian ? g * (r2 - 2.0 * sigma * sigma) / std::pow(sigma, 4) : g;
    }
  if (laplacian) {
    zero_mean_unit_l1(k);
  } else {
    // Smoothing filter: unit sum, no mean removal.
    double sum = 0.0;
    for (double v : k.taps) sum += v;
    for (double& v : k.taps) v /= sum;
  }
  return k;
}

constexpr double kScales[3] = {1.0, 2.0, 4.0};
constexpr int kOrientations = 6;

}  // namespace

std::vector<Kernel> mr8_filter_bank() {
  std::vector<Kernel> bank;
  bank.reserve(38);
  for (int order : {1, 2})
    for (double scale : kScales)
      for (int o = 0; o < kOrientations; ++o)
        bank.push_back(oriented(scale, order, std::numbers::pi * o / kOrientations));
  bank.push_back(isotropic(false));
  bank.push_back(isotropic(true));
  return bank;
}

Mr8Responses mr8_responses(const imaging::GrayImage& gray, const FeatureConfig& cfg) {
  if (gray.width < kMr8Support || gray.height < kMr8Support)
    throw DataError("texture filters need an image of at least " + std::to_string(kMr8Support) + "x" +
                    std::to_string(kMr8Support) + " pixels, got " + std::to_string(gray.width) + "x" +
                    std::to_string(gray.height));
  Mr8Responses out;
  out.width = gray.width;
  out.height = gray.height;
  const std::size_t n = gray.size();

  double mean = 0.0;
  for (std::uint8_t v : gray.data) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::uint8_t v : gray.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (var < 1e-12) {
    out.degenerate = true;
    for (auto& p : out.planes) p.assign(n, 0.0f);
    return out;
  }
  const double sd = std::sqrt(var);
  cv::Mat image(gray.height, gray.width, CV_32F);
  for (int y = 0; y < gray.height; ++y)
    for (int x = 0; x < gray.width; ++x) image.at<float>(y, x) = static_cast<float>((gray.at(x, y) - mean) / sd);

  const std::vector<Kernel> bank = mr8_filter_bank();
  auto respond = [&](const Kernel& k) {
    // filter2D correlates; flipping the kernel gives a true convolution.
    cv::Mat kernel(kMr8Support, kMr8Support, CV_32F);
    for (int r = 0; r < kMr8Support; ++r)
      for (int c = 0; c < kMr8Support; ++c)
        kernel.at<float>(kMr8Support - 1 - r, kMr8Support - 1 - c) = static_cast<float>(k.at(c, r));
    cv::Mat response;
    cv::filter2D(image, response, CV_32F, kernel, cv::Point(-1, -1), 0.0, cv::BORDER_REFLECT);
    return response;
  };

  std::array<cv::Mat, 8> raw;
  for (int family = 0; family < 2; ++family)
    for (int s = 0; s < 3; ++s) {
      cv::Mat best;
      for (int o = 0; o < kOrientations; ++o) {
        // Magnitude: the odd edge filters only span [0, pi), so a signed max
        // would depend on which way an edge faces.
        cv::Mat r = cv::abs(respond(bank[static_cast<std::size_t>((family * 3 + s) * kOrientations + o)]));
        best = o == 0 ? r : cv::max(best, r);
      }
      raw[static_cast<std::size_t>(family * 3 + s)] = best;
    }
  raw[6] = respond(bank[36]);
  raw[7] = respond(bank[37]);

  const double c = cfg.mr8_weber;
  for (std::size_t ch = 0; ch < 8; ++ch) {
    auto& plane = out.planes[ch];
    plane.resize(n);
    const cv::Mat& r = raw[ch];
    for (int y = 0; y < gray.height; ++y)
      for (int x = 0; x < gray.width; ++x) {
        const double v = r.at<float>(y, x);
        const double mag = std::abs(v);
        plane[static_cast<std::size_t>(y) * gray.width + x] =
            mag > 0.0 ? static_cast<float>(v * std::log1p(mag / c) / mag) : 0.0f;
      }
  }
  return out;
}

HistogramBlock mr8_histogram(const Mr8Responses& responses, std::span<const std::uint32_t> pixels,
                             const FeatureConfig& cfg) {
  if (pixels.empty()) throw ContractError("texture histogram of an empty region");
  const auto bins = static_cast<std::size_t>(cfg.mr8_bins);
  const double width = 2.0 * cfg.mr8_clip / static_cast<double>(bins);
  HistogramBlock out;
  out.values.assign(8 * bins, 0.0);
  out.degenerate = responses.degenerate;
  for (std::size_t ch = 0; ch < 8; ++ch) {
    const auto& plane = responses.planes[ch];
    double* block = out.values.data() + ch * bins;
    for (std::uint32_t p : pixels) {
      const double v = std::clamp(static_cast<double>(plane[p]), -cfg.mr8_clip, cfg.mr8_clip);
      block[clamped_bin(v, -cfg.mr8_clip, width, bins)] += 1.0;
    }
    const double total = static_cast<double>(pixels.size());
    for (std::size_t b = 0; b < bins; ++b) block[b] /= total;
  }
  return out;
}

}  // namespace bws::features
