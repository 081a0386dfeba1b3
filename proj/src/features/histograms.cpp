#include "bws/features/histograms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bws/error.hpp"

namespace bws::features {

std::size_t clamped_bin(double v, double lo, double width, std::size_t bins) {
  const double pos = std::floor((v - lo) / width);
  if (!(pos > 0.0)) return 0;  // also catches NaN
  if (pos >= static_cast<double>(bins)) return bins - 1;
  return static_cast<std::size_t>(pos);
}

namespace {

void normalise(std::span<double> block) {
  double total = 0.0;
  for (double v : block) total += v;
  if (total > 0.0)
    for (double& v : block) v /= total;
}

}  // namespace

std::vector<double> lab_histogram(std::span<const LabPixel> pixels, const FeatureConfig& cfg) {
  if (pixels.empty()) throw ContractError("lab histogram of an empty region");
  const std::size_t nL = cfg.lab_channel_bins(cfg.L_range);
  const std::size_t na = cfg.lab_channel_bins(cfg.a_range);
  const std::size_t nb = cfg.lab_channel_bins(cfg.b_range);
  std::vector<double> hist(nL + na + nb, 0.0);
  const double w = cfg.lab_bin_size;
  for (const LabPixel& p : pixels) {
    hist[clamped_bin(p.L, cfg.L_range.lo, w, nL)] += 1.0;
    hist[nL + clamped_bin(p.a, cfg.a_range.lo, w, na)] += 1.0;
    hist[nL + na + clamped_bin(p.b, cfg.b_range.lo, w, nb)] += 1.0;
  }
  std::span<double> all(hist);
  normalise(all.subspan(0, nL));
  normalise(all.subspan(nL, na));
  normalise(all.subspan(nL + na, nb));
  return hist;
}

namespace {

// Coordinates within this distance of an integer are snapped, so cos/sin
// rounding does not turn an exact grid sample into an interpolated one.
double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-6 ? r : v;
}

}  // namespace

int lbp_riu2_code(const imaging::GrayImage& gray, int x, int y, const LbpVariant& variant) {
  const int P = variant.points;
  const double R = variant.radius;
  const double centre = gray.at(x, y);
  int ones = 0, transitions = 0, first = -1, prev = -1;
  for (int p = 0; p < P; ++p) {
    const double angle = 2.0 * std::numbers::pi * p / P;
    const double sx = snap(x + R * std::cos(angle));
    const double sy = snap(y - R * std::sin(angle));
    if (sx < 0.0 || sy < 0.0 || sx > gray.width - 1 || sy > gray.height - 1) return -1;
    const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
    const int x1 = std::min(x0 + 1, gray.width - 1), y1 = std::min(y0 + 1, gray.height - 1);
    const double fx = sx - x0, fy = sy - y0;
    const double value = (1 - fx) * (1 - fy) * gray.at(x0, y0) + fx * (1 - fy) * gray.at(x1, y0) +
                         (1 - fx) * fy * gray.at(x0, y1) + fx * fy * gray.at(x1, y1);
    const int bit = value - centre >= -1e-9 ? 1 : 0;
    ones += bit;
    if (p == 0) first = bit;
    else if (bit != prev) ++transitions;
    prev = bit;
  }
  if (prev != first) ++transitions;
  return transitions <= 2 ? ones : P + 1;
}

HistogramBlock lbp_histogram(const imaging::GrayImage& gray, std::span<const std::uint32_t> pixels,
                             const FeatureConfig& cfg) {
  HistogramBlock out;
  out.values.assign(cfg.lbp_dimension(), 0.0);
  std::span<double> all(out.values);
  std::size_t offset = 0;
  for (const LbpVariant& v : cfg.lbp_variants) {
    const std::size_t bins = static_cast<std::size_t>(v.points) + 2;
    auto block = all.subspan(offset, bins);
    std::size_t used = 0;
    for (std::uint32_t p : pixels) {
      const int code = lbp_riu2_code(gray, static_cast<int>(p % gray.width), static_cast<int>(p / gray.width), v);
      if (code < 0) continue;
      block[static_cast<std::size_t>(code)] += 1.0;
      ++used;
    }
    if (used == 0) out.degenerate = true;
    normalise(block);
    offset += bins;
  }
  return out;
}

}  // namespace bws::features
