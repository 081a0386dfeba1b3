#include "bws/imaging/lesion.hpp"

#include <deque>
#include <numeric>

namespace bws::imaging {

GrayHistogram gray_histogram(const GrayImage& gray) {
  GrayHistogram hist{};
  for (std::uint8_t v : gray.data) ++hist[v];
  return hist;
}

namespace {

struct Split {
  std::uint64_t w0 = 0, w1 = 0;
  std::uint64_t s0 = 0, s1 = 0;
};

// (w0 w1)(mu0 - mu1)^2 == (w1 S0 - w0 S1)^2 / (w0 w1); integer numerator so
// thresholds that induce the same split produce bit-identical values.
long double scaled_variance(const Split& s) {
  if (s.w0 == 0 || s.w1 == 0) return 0.0L;
  const __int128 num = static_cast<__int128>(s.w1) * s.s0 - static_cast<__int128>(s.w0) * s.s1;
  const long double n = static_cast<long double>(num);
  return n * n / (static_cast<long double>(s.w0) * static_cast<long double>(s.w1));
}

std::uint64_t total(const GrayHistogram& hist) {
  return std::accumulate(hist.begin(), hist.end(), std::uint64_t{0});
}

}  // namespace

double between_class_variance(const GrayHistogram& hist, int t) {
  require(t >= 0 && t <= 255, "threshold out of range");
  const std::uint64_t n = total(hist);
  require(n >= 1, "empty histogram");
  Split s;
  for (int i = 0; i < 256; ++i) {
    if (i <= t) {
      s.w0 += hist[i];
      s.s0 += hist[i] * static_cast<std::uint64_t>(i);
    } else {
      s.w1 += hist[i];
      s.s1 += hist[i] * static_cast<std::uint64_t>(i);
    }
  }
  const long double nn = static_cast<long double>(n);
  return static_cast<double>(scaled_variance(s) / (nn * nn));
}

int otsu_threshold(const GrayHistogram& hist) {
  const std::uint64_t n = total(hist);
  require(n >= 1, "empty histogram");
  Split s;
  for (int i = 0; i < 256; ++i) {
    s.w1 += hist[i];
    s.s1 += hist[i] * static_cast<std::uint64_t>(i);
  }
  int best_t = 0;
  long double best = -1.0L;
  for (int t = 0; t < 256; ++t) {
    s.w0 += hist[t];
    s.w1 -= hist[t];
    s.s0 += hist[t] * static_cast<std::uint64_t>(t);
    s.s1 -= hist[t] * static_cast<std::uint64_t>(t);
    const long double v = scaled_variance(s);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  return best > 0.0L ? best_t : 0;
}

LesionMask make_mask(int width, int height, std::vector<std::uint8_t> inside) {
  require(width >= 1 && height >= 1, "mask dimensions must be positive");
  require(inside.size() == static_cast<std::size_t>(width) * height, "mask size does not match dimensions");
  LesionMask mask;
  mask.width = width;
  mask.height = height;
  mask.lesion_area = 0;
  for (auto& v : inside) {
    v = v ? 1 : 0;
    mask.lesion_area += v;
  }
  mask.inside = std::move(inside);
  return mask;
}

std::vector<std::uint8_t> largest_component(int width, int height, const std::vector<std::uint8_t>& fg) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  require(fg.size() == n, "mask size does not match dimensions");
  std::vector<int> label(n, 0);
  std::vector<std::size_t> sizes{0};
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (!fg[start] || label[start]) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t count = 0;
    label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++count;
      const int px = static_cast<int>(p % width), py = static_cast<int>(p / width);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int qx = px + dx, qy = py + dy;
          if (qx < 0 || qy < 0 || qx >= width || qy >= height) continue;
          const std::size_t q = static_cast<std::size_t>(qy) * width + qx;
          if (fg[q] && !label[q]) {
            label[q] = id;
            stack.push_back(q);
          }
        }
    }
    sizes.push_back(count);
  }
  int best = 0;
  for (std::size_t id = 1; id < sizes.size(); ++id)
    if (sizes[id] > sizes[best]) best = static_cast<int>(id);
  std::vector<std::uint8_t> out(n, 0);
  if (best == 0) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = label[i] == best ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> fill_holes(int width, int height, std::vector<std::uint8_t> fg) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  require(fg.size() == n, "mask size does not match dimensions");
  std::vector<std::uint8_t> outside(n, 0);
  std::deque<std::size_t> queue;
  auto seed = [&](int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * width + x;
    if (!fg[i] && !outside[i]) {
      outside[i] = 1;
      queue.push_back(i);
    }
  };
  for (int x = 0; x < width; ++x) {
    seed(x, 0);
    seed(x, height - 1);
  }
  for (int y = 0; y < height; ++y) {
    seed(0, y);
    seed(width - 1, y);
  }
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(p % width), y = static_cast<int>(p / width);
    if (x > 0) seed(x - 1, y);
    if (x + 1 < width) seed(x + 1, y);
    if (y > 0) seed(x, y - 1);
    if (y + 1 < height) seed(x, y + 1);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!outside[i]) fg[i] = 1;
  return fg;
}

LesionMask lesion_mask(const ImageRGB& image) {
  const GrayImage gray = to_gray(image);
  const GrayHistogram hist = gray_histogram(gray);
  const int t = otsu_threshold(hist);
  if (between_class_variance(hist, t) <= 0.0)
    throw EmptyLesionError("no lesion found: image has a single gray level");
  std::vector<std::uint8_t> dark(gray.size());
  for (std::size_t i = 0; i < gray.size(); ++i) dark[i] = gray.data[i] <= t ? 1 : 0;
  auto mask = fill_holes(image.width, image.height, largest_component(image.width, image.height, dark));
  LesionMask out = make_mask(image.width, image.height, std::move(mask));
  if (out.lesion_area == 0) throw EmptyLesionError("no lesion found");
  return out;
}

}  // namespace bws::imaging
