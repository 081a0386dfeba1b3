#include "bws/imaging/meanshift.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <utility>

#include "bws/features/color.hpp"
#include "bws/parallel.hpp"

namespace bws::imaging {

void MeanShiftParams::validate() const {
  if (!(spatial_bandwidth > 0.0)) throw ConfigError("meanshift spatial_bandwidth must be > 0");
  if (!(range_bandwidth > 0.0)) throw ConfigError("meanshift range_bandwidth must be > 0");
  if (!(min_region_area > 0.0)) throw ConfigError("meanshift min_region_area must be > 0");
  if (max_iterations < 1) throw ConfigError("meanshift max_iterations must be >= 1");
  if (!(convergence > 0.0)) throw ConfigError("meanshift convergence must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

LabPlanes to_lab_planes(const ImageRGB& image) {
  LabPlanes lab;
  lab.width = image.width;
  lab.height = image.height;
  const std::size_t n = image.pixel_count();
  lab.L.resize(n);
  lab.a.resize(n);
  lab.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Rgb c = image.at(i);
    const features::LabPixel p = features::srgb_to_lab(c.r, c.g, c.b);
    lab.L[i] = static_cast<float>(p.L);
    lab.a[i] = static_cast<float>(p.a);
    lab.b[i] = static_cast<float>(p.b);
  }
  return lab;
}

namespace {

// Filtering core; also reports the spatial part of each mode when asked.
LabPlanes filter_modes(const LabPlanes& lab, const MeanShiftParams& params, std::vector<float>* mode_x,
                       std::vector<float>* mode_y) {
  const int w = lab.width, h = lab.height;
  const double hs = params.spatial_bandwidth, hr = params.range_bandwidth;
  const double hs2 = hs * hs, hr2 = hr * hr;
  const double stop2 = params.convergence * params.convergence;
  const int reach = static_cast<int>(std::ceil(hs));

  LabPlanes out;
  out.width = w;
  out.height = h;
  out.L.resize(lab.L.size());
  out.a.resize(lab.a.size());
  out.b.resize(lab.b.size());

  parallel_for(static_cast<std::size_t>(h), params.threads, [&](std::size_t row) {
    const int py = static_cast<int>(row);
    for (int px = 0; px < w; ++px) {
      const std::size_t i = static_cast<std::size_t>(py) * w + px;
      double mx = px, my = py, mL = lab.L[i], ma = lab.a[i], mb = lab.b[i];
      for (int it = 0; it < params.max_iterations; ++it) {
        const int cx = static_cast<int>(std::lround(mx)), cy = static_cast<int>(std::lround(my));
        const int x0 = std::max(0, cx - reach), x1 = std::min(w - 1, cx + reach);
        const int y0 = std::max(0, cy - reach), y1 = std::min(h - 1, cy + reach);
        double sx = 0, sy = 0, sL = 0, sa = 0, sb = 0;
        std::size_t count = 0;
        for (int y = y0; y <= y1; ++y) {
          const double dy = y - my;
          const std::size_t base = static_cast<std::size_t>(y) * w;
          for (int x = x0; x <= x1; ++x) {
            const double dx = x - mx;
            if (dx * dx + dy * dy > hs2) continue;
            const std::size_t j = base + x;
            const double dL = lab.L[j] - mL, da = lab.a[j] - ma, db = lab.b[j] - mb;
            if (dL * dL + da * da + db * db > hr2) continue;
            sx += x;
            sy += y;
            sL += lab.L[j];
            sa += lab.a[j];
            sb += lab.b[j];
            ++count;
          }
        }
        if (count == 0) break;
        const double inv = 1.0 / static_cast<double>(count);
        const double nx = sx * inv, ny = sy * inv, nL = sL * inv, na = sa * inv, nb = sb * inv;
        const double shift = ((nx - mx) * (nx - mx) + (ny - my) * (ny - my)) / hs2 +
                             ((nL - mL) * (nL - mL) + (na - ma) * (na - ma) + (nb - mb) * (nb - mb)) / hr2;
        mx = nx;
        my = ny;
        mL = nL;
        ma = na;
        mb = nb;
        if (shift < stop2) break;
      }
      if (mode_x) (*mode_x)[i] = static_cast<float>(mx);
      if (mode_y) (*mode_y)[i] = static_cast<float>(my);
      out.L[i] = static_cast<float>(mL);
      out.a[i] = static_cast<float>(ma);
      out.b[i] = static_cast<float>(mb);
    }
  });
  return out;
}

}  // namespace

LabPlanes meanshift_filter(const LabPlanes& lab, const MeanShiftParams& params) {
  params.validate();
  return filter_modes(lab, params, nullptr, nullptr);
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  // The smaller root survives, so representatives follow raster order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

double range_dist2(const LabPlanes& m, std::size_t i, std::size_t j) {
  const double dL = m.L[i] - m.L[j], da = m.a[i] - m.a[j], db = m.b[i] - m.b[j];
  return dL * dL + da * da + db * db;
}

}  // namespace

RegionMap meanshift_segment(const ImageRGB& image, const MeanShiftParams& params) {
  params.validate();
  const LabPlanes lab = to_lab_planes(image);
  std::vector<float> mode_x(image.pixel_count()), mode_y(image.pixel_count());
  const LabPlanes modes = filter_modes(lab, params, &mode_x, &mode_y);
  const int w = image.width, h = image.height;
  const std::size_t n = image.pixel_count();
  const double hr2 = params.range_bandwidth * params.range_bandwidth;
  const double hs2 = params.spatial_bandwidth * params.spatial_bandwidth;

  // Adjacent pixels join when their modes are close in both domains.
  DisjointSets sets(n);
  static constexpr int kNeighbours[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      for (const auto& d : kNeighbours) {
        const int qx = x + d[0], qy = y + d[1];
        if (qx < 0 || qx >= w || qy >= h) continue;
        const std::size_t j = static_cast<std::size_t>(qy) * w + qx;
        const double dx = mode_x[i] - mode_x[j], dy = mode_y[i] - mode_y[j];
        if (dx * dx + dy * dy < hs2 && range_dist2(modes, i, j) < hr2) sets.unite(i, j);
      }
    }

  // Components indexed in raster order of their first pixel.
  std::vector<int> comp(n, -1);
  std::vector<std::size_t> area;
  std::vector<std::array<double, 3>> mode;
  std::vector<std::size_t> root_to_comp(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = sets.find(i);
    if (root_to_comp[r] == SIZE_MAX) {
      root_to_comp[r] = area.size();
      area.push_back(0);
      mode.push_back({0.0, 0.0, 0.0});
    }
    const std::size_t c = root_to_comp[r];
    comp[i] = static_cast<int>(c);
    ++area[c];
    mode[c][0] += modes.L[i];
    mode[c][1] += modes.a[i];
    mode[c][2] += modes.b[i];
  }
  const std::size_t k = area.size();
  for (std::size_t c = 0; c < k; ++c)
    for (double& v : mode[c]) v /= static_cast<double>(area[c]);

  std::vector<std::set<std::size_t>> adjacent(k);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      for (const auto& d : kNeighbours) {
        const int qx = x + d[0], qy = y + d[1];
        if (qx < 0 || qx >= w || qy >= h) continue;
        const std::size_t j = static_cast<std::size_t>(qy) * w + qx;
        if (comp[i] != comp[j]) {
          adjacent[comp[i]].insert(comp[j]);
          adjacent[comp[j]].insert(comp[i]);
        }
      }
    }

  // Repeatedly merge the smallest undersized region (lowest id on ties)
  // into its adjacent region with the closest mode (lowest id on ties).
  const double min_area = params.min_region_area * static_cast<double>(n);
  std::set<std::pair<std::size_t, std::size_t>> by_area;
  for (std::size_t c = 0; c < k; ++c) by_area.emplace(area[c], c);
  DisjointSets merged(k);
  while (by_area.size() > 1) {
    const auto [a, s] = *by_area.begin();
    if (static_cast<double>(a) >= min_area) break;
    std::size_t target = SIZE_MAX;
    double best = 0.0;
    for (std::size_t t : adjacent[s]) {
      double d = 0.0;
      for (int ch = 0; ch < 3; ++ch) d += (mode[s][ch] - mode[t][ch]) * (mode[s][ch] - mode[t][ch]);
      if (target == SIZE_MAX || d < best) {
        best = d;
        target = t;
      }
    }
    if (target == SIZE_MAX) break;  // isolated; cannot happen on a connected grid
    by_area.erase(by_area.begin());
    by_area.erase({area[target], target});
    const double total = static_cast<double>(area[s] + area[target]);
    for (int ch = 0; ch < 3; ++ch)
      mode[target][ch] = (mode[target][ch] * area[target] + mode[s][ch] * area[s]) / total;
    area[target] += area[s];
    by_area.emplace(area[target], target);
    for (std::size_t nb : adjacent[s]) {
      if (nb == target) continue;
      adjacent[nb].erase(s);
      adjacent[nb].insert(target);
      adjacent[target].insert(nb);
    }
    adjacent[target].erase(s);
    adjacent[s].clear();
    merged.parent[s] = target;
  }

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(merged.find(comp[i])) + 1;
  return region_map_from_labels(w, h, labels);
}

}  // namespace bws::imaging
