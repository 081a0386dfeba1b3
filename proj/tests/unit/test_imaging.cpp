#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "bws/features/color.hpp"
#include "bws/imaging/image.hpp"
#include "bws/imaging/lesion.hpp"
#include "bws/imaging/meanshift.hpp"
#include "bws/imaging/regions.hpp"
#include "bws/random.hpp"

using namespace bws;
using namespace bws::imaging;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "bws_test_imaging";
  std::filesystem::create_directories(dir);
  return dir;
}

ImageRGB gray_image(int w, int h, std::uint8_t v) { return ImageRGB(w, h, {v, v, v}); }

void disk(ImageRGB& img, double cx, double cy, double r, Rgb c) {
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.set(x, y, c);
}

// Oracle: between-class variance from class means, in long double.
long double variance_by_means(const GrayHistogram& h, int t) {
  long double n = 0, w0 = 0, s0 = 0, s1 = 0;
  for (int i = 0; i < 256; ++i) {
    n += h[i];
    if (i <= t) {
      w0 += h[i];
      s0 += static_cast<long double>(h[i]) * i;
    } else {
      s1 += static_cast<long double>(h[i]) * i;
    }
  }
  const long double w1 = n - w0;
  if (w0 == 0 || w1 == 0) return 0;
  const long double d = s0 / w0 - s1 / w1;
  return (w0 / n) * (w1 / n) * d * d;
}

}  // namespace

TEST_CASE("luma conversion") {
  CHECK(luma({255, 255, 255}) == 255);
  CHECK(luma({255, 0, 0}) == 76);
  CHECK(luma({0, 0, 0}) == 0);
  CHECK(luma({0, 255, 0}) == 150);
  CHECK(luma({0, 0, 255}) == 29);
}

TEST_CASE("png round trip and decode errors") {
  const auto dir = temp_dir();
  ImageRGB white(1, 1, {255, 255, 255});
  save_png(dir / "white.png", white);
  const ImageRGB back = load_image(dir / "white.png");
  CHECK(back.width == 1);
  CHECK(back.height == 1);
  CHECK(back.at(0, 0) == Rgb{255, 255, 255});

  {
    std::ofstream f(dir / "truncated.png", std::ios::binary);
    f << "\x89PNG\r\n\x1a\n";
  }
  CHECK_THROWS_AS(load_image(dir / "truncated.png"), IoError);
  CHECK_THROWS_AS(load_image(dir / "missing.png"), IoError);

  // 16-bit samples keep their high byte.
  cv::Mat deep(2, 2, CV_16UC3, cv::Scalar(0x12ff, 0x3400, 0xabcd));  // B, G, R
  cv::imwrite((dir / "deep.png").string(), deep);
  const ImageRGB eight = load_image(dir / "deep.png");
  CHECK(eight.at(1, 1) == Rgb{0xab, 0x34, 0x12});

  cv::Mat gray(1, 1, CV_8UC1, cv::Scalar(77));
  cv::imwrite((dir / "gray.png").string(), gray);
  CHECK(load_image(dir / "gray.png").at(0, 0) == Rgb{77, 77, 77});
}

TEST_CASE("label png round trip") {
  Plane<std::uint16_t> labels(3, 2);
  labels.at(0, 0) = 1;
  labels.at(2, 1) = 40000;
  save_label_png(temp_dir() / "labels.png", labels);
  const auto back = load_label_png(temp_dir() / "labels.png");
  CHECK(back.data == labels.data);
}

TEST_CASE("otsu examples") {
  GrayHistogram h{};
  h[10] = 100;
  h[200] = 100;
  CHECK(otsu_threshold(h) == 10);

  GrayHistogram flat{};
  flat[128] = 500;
  CHECK(otsu_threshold(flat) == 0);
  CHECK(between_class_variance(flat, 0) == 0.0);

  GrayHistogram empty{};
  CHECK_THROWS_AS(otsu_threshold(empty), ContractError);
}

TEST_CASE("otsu matches brute force on sparse random histograms") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    GrayHistogram h{};
    for (int k = 0; k < 8; ++k) h[rng.index(256)] += 1 + rng.index(1000);
    long double best = -1;
    for (int t = 0; t < 256; ++t) best = std::max(best, variance_by_means(h, t));
    int expected = 0;
    for (int t = 0; t < 256; ++t)
      if (variance_by_means(h, t) >= best * (1 - 1e-12L)) {
        expected = t;
        break;
      }
    if (best == 0) expected = 0;
    REQUIRE(otsu_threshold(h) == expected);
  }
}

TEST_CASE("lesion mask of a dark disk") {
  ImageRGB img = gray_image(80, 80, 220);
  disk(img, 40, 40, 20, {40, 40, 40});
  const LesionMask mask = lesion_mask(img);
  std::size_t expected = 0;
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 80; ++x) {
      const bool in = (x - 40) * (x - 40) + (y - 40) * (y - 40) <= 400;
      expected += in;
      REQUIRE(mask.at(x, y) == in);
    }
  CHECK(mask.lesion_area == expected);
}

TEST_CASE("lesion mask keeps the largest blob and fills holes") {
  ImageRGB two = gray_image(100, 60, 220);
  disk(two, 25, 30, 20, {40, 40, 40});
  disk(two, 80, 30, 10, {40, 40, 40});
  const LesionMask m = lesion_mask(two);
  CHECK(m.at(25, 30));
  CHECK_FALSE(m.at(80, 30));

  ImageRGB ring = gray_image(80, 80, 220);
  disk(ring, 40, 40, 25, {40, 40, 40});
  disk(ring, 40, 40, 12, {220, 220, 220});
  const LesionMask filled = lesion_mask(ring);
  CHECK(filled.at(40, 40));
  std::size_t expected = 0;
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 80; ++x) expected += (x - 40) * (x - 40) + (y - 40) * (y - 40) <= 625;
  CHECK(filled.lesion_area == expected);

  CHECK_THROWS_AS(lesion_mask(gray_image(10, 10, 90)), EmptyLesionError);
}

TEST_CASE("largest component tie goes to the first in raster order") {
  // Two 2x2 blobs of equal size.
  std::vector<std::uint8_t> fg(8 * 4, 0);
  for (int y : {1, 2})
    for (int x : {1, 2, 5, 6}) fg[static_cast<std::size_t>(y) * 8 + x] = 1;
  const auto out = largest_component(8, 4, fg);
  CHECK(out[1 * 8 + 1] == 1);
  CHECK(out[1 * 8 + 5] == 0);

  // Diagonal neighbours are connected.
  std::vector<std::uint8_t> diag{1, 0, 0, 1};
  CHECK(largest_component(2, 2, diag) == diag);
}

TEST_CASE("grid regions") {
  ImageRGB img = gray_image(64, 64, 100);
  auto full = make_mask(64, 64, std::vector<std::uint8_t>(64 * 64, 1));
  CHECK(grid_regions(img, full, 32).regions.size() == 4);

  std::vector<std::uint8_t> quad(64 * 64, 0);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) quad[static_cast<std::size_t>(y) * 64 + x] = 1;
  const auto q = grid_regions(img, make_mask(64, 64, quad), 32);
  CHECK(q.regions.size() == 1);

  // Diagonal half-plane: count qualifying windows by brute force.
  std::vector<std::uint8_t> half(64 * 64, 0);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) half[static_cast<std::size_t>(y) * 64 + x] = x + y < 64;
  std::size_t expected = 0;
  for (int wy = 0; wy < 64; wy += 32)
    for (int wx = 0; wx < 64; wx += 32) {
      int inside = 0;
      for (int y = wy; y < wy + 32; ++y)
        for (int x = wx; x < wx + 32; ++x) inside += x + y < 64;
      expected += 2 * inside >= 32 * 32;
    }
  const auto d = grid_regions(img, make_mask(64, 64, half), 32);
  CHECK(d.regions.size() == expected);
  CHECK(expected == 3);

  CHECK_THROWS_AS(grid_regions(img, make_mask(64, 64, std::vector<std::uint8_t>(64 * 64, 0)), 32), ContractError);
  CHECK_THROWS_AS(grid_regions(img, full, 3), ContractError);
}

TEST_CASE("region map renumbering and filtering") {
  // Labels 7 | 3 | 0 across a 3x2 image.
  const std::vector<int> labels{7, 3, 0, 7, 3, 0};
  const RegionMap map = region_map_from_labels(3, 2, labels);
  REQUIRE(map.regions.size() == 2);
  CHECK(map.region_id == std::vector<int>{1, 2, 0, 1, 2, 0});
  CHECK(map.regions[0].centroid_x == 0.0);
  CHECK(map.regions[0].centroid_y == 0.5);
  CHECK(map.find(2)->area() == 2);
  CHECK(map.find(3) == nullptr);

  // Region 1 fully inside, region 2 exactly half inside.
  const auto mask = make_mask(3, 2, {1, 1, 0, 1, 0, 0});
  const RegionMap kept = filter_regions(map, mask);
  CHECK(kept.regions[0].in_lesion);
  CHECK(kept.regions[1].in_lesion);
  const auto outside = make_mask(3, 2, {0, 0, 1, 0, 0, 1});
  CHECK_FALSE(filter_regions(map, outside).regions[0].in_lesion);
  CHECK_THROWS_AS(filter_regions(map, make_mask(2, 2, {1, 1, 1, 1})), ContractError);
}

TEST_CASE("mean-shift segmentation") {
  MeanShiftParams params;

  SUBCASE("uniform image is one region") {
    const RegionMap m = meanshift_segment(ImageRGB(40, 30, {180, 120, 100}), params);
    CHECK(m.regions.size() == 1);
  }
  SUBCASE("two distant halves are two regions") {
    ImageRGB img(40, 30, {200, 40, 40});
    for (int y = 0; y < 30; ++y)
      for (int x = 20; x < 40; ++x) img.set(x, y, {40, 40, 200});
    const RegionMap m = meanshift_segment(img, params);
    REQUIRE(m.regions.size() == 2);
    CHECK(m.regions[0].area() == 600);
    CHECK(m.region_id[0] != m.region_id[39]);
  }
  SUBCASE("two close halves merge") {
    const Rgb left{120, 120, 120}, right{124, 124, 124};
    const double gap = features::lab_distance(features::srgb_to_lab(left.r, left.g, left.b),
                                              features::srgb_to_lab(right.r, right.g, right.b));
    REQUIRE(gap < params.range_bandwidth);
    ImageRGB img(40, 30, left);
    for (int y = 0; y < 30; ++y)
      for (int x = 20; x < 40; ++x) img.set(x, y, right);
    CHECK(meanshift_segment(img, params).regions.size() == 1);
  }
  SUBCASE("partition, minimum area and determinism") {
    Rng rng(5);
    ImageRGB img(60, 50);
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
      img.set(i, {static_cast<std::uint8_t>(rng.index(256)), static_cast<std::uint8_t>(rng.index(256)),
                  static_cast<std::uint8_t>(rng.index(256))});
    disk(img, 30, 25, 12, {30, 60, 160});
    const RegionMap a = meanshift_segment(img, params);
    std::size_t covered = 0;
    for (const auto& r : a.regions) {
      covered += r.area();
      if (a.regions.size() > 1) CHECK(static_cast<double>(r.area()) >= params.min_region_area * 3000);
      for (std::uint32_t p : r.pixels) REQUIRE(a.region_id[p] == r.id);
    }
    CHECK(covered == img.pixel_count());
    MeanShiftParams threaded = params;
    threaded.threads = 3;
    const RegionMap b = meanshift_segment(img, threaded);
    CHECK(a.region_id == b.region_id);
  }
  SUBCASE("invalid parameters") {
    MeanShiftParams bad;
    bad.range_bandwidth = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}
