#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "bws/features/bag_io.hpp"
#include "bws/features/color.hpp"
#include "bws/features/config.hpp"
#include "bws/features/extractor.hpp"
#include "bws/features/histograms.hpp"
#include "bws/features/mr8.hpp"
#include "bws/random.hpp"

using namespace bws;
using namespace bws::features;
using imaging::GrayImage;
using imaging::ImageRGB;
using imaging::Rgb;

namespace {

// Independent reference: OpenCV's floating-point RGB -> Lab (D65, sRGB curve).
LabPixel opencv_lab(Rgb c) {
  cv::Mat rgb(1, 1, CV_32FC3, cv::Scalar(c.r / 255.0, c.g / 255.0, c.b / 255.0));
  cv::Mat lab;
  cv::cvtColor(rgb, lab, cv::COLOR_RGB2Lab);
  const auto v = lab.at<cv::Vec3f>(0, 0);
  return {v[0], v[1], v[2]};
}

double block_sum(const std::vector<double>& v, std::size_t from, std::size_t n) {
  return std::accumulate(v.begin() + static_cast<long>(from), v.begin() + static_cast<long>(from + n), 0.0);
}

std::vector<std::uint32_t> all_pixels(int w, int h) {
  std::vector<std::uint32_t> p(static_cast<std::size_t>(w) * h);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

void disk(ImageRGB& img, double cx, double cy, double r, Rgb c) {
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.set(x, y, c);
}

}  // namespace

TEST_CASE("srgb to lab") {
  const LabPixel white = srgb_to_lab(255, 255, 255);
  CHECK(white.L == doctest::Approx(100.0).epsilon(0.0001));
  CHECK(std::abs(white.a) < 0.01);
  CHECK(std::abs(white.b) < 0.01);
  const LabPixel black = srgb_to_lab(0, 0, 0);
  CHECK(std::abs(black.L) < 0.01);
  const LabPixel blue = srgb_to_lab(0, 0, 255);
  CHECK(std::abs(blue.L - 32.3) < 0.5);
  CHECK(std::abs(blue.a - 79.2) < 0.5);
  CHECK(std::abs(blue.b + 107.9) < 0.5);

  for (int r : {0, 255})
    for (int g : {0, 255})
      for (int b : {0, 255}) {
        const Rgb c{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
        CHECK(lab_distance(srgb_to_lab(c.r, c.g, c.b), opencv_lab(c)) < 0.5);
      }
}

TEST_CASE("feature dimensions and fingerprint") {
  FeatureConfig cfg;
  CHECK(cfg.lab_dimension() == 108);
  CHECK(cfg.lbp_dimension() == 28);
  CHECK(cfg.mr8_dimension() == 64);
  CHECK(cfg.dimension() == 200);
  FeatureConfig color = cfg;
  color.include_texture = false;
  CHECK(color.dimension() == 108);
  CHECK(color.fingerprint() != cfg.fingerprint());
  CHECK(FeatureConfig{}.fingerprint() == cfg.fingerprint());

  const FeatureConfig back = feature_config_from_json(cfg.to_json());
  CHECK(back.fingerprint() == cfg.fingerprint());
  CHECK(feature_config_from_json(R"({"include_texture": false})").dimension() == 108);
  CHECK_THROWS_AS(feature_config_from_json(R"({"lab_bins": 5})"), ConfigError);
  CHECK_THROWS_AS(feature_config_from_json(R"({"include_texture": false, "include_color": false})"), ConfigError);
  CHECK_THROWS_AS(feature_config_from_json(R"({"lab_bin_size": -1})"), ConfigError);
}

TEST_CASE("lab histogram") {
  FeatureConfig cfg;
  const std::vector<LabPixel> grey(7, LabPixel{50.0, 0.0, 0.0});
  const auto h = lab_histogram(grey, cfg);
  REQUIRE(h.size() == 108);
  // floor((50 - 0) / 5) = 10; floor((0 + 110) / 5) = 22
  CHECK(h[10] == 1.0);
  CHECK(h[20 + 22] == 1.0);
  CHECK(h[20 + 44 + 22] == 1.0);
  CHECK(std::accumulate(h.begin(), h.end(), 0.0) == 3.0);

  // Top edge closed, out-of-range clamped.
  const std::vector<LabPixel> edge{{100.0, 110.0, -130.0}};
  const auto e = lab_histogram(edge, cfg);
  CHECK(e[19] == 1.0);
  CHECK(e[20 + 43] == 1.0);
  CHECK(e[64] == 1.0);

  CHECK_THROWS_AS(lab_histogram(std::vector<LabPixel>{}, cfg), ContractError);

  Rng rng(3);
  std::vector<LabPixel> noise;
  for (int i = 0; i < 500; ++i) noise.push_back({rng.uniform(-5, 105), rng.uniform(-120, 120), rng.uniform(-120, 120)});
  const auto n = lab_histogram(noise, cfg);
  CHECK(std::abs(block_sum(n, 0, 20) - 1.0) < 1e-9);
  CHECK(std::abs(block_sum(n, 20, 44) - 1.0) < 1e-9);
  CHECK(std::abs(block_sum(n, 64, 44) - 1.0) < 1e-9);
}

TEST_CASE("lbp codes") {
  FeatureConfig cfg;
  const LbpVariant v8{8, 1.0};

  SUBCASE("flat region: every code is P") {
    GrayImage flat(20, 20, 90);
    const auto h = lbp_histogram(flat, all_pixels(20, 20), cfg);
    CHECK_FALSE(h.degenerate);
    CHECK(h.values[8] == 1.0);
    CHECK(h.values[10 + 16] == 1.0);
  }

  SUBCASE("vertical step edge, codes worked by hand") {
    // Columns 0-1 are 0, columns 2-4 are 100.
    GrayImage step(5, 5, 0);
    for (int y = 0; y < 5; ++y)
      for (int x = 2; x < 5; ++x) step.at(x, y) = 100;
    // Column 1 and 3: every neighbour >= centre, all ones -> 8.
    CHECK(lbp_riu2_code(step, 1, 2, v8) == 8);
    CHECK(lbp_riu2_code(step, 3, 2, v8) == 8);
    // Column 2: neighbours at 0, 45, 90, 270, 315 degrees see 100, the
    // three on the left see 0 or 29.3 -> bits 11100011, uniform, 5 ones.
    CHECK(lbp_riu2_code(step, 2, 2, v8) == 5);
    CHECK(lbp_riu2_code(step, 0, 2, v8) == -1);

    FeatureConfig only8 = cfg;
    only8.lbp_variants = {v8};
    const auto h = lbp_histogram(step, all_pixels(5, 5), only8);
    CHECK(h.values[8] == doctest::Approx(6.0 / 9.0));
    CHECK(h.values[5] == doctest::Approx(3.0 / 9.0));
    CHECK(h.values[9] == 0.0);
  }

  SUBCASE("no interior pixel is degenerate") {
    GrayImage tiny(3, 3, 10);
    const auto h = lbp_histogram(tiny, std::vector<std::uint32_t>{0, 1, 2}, cfg);
    CHECK(h.degenerate);
    CHECK(std::accumulate(h.values.begin(), h.values.end(), 0.0) == 0.0);
  }

  SUBCASE("random texture blocks sum to one") {
    Rng rng(11);
    GrayImage g(30, 30);
    for (auto& v : g.data) v = static_cast<std::uint8_t>(rng.index(256));
    const auto h = lbp_histogram(g, all_pixels(30, 30), cfg);
    CHECK(std::abs(block_sum(h.values, 0, 10) - 1.0) < 1e-9);
    CHECK(std::abs(block_sum(h.values, 10, 18) - 1.0) < 1e-9);
  }
}

TEST_CASE("mr8 filter bank") {
  const auto bank = mr8_filter_bank();
  REQUIRE(bank.size() == 38);
  for (std::size_t i = 0; i < 36; ++i) {
    double sum = 0, l1 = 0;
    for (double v : bank[i].taps) {
      sum += v;
      l1 += std::abs(v);
    }
    CHECK(std::abs(sum) < 1e-12);
    CHECK(l1 == doctest::Approx(1.0));
  }
  FeatureConfig cfg;
  CHECK_THROWS_AS(mr8_responses(GrayImage(48, 60, 0), cfg), DataError);
}

TEST_CASE("mr8 responses") {
  FeatureConfig cfg;

  SUBCASE("constant image") {
    const auto r = mr8_responses(GrayImage(60, 60, 128), cfg);
    CHECK(r.degenerate);
    const auto h = mr8_histogram(r, all_pixels(60, 60), cfg);
    for (int ch = 0; ch < 8; ++ch) CHECK(h.values[static_cast<std::size_t>(ch) * 8 + 4] == 1.0);
  }

  SUBCASE("white noise is reproducible") {
    Rng rng(99);
    GrayImage g(64, 64);
    for (auto& v : g.data) v = static_cast<std::uint8_t>(rng.index(256));
    const auto a = mr8_responses(g, cfg);
    const auto b = mr8_responses(g, cfg);
    for (int ch = 0; ch < 8; ++ch) CHECK(a.planes[ch] == b.planes[ch]);
    const auto h = mr8_histogram(a, all_pixels(64, 64), cfg);
    for (int ch = 0; ch < 8; ++ch) CHECK(std::abs(block_sum(h.values, static_cast<std::size_t>(ch) * 8, 8) - 1.0) < 1e-9);
  }

  SUBCASE("oriented channels are invariant to a quarter turn") {
    // Vertical bars, then the same pattern rotated by 90 degrees (a
    // multiple of the 30 degree orientation step).
    const int n = 96;
    GrayImage bars(n, n), turned(n, n);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) bars.at(x, y) = (x / 6) % 2 ? 200 : 40;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) turned.at(x, y) = bars.at(y, n - 1 - x);
    const auto ra = mr8_responses(bars, cfg);
    const auto rb = mr8_responses(turned, cfg);
    // Central window, away from the reflected border.
    std::vector<std::uint32_t> centre;
    for (int y = 24; y < n - 24; ++y)
      for (int x = 24; x < n - 24; ++x) centre.push_back(static_cast<std::uint32_t>(y * n + x));
    const auto ha = mr8_histogram(ra, centre, cfg);
    const auto hb = mr8_histogram(rb, centre, cfg);
    for (int ch = 0; ch < 6; ++ch) {
      double diff = 0;
      for (int k = 0; k < 8; ++k) diff += std::abs(ha.values[ch * 8 + k] - hb.values[ch * 8 + k]);
      INFO("channel " << ch);
      CHECK(diff <= 0.1);
    }
  }

  SUBCASE("uniformly spread responses give a flat histogram") {
    Rng rng(17);
    Mr8Responses r;
    r.width = 1000;
    r.height = 1;
    for (auto& p : r.planes) {
      p.resize(1000);
      for (auto& v : p) v = static_cast<float>(rng.uniform(-3.0, 3.0));
    }
    const auto h = mr8_histogram(r, all_pixels(1000, 1), cfg);
    for (double v : h.values) CHECK(v <= 0.25);
  }
}

TEST_CASE("region feature vectors") {
  FeatureConfig cfg;
  Rng rng(8);
  ImageRGB img(80, 80);
  for (std::size_t i = 0; i < img.pixel_count(); ++i)
    img.set(i, {static_cast<std::uint8_t>(rng.index(256)), static_cast<std::uint8_t>(rng.index(256)),
                static_cast<std::uint8_t>(rng.index(256))});
  const PreparedImage prepared = prepare_image(img, cfg);
  for (int trial = 0; trial < 20; ++trial) {
    imaging::Region region;
    region.id = trial + 1;
    const int x0 = static_cast<int>(rng.index(60)), y0 = static_cast<int>(rng.index(60));
    const int w = 2 + static_cast<int>(rng.index(18)), h = 2 + static_cast<int>(rng.index(18));
    for (int y = y0; y < y0 + h; ++y)
      for (int x = x0; x < x0 + w; ++x) region.pixels.push_back(static_cast<std::uint32_t>(y * 80 + x));
    const auto f = region_feature_vector(prepared, region, cfg);
    const auto& x = f.instance.features;
    REQUIRE(x.size() == 200);
    for (double v : x) REQUIRE((std::isfinite(v) && v >= 0.0 && v <= 1.0));
    for (auto [from, len] : std::vector<std::pair<std::size_t, std::size_t>>{
             {0, 20}, {20, 44}, {64, 44}, {108, 10}, {118, 18}})
      CHECK(std::abs(block_sum(x, from, len) - 1.0) < 1e-9);
    for (std::size_t ch = 0; ch < 8; ++ch) CHECK(std::abs(block_sum(x, 136 + ch * 8, 8) - 1.0) < 1e-9);
    CHECK(*f.instance.source_region_id == trial + 1);
  }
  FeatureConfig color = cfg;
  color.include_texture = false;
  imaging::Region one;
  one.pixels = {0, 1, 2};
  CHECK(region_feature_vector(prepare_image(img, color), one, color).instance.features.size() == 108);
}

TEST_CASE("bags from images") {
  FeatureConfig cfg;
  ExtractionOptions options;
  ImageRGB img(96, 96, {220, 170, 150});
  disk(img, 48, 48, 30, {130, 90, 70});

  SUBCASE("uniform lesion gives one instance") {
    const auto x = bag_from_image(img, mil::Label::Negative, cfg, options, "uniform");
    CHECK(x.bag.size() == 1);
    CHECK(x.bag.dimension() == 200);
    CHECK(*x.bag.label == mil::Label::Negative);
  }
  SUBCASE("two flat colour areas give two instances") {
    for (int y = 0; y < 96; ++y)
      for (int x = 48; x < 96; ++x)
        if ((x - 48) * (x - 48) + (y - 48) * (y - 48) <= 900) img.set(x, y, {90, 110, 150});
    const auto x = bag_from_image(img, mil::Label::Positive, cfg, options, "halves");
    CHECK(x.bag.size() == 2);
  }
  SUBCASE("grid mode") {
    options.mode = Segmentation::Grid;
    options.grid_cell = 16;
    const auto x = bag_from_image(img, std::nullopt, cfg, options, "grid");
    CHECK(x.bag.size() >= 9);
    for (const auto& inst : x.bag.instances) CHECK(x.regions.find(*inst.source_region_id)->in_lesion);
  }
  SUBCASE("no lesion is an empty bag") {
    CHECK_THROWS_AS(bag_from_image(ImageRGB(64, 64, {200, 200, 200}), std::nullopt, cfg, options, "blank"),
                    EmptyBagError);
  }
  CHECK(segmentation_from_string("grid") == Segmentation::Grid);
  CHECK_THROWS_AS(segmentation_from_string("slic"), ConfigError);
}

TEST_CASE("bag file round trip") {
  BagFile file;
  file.bag.bag_id = "b1";
  file.bag.label = mil::Label::Positive;
  file.fingerprint = "fv1-test";
  file.bag.instances.push_back({{0.1, 1.0 / 3.0}, 4});
  file.bag.instances.push_back({{-2.5e-300, 7.0}, std::nullopt});
  file.instance_labels = std::vector<mil::Label>{mil::Label::Positive, mil::Label::Negative};
  const auto path = std::filesystem::temp_directory_path() / "bws_bag_roundtrip.json";
  save_bag(path, file);
  const BagFile back = load_bag(path);
  CHECK(back.bag.bag_id == "b1");
  CHECK(*back.bag.label == mil::Label::Positive);
  CHECK(back.fingerprint == "fv1-test");
  CHECK(back.bag.instances[0].features == file.bag.instances[0].features);
  CHECK(back.bag.instances[1].features == file.bag.instances[1].features);
  CHECK(*back.bag.instances[0].source_region_id == 4);
  CHECK_FALSE(back.bag.instances[1].source_region_id.has_value());
  CHECK(*back.instance_labels == *file.instance_labels);

  CHECK_THROWS_AS(bag_from_json(R"({"version":1,"bag_id":"x","label":1,"m":2,"D":1,"fingerprint":"f",
                                    "instances":[{"region_id":1,"features":[0.5]}]})"),
                  DataError);
  CHECK_THROWS_AS(bag_from_json(R"({"version":1,"bag_id":"x","label":1,"m":1,"D":2,"fingerprint":"f",
                                    "instances":[{"region_id":1,"features":[0.5]}]})"),
                  DataError);
  CHECK_THROWS_AS(bag_from_json("not json"), DataError);
  const auto unlabeled = bag_from_json(R"({"version":1,"bag_id":"u","label":null,"m":1,"D":1,"fingerprint":"f",
                                           "instances":[{"region_id":null,"features":[0.5]}]})");
  CHECK_FALSE(unlabeled.bag.label.has_value());
}
