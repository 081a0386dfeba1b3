#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bws/baselines/celebi.hpp"
#include "bws/baselines/detection.hpp"
#include "bws/baselines/palette.hpp"
#include "bws/random.hpp"

using namespace bws;
using namespace bws::baselines;
using imaging::ImageRGB;
using imaging::Rgb;

namespace {

void disk(ImageRGB& img, double cx, double cy, double r, Rgb c) {
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.set(x, y, c);
}

imaging::LesionMask disk_mask(int w, int h, double cx, double cy, double r) {
  std::vector<std::uint8_t> in(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) in[static_cast<std::size_t>(y) * w + x] = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r;
  return imaging::make_mask(w, h, in);
}

// Oracle: squared Euclidean distance, linear scan.
std::size_t brute_nearest(const std::vector<ColorPatch>& table, const features::LabPixel& q) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double dL = table[i].lab.L - q.L, da = table[i].lab.a - q.a, db = table[i].lab.b - q.b;
    const double d = dL * dL + da * da + db * db;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<ColorPatch> random_table(Rng& rng, int n) {
  std::vector<ColorPatch> t;
  for (int i = 0; i < n; ++i)
    t.push_back({"p" + std::to_string(i), {rng.uniform(0, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)}});
  return t;
}

}  // namespace

TEST_CASE("celebi pixel rules") {
  CHECK(is_healthy_skin({100, 80, 70}));
  CHECK_FALSE(is_healthy_skin({90, 80, 70}));
  CHECK_FALSE(is_healthy_skin({100, 100, 80}));
  CHECK_FALSE(is_healthy_skin({100, 80, 100}));

  // nB = 120/250 = 0.48, rR = -140.
  CHECK(celebi_pixel_is_bws({60, 70, 120}, 200.0));
  CHECK_FALSE(celebi_pixel_is_bws({200, 200, 200}, 200.0));
  // nB exactly 0.3 qualifies; just below does not.
  CHECK(celebi_pixel_is_bws({30, 40, 30}, 150.0));
  CHECK_FALSE(celebi_pixel_is_bws({30, 41, 30}, 150.0));
  // rR = -194 in, -195 out, -52 in, -51 out (mean red 200).
  CHECK(celebi_pixel_is_bws({6, 0, 200}, 200.0));
  CHECK_FALSE(celebi_pixel_is_bws({5, 0, 200}, 200.0));
  CHECK(celebi_pixel_is_bws({148, 0, 200}, 200.0));
  CHECK_FALSE(celebi_pixel_is_bws({149, 0, 200}, 200.0));
  CHECK_FALSE(celebi_pixel_is_bws({0, 0, 0}, 10.0));
}

TEST_CASE("skin band matches a brute-force distance oracle") {
  const int w = 70, h = 60;
  const auto mask = disk_mask(w, h, 33, 29, 15);
  std::size_t perimeter = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (mask.at(x, y) && (!mask.at(x - 1, y) || !mask.at(x + 1, y) || !mask.at(x, y - 1) || !mask.at(x, y + 1)))
        ++perimeter;
  const double ratio = static_cast<double>(mask.lesion_area) / static_cast<double>(perimeter);
  const double inner = 0.1 * ratio, outer = 0.3 * ratio;
  const auto band = skin_band(mask);
  std::size_t members = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double d = INFINITY;
      for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
          if (mask.at(u, v)) d = std::min(d, std::hypot(x - u, y - v));
      if (std::abs(d - inner) < 1e-3 || std::abs(d - outer) < 1e-3) continue;
      const bool expected = d > inner && d <= outer;
      members += expected;
      REQUIRE(band[static_cast<std::size_t>(y) * w + x] == expected);
    }
  CHECK(members > 0);
}

TEST_CASE("celebi detection on a constructed image") {
  ImageRGB img(90, 90, {220, 170, 150});
  disk(img, 45, 45, 25, {130, 90, 70});
  disk(img, 45, 45, 10, {90, 110, 150});
  const auto mask = disk_mask(90, 90, 45, 45, 25);
  const auto r = celebi_detect(img, mask);
  REQUIRE(r.stats.has_value());
  CHECK(r.stats->mean_red == 220.0);
  CHECK(r.warnings.empty());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) REQUIRE(r.mask.at(i) == (img.at(i) == Rgb{90, 110, 150}));

  // Permuting pixels does not change any pixel's class.
  const auto plain = celebi_classify(img, *r.stats);
  ImageRGB flipped = img;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) flipped.set(img.pixel_count() - 1 - i, img.at(i));
  const auto fl = celebi_classify(flipped, *r.stats);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) REQUIRE(fl.at(img.pixel_count() - 1 - i) == plain.at(i));

  // No healthy skin: abstain.
  ImageRGB blue(90, 90, {80, 80, 200});
  disk(blue, 45, 45, 25, {60, 70, 120});
  const auto a = celebi_detect(blue, mask);
  CHECK_FALSE(a.stats.has_value());
  CHECK(a.mask.positive_count == 0);
  CHECK(a.warnings.size() == 1);
}

TEST_CASE("palette nearest neighbour equals brute force") {
  Rng rng(21);
  const auto table = random_table(rng, 150);
  for (int q = 0; q < 1000; ++q) {
    const features::LabPixel p{rng.uniform(0, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)};
    REQUIRE(nearest_patch(table, p).index == brute_nearest(table, p));
  }
  // Ties go to the lower index.
  const std::vector<ColorPatch> twins{{"a", {50, 0, 0}}, {"b", {50, 0, 0}}};
  CHECK(nearest_patch(twins, {50, 1, 0}).index == 0);
  CHECK_THROWS_AS(nearest_patch(std::vector<ColorPatch>{}, {0, 0, 0}), ContractError);
}

TEST_CASE("palette build") {
  Rng rng(4);
  const auto table = random_table(rng, 60);

  SUBCASE("identical BWS pixels") {
    const std::vector<AnnotatedPixel> px(20, AnnotatedPixel{{40, 10, -30}, true});
    const Palette p = palette_build(px, table);
    REQUIRE(p.patches.size() == 1);
    CHECK(p.patches[0].id == table[brute_nearest(table, {40, 10, -30})].id);
  }
  SUBCASE("shared patch is excluded") {
    std::vector<AnnotatedPixel> px(20, AnnotatedPixel{{40, 10, -30}, true});
    px.push_back({{40.5, 10, -30}, false});
    CHECK_THROWS_AS(palette_build(px, table), DataError);
  }
  SUBCASE("two clusters") {
    std::vector<AnnotatedPixel> px;
    const features::LabPixel c1 = table[7].lab, c2 = table[31].lab;
    for (int i = 0; i < 50; ++i) {
      px.push_back({{c1.L + rng.uniform(-0.2, 0.2), c1.a + rng.uniform(-0.2, 0.2), c1.b}, true});
      px.push_back({{c2.L + rng.uniform(-0.2, 0.2), c2.a, c2.b + rng.uniform(-0.2, 0.2)}, true});
    }
    std::vector<std::string> expected;
    for (const auto& p : px) {
      const auto id = table[brute_nearest(table, p.lab)].id;
      if (std::find(expected.begin(), expected.end(), id) == expected.end()) expected.push_back(id);
    }
    const Palette pal = palette_build(px, table);
    std::vector<std::string> got;
    for (const auto& p : pal.patches) got.push_back(p.id);
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    CHECK(got == expected);
    CHECK(got.size() == 2);
  }
  SUBCASE("98 percent coverage") {
    std::vector<AnnotatedPixel> px;
    for (int i = 0; i < 60; ++i) px.push_back({table[1].lab, true});
    for (int i = 0; i < 39; ++i) px.push_back({table[2].lab, true});
    px.push_back({table[3].lab, true});
    const Palette pal = palette_build(px, table);
    REQUIRE(pal.patches.size() == 2);
    CHECK(pal.patches[0].id == table[1].id);
    CHECK(pal.patches[1].id == table[2].id);
  }
  CHECK_THROWS_AS(palette_build({}, table), DataError);
  CHECK_THROWS_AS(palette_build({{{0, 0, 0}, true}}, {}), ConfigError);
}

TEST_CASE("palette detection") {
  ImageRGB img(20, 10, {90, 110, 150});
  for (int y = 0; y < 10; ++y)
    for (int x = 10; x < 20; ++x) img.set(x, y, {220, 170, 150});
  std::vector<int> labels(200);
  for (int i = 0; i < 200; ++i) labels[static_cast<std::size_t>(i)] = i % 20 < 10 ? 1 : 2;
  const auto regions = imaging::region_map_from_labels(20, 10, labels);
  const auto bws = features::srgb_to_lab(90, 110, 150);
  const auto skin = features::srgb_to_lab(220, 170, 150);

  Palette exact{{{"bws", bws, true}}, 10.0};
  const auto m = palette_detect(img, regions, exact);
  CHECK(m.positive_count == 100);
  CHECK(m.at(0));
  CHECK_FALSE(m.at(10));

  // The threshold is inclusive.
  Palette edge{{{"bws", skin, true}}, 0.0};
  edge.patches[0].lab.L += 3.0;
  features::LabPixel mean{0, 0, 0};
  for (int i = 0; i < 100; ++i) {
    mean.L += skin.L;
    mean.a += skin.a;
    mean.b += skin.b;
  }
  mean = {mean.L / 100, mean.a / 100, mean.b / 100};
  edge.match_threshold = features::lab_distance(mean, edge.patches[0].lab);
  CHECK(palette_detect(img, regions, edge).positive_count == 100);
  edge.match_threshold = std::nextafter(edge.match_threshold, 0.0);
  CHECK(palette_detect(img, regions, edge).positive_count == 0);

  // A nearer non-BWS patch suppresses the match.
  Palette guarded{{{"bws", bws, true}, {"other", {bws.L + 0.1, bws.a, bws.b}, false}}, 10.0};
  guarded.patches[1].lab = bws;
  std::swap(guarded.patches[0], guarded.patches[1]);
  CHECK(palette_detect(img, regions, guarded).positive_count == 0);
}

TEST_CASE("palette and table files") {
  const auto dir = std::filesystem::temp_directory_path() / "bws_test_palette";
  std::filesystem::create_directories(dir);
  Palette p{{{"5PB 5/4", {50.5, -3.25, -20.125}, true}, {"N5", {51, 0, 0}, false}}, 7.5};
  save_palette(dir / "p.json", p);
  const Palette back = load_palette(dir / "p.json");
  REQUIRE(back.patches.size() == 2);
  CHECK(back.patches[0].id == "5PB 5/4");
  CHECK(back.patches[0].lab.b == -20.125);
  CHECK_FALSE(back.patches[1].is_bws);
  CHECK(back.match_threshold == 7.5);
  CHECK_THROWS_AS(load_palette(dir / "missing.json"), ConfigError);
  CHECK_THROWS_AS(palette_from_json(R"({"version":1,"match_threshold":1,"patches":[{"id":"x","L":1,"a":0,"b":0,"is_bws":false}]})"),
                  DataError);

  {
    std::ofstream t(dir / "table.csv");
    t << "id,L,a,b\nA,10,1,2\nB,20.5,-3,4\n";
    std::ofstream a(dir / "ann.csv");
    a << "L,a,b,is_bws\n10,1,2,1\n20,-3,4,0\n";
    std::ofstream bad(dir / "bad.csv");
    bad << "id,L,a\nA,1,2\n";
  }
  const auto table = load_color_table(dir / "table.csv");
  REQUIRE(table.size() == 2);
  CHECK(table[1].lab.L == 20.5);
  const auto ann = load_annotations(dir / "ann.csv");
  REQUIRE(ann.size() == 2);
  CHECK(ann[0].is_bws);
  CHECK_FALSE(ann[1].is_bws);
  CHECK_THROWS_AS(load_color_table(dir / "bad.csv"), DataError);
  CHECK_THROWS_AS(load_color_table(dir / "none.csv"), ConfigError);
}

TEST_CASE("overlay") {
  ImageRGB img(4, 3, {100, 100, 100});
  DetectionMask m(4, 3);
  m.mark(5);
  m.mark(5);
  CHECK(m.positive_count == 1);
  const auto o = red_overlay(img, m);
  CHECK(o.width == 4);
  CHECK(o.height == 3);
  CHECK(o.at(std::size_t{5}) == Rgb{178, 50, 50});
  CHECK(o.at(std::size_t{0}) == Rgb{100, 100, 100});
  CHECK_THROWS_AS(red_overlay(ImageRGB(2, 2), m), ContractError);
}
