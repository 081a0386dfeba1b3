#include "bws/baselines/palette.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "bws/error.hpp"
#include "json.hpp"

namespace bws::baselines {

namespace {

constexpr int kPaletteFormatVersion = 1;
constexpr double kCumulativeFraction = 0.98;

template <typename Patches, typename Lab>
NearestPatch scan(const Patches& patches, const features::LabPixel& q, Lab lab_of) {
  if (patches.empty()) throw ContractError("nearest patch of an empty palette");
  NearestPatch best{0, features::lab_distance(q, lab_of(patches[0]))};
  for (std::size_t i = 1; i < patches.size(); ++i) {
    const double d = features::lab_distance(q, lab_of(patches[i]));
    if (d < best.distance) best = {i, d};
  }
  return best;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": '" + s + "' is not a number");
  }
}

// Reads a CSV whose first line must equal `header`; missing file is a
// configuration problem.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != split_csv(header))
    throw DataError(path.string() + ": expected header '" + header + "'");
  const std::size_t columns = split_csv(header).size();
  std::vector<std::vector<std::string>> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_csv(line);
    if (cells.size() != columns)
      throw DataError(path.string() + ":" + std::to_string(number) + ": expected " + std::to_string(columns) + " columns");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

NearestPatch nearest_patch(const std::vector<ColorPatch>& table, const features::LabPixel& q) {
  return scan(table, q, [](const ColorPatch& p) { return p.lab; });
}

NearestPatch nearest_patch(const Palette& palette, const features::LabPixel& q) {
  return scan(palette.patches, q, [](const PalettePatch& p) { return p.lab; });
}

Palette palette_build(const std::vector<AnnotatedPixel>& pixels, const std::vector<ColorPatch>& table,
                      double match_threshold) {
  if (table.empty()) throw ConfigError("colour lookup table is empty");
  if (!(match_threshold >= 0.0)) throw ConfigError("match_threshold must be >= 0");
  std::vector<std::size_t> bws_count(table.size(), 0);
  std::vector<std::uint8_t> seen_non_bws(table.size(), 0);
  std::size_t bws_total = 0;
  for (const auto& px : pixels) {
    const std::size_t k = nearest_patch(table, px.lab).index;
    if (px.is_bws) {
      ++bws_count[k];
      ++bws_total;
    } else {
      seen_non_bws[k] = 1;
    }
  }
  if (bws_total == 0) throw DataError("palette needs at least one BWS-annotated pixel");

  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return bws_count[a] > bws_count[b]; });

  Palette palette;
  palette.match_threshold = match_threshold;
  std::size_t covered = 0;
  for (std::size_t k : order) {
    if (bws_count[k] == 0) break;
    if (static_cast<double>(covered) >= kCumulativeFraction * static_cast<double>(bws_total)) break;
    covered += bws_count[k];
    if (!seen_non_bws[k]) palette.patches.push_back({table[k].id, table[k].lab, true});
  }
  if (palette.patches.empty()) throw DataError("every frequent BWS patch also describes non-BWS pixels");
  return palette;
}

DetectionMask palette_detect(const imaging::ImageRGB& image, const imaging::RegionMap& regions,
                             const Palette& palette) {
  if (palette.patches.empty()) throw ContractError("palette is empty");
  if (image.width != regions.width || image.height != regions.height)
    throw ContractError("region map does not match image dimensions");
  DetectionMask out(image.width, image.height);
  for (const auto& region : regions.regions) {
    if (region.pixels.empty()) continue;
    double L = 0, a = 0, b = 0;
    for (std::uint32_t p : region.pixels) {
      const imaging::Rgb c = image.at(static_cast<std::size_t>(p));
      const auto lab = features::srgb_to_lab(c.r, c.g, c.b);
      L += lab.L;
      a += lab.a;
      b += lab.b;
    }
    const double n = static_cast<double>(region.area());
    const NearestPatch best = nearest_patch(palette, {L / n, a / n, b / n});
    if (best.distance <= palette.match_threshold && palette.patches[best.index].is_bws)
      for (std::uint32_t p : region.pixels) out.mark(p);
  }
  return out;
}

std::vector<ColorPatch> load_color_table(const std::filesystem::path& path) {
  std::vector<ColorPatch> table;
  for (const auto& row : read_csv(path, "id,L,a,b")) {
    const std::string where = path.string() + " patch " + row[0];
    table.push_back({row[0], {parse_number(row[1], where), parse_number(row[2], where), parse_number(row[3], where)}});
  }
  if (table.empty()) throw DataError(path.string() + ": colour table has no patches");
  return table;
}

std::vector<AnnotatedPixel> load_annotations(const std::filesystem::path& path) {
  std::vector<AnnotatedPixel> pixels;
  for (const auto& row : read_csv(path, "L,a,b,is_bws")) {
    const std::string where = path.string();
    if (row[3] != "0" && row[3] != "1") throw DataError(where + ": is_bws must be 0 or 1");
    pixels.push_back({{parse_number(row[0], where), parse_number(row[1], where), parse_number(row[2], where)}, row[3] == "1"});
  }
  return pixels;
}

std::string palette_to_json(const Palette& palette) {
  nlohmann::ordered_json j;
  j["version"] = kPaletteFormatVersion;
  j["match_threshold"] = palette.match_threshold;
  auto patches = nlohmann::ordered_json::array();
  for (const auto& p : palette.patches)
    patches.push_back({{"id", p.id}, {"L", p.lab.L}, {"a", p.lab.a}, {"b", p.lab.b}, {"is_bws", p.is_bws}});
  j["patches"] = std::move(patches);
  return j.dump(2) + "\n";
}

Palette palette_from_json(const std::string& text) {
  Palette palette;
  try {
    const auto j = nlohmann::json::parse(text);
    const int version = j.at("version").get<int>();
    if (version != kPaletteFormatVersion) throw DataError("unsupported palette version " + std::to_string(version));
    palette.match_threshold = j.at("match_threshold").get<double>();
    for (const auto& p : j.at("patches")) {
      PalettePatch patch{p.at("id").get<std::string>(),
                         {p.at("L").get<double>(), p.at("a").get<double>(), p.at("b").get<double>()},
                         p.at("is_bws").get<bool>()};
      if (!std::isfinite(patch.lab.L) || !std::isfinite(patch.lab.a) || !std::isfinite(patch.lab.b))
        throw DataError("palette patch " + patch.id + " has a non-finite colour");
      palette.patches.push_back(std::move(patch));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed palette file: ") + e.what());
  }
  if (!(palette.match_threshold >= 0.0)) throw DataError("palette match_threshold must be >= 0");
  if (std::none_of(palette.patches.begin(), palette.patches.end(), [](const PalettePatch& p) { return p.is_bws; }))
    throw DataError("palette has no BWS patch");
  return palette;
}

void save_palette(const std::filesystem::path& path, const Palette& palette) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write palette file " + path.string());
  out << palette_to_json(palette);
  if (!out) throw IoError("failed writing palette file " + path.string());
}

Palette load_palette(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read palette file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return palette_from_json(ss.str());
}

}  // namespace bws::baselines
