#include "bws/features/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>

#include "bws/error.hpp"
#include "json.hpp"

namespace bws::features {

namespace {

void check_range(const char* name, const ChannelRange& r) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.hi > r.lo))
    throw ConfigError(std::string("lab range for ") + name + " must satisfy lo < hi");
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void FeatureConfig::validate() const {
  if (!(lab_bin_size > 0.0 && std::isfinite(lab_bin_size))) throw ConfigError("lab_bin_size must be > 0");
  check_range("L", L_range);
  check_range("a", a_range);
  check_range("b", b_range);
  for (const auto& v : lbp_variants) {
    if (v.points < 4 || v.points > 32) throw ConfigError("lbp points must be in [4, 32]");
    if (!(v.radius > 0.0)) throw ConfigError("lbp radius must be > 0");
  }
  if (mr8_bins < 1) throw ConfigError("mr8_bins must be >= 1");
  if (!(mr8_clip > 0.0)) throw ConfigError("mr8_clip must be > 0");
  if (!(mr8_weber > 0.0)) throw ConfigError("mr8_weber must be > 0");
  if (!include_color && !include_texture) throw ConfigError("at least one feature family must be enabled");
}

std::size_t FeatureConfig::lab_channel_bins(const ChannelRange& range) const {
  // Guard against ratios like 220/5 landing a hair above an integer.
  const double ratio = (range.hi - range.lo) / lab_bin_size;
  return static_cast<std::size_t>(std::ceil(ratio - 1e-9));
}

std::size_t FeatureConfig::lab_dimension() const {
  if (!include_color) return 0;
  return lab_channel_bins(L_range) + lab_channel_bins(a_range) + lab_channel_bins(b_range);
}

std::size_t FeatureConfig::lbp_dimension() const {
  if (!include_texture) return 0;
  std::size_t d = 0;
  for (const auto& v : lbp_variants) d += static_cast<std::size_t>(v.points) + 2;
  return d;
}

std::size_t FeatureConfig::mr8_dimension() const {
  return include_texture ? 8 * static_cast<std::size_t>(mr8_bins) : 0;
}

std::size_t FeatureConfig::dimension() const { return lab_dimension() + lbp_dimension() + mr8_dimension(); }

std::string FeatureConfig::to_json() const {
  nlohmann::ordered_json j;
  j["lab_bin_size"] = lab_bin_size;
  j["lab_ranges"] = {{"L", {L_range.lo, L_range.hi}}, {"a", {a_range.lo, a_range.hi}}, {"b", {b_range.lo, b_range.hi}}};
  auto variants = nlohmann::ordered_json::array();
  for (const auto& v : lbp_variants) variants.push_back({v.points, v.radius});
  j["lbp_variants"] = variants;
  j["mr8_bins"] = mr8_bins;
  j["mr8_clip"] = mr8_clip;
  j["mr8_weber"] = mr8_weber;
  j["include_color"] = include_color;
  j["include_texture"] = include_texture;
  return j.dump();
}

std::string FeatureConfig::fingerprint() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fv1-%016llx", static_cast<unsigned long long>(fnv1a(to_json())));
  return buf;
}

FeatureConfig feature_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("feature config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("feature config must be a JSON object");
  FeatureConfig cfg;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const auto& v = it.value();
      if (key == "lab_bin_size") {
        cfg.lab_bin_size = v.get<double>();
      } else if (key == "lab_ranges") {
        for (auto r = v.begin(); r != v.end(); ++r) {
          const auto pair = r.value().get<std::vector<double>>();
          if (pair.size() != 2) throw ConfigError("lab range '" + r.key() + "' must be [lo, hi]");
          ChannelRange range{pair[0], pair[1]};
          if (r.key() == "L") cfg.L_range = range;
          else if (r.key() == "a") cfg.a_range = range;
          else if (r.key() == "b") cfg.b_range = range;
          else throw ConfigError("unknown lab range channel '" + r.key() + "'");
        }
      } else if (key == "lbp_variants") {
        cfg.lbp_variants.clear();
        for (const auto& pr : v) {
          if (!pr.is_array() || pr.size() != 2) throw ConfigError("lbp variant must be [P, R]");
          cfg.lbp_variants.push_back({pr[0].get<int>(), pr[1].get<double>()});
        }
      } else if (key == "mr8_bins") {
        cfg.mr8_bins = v.get<int>();
      } else if (key == "mr8_clip") {
        cfg.mr8_clip = v.get<double>();
      } else if (key == "mr8_weber") {
        cfg.mr8_weber = v.get<double>();
      } else if (key == "include_color") {
        cfg.include_color = v.get<bool>();
      } else if (key == "include_texture") {
        cfg.include_texture = v.get<bool>();
      } else {
        throw ConfigError("unknown feature config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad feature config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace bws::features
