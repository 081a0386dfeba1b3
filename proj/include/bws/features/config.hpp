#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bws::features {

/// One LBP sampling ring: P neighbours at radius R.
struct LbpVariant {
  int points = 8;
  double radius = 1.0;
  friend bool operator==(const LbpVariant&, const LbpVariant&) = default;
};

struct ChannelRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct FeatureConfig {
  double lab_bin_size = 5.0;
  ChannelRange L_range{0.0, 100.0};
  ChannelRange a_range{-110.0, 110.0};
  ChannelRange b_range{-110.0, 110.0};
  std::vector<LbpVariant> lbp_variants{{8, 1.0}, {16, 2.0}};
  int mr8_bins = 8;
  double mr8_clip = 3.0;
  double mr8_weber = 0.03;  ///< contrast normalisation constant
  bool include_color = true;
  bool include_texture = true;

  /// Throws ConfigError.
  void validate() const;

  /// Number of bins for one Lab channel: ceil((hi - lo) / bin size).
  std::size_t lab_channel_bins(const ChannelRange& range) const;
  std::size_t lab_dimension() const;
  std::size_t lbp_dimension() const;
  std::size_t mr8_dimension() const;
  std::size_t dimension() const;

  /// Stable hash of every field, "fv1-" followed by 16 hex digits.
  std::string fingerprint() const;

  /// Canonical JSON text of all fields.
  std::string to_json() const;
};

/// Parses a JSON object of FeatureConfig fields; missing keys keep their
/// defaults, unknown keys throw ConfigError.
FeatureConfig feature_config_from_json(const std::string& text);

}  // namespace bws::features
