#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bws/features/bag_io.hpp"
#include "bws/imaging/image.hpp"
#include "bws/mil/types.hpp"

namespace bws::eval {

enum class SynthMode { VectorBags, Images };

std::string to_string(SynthMode mode);
/// "vector_bags" | "images"; throws ConfigError.
SynthMode synth_mode_from_string(const std::string& name);

struct SynthConfig {
  SynthMode mode = SynthMode::VectorBags;
  int n_pos = 100;
  int n_neg = 100;
  int m_min = 3;  ///< vector_bags: instances per bag
  int m_max = 8;
  std::vector<double> mu_pos{2.0, 0.0};  ///< also fixes D
  std::vector<double> mu_neg{-2.0, 0.0};
  double sigma = 0.3;
  int image_size = 96;       ///< images: square side in pixels
  double pixel_noise = 3.0;  ///< images: per-channel Gaussian sigma
  bool confounder = true;    ///< images: dark brown patch in some lesions
  std::uint64_t seed = 7;

  void validate() const;
};

inline constexpr imaging::Rgb kSkinColor{220, 170, 150};
inline constexpr imaging::Rgb kLesionColor{130, 90, 70};
inline constexpr imaging::Rgb kBwsColor{90, 110, 150};
inline constexpr imaging::Rgb kConfounderColor{90, 60, 45};

/// Instance labels carry the generative truth. Positive bags hold between 1 and m positive-cluster instances at random
/// positions; negative bags hold only negative-cluster instances. Bag ids
/// are "pos-0007" / "neg-0012", positives first.
std::vector<features::BagFile> synth_vector_bags(const SynthConfig& cfg);

struct SynthImage {
  std::string id;
  mil::Label label = mil::Label::Negative;
  imaging::ImageRGB image;
};

/// Skin background with a brown lesion disk. Positive images carry a
/// blue-gray blob covering at least 10% of the lesion.
std::vector<SynthImage> synth_images(const SynthConfig& cfg);

/// Writes bags or images plus manifest.csv into `dir`; returns the
/// manifest path.
std::filesystem::path synth_write(const SynthConfig& cfg, const std::filesystem::path& dir);

}  // namespace bws::eval
