#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bws/eval/synth.hpp"
#include "bws/features/config.hpp"
#include "bws/features/extractor.hpp"
#include "bws/mil/trainer.hpp"

namespace bws::cli {

/// Everything a command can be configured with. Loaded from a JSON file
/// with sections "features", "segmentation", "train", "eval", "palette"
/// and "synth" plus top-level "seed" and "threads"; command-line flags
/// override file values.
struct CliConfig {
  std::uint64_t seed = 0;
  int threads = 1;
  features::FeatureConfig features;
  features::ExtractionOptions extraction;
  mil::TrainConfig train;
  int folds = 3;
  double min_fraction = 0.0;
  double match_threshold = 10.0;
  eval::SynthConfig synth;

  /// Throws ConfigError.
  void validate() const;
  /// Effective configuration as a JSON object (echoed into outputs).
  std::string to_json() const;
};

/// Missing keys keep their defaults; unknown keys throw ConfigError.
CliConfig config_from_json(const std::string& text);
CliConfig load_config(const std::filesystem::path& path);

}  // namespace bws::cli
