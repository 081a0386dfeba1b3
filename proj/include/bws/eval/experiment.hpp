#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bws/baselines/palette.hpp"
#include "bws/eval/manifest.hpp"
#include "bws/eval/metrics.hpp"
#include "bws/features/bag_io.hpp"
#include "bws/features/extractor.hpp"
#include "bws/mil/trainer.hpp"

namespace bws::eval {

enum class Method { Mimn, Celebi, Palette };

std::string to_string(Method method);
/// "mimn" | "celebi" | "palette"; throws ConfigError.
Method method_from_string(const std::string& name);

struct ExperimentConfig {
  Method method = Method::Mimn;
  int folds = 3;
  std::uint64_t seed = 0;
  mil::TrainConfig train;
  features::FeatureConfig features;
  features::ExtractionOptions extraction;
  double min_fraction = 0.0;  ///< baselines: detection-to-image-label rule
  std::optional<baselines::Palette> palette;
  int threads = 1;
  std::filesystem::path overlay_dir;  ///< empty: no overlays
};

struct ItemOutcome {
  std::string id;
  mil::Label truth = mil::Label::Negative;
  mil::Label predicted = mil::Label::Negative;
  int fold = 0;
  std::vector<int> positive_regions;  ///< mimn on images: region ids labelled +1
  std::optional<std::vector<mil::Label>> instance_labels;  ///< mimn: inferred labeling
  std::size_t detected_pixels = 0;  ///< baselines
  std::vector<std::string> warnings;
};

struct ExperimentResult {
  EvalReport report;
  std::vector<ItemOutcome> items;  ///< manifest order
  std::vector<std::vector<mil::TraceEntry>> traces;  ///< one per trained model
};

/// One evaluated item: a bag plus, when it came from an image, the image
/// and its segmentation.
struct LoadedItem {
  features::BagFile bag;
  std::optional<imaging::ImageRGB> image;
  std::optional<imaging::RegionMap> regions;
  std::vector<std::string> warnings;
};

/// Loads bag files or extracts bags from images (in parallel); the manifest
/// label overrides the bag's own. Baseline methods load only the image
/// (and its regions for the palette matcher). Throws DataError naming the item on
/// failure.
std::vector<LoadedItem> load_items(const Manifest& manifest, const ExperimentConfig& cfg);

/// k-fold protocol. mimn trains on k-1 folds and tests on the remaining
/// one; baselines need no training and are scored on the same folds.
ExperimentResult run_experiment(const Manifest& manifest, const ExperimentConfig& cfg);

/// Train on one manifest, test on another (single fold).
ExperimentResult run_cross_dataset(const Manifest& train, const Manifest& test, const ExperimentConfig& cfg);

}  // namespace bws::eval
