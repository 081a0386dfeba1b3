#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bws/mil/types.hpp"

namespace bws::features {

inline constexpr int kBagFormatVersion = 1;

/// A bag as stored on disk. Instance labels are optional ground truth
/// (synthetic data) and never used for training.
struct BagFile {
  mil::Bag bag;
  std::string fingerprint;
  std::optional<std::vector<mil::Label>> instance_labels;
};

/// {version, bag_id, label (+1, -1 or null), m, D, fingerprint,
///  instances: [{region_id, features}], instance_labels?}
std::string bag_to_json(const BagFile& file);
/// Checks m and D against the instance list; throws DataError.
BagFile bag_from_json(const std::string& text);

void save_bag(const std::filesystem::path& path, const BagFile& file);
BagFile load_bag(const std::filesystem::path& path);

}  // namespace bws::features
