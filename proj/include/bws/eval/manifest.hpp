#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bws/mil/types.hpp"

namespace bws::eval {

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;  ///< image or bag file, resolved against the manifest directory
  mil::Label label = mil::Label::Negative;

  bool is_bag_file() const { return path.extension() == ".json"; }
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<mil::Label> labels() const;
};

/// CSV with header `id,path_or_bagfile,label`. Relative paths are resolved
/// against the manifest's directory. Throws DataError on duplicate ids,
/// labels other than +1/-1, or an empty manifest; a missing file is a
/// ConfigError.
Manifest load_manifest(const std::filesystem::path& path);

/// Writes paths relative to the manifest directory when possible.
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

void validate(const Manifest& manifest);

}  // namespace bws::eval
