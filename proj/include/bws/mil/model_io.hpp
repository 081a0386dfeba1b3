#pragma once

#include <filesystem>
#include <string>

#include "bws/mil/types.hpp"

namespace bws::mil {

inline constexpr int kModelFormatVersion = 1;

/// Model document: {version, D, lambda, bias_included, feature_fingerprint,
/// weights, config?}. Weights are written with 17 significant digits so
/// that load(save(m)) reproduces every bit. `config_json`, if non-empty,
/// must be a JSON object and is embedded verbatim under "config".
std::string model_to_json(const ModelWeights& model, const std::string& config_json = {});
ModelWeights model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelWeights& model,
                const std::string& config_json = {});
ModelWeights load_model(const std::filesystem::path& path);

/// Throws ConfigError naming both fingerprints when they differ.
void check_fingerprint(const ModelWeights& model, const std::string& fingerprint);

}  // namespace bws::mil
