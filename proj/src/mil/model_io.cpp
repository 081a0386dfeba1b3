#include "bws/mil/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bws::mil {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string model_to_json(const ModelWeights& model, const std::string& config_json) {
  if (!(model.lambda > 0.0)) throw ContractError("model lambda must be > 0");
  for (double v : model.w)
    if (!std::isfinite(v)) throw NumericalError("refusing to save a model with non-finite weights");

  std::ostringstream os;
  os << "{\n";
  os << "  \"version\": " << kModelFormatVersion << ",\n";
  os << "  \"D\": " << model.feature_dim() << ",\n";
  os << "  \"lambda\": " << format_double(model.lambda) << ",\n";
  os << "  \"bias_included\": " << (model.bias_included ? "true" : "false") << ",\n";
  os << "  \"feature_fingerprint\": " << nlohmann::json(model.feature_fingerprint).dump() << ",\n";
  os << "  \"weights\": [";
  for (std::size_t j = 0; j < model.w.size(); ++j) {
    if (j) os << ", ";
    os << format_double(model.w[j]);
  }
  os << "]";
  if (!config_json.empty()) {
    const auto config = nlohmann::ordered_json::parse(config_json);
    if (!config.is_object()) throw ContractError("embedded model config must be a JSON object");
    os << ",\n  \"config\": " << config.dump();
  }
  os << "\n}\n";
  return os.str();
}

ModelWeights model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw DataError("unsupported model version " + std::to_string(version));
    ModelWeights model;
    const auto d = doc.at("D").get<std::size_t>();
    model.lambda = doc.at("lambda").get<double>();
    model.bias_included = doc.at("bias_included").get<bool>();
    model.feature_fingerprint = doc.at("feature_fingerprint").get<std::string>();
    model.w = doc.at("weights").get<std::vector<double>>();
    if (model.w.size() != d + (model.bias_included ? 1 : 0))
      throw DataError("model has " + std::to_string(model.w.size()) + " weights but D=" +
                      std::to_string(d));
    if (!(model.lambda > 0.0)) throw DataError("model lambda must be > 0");
    for (double v : model.w)
      if (!std::isfinite(v)) throw DataError("model contains non-finite weights");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelWeights& model,
                const std::string& config_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << model_to_json(model, config_json);
  if (!out) throw IoError("failed writing model file " + path.string());
}

ModelWeights load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

void check_fingerprint(const ModelWeights& model, const std::string& fingerprint) {
  if (model.feature_fingerprint != fingerprint)
    throw ConfigError("feature fingerprint mismatch: model has '" + model.feature_fingerprint +
                      "', input has '" + fingerprint + "'");
}

}  // namespace bws::mil
