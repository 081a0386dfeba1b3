#include "bws/cli/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bws/error.hpp"
#include "json.hpp"

namespace bws::cli {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using Handler = std::function<void(const json&)>;

// Applies one handler per key and rejects anything unknown.
void apply(const json& section, const std::string& name, const std::map<std::string, Handler>& handlers) {
  if (!section.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  for (auto it = section.begin(); it != section.end(); ++it) {
    const auto h = handlers.find(it.key());
    if (h == handlers.end())
      throw ConfigError("unknown config key '" + (name.empty() ? it.key() : name + "." + it.key()) + "'");
    try {
      h->second(it.value());
    } catch (const json::exception& e) {
      throw ConfigError("bad value for config key '" + it.key() + "': " + e.what());
    }
  }
}

}  // namespace

void CliConfig::validate() const {
  if (threads < 1) throw ConfigError("threads must be >= 1");
  features.validate();
  extraction.meanshift.validate();
  if (extraction.grid_cell < 4) throw ConfigError("grid_cell must be >= 4");
  train.validate();
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) throw ConfigError("min_fraction must be in [0, 1]");
  if (!(match_threshold >= 0.0)) throw ConfigError("match_threshold must be >= 0");
  synth.validate();
}

std::string CliConfig::to_json() const {
  ordered_json j;
  j["seed"] = seed;
  j["threads"] = threads;
  j["features"] = ordered_json::parse(features.to_json());
  j["feature_fingerprint"] = features.fingerprint();
  const auto& ms = extraction.meanshift;
  j["segmentation"] = {{"mode", features::to_string(extraction.mode)},
                       {"spatial_bandwidth", ms.spatial_bandwidth},
                       {"range_bandwidth", ms.range_bandwidth},
                       {"min_region_area", ms.min_region_area},
                       {"max_iterations", ms.max_iterations},
                       {"convergence", ms.convergence},
                       {"grid_cell", extraction.grid_cell}};
  j["train"] = {{"lambda", train.lambda},
                {"max_outer_iters", train.max_outer_iters},
                {"inner_solver", mil::to_string(train.inner_solver)},
                {"inner_tolerance", train.inner_tolerance},
                {"outer_tolerance", train.outer_tolerance},
                {"max_inner_iters", train.max_inner_iters},
                {"step_initial", train.step.initial},
                {"step_decay", mil::to_string(train.step.decay)},
                {"bias_included", train.bias_included}};
  j["eval"] = {{"folds", folds}, {"min_fraction", min_fraction}};
  j["palette"] = {{"match_threshold", match_threshold}};
  j["synth"] = {{"mode", eval::to_string(synth.mode)},
                {"n_pos", synth.n_pos},
                {"n_neg", synth.n_neg},
                {"m_min", synth.m_min},
                {"m_max", synth.m_max},
                {"mu_pos", synth.mu_pos},
                {"mu_neg", synth.mu_neg},
                {"sigma", synth.sigma},
                {"image_size", synth.image_size},
                {"pixel_noise", synth.pixel_noise},
                {"confounder", synth.confounder}};
  return j.dump();
}

CliConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  CliConfig c;
  auto& ms = c.extraction.meanshift;
  apply(doc, "",
        {{"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }},
         {"threads", [&](const json& v) { c.threads = v.get<int>(); }},
         {"feature_fingerprint", [](const json&) {}},  // derived; accepted so echoed configs load back
         {"features", [&](const json& v) { c.features = features::feature_config_from_json(v.dump()); }},
         {"segmentation",
          [&](const json& v) {
            apply(v, "segmentation",
                  {{"mode", [&](const json& x) { c.extraction.mode = features::segmentation_from_string(x.get<std::string>()); }},
                   {"spatial_bandwidth", [&](const json& x) { ms.spatial_bandwidth = x.get<double>(); }},
                   {"range_bandwidth", [&](const json& x) { ms.range_bandwidth = x.get<double>(); }},
                   {"min_region_area", [&](const json& x) { ms.min_region_area = x.get<double>(); }},
                   {"max_iterations", [&](const json& x) { ms.max_iterations = x.get<int>(); }},
                   {"convergence", [&](const json& x) { ms.convergence = x.get<double>(); }},
                   {"grid_cell", [&](const json& x) { c.extraction.grid_cell = x.get<int>(); }}});
          }},
         {"train",
          [&](const json& v) {
            apply(v, "train",
                  {{"lambda", [&](const json& x) { c.train.lambda = x.get<double>(); }},
                   {"max_outer_iters", [&](const json& x) { c.train.max_outer_iters = x.get<int>(); }},
                   {"inner_solver", [&](const json& x) { c.train.inner_solver = mil::inner_solver_from_string(x.get<std::string>()); }},
                   {"inner_tolerance", [&](const json& x) { c.train.inner_tolerance = x.get<double>(); }},
                   {"outer_tolerance", [&](const json& x) { c.train.outer_tolerance = x.get<double>(); }},
                   {"max_inner_iters", [&](const json& x) { c.train.max_inner_iters = x.get<int>(); }},
                   {"step_initial", [&](const json& x) { c.train.step.initial = x.get<double>(); }},
                   {"step_decay", [&](const json& x) { c.train.step.decay = mil::step_decay_from_string(x.get<std::string>()); }},
                   {"bias_included", [&](const json& x) { c.train.bias_included = x.get<bool>(); }}});
          }},
         {"eval",
          [&](const json& v) {
            apply(v, "eval",
                  {{"folds", [&](const json& x) { c.folds = x.get<int>(); }},
                   {"min_fraction", [&](const json& x) { c.min_fraction = x.get<double>(); }}});
          }},
         {"palette",
          [&](const json& v) {
            apply(v, "palette", {{"match_threshold", [&](const json& x) { c.match_threshold = x.get<double>(); }}});
          }},
         {"synth", [&](const json& v) {
            apply(v, "synth",
                  {{"mode", [&](const json& x) { c.synth.mode = eval::synth_mode_from_string(x.get<std::string>()); }},
                   {"n_pos", [&](const json& x) { c.synth.n_pos = x.get<int>(); }},
                   {"n_neg", [&](const json& x) { c.synth.n_neg = x.get<int>(); }},
                   {"m_min", [&](const json& x) { c.synth.m_min = x.get<int>(); }},
                   {"m_max", [&](const json& x) { c.synth.m_max = x.get<int>(); }},
                   {"mu_pos", [&](const json& x) { c.synth.mu_pos = x.get<std::vector<double>>(); }},
                   {"mu_neg", [&](const json& x) { c.synth.mu_neg = x.get<std::vector<double>>(); }},
                   {"sigma", [&](const json& x) { c.synth.sigma = x.get<double>(); }},
                   {"image_size", [&](const json& x) { c.synth.image_size = x.get<int>(); }},
                   {"pixel_noise", [&](const json& x) { c.synth.pixel_noise = x.get<double>(); }},
                   {"confounder", [&](const json& x) { c.synth.confounder = x.get<bool>(); }}});
          }}});
  c.validate();
  return c;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

}  // namespace bws::cli
