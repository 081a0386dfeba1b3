#include "bws/features/bag_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bws::features {

std::string bag_to_json(const BagFile& file) {
  const mil::Bag& bag = file.bag;
  if (bag.instances.empty()) throw EmptyBagError("refusing to write empty bag '" + bag.bag_id + "'");
  nlohmann::ordered_json j;
  j["version"] = kBagFormatVersion;
  j["bag_id"] = bag.bag_id;
  j["label"] = bag.label ? nlohmann::ordered_json(mil::sign(*bag.label)) : nlohmann::ordered_json(nullptr);
  j["m"] = bag.size();
  j["D"] = bag.dimension();
  j["fingerprint"] = file.fingerprint;
  auto instances = nlohmann::ordered_json::array();
  for (const auto& inst : bag.instances) {
    for (double v : inst.features)
      if (!std::isfinite(v)) throw NumericalError("bag '" + bag.bag_id + "' has a non-finite feature");
    nlohmann::ordered_json e;
    e["region_id"] = inst.source_region_id ? nlohmann::ordered_json(*inst.source_region_id) : nlohmann::ordered_json(nullptr);
    e["features"] = inst.features;
    instances.push_back(std::move(e));
  }
  j["instances"] = std::move(instances);
  if (file.instance_labels) {
    if (file.instance_labels->size() != bag.size())
      throw ContractError("instance label count does not match bag size");
    auto labels = nlohmann::ordered_json::array();
    for (mil::Label y : *file.instance_labels) labels.push_back(mil::sign(y));
    j["instance_labels"] = std::move(labels);
  }
  return j.dump() + "\n";
}

BagFile bag_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bag file is not valid JSON: ") + e.what());
  }
  BagFile out;
  try {
    const int version = j.at("version").get<int>();
    if (version != kBagFormatVersion) throw DataError("unsupported bag file version " + std::to_string(version));
    out.bag.bag_id = j.at("bag_id").get<std::string>();
    const auto& label = j.at("label");
    if (!label.is_null()) out.bag.label = mil::label_from_int(label.get<int>());
    out.fingerprint = j.at("fingerprint").get<std::string>();
    const auto m = j.at("m").get<std::size_t>();
    const auto d = j.at("D").get<std::size_t>();
    for (const auto& e : j.at("instances")) {
      mil::Instance inst;
      inst.features = e.at("features").get<std::vector<double>>();
      if (e.contains("region_id") && !e["region_id"].is_null()) inst.source_region_id = e["region_id"].get<int>();
      if (inst.features.size() != d)
        throw DataError("bag '" + out.bag.bag_id + "': instance has " + std::to_string(inst.features.size()) +
                        " features, expected D=" + std::to_string(d));
      out.bag.instances.push_back(std::move(inst));
    }
    if (out.bag.size() != m)
      throw DataError("bag '" + out.bag.bag_id + "': m=" + std::to_string(m) + " but " +
                      std::to_string(out.bag.size()) + " instances");
    if (m == 0) throw EmptyBagError("bag '" + out.bag.bag_id + "' has no instances");
    if (j.contains("instance_labels")) {
      std::vector<mil::Label> labels;
      for (const auto& v : j["instance_labels"]) labels.push_back(mil::label_from_int(v.get<int>()));
      if (labels.size() != m) throw DataError("bag '" + out.bag.bag_id + "': instance label count differs from m");
      out.instance_labels = std::move(labels);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed bag file: ") + e.what());
  } catch (const ContractError& e) {
    throw DataError(std::string("malformed bag file: ") + e.what());
  }
  return out;
}

void save_bag(const std::filesystem::path& path, const BagFile& file) {
  const std::string text = bag_to_json(file);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write bag file " + path.string());
  out << text;
  if (!out) throw IoError("failed writing bag file " + path.string());
}

BagFile load_bag(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read bag file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return bag_from_json(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace bws::features
