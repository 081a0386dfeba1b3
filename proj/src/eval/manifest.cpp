#include "bws/eval/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "bws/error.hpp"

namespace bws::eval {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::vector<mil::Label> Manifest::labels() const {
  std::vector<mil::Label> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.label);
  return out;
}

void validate(const Manifest& manifest) {
  if (manifest.entries.empty()) throw DataError("manifest has no entries");
  std::set<std::string> ids;
  for (const auto& e : manifest.entries) {
    if (e.id.empty()) throw DataError("manifest entry with an empty id");
    if (!ids.insert(e.id).second) throw DataError("duplicate manifest id '" + e.id + "'");
  }
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  std::string line;
  if (!std::getline(in, line) || split(line) != std::vector<std::string>{"id", "path_or_bagfile", "label"})
    throw DataError(path.string() + ": expected header 'id,path_or_bagfile,label'");
  Manifest manifest;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    const std::string where = path.string() + ":" + std::to_string(number);
    if (cells.size() != 3) throw DataError(where + ": expected 3 columns");
    ManifestEntry e;
    e.id = cells[0];
    std::filesystem::path p(cells[1]);
    e.path = p.is_absolute() ? p : base / p;
    if (cells[2] == "1" || cells[2] == "+1") e.label = mil::Label::Positive;
    else if (cells[2] == "-1") e.label = mil::Label::Negative;
    else throw DataError(where + ": label must be +1 or -1, got '" + cells[2] + "'");
    manifest.entries.push_back(std::move(e));
  }
  validate(manifest);
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  out << "id,path_or_bagfile,label\n";
  for (const auto& e : manifest.entries) {
    std::filesystem::path p = e.path;
    if (p.is_absolute() || !base.empty()) {
      const auto rel = p.lexically_relative(base.empty() ? std::filesystem::path(".") : base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    out << e.id << ',' << p.generic_string() << ',' << mil::sign(e.label) << '\n';
  }
  if (!out) throw IoError("failed writing manifest " + path.string());
}

}  // namespace bws::eval
