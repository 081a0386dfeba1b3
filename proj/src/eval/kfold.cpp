#include "bws/eval/kfold.hpp"

#include <algorithm>

#include "bws/error.hpp"
#include "bws/random.hpp"

namespace bws::eval {

std::vector<std::vector<std::size_t>> kfold_split(const std::vector<mil::Label>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("folds must be >= 2");
  if (labels.size() < static_cast<std::size_t>(k))
    throw DataError("cannot split " + std::to_string(labels.size()) + " items into " + std::to_string(k) + " folds");
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t next = 0;
  for (mil::Label cls : {mil::Label::Positive, mil::Label::Negative}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    rng.shuffle(members);
    // Continue dealing where the previous class stopped so total fold
    // sizes also stay balanced.
    for (std::size_t i : members) {
      folds[next].push_back(i);
      next = (next + 1) % folds.size();
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace bws::eval
