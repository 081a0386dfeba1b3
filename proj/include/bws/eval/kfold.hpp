#pragma once

#include <cstdint>
#include <vector>

#include "bws/mil/types.hpp"

namespace bws::eval {

/// Stratified k-fold split of item indices. Each class is shuffled with the
/// seed and dealt round-robin, so per-class fold sizes differ by at most
/// one. Indices inside a fold are ascending. Throws DataError when N < k.
std::vector<std::vector<std::size_t>> kfold_split(const std::vector<mil::Label>& labels, int k, std::uint64_t seed);

}  // namespace bws::eval
