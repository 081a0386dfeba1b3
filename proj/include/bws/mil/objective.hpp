#pragma once

#include <vector>

#include "bws/mil/cardinality.hpp"
#include "bws/mil/types.hpp"

namespace bws::mil {

/// Regularized max-margin objective
///   sum_n (L_n - R_n) + lambda/2 |w|^2
/// with L_n the loss-augmented score and R_n = F_w(X_n, Y_n).
double objective(const ModelWeights& w, const CardinalityModel& model, const std::vector<Bag>& bags,
                 double lambda, int threads = 1);

/// L_n - R_n for one labeled bag; always >= 0.
double bag_hinge(const ModelWeights& w, const CardinalityModel& model, const Bag& bag);

}  // namespace bws::mil
