#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bws/mil/cardinality.hpp"
#include "bws/mil/types.hpp"

namespace bws::mil {

enum class InnerSolver { Subgradient, CuttingPlane };

enum class StepDecay {
  InverseSqrt,  ///< eta_t = eta_0 / sqrt(t)
  Constant,     ///< eta_t = eta_0
};

/// Subgradient step lengths, measured along the normalized subgradient.
struct StepSchedule {
  double initial = 1.0;
  StepDecay decay = StepDecay::InverseSqrt;
};

struct TrainConfig {
  double lambda = 1.0;
  int max_outer_iters = 50;
  InnerSolver inner_solver = InnerSolver::Subgradient;
  double inner_tolerance = 1e-4;
  double outer_tolerance = 1e-6;
  int max_inner_iters = 2000;
  StepSchedule step;
  /// Recorded for provenance; the solvers themselves are deterministic.
  std::uint64_t seed = 0;
  bool bias_included = true;
  /// Workers for per-bag inference inside one iteration.
  int threads = 1;

  void validate() const;
};

std::string to_string(InnerSolver solver);
InnerSolver inner_solver_from_string(const std::string& name);
std::string to_string(StepDecay decay);
StepDecay step_decay_from_string(const std::string& name);

struct TraceEntry {
  int iteration = 0;         ///< 0 = initial point
  double objective = 0.0;    ///< full non-convex objective at the iterate
  double bound = 0.0;        ///< convex upper bound the inner solver reached
  int inner_iterations = 0;
};

struct TrainResult {
  ModelWeights model;
  std::vector<TraceEntry> trace;
  bool converged = false;
};

/// Concave-convex training of the max-margin objective.
///
/// Each outer step fixes the labeling achieving R_n at the current w,
/// which turns -R_n into a linear lower bound and the objective into a
/// convex upper bound tight at w. The inner solver minimizes that bound;
/// its answer is accepted only if the bound does not increase, so the
/// traced objective is non-increasing.
TrainResult train(const std::vector<Bag>& bags, const TrainConfig& config,
                  const CardinalityModel& model = CardinalityModel::standard_mil(),
                  const std::string& feature_fingerprint = {});

}  // namespace bws::mil
