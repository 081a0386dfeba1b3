#pragma once

#include <optional>
#include <vector>

#include "bws/baselines/detection.hpp"
#include "bws/imaging/lesion.hpp"
#include "bws/mil/types.hpp"

namespace bws::eval {

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  Confusion& operator+=(const Confusion& o);
};

/// Percentages. A ratio with a zero denominator is reported as 0 and its
/// flag is set.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  double specificity = 0.0;
  bool accuracy_undefined = false;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f_score_undefined = false;
  bool specificity_undefined = false;
};

Confusion confusion(const std::vector<mil::Label>& predictions, const std::vector<mil::Label>& truths);
Metrics metrics_from_counts(const Confusion& c);

struct FoldReport {
  Confusion counts;
  Metrics metrics;
  std::optional<double> instance_accuracy;  ///< percent, when ground truth exists
};

struct EvalReport {
  FoldReport overall;
  std::vector<FoldReport> per_fold;
};

/// Image label from a pixel detection: positive iff the detected pixels
/// inside the lesion number at least min_fraction * lesion_area, and at
/// least one.
mil::Label propagate_labels(const baselines::DetectionMask& detection, const imaging::LesionMask& lesion,
                            double min_fraction = 0.0);

}  // namespace bws::eval
