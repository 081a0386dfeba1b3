#include "bws/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "bws/error.hpp"

namespace bws::eval {

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

Confusion confusion(const std::vector<mil::Label>& predictions, const std::vector<mil::Label>& truths) {
  if (predictions.size() != truths.size())
    throw ContractError("prediction count " + std::to_string(predictions.size()) + " differs from truth count " +
                        std::to_string(truths.size()));
  Confusion c;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool pred = predictions[i] == mil::Label::Positive;
    const bool truth = truths[i] == mil::Label::Positive;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace {

double percent(std::size_t num, std::size_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics metrics_from_counts(const Confusion& c) {
  Metrics m;
  m.accuracy = percent(c.tp + c.tn, c.total(), m.accuracy_undefined);
  m.precision = percent(c.tp, c.tp + c.fp, m.precision_undefined);
  m.recall = percent(c.tp, c.tp + c.fn, m.recall_undefined);
  m.specificity = percent(c.tn, c.tn + c.fp, m.specificity_undefined);
  // 2PR/(P+R) = 2tp / (2tp + fp + fn).
  m.f_score = percent(2 * c.tp, 2 * c.tp + c.fp + c.fn, m.f_score_undefined);
  if (m.precision_undefined || m.recall_undefined || m.precision + m.recall == 0.0) {
    m.f_score_undefined = true;
    m.f_score = 0.0;
  }
  return m;
}

mil::Label propagate_labels(const baselines::DetectionMask& detection, const imaging::LesionMask& lesion,
                            double min_fraction) {
  if (detection.width != lesion.width || detection.height != lesion.height)
    throw ContractError("detection mask and lesion mask dimensions differ");
  if (!(min_fraction >= 0.0)) throw ContractError("min_fraction must be >= 0");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < detection.positive.size(); ++i)
    if (detection.positive[i] && lesion.inside[i]) ++inside;
  const double needed = std::max(1.0, min_fraction * static_cast<double>(lesion.lesion_area));
  return static_cast<double>(inside) >= needed ? mil::Label::Positive : mil::Label::Negative;
}

}  // namespace bws::eval
