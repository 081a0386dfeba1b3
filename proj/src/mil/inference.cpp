#include "bws/mil/inference.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace bws::mil {

std::size_t Bag::dimension() const {
  if (instances.empty()) throw ContractError("bag '" + bag_id + "' has no instances");
  const std::size_t d = instances.front().features.size();
  for (const auto& inst : instances)
    if (inst.features.size() != d)
      throw ContractError("bag '" + bag_id + "' mixes feature dimensions");
  return d;
}

std::size_t InstanceLabeling::m_pos() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Positive));
}

double ModelWeights::score(std::span<const double> x) const {
  const std::size_t d = feature_dim();
  if (w.empty() || x.size() != d)
    throw ConfigError("dimension mismatch: weights expect D=" + std::to_string(d) +
                      ", instance has " + std::to_string(x.size()));
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
  if (bias_included) s += w[d];
  return s;
}

double instance_potential(const ModelWeights& w, const Instance& x, Label y) {
  return w.score(x.features) * sign(y);
}

namespace {

// Shared by bag_score and inference so that both produce bit-identical sums.
double labeled_sum(const std::vector<double>& scores, const std::vector<Label>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) total += scores[i] * sign(labels[i]);
  return total;
}

}  // namespace

std::vector<double> instance_scores(const ModelWeights& w, const Bag& bag) {
  std::vector<double> scores(bag.size());
  for (std::size_t i = 0; i < bag.size(); ++i) scores[i] = w.score(bag.instances[i].features);
  return scores;
}

Score bag_score(const ModelWeights& w, const CardinalityModel& model, const Bag& bag,
                const InstanceLabeling& labeling, Label bag_label) {
  if (labeling.size() != bag.size())
    throw ContractError("labeling has " + std::to_string(labeling.size()) + " entries, bag has " +
                        std::to_string(bag.size()));
  const auto m_pos = static_cast<int>(labeling.m_pos());
  const auto m_neg = static_cast<int>(labeling.m_neg());
  const Score cardinality = model(m_pos, m_neg, bag_label);
  return cardinality + labeled_sum(instance_scores(w, bag), labeling.labels);
}

Inference infer_from_scores(const std::vector<double>& scores, const CardinalityModel& model,
                            Label bag_label) {
  const std::size_t m = scores.size();
  if (m == 0) throw ContractError("inference on an empty bag");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  double prefix = 0.0;
  Score best = Score::forbidden();
  std::size_t best_k = 0;
  bool found = false;
  for (std::size_t k = 0; k <= m; ++k) {
    if (k > 0) prefix += scores[order[k - 1]];
    const Score candidate =
        model(static_cast<int>(k), static_cast<int>(m - k), bag_label) + (2.0 * prefix - total);
    if (candidate.is_forbidden()) continue;
    if (!found || candidate > best) {
      best = candidate;
      best_k = k;
      found = true;
    }
  }
  if (!found)
    throw InfeasibleError(std::string("every cardinality is forbidden for Y=") +
                          (bag_label == Label::Positive ? "+1" : "-1"));

  Inference result;
  result.labeling.labels.assign(m, Label::Negative);
  for (std::size_t k = 0; k < best_k; ++k) result.labeling.labels[order[k]] = Label::Positive;
  // Report the score of the returned labeling itself, summed exactly as bag_score does.
  const Score exact = model(static_cast<int>(best_k), static_cast<int>(m - best_k), bag_label) +
                      labeled_sum(scores, result.labeling.labels);
  result.score = exact.value();
  return result;
}

Inference infer_labeling(const ModelWeights& w, const CardinalityModel& model, const Bag& bag,
                         Label bag_label) {
  return infer_from_scores(instance_scores(w, bag), model, bag_label);
}

Prediction predict_bag(const ModelWeights& w, const CardinalityModel& model, const Bag& bag) {
  const auto scores = instance_scores(w, bag);
  Prediction p;
  Inference pos, neg;
  try {
    pos = infer_from_scores(scores, model, Label::Positive);
    p.score_pos = pos.score;
  } catch (const InfeasibleError&) {
    p.pos_feasible = false;
  }
  try {
    neg = infer_from_scores(scores, model, Label::Negative);
    p.score_neg = neg.score;
  } catch (const InfeasibleError&) {
    p.neg_feasible = false;
  }
  if (!p.pos_feasible && !p.neg_feasible)
    throw InfeasibleError("bag '" + bag.bag_id + "' is infeasible for both labels");

  const bool positive = p.pos_feasible && (!p.neg_feasible || p.score_pos > p.score_neg);
  p.label = positive ? Label::Positive : Label::Negative;
  p.labeling = positive ? std::move(pos.labeling) : std::move(neg.labeling);
  return p;
}

double loss_augmented_score(const ModelWeights& w, const CardinalityModel& model, const Bag& bag,
                            Label true_label) {
  const auto scores = instance_scores(w, bag);
  bool any = false;
  double best = 0.0;
  for (Label y : {Label::Positive, Label::Negative}) {
    double value;
    try {
      value = infer_from_scores(scores, model, y).score;
    } catch (const InfeasibleError&) {
      continue;
    }
    if (y != true_label) value += 1.0;
    if (!any || value > best) best = value;
    any = true;
  }
  if (!any) throw InfeasibleError("bag '" + bag.bag_id + "' is infeasible for both labels");
  return best;
}

}  // namespace bws::mil
