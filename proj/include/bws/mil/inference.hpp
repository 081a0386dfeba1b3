#pragma once

#include <vector>

#include "bws/mil/cardinality.hpp"
#include "bws/mil/types.hpp"

namespace bws::mil {

/// phi^I(x, y) = (w . x) * y.
double instance_potential(const ModelWeights& w, const Instance& x, Label y);

/// f_w(X, y, Y): cardinality term plus the sum of instance potentials.
Score bag_score(const ModelWeights& w, const CardinalityModel& model, const Bag& bag,
                const InstanceLabeling& labeling, Label bag_label);

struct Inference {
  InstanceLabeling labeling;
  double score = 0.0;  ///< F_w(X, Y)
};

/// max over instance labelings of f_w(X, y, Y) in O(m log m).
///
/// The optimum with exactly k positives labels the k highest-scoring
/// instances positive, so only m + 1 candidates need scoring. Equal
/// instance scores are ordered by lower index; equal totals prefer the
/// smaller k. Throws InfeasibleError if every k is FORBIDDEN for Y.
Inference infer_labeling(const ModelWeights& w, const CardinalityModel& model, const Bag& bag,
                         Label bag_label);

/// Same, from precomputed instance scores s_i = w . x_i.
Inference infer_from_scores(const std::vector<double>& scores, const CardinalityModel& model,
                            Label bag_label);

struct Prediction {
  Label label = Label::Negative;
  InstanceLabeling labeling;
  double score_pos = 0.0;  ///< F(+1); meaningless if !pos_feasible
  double score_neg = 0.0;
  bool pos_feasible = true;
  bool neg_feasible = true;
};

/// argmax_Y F_w(X, Y); an exact tie resolves to Negative.
Prediction predict_bag(const ModelWeights& w, const CardinalityModel& model, const Bag& bag);

/// L_n = max_Y [Delta(Y, Y_true) + F_w(X, Y)].
double loss_augmented_score(const ModelWeights& w, const CardinalityModel& model, const Bag& bag,
                            Label true_label);

/// Per-instance scores w . x_i for a whole bag.
std::vector<double> instance_scores(const ModelWeights& w, const Bag& bag);

}  // namespace bws::mil
