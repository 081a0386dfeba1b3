#include "bws/mil/objective.hpp"

#include "bws/mil/inference.hpp"
#include "bws/parallel.hpp"

namespace bws::mil {

double bag_hinge(const ModelWeights& w, const CardinalityModel& model, const Bag& bag) {
  if (!bag.label) throw ContractError("objective needs labeled bags; '" + bag.bag_id + "' has none");
  const double loss = loss_augmented_score(w, model, bag, *bag.label);
  const double reward = infer_labeling(w, model, bag, *bag.label).score;
  return loss - reward;
}

double objective(const ModelWeights& w, const CardinalityModel& model, const std::vector<Bag>& bags,
                 double lambda, int threads) {
  std::vector<double> hinge(bags.size());
  parallel_for(bags.size(), threads, [&](std::size_t n) { hinge[n] = bag_hinge(w, model, bags[n]); });
  double total = 0.0;
  for (double h : hinge) total += h;
  double norm2 = 0.0;
  for (double v : w.w) norm2 += v * v;
  return total + 0.5 * lambda * norm2;
}

}  // namespace bws::mil
