#include "bws/mil/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bws/mil/inference.hpp"
#include "bws/parallel.hpp"

namespace bws::mil {

void TrainConfig::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("train.lambda must be > 0");
  if (max_outer_iters < 1) throw ConfigError("train.max_outer_iters must be >= 1");
  if (max_inner_iters < 1) throw ConfigError("train.max_inner_iters must be >= 1");
  if (!(inner_tolerance > 0.0)) throw ConfigError("train.inner_tolerance must be > 0");
  if (!(outer_tolerance > 0.0)) throw ConfigError("train.outer_tolerance must be > 0");
  if (!(step.initial > 0.0)) throw ConfigError("train.step_initial must be > 0");
}

std::string to_string(InnerSolver solver) {
  return solver == InnerSolver::Subgradient ? "subgradient" : "cutting_plane";
}

InnerSolver inner_solver_from_string(const std::string& name) {
  if (name == "subgradient") return InnerSolver::Subgradient;
  if (name == "cutting_plane") return InnerSolver::CuttingPlane;
  throw ConfigError("unknown inner solver '" + name + "' (subgradient|cutting_plane)");
}

std::string to_string(StepDecay decay) {
  return decay == StepDecay::InverseSqrt ? "inverse_sqrt" : "constant";
}

StepDecay step_decay_from_string(const std::string& name) {
  if (name == "inverse_sqrt") return StepDecay::InverseSqrt;
  if (name == "constant") return StepDecay::Constant;
  throw ConfigError("unknown step decay '" + name + "' (inverse_sqrt|constant)");
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t j = 0; j < x.size(); ++j) y[j] += alpha * x[j];
}

struct PreparedBag {
  std::size_t m = 0;
  Vec rows;  // m x dim, constant-1 column appended when the bias is on
  Label label = Label::Negative;
};

struct LossPoint {
  double loss = 0.0;              // sum_n L_n
  Vec psi;                        // sum_n Psi(X_n, y_hat_n)
};

struct FullPoint {
  double hinge = 0.0;             // sum_n (L_n - R_n)
  std::vector<std::vector<Label>> reward_labels;
};

// Holds the training set in contiguous form and evaluates the pieces of
// the objective and of its convex upper bound.
class Problem {
 public:
  Problem(const std::vector<Bag>& bags, const TrainConfig& config, const CardinalityModel& model)
      : model_(model), lambda_(config.lambda), threads_(config.threads) {
    const std::size_t d = bags.front().dimension();
    bias_ = config.bias_included;
    dim_ = d + (bias_ ? 1 : 0);
    bags_.reserve(bags.size());
    for (const auto& bag : bags) {
      if (bag.dimension() != d)
        throw ConfigError("bag '" + bag.bag_id + "' has D=" + std::to_string(bag.dimension()) +
                          ", expected " + std::to_string(d));
      PreparedBag p;
      p.m = bag.size();
      p.label = *bag.label;
      p.rows.reserve(p.m * dim_);
      for (const auto& inst : bag.instances) {
        for (double v : inst.features) {
          if (!std::isfinite(v)) throw DataError("bag '" + bag.bag_id + "' has a non-finite feature");
          p.rows.push_back(v);
        }
        if (bias_) p.rows.push_back(1.0);
      }
      bags_.push_back(std::move(p));
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return bags_.size(); }
  double lambda() const { return lambda_; }
  const CardinalityModel& model() const { return model_; }
  const PreparedBag& bag(std::size_t n) const { return bags_[n]; }

  Vec scores(const PreparedBag& bag, const Vec& w) const {
    Vec s(bag.m);
    for (std::size_t i = 0; i < bag.m; ++i) {
      const double* row = &bag.rows[i * dim_];
      double acc = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) acc += w[j] * row[j];
      s[i] = acc;
    }
    return s;
  }

  void add_psi(const PreparedBag& bag, const std::vector<Label>& labels, Vec& out) const {
    for (std::size_t i = 0; i < bag.m; ++i) {
      const double y = sign(labels[i]);
      const double* row = &bag.rows[i * dim_];
      for (std::size_t j = 0; j < dim_; ++j) out[j] += y * row[j];
    }
  }

  // Loss-augmented inference for every bag; ties keep the true label.
  LossPoint loss_point(const Vec& w) const {
    struct Slot {
      double loss;
      std::vector<Label> labels;
    };
    std::vector<Slot> slots(size());
    parallel_for(size(), threads_, [&](std::size_t n) {
      const auto& b = bags_[n];
      const Vec s = scores(b, w);
      bool any = false;
      for (Label y : {b.label, flip(b.label)}) {
        Inference inf;
        try {
          inf = infer_from_scores(s, model_, y);
        } catch (const InfeasibleError&) {
          continue;
        }
        const double value = inf.score + (y == b.label ? 0.0 : 1.0);
        if (!any || value > slots[n].loss) {
          slots[n].loss = value;
          slots[n].labels = std::move(inf.labeling.labels);
        }
        any = true;
      }
      if (!any) throw InfeasibleError("training bag is infeasible for both labels");
    });
    LossPoint point;
    point.psi.assign(dim_, 0.0);
    for (std::size_t n = 0; n < size(); ++n) {
      point.loss += slots[n].loss;
      add_psi(bags_[n], slots[n].labels, point.psi);
    }
    return point;
  }

  FullPoint full_point(const Vec& w) const {
    std::vector<double> hinge(size());
    FullPoint point;
    point.reward_labels.resize(size());
    parallel_for(size(), threads_, [&](std::size_t n) {
      const auto& b = bags_[n];
      const Vec s = scores(b, w);
      Inference reward = infer_from_scores(s, model_, b.label);
      double loss = reward.score;
      try {
        loss = std::max(loss, infer_from_scores(s, model_, flip(b.label)).score + 1.0);
      } catch (const InfeasibleError&) {
      }
      hinge[n] = loss - reward.score;
      point.reward_labels[n] = std::move(reward.labeling.labels);
    });
    for (double h : hinge) point.hinge += h;
    return point;
  }

  double regularizer(const Vec& w) const { return 0.5 * lambda_ * dot(w, w); }

 private:
  const CardinalityModel& model_;
  double lambda_;
  int threads_;
  bool bias_ = false;
  std::size_t dim_ = 0;
  std::vector<PreparedBag> bags_;
};

// The concave part -R_n linearised at a fixed labeling y*_n:
//   bound(w) = sum_n L_n(w) - w . psi_star - c_star + lambda/2 |w|^2.
struct Linearization {
  Vec psi_star;
  double c_star = 0.0;
};

Linearization linearize(const Problem& problem, const std::vector<std::vector<Label>>& labels) {
  Linearization lin;
  lin.psi_star.assign(problem.dim(), 0.0);
  for (std::size_t n = 0; n < problem.size(); ++n) {
    const auto& b = problem.bag(n);
    problem.add_psi(b, labels[n], lin.psi_star);
    const auto k = static_cast<int>(std::count(labels[n].begin(), labels[n].end(), Label::Positive));
    lin.c_star += problem.model()(k, static_cast<int>(b.m) - k, b.label).value();
  }
  return lin;
}

// At w = 0 every labeling with k positives scores C(k, m-k, Y), so any
// maximiser of C is a tight linearisation point. Taking the largest such
// k starts positive bags from "every instance positive".
std::vector<std::vector<Label>> initial_labels(const Problem& problem) {
  std::vector<std::vector<Label>> labels(problem.size());
  for (std::size_t n = 0; n < problem.size(); ++n) {
    const auto& b = problem.bag(n);
    const int m = static_cast<int>(b.m);
    Score best = Score::forbidden();
    int best_k = -1;
    for (int k = 0; k <= m; ++k) {
      const Score c = problem.model()(k, m - k, b.label);
      if (c.is_forbidden()) continue;
      if (best_k < 0 || !(c < best)) {
        best = c;
        best_k = k;
      }
    }
    if (best_k < 0) throw InfeasibleError("training bag is infeasible for its own label");
    labels[n].assign(b.m, Label::Negative);
    for (int i = 0; i < best_k; ++i) labels[n][i] = Label::Positive;
  }
  return labels;
}

struct BoundEval {
  double value = 0.0;
  Vec grad;
};

BoundEval eval_bound(const Problem& problem, const Linearization& lin, const Vec& w) {
  LossPoint lp = problem.loss_point(w);
  BoundEval e;
  e.value = lp.loss - dot(w, lin.psi_star) - lin.c_star + problem.regularizer(w);
  e.grad = std::move(lp.psi);
  axpy(-1.0, lin.psi_star, e.grad);
  axpy(problem.lambda(), w, e.grad);
  if (!std::isfinite(e.value)) throw NumericalError("convex bound evaluated to a non-finite value");
  return e;
}

struct InnerResult {
  Vec w;
  double bound = 0.0;
  int iterations = 0;
};

// Projected subgradient on the bound. Each step moves eta_t along the unit
// subgradient direction, so eta is a distance in weight space and does not
// depend on the number of bags. The minimiser lies in the ball
// lambda/2 |w|^2 <= bound(0).
InnerResult solve_subgradient(const Problem& problem, const Linearization& lin, const Vec& start,
                              const TrainConfig& config) {
  constexpr int kWindow = 100;
  const double at_zero = eval_bound(problem, lin, Vec(problem.dim(), 0.0)).value;
  const double radius = std::sqrt(2.0 * std::max(at_zero, 0.0) / problem.lambda());

  Vec w = start;
  BoundEval current = eval_bound(problem, lin, w);
  InnerResult best{w, current.value, 0};
  double window_best = best.bound;
  int t = 1;
  for (; t <= config.max_inner_iters; ++t) {
    const double gnorm = std::sqrt(dot(current.grad, current.grad));
    if (gnorm == 0.0) break;
    const double eta = config.step.decay == StepDecay::InverseSqrt
                           ? config.step.initial / std::sqrt(static_cast<double>(t))
                           : config.step.initial;
    axpy(-eta / gnorm, current.grad, w);
    const double norm = std::sqrt(dot(w, w));
    if (norm > radius && norm > 0.0)
      for (double& v : w) v *= radius / norm;

    current = eval_bound(problem, lin, w);
    if (current.value < best.bound) {
      best.w = w;
      best.bound = current.value;
    }
    if (t % kWindow == 0) {
      if (window_best - best.bound <= config.inner_tolerance * std::max(1.0, std::abs(best.bound)))
        break;
      window_best = best.bound;
    }
  }
  best.iterations = std::min(t, config.max_inner_iters);
  return best;
}

// Bundle method: the empirical part of the bound is a max of affine
// functions, approximated from below by the planes collected so far. The
// master problem is solved in the dual over the simplex; any feasible dual
// point is a certified lower bound.
InnerResult solve_cutting_plane(const Problem& problem, const Linearization& lin, const Vec& start,
                                const TrainConfig& config) {
  const double lambda = problem.lambda();
  const std::size_t dim = problem.dim();
  std::vector<Vec> planes{Vec(dim, 0.0)};  // the empirical part is >= 0
  Vec offsets{0.0};
  Vec alpha{1.0};

  auto add_plane = [&](const Vec& w, const BoundEval& e) {
    // Remp(w) = bound(w) - lambda/2 |w|^2, subgradient = grad - lambda w.
    Vec a = e.grad;
    axpy(-lambda, w, a);
    const double remp = e.value - problem.regularizer(w);
    offsets.push_back(remp - dot(a, w));
    planes.push_back(std::move(a));
    alpha.push_back(0.0);
  };
  // A alpha, the combination of planes weighted by the dual point.
  auto combine = [&](const Vec& al) {
    Vec v(dim, 0.0);
    for (std::size_t j = 0; j < planes.size(); ++j)
      if (al[j] != 0.0) axpy(al[j], planes[j], v);
    return v;
  };
  auto dual_value = [&](const Vec& al, const Vec& v) { return dot(offsets, al) - dot(v, v) / (2.0 * lambda); };

  Vec w = start;
  BoundEval current = eval_bound(problem, lin, w);
  InnerResult best{w, current.value, 0};
  add_plane(w, current);

  int t = 1;
  for (; t <= config.max_inner_iters; ++t) {
    // Pairwise (SMO-style) ascent on the dual: move mass from the worst
    // active plane to the best plane with an exact line search. The
    // Frank-Wolfe gap bounds the distance to the dual optimum.
    Vec v = combine(alpha);
    const std::size_t k = planes.size();
    Vec grad(k);
    for (std::size_t i = 0; i < k; ++i) grad[i] = offsets[i] - dot(planes[i], v) / lambda;
    double value = dual_value(alpha, v);
    const double target = 1e-3 * config.inner_tolerance;
    for (int it = 0; it < 20000; ++it) {
      std::size_t up = 0, down = k;
      double avg = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (grad[i] > grad[up]) up = i;
        if (alpha[i] > 0.0 && (down == k || grad[i] < grad[down])) down = i;
        avg += alpha[i] * grad[i];
      }
      if (grad[up] - avg <= target * std::max(1.0, std::abs(value))) break;
      if (down == k || up == down) break;
      Vec diff = planes[up];
      axpy(-1.0, planes[down], diff);
      const double curvature = dot(diff, diff);
      const double slope = grad[up] - grad[down];
      double delta = curvature > 0.0 ? lambda * slope / curvature : alpha[down];
      delta = std::min(delta, alpha[down]);
      if (!(delta > 0.0)) break;
      alpha[up] += delta;
      alpha[down] -= delta;
      axpy(delta, diff, v);
      for (std::size_t i = 0; i < k; ++i) grad[i] -= delta * dot(planes[i], diff) / lambda;
    }
    v = combine(alpha);
    const double lower = dual_value(alpha, v);

    w = v;
    for (double& x : w) x /= -lambda;
    current = eval_bound(problem, lin, w);
    if (current.value < best.bound) {
      best.w = w;
      best.bound = current.value;
    }
    if (best.bound - lower <= config.inner_tolerance * std::max(1.0, std::abs(best.bound))) break;
    add_plane(w, current);
  }
  best.iterations = std::min(t, config.max_inner_iters);
  return best;
}

std::string count_message(std::size_t pos, std::size_t neg) {
  std::ostringstream os;
  os << "training needs both classes; got " << pos << " positive and " << neg << " negative bags";
  return os.str();
}

}  // namespace

TrainResult train(const std::vector<Bag>& bags, const TrainConfig& config,
                  const CardinalityModel& model, const std::string& feature_fingerprint) {
  config.validate();
  if (bags.empty()) throw DataError(count_message(0, 0));
  std::size_t pos = 0, neg = 0;
  for (const auto& bag : bags) {
    if (!bag.label) throw ContractError("training bag '" + bag.bag_id + "' is unlabeled");
    (*bag.label == Label::Positive ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0) throw DataError(count_message(pos, neg));

  const Problem problem(bags, config, model);
  Vec w(problem.dim(), 0.0);

  auto full_objective = [&](const FullPoint& fp, const Vec& at) {
    const double value = fp.hinge + problem.regularizer(at);
    if (!std::isfinite(value)) {
      std::ostringstream os;
      os << "objective became non-finite (hinge=" << fp.hinge << ", |w|^2=" << dot(at, at) << ")";
      throw NumericalError(os.str());
    }
    return value;
  };

  TrainResult result;
  FullPoint point = problem.full_point(w);
  double current = full_objective(point, w);
  result.trace.push_back({0, current, current, 0});
  std::vector<std::vector<Label>> labels = initial_labels(problem);

  for (int outer = 1; outer <= config.max_outer_iters; ++outer) {
    const Linearization lin = linearize(problem, labels);
    const InnerResult inner = config.inner_solver == InnerSolver::Subgradient
                                  ? solve_subgradient(problem, lin, w, config)
                                  : solve_cutting_plane(problem, lin, w, config);
    FullPoint next_point = problem.full_point(inner.w);
    const double next = full_objective(next_point, inner.w);
    if (next > current) {
      // The bound guarantees next <= current; only rounding can violate it.
      result.converged = true;
      break;
    }
    w = inner.w;
    result.trace.push_back({outer, next, inner.bound, inner.iterations});
    const double decrease = current - next;
    current = next;
    labels = std::move(next_point.reward_labels);
    if (decrease < config.outer_tolerance) {
      result.converged = true;
      break;
    }
  }

  result.model.w = std::move(w);
  result.model.lambda = config.lambda;
  result.model.bias_included = config.bias_included;
  result.model.feature_fingerprint = feature_fingerprint;
  return result;
}

}  // namespace bws::mil
