#pragma once

#include <functional>

#include "bws/mil/types.hpp"

namespace bws::mil {

/// Pair of cardinality functions (C+, C-) over the counts of positive and
/// negative instance labels. Only the standard MIL assumption ships; other
/// assumptions plug in through custom().
class CardinalityModel {
 public:
  enum class Kind { StandardMIL, Custom };
  using Function = std::function<Score(int m_pos, int m_neg)>;

  static CardinalityModel standard_mil();
  static CardinalityModel custom(Function c_pos, Function c_neg);

  Kind kind() const { return kind_; }

  /// C(m+, m-, Y): C+ for positive bags, C- for negative ones.
  Score operator()(int m_pos, int m_neg, Label bag_label) const;

 private:
  CardinalityModel(Kind kind, Function c_pos, Function c_neg)
      : kind_(kind), c_pos_(std::move(c_pos)), c_neg_(std::move(c_neg)) {}

  Kind kind_;
  Function c_pos_;
  Function c_neg_;
};

inline Score cardinality_potential(const CardinalityModel& model, int m_pos, int m_neg,
                                   Label bag_label) {
  return model(m_pos, m_neg, bag_label);
}

}  // namespace bws::mil
