#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bws/error.hpp"

namespace bws::mil {

/// Binary label shared by bags and instances.
enum class Label : std::int8_t { Negative = -1, Positive = 1 };

inline int sign(Label y) { return static_cast<int>(y); }
inline Label flip(Label y) { return y == Label::Positive ? Label::Negative : Label::Positive; }
inline Label label_from_int(int v) {
  if (v == 1) return Label::Positive;
  if (v == -1) return Label::Negative;
  throw ContractError("label must be +1 or -1, got " + std::to_string(v));
}

/// A real score extended with FORBIDDEN (minus infinity). FORBIDDEN
/// absorbs addition and compares below every finite score; it is never
/// materialised as a floating -inf.
class Score {
 public:
  constexpr Score() = default;
  constexpr explicit Score(double value) : value_(value), forbidden_(false) {}

  static constexpr Score forbidden() {
    Score s;
    s.forbidden_ = true;
    return s;
  }

  constexpr bool is_forbidden() const { return forbidden_; }
  constexpr bool is_finite() const { return !forbidden_; }

  /// Finite value; throws on FORBIDDEN.
  double value() const {
    if (forbidden_) throw ContractError("value() called on a FORBIDDEN score");
    return value_;
  }

  friend constexpr Score operator+(Score lhs, Score rhs) {
    if (lhs.forbidden_ || rhs.forbidden_) return forbidden();
    return Score(lhs.value_ + rhs.value_);
  }
  friend constexpr Score operator+(Score lhs, double rhs) { return lhs + Score(rhs); }

  friend constexpr bool operator==(Score lhs, Score rhs) {
    if (lhs.forbidden_ || rhs.forbidden_) return lhs.forbidden_ == rhs.forbidden_;
    return lhs.value_ == rhs.value_;
  }
  friend constexpr bool operator<(Score lhs, Score rhs) {
    if (rhs.forbidden_) return false;
    if (lhs.forbidden_) return true;
    return lhs.value_ < rhs.value_;
  }
  friend constexpr bool operator>(Score lhs, Score rhs) { return rhs < lhs; }

 private:
  double value_ = 0.0;
  bool forbidden_ = false;
};

struct Instance {
  std::vector<double> features;
  std::optional<int> source_region_id;
};

struct Bag {
  std::vector<Instance> instances;
  std::optional<Label> label;
  std::string bag_id;

  std::size_t size() const { return instances.size(); }
  /// Feature dimension; throws if the bag is empty or ragged.
  std::size_t dimension() const;
};

struct InstanceLabeling {
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t m_pos() const;
  std::size_t m_neg() const { return labels.size() - m_pos(); }
};

/// Learned linear weights. When bias_included, `w` carries one trailing
/// entry that multiplies an implicit constant-1 feature.
struct ModelWeights {
  std::vector<double> w;
  double lambda = 1.0;
  std::string feature_fingerprint;
  bool bias_included = false;

  std::size_t feature_dim() const { return bias_included ? w.size() - 1 : w.size(); }

  /// w . x (plus bias). Throws ConfigError on dimension mismatch.
  double score(std::span<const double> x) const;
};

}  // namespace bws::mil
