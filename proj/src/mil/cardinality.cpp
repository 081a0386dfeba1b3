#include "bws/mil/cardinality.hpp"

#include <string>

namespace bws::mil {

CardinalityModel CardinalityModel::standard_mil() {
  // At least one positive instance in a positive bag, none in a negative bag.
  auto c_pos = [](int m_pos, int) { return m_pos == 0 ? Score::forbidden() : Score(0.0); };
  auto c_neg = [](int m_pos, int) { return m_pos == 0 ? Score(0.0) : Score::forbidden(); };
  return CardinalityModel(Kind::StandardMIL, c_pos, c_neg);
}

CardinalityModel CardinalityModel::custom(Function c_pos, Function c_neg) {
  if (!c_pos || !c_neg) throw ConfigError("custom cardinality model needs both C+ and C-");
  return CardinalityModel(Kind::Custom, std::move(c_pos), std::move(c_neg));
}

Score CardinalityModel::operator()(int m_pos, int m_neg, Label bag_label) const {
  if (m_pos < 0 || m_neg < 0)
    throw ContractError("cardinality counts must be non-negative, got (" + std::to_string(m_pos) +
                        ", " + std::to_string(m_neg) + ")");
  if (m_pos + m_neg < 1) throw ContractError("cardinality potential needs at least one instance");
  return bag_label == Label::Positive ? c_pos_(m_pos, m_neg) : c_neg_(m_pos, m_neg);
}

}  // namespace bws::mil
