#pragma once

#include <string>

#include "bws/eval/experiment.hpp"

namespace bws::eval {

/// {method, config, overall, per_fold, items}. `config_json`, if given, must
/// be a JSON object and is echoed verbatim under "config".
std::string report_to_json(const ExperimentResult& result, Method method, const std::string& config_json = {});

/// Aligned table with one row per fold and an overall row; columns
/// N TP FP TN FN Accuracy Precision Recall f-score Specificity.
std::string report_to_text(const ExperimentResult& result, Method method);

}  // namespace bws::eval
