#include "bws/eval/report.hpp"

#include <cstdio>
#include <sstream>

#include "bws/error.hpp"
#include "json.hpp"

namespace bws::eval {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json fold_json(const FoldReport& f) {
  ordered_json j;
  j["N"] = f.counts.total();
  j["tp"] = f.counts.tp;
  j["fp"] = f.counts.fp;
  j["tn"] = f.counts.tn;
  j["fn"] = f.counts.fn;
  j["accuracy"] = f.metrics.accuracy;
  j["precision"] = f.metrics.precision;
  j["recall"] = f.metrics.recall;
  j["f_score"] = f.metrics.f_score;
  j["specificity"] = f.metrics.specificity;
  auto undefined = ordered_json::array();
  if (f.metrics.accuracy_undefined) undefined.push_back("accuracy");
  if (f.metrics.precision_undefined) undefined.push_back("precision");
  if (f.metrics.recall_undefined) undefined.push_back("recall");
  if (f.metrics.f_score_undefined) undefined.push_back("f_score");
  if (f.metrics.specificity_undefined) undefined.push_back("specificity");
  j["undefined"] = undefined;
  if (f.instance_accuracy) j["instance_accuracy"] = *f.instance_accuracy;
  return j;
}

std::string row(const std::string& name, const FoldReport& f) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-8s %5zu %4zu %4zu %4zu %4zu %9.2f %10.2f %7.2f %8.2f %12.2f\n", name.c_str(),
                f.counts.total(), f.counts.tp, f.counts.fp, f.counts.tn, f.counts.fn, f.metrics.accuracy,
                f.metrics.precision, f.metrics.recall, f.metrics.f_score, f.metrics.specificity);
  return buf;
}

}  // namespace

std::string report_to_json(const ExperimentResult& result, Method method, const std::string& config_json) {
  ordered_json j;
  j["method"] = to_string(method);
  if (!config_json.empty()) {
    auto config = ordered_json::parse(config_json);
    if (!config.is_object()) throw ContractError("report config must be a JSON object");
    j["config"] = std::move(config);
  }
  j["overall"] = fold_json(result.report.overall);
  auto folds = ordered_json::array();
  for (const auto& f : result.report.per_fold) folds.push_back(fold_json(f));
  j["per_fold"] = std::move(folds);
  auto items = ordered_json::array();
  for (const auto& it : result.items) {
    ordered_json e;
    e["id"] = it.id;
    e["truth"] = mil::sign(it.truth);
    e["predicted"] = mil::sign(it.predicted);
    e["fold"] = it.fold;
    if (method == Method::Mimn) {
      auto labels = ordered_json::array();
      if (it.instance_labels)
        for (mil::Label y : *it.instance_labels) labels.push_back(mil::sign(y));
      e["instance_labels"] = std::move(labels);
      e["positive_regions"] = it.positive_regions;
    } else {
      e["detected_pixels"] = it.detected_pixels;
    }
    if (!it.warnings.empty()) e["warnings"] = it.warnings;
    items.push_back(std::move(e));
  }
  j["items"] = std::move(items);
  return j.dump(2) + "\n";
}

std::string report_to_text(const ExperimentResult& result, Method method) {
  std::ostringstream os;
  os << "method: " << to_string(method) << "\n";
  os << "fold         N   TP   FP   TN   FN  Accuracy  Precision  Recall  f-score  Specificity\n";
  for (std::size_t f = 0; f < result.report.per_fold.size(); ++f)
    os << row(std::to_string(f + 1), result.report.per_fold[f]);
  os << row("overall", result.report.overall);
  if (result.report.overall.instance_accuracy) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "instance accuracy (positive bags): %.2f\n", *result.report.overall.instance_accuracy);
    os << buf;
  }
  return os.str();
}

}  // namespace bws::eval
