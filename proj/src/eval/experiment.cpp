#include "bws/eval/experiment.hpp"

#include <algorithm>

#include "bws/baselines/celebi.hpp"
#include "bws/error.hpp"
#include "bws/eval/kfold.hpp"
#include "bws/imaging/image.hpp"
#include "bws/mil/inference.hpp"
#include "bws/parallel.hpp"

namespace bws::eval {

std::string to_string(Method method) {
  switch (method) {
    case Method::Celebi:
      return "celebi";
    case Method::Palette:
      return "palette";
    default:
      return "mimn";
  }
}

Method method_from_string(const std::string& name) {
  if (name == "mimn") return Method::Mimn;
  if (name == "celebi") return Method::Celebi;
  if (name == "palette") return Method::Palette;
  throw ConfigError("unknown method '" + name + "' (expected mimn, celebi or palette)");
}

std::vector<LoadedItem> load_items(const Manifest& manifest, const ExperimentConfig& cfg) {
  validate(manifest);
  std::vector<LoadedItem> items(manifest.size());
  features::ExtractionOptions options = cfg.extraction;
  options.threads = 1;  // parallelism is across items
  parallel_for(manifest.size(), cfg.threads, [&](std::size_t i) {
    const ManifestEntry& e = manifest.entries[i];
    LoadedItem& item = items[i];
    try {
      if (cfg.method != Method::Mimn) {
        // Baselines work on pixels; only the palette matcher needs regions.
        if (e.is_bag_file()) throw DataError("baseline methods need an image, not a bag file");
        item.image = imaging::load_image(e.path);
        if (cfg.method == Method::Palette) {
          if (options.mode == features::Segmentation::Grid)
            item.regions = imaging::grid_regions(*item.image, imaging::lesion_mask(*item.image), options.grid_cell);
          else
            item.regions = imaging::meanshift_segment(*item.image, options.meanshift);
        }
      } else if (e.is_bag_file()) {
        item.bag = features::load_bag(e.path);
      } else {
        item.image = imaging::load_image(e.path);
        auto extraction = features::bag_from_image(*item.image, e.label, cfg.features, options, e.id);
        item.bag.bag = std::move(extraction.bag);
        item.bag.fingerprint = cfg.features.fingerprint();
        item.regions = std::move(extraction.regions);
        item.warnings = std::move(extraction.warnings);
      }
    } catch (const DataError& err) {
      throw DataError(e.id + ": " + err.what());
    }
    item.bag.bag.bag_id = e.id;
    item.bag.bag.label = e.label;
  });
  return items;
}

namespace {

struct Scored {
  Confusion counts;
  std::size_t instance_total = 0;
  std::size_t instance_correct = 0;
};

FoldReport to_report(const Scored& s) {
  FoldReport r;
  r.counts = s.counts;
  r.metrics = metrics_from_counts(s.counts);
  if (s.instance_total > 0)
    r.instance_accuracy = 100.0 * static_cast<double>(s.instance_correct) / static_cast<double>(s.instance_total);
  return r;
}

void tally(Scored& s, const ItemOutcome& out, const LoadedItem& item) {
  s.counts += confusion({out.predicted}, {out.truth});
  if (out.truth == mil::Label::Positive && out.instance_labels && item.bag.instance_labels) {
    const auto& truth = *item.bag.instance_labels;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      ++s.instance_total;
      s.instance_correct += (*out.instance_labels)[j] == truth[j] ? 1 : 0;
    }
  }
}

std::string common_fingerprint(const std::vector<LoadedItem>& items) {
  if (items.empty()) throw DataError("no items to evaluate");
  const std::string& fp = items.front().bag.fingerprint;
  const std::size_t d = items.front().bag.bag.dimension();
  for (const auto& it : items) {
    if (it.bag.fingerprint != fp)
      throw DataError("bag '" + it.bag.bag.bag_id + "' has fingerprint '" + it.bag.fingerprint + "', expected '" + fp + "'");
    if (it.bag.bag.dimension() != d)
      throw DataError("bag '" + it.bag.bag.bag_id + "' has D=" + std::to_string(it.bag.bag.dimension()) +
                      ", expected " + std::to_string(d));
  }
  return fp;
}

void write_overlay(const ExperimentConfig& cfg, const std::string& id, const imaging::ImageRGB& image,
                   const baselines::DetectionMask& mask) {
  if (cfg.overlay_dir.empty()) return;
  std::filesystem::create_directories(cfg.overlay_dir);
  imaging::save_png(cfg.overlay_dir / (id + ".png"), baselines::red_overlay(image, mask));
}

ItemOutcome predict_mimn(const mil::ModelWeights& model, const LoadedItem& item, const ExperimentConfig& cfg) {
  ItemOutcome out;
  out.id = item.bag.bag.bag_id;
  out.truth = *item.bag.bag.label;
  const mil::Prediction p = mil::predict_bag(model, mil::CardinalityModel::standard_mil(), item.bag.bag);
  out.predicted = p.label;
  out.instance_labels = p.labeling.labels;
  out.warnings = item.warnings;
  for (std::size_t j = 0; j < p.labeling.labels.size(); ++j) {
    const auto& region = item.bag.bag.instances[j].source_region_id;
    if (p.labeling.labels[j] == mil::Label::Positive && region) out.positive_regions.push_back(*region);
  }
  if (item.image && item.regions)
    write_overlay(cfg, out.id, *item.image, baselines::mask_from_regions(*item.regions, out.positive_regions));
  return out;
}

ItemOutcome predict_baseline(const LoadedItem& item, const ExperimentConfig& cfg) {
  ItemOutcome out;
  out.id = item.bag.bag.bag_id;
  out.truth = *item.bag.bag.label;
  const imaging::ImageRGB& image = *item.image;
  const imaging::LesionMask lesion = imaging::lesion_mask(image);
  baselines::DetectionMask det;
  if (cfg.method == Method::Celebi) {
    auto r = baselines::celebi_detect(image, lesion);
    det = std::move(r.mask);
    for (auto& w : r.warnings) out.warnings.push_back(out.id + ": " + w);
  } else {
    if (!cfg.palette) throw ConfigError("palette method needs a palette file");
    det = baselines::palette_detect(image, *item.regions, *cfg.palette);
  }
  out.detected_pixels = det.positive_count;
  out.predicted = propagate_labels(det, lesion, cfg.min_fraction);
  write_overlay(cfg, out.id, image, det);
  return out;
}

mil::TrainConfig train_config(const ExperimentConfig& cfg) {
  mil::TrainConfig t = cfg.train;
  t.threads = cfg.threads;
  t.seed = cfg.seed;
  return t;
}

std::vector<mil::Bag> bags_of(const std::vector<LoadedItem>& items, const std::vector<std::size_t>& which) {
  std::vector<mil::Bag> bags;
  bags.reserve(which.size());
  for (std::size_t i : which) bags.push_back(items[i].bag.bag);
  return bags;
}

}  // namespace

ExperimentResult run_experiment(const Manifest& manifest, const ExperimentConfig& cfg) {
  validate(manifest);
  const auto folds = kfold_split(manifest.labels(), cfg.folds, cfg.seed);
  const auto items = load_items(manifest, cfg);

  ExperimentResult result;
  result.items.resize(items.size());
  std::vector<Scored> fold_scores(folds.size());

  if (cfg.method == Method::Mimn) {
    const std::string fp = common_fingerprint(items);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<std::size_t> train_idx;
      for (std::size_t g = 0; g < folds.size(); ++g)
        if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
      std::sort(train_idx.begin(), train_idx.end());
      auto trained = mil::train(bags_of(items, train_idx), train_config(cfg), mil::CardinalityModel::standard_mil(), fp);
      result.traces.push_back(std::move(trained.trace));
      const auto& test = folds[f];
      parallel_for(test.size(), cfg.threads, [&](std::size_t t) {
        result.items[test[t]] = predict_mimn(trained.model, items[test[t]], cfg);
      });
    }
  } else {
    if (cfg.method == Method::Palette && !cfg.palette) throw ConfigError("palette method needs a palette file");
    parallel_for(items.size(), cfg.threads, [&](std::size_t i) { result.items[i] = predict_baseline(items[i], cfg); });
  }

  Scored overall;
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (std::size_t i : folds[f]) {
      result.items[i].fold = static_cast<int>(f) + 1;
      tally(fold_scores[f], result.items[i], items[i]);
      tally(overall, result.items[i], items[i]);
    }
  for (const auto& s : fold_scores) result.report.per_fold.push_back(to_report(s));
  result.report.overall = to_report(overall);
  return result;
}

ExperimentResult run_cross_dataset(const Manifest& train, const Manifest& test, const ExperimentConfig& cfg) {
  const auto test_items = load_items(test, cfg);
  ExperimentResult result;
  result.items.resize(test_items.size());
  if (cfg.method == Method::Mimn) {
    const auto train_items = load_items(train, cfg);
    const std::string fp = common_fingerprint(train_items);
    if (common_fingerprint(test_items) != fp) throw ConfigError("train and test bags were extracted with different feature configs");
    std::vector<std::size_t> all(train_items.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto trained = mil::train(bags_of(train_items, all), train_config(cfg), mil::CardinalityModel::standard_mil(), fp);
    result.traces.push_back(std::move(trained.trace));
    parallel_for(test_items.size(), cfg.threads,
                 [&](std::size_t i) { result.items[i] = predict_mimn(trained.model, test_items[i], cfg); });
  } else {
    if (cfg.method == Method::Palette && !cfg.palette) throw ConfigError("palette method needs a palette file");
    parallel_for(test_items.size(), cfg.threads,
                 [&](std::size_t i) { result.items[i] = predict_baseline(test_items[i], cfg); });
  }
  Scored s;
  for (std::size_t i = 0; i < test_items.size(); ++i) {
    result.items[i].fold = 1;
    tally(s, result.items[i], test_items[i]);
  }
  result.report.overall = to_report(s);
  result.report.per_fold.push_back(result.report.overall);
  return result;
}

}  // namespace bws::eval
