#include "bws/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "bws/baselines/palette.hpp"
#include "bws/cli/config.hpp"
#include "bws/error.hpp"
#include "bws/eval/experiment.hpp"
#include "bws/eval/report.hpp"
#include "bws/eval/synth.hpp"
#include "bws/features/bag_io.hpp"
#include "bws/imaging/image.hpp"
#include "bws/mil/inference.hpp"
#include "bws/mil/model_io.hpp"
#include "bws/parallel.hpp"
#include "json.hpp"

namespace bws::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string overlay_dir;
  std::string format = "text";
};

CliConfig effective_config(const Globals& g) {
  CliConfig cfg = g.config_path.empty() ? CliConfig{} : load_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

eval::ExperimentConfig experiment_config(const CliConfig& cfg, eval::Method method, const Globals& g) {
  eval::ExperimentConfig e;
  e.method = method;
  e.folds = cfg.folds;
  e.seed = cfg.seed;
  e.train = cfg.train;
  e.features = cfg.features;
  e.extraction = cfg.extraction;
  e.min_fraction = cfg.min_fraction;
  e.threads = cfg.threads;
  e.overlay_dir = g.overlay_dir;
  return e;
}

// ---- extract ---------------------------------------------------------------

struct ExtractArgs {
  std::string manifest;
  std::string out_dir;
};

int cmd_extract(const ExtractArgs& a, const Globals& g, std::ostream& out) {
  const CliConfig cfg = effective_config(g);
  const eval::Manifest manifest = eval::load_manifest(a.manifest);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  if (!g.overlay_dir.empty()) fs::create_directories(g.overlay_dir);

  struct Outcome {
    std::optional<features::BagFile> bag;
    std::vector<std::string> warnings;
    std::string error;
  };
  std::vector<Outcome> outcomes(manifest.size());
  features::ExtractionOptions options = cfg.extraction;
  options.threads = 1;
  parallel_for(manifest.size(), cfg.threads, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    try {
      if (e.is_bag_file()) throw DataError("entry is already a bag file");
      const imaging::ImageRGB image = imaging::load_image(e.path);
      auto x = features::bag_from_image(image, e.label, cfg.features, options, e.id);
      if (!g.overlay_dir.empty()) {
        imaging::save_label_png(fs::path(g.overlay_dir) / (e.id + "_regions.png"), imaging::label_plane(x.regions));
        imaging::save_label_png(fs::path(g.overlay_dir) / (e.id + "_lesion.png"), imaging::mask_plane(x.mask));
      }
      outcomes[i].bag = features::BagFile{std::move(x.bag), cfg.features.fingerprint(), std::nullopt};
      outcomes[i].warnings = std::move(x.warnings);
    } catch (const DataError& err) {
      outcomes[i].error = err.what();
    }
  });

  eval::Manifest bags;
  ordered_json log;
  log["config"] = ordered_json::parse(cfg.to_json());
  auto items = ordered_json::array();
  std::size_t failures = 0;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& e = manifest.entries[i];
    ordered_json item;
    item["id"] = e.id;
    if (outcomes[i].bag) {
      const fs::path path = dir / (e.id + ".json");
      features::save_bag(path, *outcomes[i].bag);
      bags.entries.push_back({e.id, path, e.label});
      item["status"] = "ok";
      item["m"] = outcomes[i].bag->bag.size();
      if (!outcomes[i].warnings.empty()) item["warnings"] = outcomes[i].warnings;
    } else {
      ++failures;
      item["status"] = "failed";
      item["error"] = outcomes[i].error;
    }
    items.push_back(std::move(item));
  }
  log["items"] = std::move(items);
  log["failures"] = failures;
  write_text(dir / "extract_log.json", log.dump(2) + "\n");
  if (!bags.entries.empty()) eval::save_manifest(dir / "manifest.csv", bags);

  if (g.format == "json") {
    out << log.dump(2) << "\n";
  } else {
    for (const auto& item : log["items"]) {
      if (item["status"] == "ok")
        out << item["id"].get<std::string>() << ": m=" << item["m"].get<std::size_t>() << "\n";
      else
        out << item["id"].get<std::string>() << ": FAILED " << item["error"].get<std::string>() << "\n";
    }
    out << (manifest.size() - failures) << " bags written to " << dir.string() << ", " << failures << " failed\n";
  }
  return failures ? kExitData : kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::vector<std::string> bag_files;
  std::string model_out;
  std::string trace_out;
};

int cmd_train(const TrainArgs& a, const Globals& g, std::ostream& out) {
  const CliConfig cfg = effective_config(g);
  if (a.manifest.empty() == a.bag_files.empty()) throw ConfigError("train needs exactly one of --manifest or --bag");
  std::vector<mil::Bag> bags;
  std::string fingerprint;
  if (!a.manifest.empty()) {
    const auto items = eval::load_items(eval::load_manifest(a.manifest), experiment_config(cfg, eval::Method::Mimn, g));
    for (const auto& it : items) bags.push_back(it.bag.bag);
    fingerprint = items.front().bag.fingerprint;
    for (const auto& it : items)
      if (it.bag.fingerprint != fingerprint) throw DataError("bags carry different feature fingerprints");
  } else {
    for (const auto& path : a.bag_files) {
      auto file = features::load_bag(path);
      if (!file.bag.label) throw DataError(path + ": bag has no label; training needs labelled bags");
      if (bags.empty()) fingerprint = file.fingerprint;
      else if (file.fingerprint != fingerprint) throw DataError(path + ": feature fingerprint differs from the first bag");
      bags.push_back(std::move(file.bag));
    }
  }
  mil::TrainConfig tc = cfg.train;
  tc.threads = cfg.threads;
  tc.seed = cfg.seed;
  const auto result = mil::train(bags, tc, mil::CardinalityModel::standard_mil(), fingerprint);
  mil::save_model(a.model_out, result.model, cfg.to_json());

  std::string trace = "iteration,objective,bound,inner_iterations\n";
  for (const auto& t : result.trace) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d\n", t.iteration, t.objective, t.bound, t.inner_iterations);
    trace += buf;
  }
  const std::string trace_path = a.trace_out.empty() ? a.model_out + ".trace.csv" : a.trace_out;
  write_text(trace_path, trace);

  std::size_t correct = 0, pos = 0;
  for (const auto& b : bags) {
    pos += *b.label == mil::Label::Positive ? 1 : 0;
    correct += mil::predict_bag(result.model, mil::CardinalityModel::standard_mil(), b).label == *b.label ? 1 : 0;
  }
  const double accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(bags.size());
  if (g.format == "json") {
    ordered_json j;
    j["model"] = a.model_out;
    j["trace"] = trace_path;
    j["bags"] = bags.size();
    j["positive"] = pos;
    j["negative"] = bags.size() - pos;
    j["outer_iterations"] = result.trace.size() - 1;
    j["final_objective"] = result.trace.back().objective;
    j["converged"] = result.converged;
    j["training_accuracy"] = accuracy;
    out << j.dump(2) << "\n";
  } else {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "trained on %zu bags (%zu positive, %zu negative)\nouter iterations: %zu\nfinal objective: %.6g\n"
                  "training accuracy: %.2f%%\n",
                  bags.size(), pos, bags.size() - pos, result.trace.size() - 1, result.trace.back().objective, accuracy);
    out << buf << "model: " << a.model_out << "\ntrace: " << trace_path << "\n";
  }
  return kExitOk;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string image;
  std::string bag;
};

int cmd_predict(const PredictArgs& a, const Globals& g, std::ostream& out) {
  const CliConfig cfg = effective_config(g);
  if (a.image.empty() == a.bag.empty()) throw ConfigError("predict needs exactly one of --image or --bag");
  const mil::ModelWeights model = mil::load_model(a.model);
  mil::Bag bag;
  std::optional<imaging::ImageRGB> image;
  std::optional<imaging::RegionMap> regions;
  std::string id;
  if (!a.image.empty()) {
    // Check compatibility before the expensive extraction.
    mil::check_fingerprint(model, cfg.features.fingerprint());
    image = imaging::load_image(a.image);
    id = fs::path(a.image).stem().string();
    features::ExtractionOptions options = cfg.extraction;
    options.threads = cfg.threads;
    auto x = features::bag_from_image(*image, std::nullopt, cfg.features, options, id);
    bag = std::move(x.bag);
    regions = std::move(x.regions);
  } else {
    auto file = features::load_bag(a.bag);
    mil::check_fingerprint(model, file.fingerprint);
    bag = std::move(file.bag);
    id = bag.bag_id.empty() ? fs::path(a.bag).stem().string() : bag.bag_id;
  }
  const auto p = mil::predict_bag(model, mil::CardinalityModel::standard_mil(), bag);
  const auto scores = mil::instance_scores(model, bag);

  std::vector<int> positive_regions;
  ordered_json j;
  j["id"] = id;
  j["label"] = mil::sign(p.label);
  j["score_pos"] = p.pos_feasible ? ordered_json(p.score_pos) : ordered_json(nullptr);
  j["score_neg"] = p.neg_feasible ? ordered_json(p.score_neg) : ordered_json(nullptr);
  auto inst = ordered_json::array();
  for (std::size_t i = 0; i < bag.size(); ++i) {
    ordered_json r;
    const auto& rid = bag.instances[i].source_region_id;
    r["region_id"] = rid ? ordered_json(*rid) : ordered_json(nullptr);
    r["label"] = mil::sign(p.labeling.labels[i]);
    r["score"] = scores[i];
    if (rid && p.labeling.labels[i] == mil::Label::Positive) positive_regions.push_back(*rid);
    inst.push_back(std::move(r));
  }
  j["regions"] = std::move(inst);
  if (image && !g.overlay_dir.empty()) {
    const fs::path path = fs::path(g.overlay_dir) / (id + "_overlay.png");
    fs::create_directories(g.overlay_dir);
    imaging::save_png(path, baselines::red_overlay(*image, baselines::mask_from_regions(*regions, positive_regions)));
    j["overlay"] = path.string();
  }
  j["config"] = ordered_json::parse(cfg.to_json());

  if (g.format == "json") {
    out << j.dump(2) << "\n";
  } else {
    out << id << ": " << (p.label == mil::Label::Positive ? "+1" : "-1") << "\n";
    for (const auto& r : j["regions"]) {
      const std::string rid = r["region_id"].is_null() ? "-" : std::to_string(r["region_id"].get<int>());
      char buf[96];
      std::snprintf(buf, sizeof(buf), "  region %-6s %+d  score %.6g\n", rid.c_str(), r["label"].get<int>(),
                    r["score"].get<double>());
      out << buf;
    }
    if (j.contains("overlay")) out << "overlay: " << j["overlay"].get<std::string>() << "\n";
  }
  return kExitOk;
}

// ---- eval / baseline -------------------------------------------------------

struct EvalArgs {
  std::string method = "mimn";
  std::string manifest;
  std::string train_manifest;
  std::string test_manifest;
  std::string palette;
  std::string out;
  std::optional<int> folds;
};

int cmd_eval(const EvalArgs& a, const Globals& g, std::ostream& out) {
  CliConfig cfg = effective_config(g);
  if (a.folds) cfg.folds = *a.folds;
  cfg.validate();
  const eval::Method method = eval::method_from_string(a.method);
  eval::ExperimentConfig ec = experiment_config(cfg, method, g);
  if (method == eval::Method::Palette) {
    if (a.palette.empty()) throw ConfigError("palette method needs --palette");
    ec.palette = baselines::load_palette(a.palette);
  }
  const bool cross = !a.train_manifest.empty() || !a.test_manifest.empty();
  eval::ExperimentResult result;
  if (cross) {
    if (!a.manifest.empty()) throw ConfigError("--manifest cannot be combined with --train-manifest/--test-manifest");
    if (a.test_manifest.empty()) throw ConfigError("cross-dataset mode needs --test-manifest");
    if (method == eval::Method::Mimn && a.train_manifest.empty())
      throw ConfigError("cross-dataset mimn needs --train-manifest");
    const auto test = eval::load_manifest(a.test_manifest);
    const auto train = a.train_manifest.empty() ? eval::Manifest{} : eval::load_manifest(a.train_manifest);
    result = eval::run_cross_dataset(train, test, ec);
  } else {
    if (a.manifest.empty()) throw ConfigError("eval needs --manifest (or --train-manifest and --test-manifest)");
    result = eval::run_experiment(eval::load_manifest(a.manifest), ec);
  }
  const std::string json = eval::report_to_json(result, method, cfg.to_json());
  if (!a.out.empty()) write_text(a.out, json);
  out << (g.format == "json" ? json : eval::report_to_text(result, method));
  return kExitOk;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  std::string mode;
  std::optional<int> n_pos;
  std::optional<int> n_neg;
};

int cmd_synth(const SynthArgs& a, const Globals& g, std::ostream& out) {
  CliConfig cfg = effective_config(g);
  eval::SynthConfig sc = cfg.synth;
  if (!a.mode.empty()) sc.mode = eval::synth_mode_from_string(a.mode);
  if (a.n_pos) sc.n_pos = *a.n_pos;
  if (a.n_neg) sc.n_neg = *a.n_neg;
  sc.seed = cfg.seed;
  const fs::path manifest = eval::synth_write(sc, a.out_dir);
  if (g.format == "json") {
    ordered_json j;
    j["manifest"] = manifest.string();
    j["mode"] = eval::to_string(sc.mode);
    j["n_pos"] = sc.n_pos;
    j["n_neg"] = sc.n_neg;
    j["seed"] = sc.seed;
    out << j.dump(2) << "\n";
  } else {
    out << "wrote " << (sc.n_pos + sc.n_neg) << " " << eval::to_string(sc.mode) << " items; manifest: " << manifest.string()
        << "\n";
  }
  return kExitOk;
}

// ---- palette-build ---------------------------------------------------------

struct PaletteArgs {
  std::string table;
  std::string annotations;
  std::string out;
};

int cmd_palette_build(const PaletteArgs& a, const Globals& g, std::ostream& out) {
  const CliConfig cfg = effective_config(g);
  const auto table = baselines::load_color_table(a.table);
  const auto pixels = baselines::load_annotations(a.annotations);
  const auto palette = baselines::palette_build(pixels, table, cfg.match_threshold);
  baselines::save_palette(a.out, palette);
  if (g.format == "json")
    out << baselines::palette_to_json(palette);
  else
    out << "palette with " << palette.patches.size() << " patches written to " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blue-whitish structure detection with multi-instance learning", "bwsdetect"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--overlay-dir", g.overlay_dir, "directory for overlay and label PNGs");
  app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"json", "text"}));

  ExtractArgs xa;
  auto* extract = app.add_subcommand("extract", "extract bag files from a manifest of images");
  extract->add_option("--manifest", xa.manifest, "image manifest CSV")->required();
  extract->add_option("--out", xa.out_dir, "output directory for bag files")->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train a model on bags");
  train->add_option("--manifest", ta.manifest, "manifest of images or bag files");
  train->add_option("--bag", ta.bag_files, "bag file (repeatable)");
  train->add_option("--model-out", ta.model_out, "model file to write")->required();
  train->add_option("--trace-out", ta.trace_out, "objective trace CSV (default: <model>.trace.csv)");

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "predict bag and region labels");
  predict->add_option("--model", pa.model, "model file")->required();
  predict->add_option("--image", pa.image, "image to classify");
  predict->add_option("--bag", pa.bag, "bag file to classify");

  EvalArgs ba;
  auto* baseline = app.add_subcommand("baseline", "evaluate a baseline detector");
  baseline->add_option("--method", ba.method, "celebi or palette")->required()->check(CLI::IsMember({"celebi", "palette"}));
  baseline->add_option("--manifest", ba.manifest, "image manifest CSV");
  baseline->add_option("--test-manifest", ba.test_manifest, "alternative name for the image manifest");
  baseline->add_option("--palette", ba.palette, "palette JSON (palette method)");
  baseline->add_option("--out", ba.out, "report JSON path");
  baseline->add_option("--folds", ba.folds, "number of folds");

  EvalArgs ea;
  auto* evalc = app.add_subcommand("eval", "k-fold or cross-dataset evaluation");
  evalc->add_option("--method", ea.method, "mimn, celebi or palette")->check(CLI::IsMember({"mimn", "celebi", "palette"}));
  evalc->add_option("--manifest", ea.manifest, "manifest for k-fold evaluation");
  evalc->add_option("--train-manifest", ea.train_manifest, "training manifest (cross-dataset)");
  evalc->add_option("--test-manifest", ea.test_manifest, "test manifest (cross-dataset)");
  evalc->add_option("--palette", ea.palette, "palette JSON (palette method)");
  evalc->add_option("--out", ea.out, "report JSON path");
  evalc->add_option("--folds", ea.folds, "number of folds");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic data set");
  synth->add_option("--out", sa.out_dir, "output directory")->required();
  synth->add_option("--mode", sa.mode, "vector_bags or images")->check(CLI::IsMember({"vector_bags", "images"}));
  synth->add_option("--n-pos", sa.n_pos, "positive items");
  synth->add_option("--n-neg", sa.n_neg, "negative items");

  PaletteArgs pla;
  auto* palette = app.add_subcommand("palette-build", "build a colour palette from annotated pixels");
  palette->add_option("--table", pla.table, "colour table CSV (id,L,a,b)")->required();
  palette->add_option("--annotations", pla.annotations, "annotated pixels CSV (L,a,b,is_bws)")->required();
  palette->add_option("--out", pla.out, "palette JSON to write")->required();

  std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*seed_opt) g.seed = seed;
  if (*threads_opt) g.threads = threads;

  try {
    if (*extract) return cmd_extract(xa, g, out);
    if (*train) return cmd_train(ta, g, out);
    if (*predict) return cmd_predict(pa, g, out);
    if (*baseline) {
      if (ba.manifest.empty()) ba.manifest = ba.test_manifest;
      ba.test_manifest.clear();
      return cmd_eval(ba, g, out);
    }
    if (*evalc) return cmd_eval(ea, g, out);
    if (*synth) return cmd_synth(sa, g, out);
    if (*palette) return cmd_palette_build(pla, g, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace bws::cli
