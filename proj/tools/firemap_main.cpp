// firemap command line: ingestion -> training -> validation -> explanation
// -> zonation, with deterministic run manifests.
//
// Exit codes: 0 success, 1 computation failure, 2 usage/input failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "firemap/data.hpp"
#include "firemap/forest.hpp"
#include "firemap/geodata.hpp"
#include "firemap/metrics.hpp"
#include "firemap/shap.hpp"
#include "firemap/validation.hpp"
#include "firemap/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace firemap;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void fail_usage(const std::string& message) { throw UsageError(message); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_usage("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
  out << content;
}

std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Collects everything the manifest records while a command runs.
struct RunContext {
  std::string command;
  fs::path out_dir;
  ordered_json config = ordered_json::object();
  ordered_json inputs = ordered_json::object();
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::size_t dropped_rows = 0;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  std::string load_input(const std::string& path) {
    const std::string bytes = read_file(path);
    inputs[path] = fnv1a_digest(bytes);
    return bytes;
  }

  void emit(const std::string& name, const std::string& content) {
    write_file(out_dir / name, content);
    outputs.push_back(name);
  }

  void write_manifest() {
    ordered_json m;
    m["tool"] = "firemap";
    m["version"] = kVersion;
    m["command"] = command;
    m["config"] = config;
    m["inputs"] = inputs;
    m["seed"] = seed;
    m["dropped_rows"] = dropped_rows;
    m["outputs"] = outputs;
    m["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    write_file(out_dir / "manifest.json", m.dump(2) + "\n");
  }
};

// --- shared option blocks ---------------------------------------------------

struct ForestFlags {
  int trees = 200;
  int max_depth = 12;
  int min_leaf = 5;
  int mtry = 0;  // 0 = ceil(sqrt(p))
  bool bagging = true;

  void attach(CLI::App* cmd) {
    cmd->add_option("--trees", trees, "number of trees")->capture_default_str();
    cmd->add_option("--max-depth", max_depth, "maximum tree depth")->capture_default_str();
    cmd->add_option("--min-leaf", min_leaf, "minimum samples per leaf")->capture_default_str();
    cmd->add_option("--mtry", mtry, "features per split, 0 = ceil(sqrt(p))")
        ->capture_default_str();
    cmd->add_flag("--bagging,!--no-bagging", bagging, "bootstrap resampling per tree")
        ->capture_default_str();
  }

  ForestParams params(std::uint64_t seed) const {
    ForestParams p;
    p.n_trees = trees;
    p.max_depth = max_depth;
    p.min_samples_leaf = min_leaf;
    p.mtry = mtry;
    p.bootstrap = bagging;
    p.seed = seed;
    return p;
  }

  void echo(ordered_json& config) const {
    config["trees"] = trees;
    config["max_depth"] = max_depth;
    config["min_leaf"] = min_leaf;
    config["mtry"] = mtry;
    config["bagging"] = bagging;
  }
};

SplitPlan parse_plan(const std::string& text, const Dataset& d) {
  if (text == "logo") return leave_one_region_out_plan(d);
  SplitPlan plan;
  plan.kind = SplitPlan::Kind::SpatialTransfer;
  std::stringstream folds(text);
  std::string fold_text;
  int index = 0;
  while (std::getline(folds, fold_text, ';')) {
    SplitPlan::Fold fold;
    fold.id = "fold" + std::to_string(index++);
    std::stringstream sides(fold_text);
    std::string side;
    while (std::getline(sides, side, '|')) {
      const auto eq = side.find('=');
      if (eq == std::string::npos)
        fail_usage("plan: expected train=...|test=..., found '" + side + "'");
      const std::string key = side.substr(0, eq);
      std::stringstream ids(side.substr(eq + 1));
      std::string id;
      std::vector<std::string> values;
      while (std::getline(ids, id, ','))
        if (!id.empty()) values.push_back(id);
      if (key == "train") fold.train_regions = values;
      else if (key == "test") fold.test_regions = values;
      else fail_usage("plan: unknown selector '" + key + "'");
    }
    if (fold.train_regions.empty() || fold.test_regions.empty())
      fail_usage("plan: fold '" + fold.id + "' needs both train= and test= region lists");
    plan.folds.push_back(std::move(fold));
  }
  if (plan.folds.empty()) fail_usage("plan: no folds given");
  return plan;
}

std::string fold_report_name(const std::string& fold_id) {
  std::string name = fold_id;
  for (char& c : name)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return "fold_" + name + "_report.txt";
}

// --- commands ---------------------------------------------------------------

struct TrainCmd {
  std::string input;
  std::string model = "forest.txt";
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  ForestFlags forest;

  int run() {
    RunContext ctx;
    ctx.command = "train";
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    fs::create_directories(ctx.out_dir);

    const std::string csv = ctx.load_input(input);
    Dataset dataset = parse_samples_csv(csv);
    const ForestParams params = forest.params(seed);

    ctx.config["input"] = input;
    ctx.config["model"] = model;
    ctx.config["seed"] = seed;
    ctx.config["threads"] = threads;
    forest.echo(ctx.config);

    const Forest trained = train_forest(dataset, params, threads);
    ctx.emit(model, write_forest(trained));
    ctx.write_manifest();
    std::cerr << "trained " << trained.trees.size() << " trees on " << dataset.size()
              << " samples\n";
    return 0;
  }
};

struct EvaluateCmd {
  std::string input;
  std::string model;
  std::string out_dir = ".";
  double threshold = 0.5;
  int bins = 10;
  int bootstrap = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  int threads = 1;

  int run() {
    RunContext ctx;
    ctx.command = "evaluate";
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    fs::create_directories(ctx.out_dir);

    const Forest trained = read_forest(ctx.load_input(model));
    const Dataset dataset = parse_samples_csv(ctx.load_input(input));
    if (dataset.empty()) fail_usage("evaluate: dataset is empty");
    if (dataset.schema().fingerprint() != trained.schema.fingerprint())
      throw std::runtime_error("evaluate: model and dataset schemas differ");

    ctx.config["input"] = input;
    ctx.config["model"] = model;
    ctx.config["threshold"] = threshold;
    ctx.config["bins"] = bins;
    ctx.config["bootstrap"] = bootstrap;
    ctx.config["level"] = level;
    ctx.config["seed"] = seed;
    ctx.config["threads"] = threads;

    std::vector<int> labels;
    std::vector<double> scores;
    for (const Sample& s : dataset.samples()) {
      labels.push_back(s.label);
      scores.push_back(predict_proba(trained, s.values));
    }

    EvalOptions options;
    options.threshold = threshold;
    options.n_bins = bins;
    options.bootstrap_B = bootstrap;
    options.level = level;
    options.seed = seed;
    options.threads = threads;
    const EvalReport report = evaluate(labels, scores, options);
    if (!report.curves.roc_auc)
      std::cerr << "warning: single-class test set, ROC-AUC undefined\n";

    ctx.emit("report.txt", write_eval_report(report));
    ctx.write_manifest();
    return 0;
  }
};

struct ValidateCmd {
  std::string input;
  std::string out_dir = ".";
  std::string plan_text;
  std::vector<int> train_years, test_years;
  bool shared_model = false;
  double threshold = 0.5;
  int bins = 10;
  int bootstrap = 0;
  double level = 0.95;
  std::uint64_t seed = 0;
  int threads = 1;
  ForestFlags forest;

  int run() {
    RunContext ctx;
    ctx.command = "validate";
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    fs::create_directories(ctx.out_dir);

    const Dataset dataset = parse_samples_csv(ctx.load_input(input));
    SplitPlan plan;
    if (!plan_text.empty()) {
      if (!train_years.empty() || !test_years.empty())
        fail_usage("validate: give either --plan or --train-years/--test-years, not both");
      plan = parse_plan(plan_text, dataset);
    } else if (!train_years.empty() && !test_years.empty()) {
      plan.kind = SplitPlan::Kind::TemporalSplit;
      plan.train_years = train_years;
      plan.test_years = test_years;
    } else {
      fail_usage("validate: a --plan or --train-years/--test-years pair is required");
    }
    try {
      if (plan.kind == SplitPlan::Kind::SpatialTransfer) {
        spatial_transfer_split(dataset, plan);
      } else {
        temporal_split(dataset, plan.train_years, plan.test_years);
      }
    } catch (const std::invalid_argument& e) {
      fail_usage(e.what());
    }

    ctx.config["input"] = input;
    ctx.config["plan"] = plan_text;
    ctx.config["train_years"] = train_years;
    ctx.config["test_years"] = test_years;
    ctx.config["shared_model"] = shared_model;
    ctx.config["threshold"] = threshold;
    ctx.config["bins"] = bins;
    ctx.config["bootstrap"] = bootstrap;
    ctx.config["level"] = level;
    ctx.config["seed"] = seed;
    ctx.config["threads"] = threads;
    forest.echo(ctx.config);

    ValidationOptions options;
    options.eval.threshold = threshold;
    options.eval.n_bins = bins;
    options.eval.bootstrap_B = bootstrap;
    options.eval.level = level;
    options.retrain_per_fold = !shared_model;
    options.threads = threads;

    const ValidationResult result =
        run_validation(dataset, plan, forest.params(seed), options);
    ctx.dropped_rows = result.dropped;

    for (const FoldResult& fold : result.folds) {
      ctx.emit(fold_report_name(fold.fold_id), write_eval_report(fold.report));
      std::cerr << "fold " << fold.fold_id << ": train " << fold.train_size << ", test "
                << fold.test_size << ", positive rate "
                << format_double(fold.test_positive_rate) << "\n";
    }
    ctx.emit("aggregate.txt", write_aggregate_report(result.aggregate));
    if (result.dropped > 0)
      std::cerr << "dropped " << result.dropped << " rows outside the year sets\n";
    ctx.write_manifest();
    return 0;
  }
};

struct ExplainCmd {
  std::string input;
  std::string model;
  std::string out_dir = ".";
  std::string sample_id;
  std::vector<int> train_years, test_years;
  bool explain_train = false;
  int threads = 1;

  int run() {
    RunContext ctx;
    ctx.command = "explain";
    ctx.out_dir = out_dir;
    fs::create_directories(ctx.out_dir);

    const Forest trained = read_forest(ctx.load_input(model));
    const Dataset full = parse_samples_csv(ctx.load_input(input));
    if (full.empty()) fail_usage("explain: dataset is empty");

    ctx.config["input"] = input;
    ctx.config["model"] = model;
    ctx.config["sample_id"] = sample_id;
    ctx.config["train_years"] = train_years;
    ctx.config["test_years"] = test_years;
    ctx.config["explain_train"] = explain_train;
    ctx.config["threads"] = threads;

    // With a year split given, the test side is explained unless asked
    // otherwise; without one the whole input is explained.
    std::optional<Dataset> carved;
    if (!train_years.empty() && !test_years.empty()) {
      auto split = temporal_split(full, train_years, test_years);
      ctx.dropped_rows = split.dropped;
      carved = explain_train ? std::move(split.train) : std::move(split.test);
    } else if (explain_train) {
      fail_usage("explain: --explain-train needs --train-years/--test-years");
    }
    const Dataset& dataset = carved ? *carved : full;

    const auto explanations = explain_dataset(trained, dataset, threads);
    ctx.emit("importance.csv",
             importance_csv(importance_from_explanations(trained.schema, explanations)));
    ctx.emit("beeswarm.csv", beeswarm_csv(beeswarm_from_explanations(dataset, explanations)));

    std::size_t force_row = 0;
    if (!sample_id.empty()) {
      bool found = false;
      for (std::size_t i = 0; i < dataset.size(); ++i)
        if (dataset[i].id == sample_id) {
          force_row = i;
          found = true;
          break;
        }
      if (!found) fail_usage("explain: sample id '" + sample_id + "' not in the explained set");
    }
    ctx.emit("force.csv", force_csv(force_decomposition(trained, dataset[force_row].values)));
    ctx.write_manifest();
    return 0;
  }
};

struct ZonateCmd {
  std::string model;
  std::string stack_dir;
  std::string districts_path;
  std::string out_dir = ".";
  std::vector<double> cutoffs{1.0 / 3.0, 2.0 / 3.0};
  std::string cutoff_mode = "fixed";
  int threads = 1;

  int run() {
    RunContext ctx;
    ctx.command = "zonate";
    ctx.out_dir = out_dir;
    fs::create_directories(ctx.out_dir);

    const Forest trained = read_forest(ctx.load_input(model));

    RasterStack stack;
    stack.schema = trained.schema;
    for (const auto& feat : trained.schema.features()) {
      const fs::path layer_path = fs::path(stack_dir) / (feat.name + ".asc");
      stack.features.push_back(read_ascii_grid(ctx.load_input(layer_path.string())));
    }
    std::string districts_file = districts_path;
    if (districts_file.empty()) {
      const fs::path candidate = fs::path(stack_dir) / "districts.asc";
      if (fs::exists(candidate)) districts_file = candidate.string();
    }
    std::optional<GridRaster> districts;
    if (!districts_file.empty())
      districts = read_ascii_grid(ctx.load_input(districts_file));

    if (cutoffs.size() != 2) fail_usage("zonate: --cutoffs needs exactly two values");
    if (cutoff_mode != "fixed" && cutoff_mode != "quantile")
      fail_usage("zonate: --cutoff-mode must be fixed or quantile");

    ctx.config["model"] = model;
    ctx.config["stack_dir"] = stack_dir;
    ctx.config["districts"] = districts_file;
    ctx.config["cutoffs"] = cutoffs;
    ctx.config["cutoff_mode"] = cutoff_mode;
    ctx.config["threads"] = threads;

    const GridRaster probability = predict_raster(trained, stack, threads);
    std::pair<double, double> bounds{cutoffs[0], cutoffs[1]};
    if (cutoff_mode == "quantile") bounds = quantile_cutoffs(probability, bounds);
    const RiskMap rm = classify_risk(probability, bounds);

    ctx.emit("probability.asc", write_ascii_grid(rm.probability));
    ctx.emit("classes.asc", write_ascii_grid(rm.classes));
    if (districts)
      ctx.emit("area_table.csv", district_area_csv(district_area_table(rm, *districts)));
    std::cerr << "cutoffs used: " << format_double(bounds.first) << ", "
              << format_double(bounds.second) << "\n";
    ctx.write_manifest();
    return 0;
  }
};

struct SynthCmd {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int grid = 64;
  int samples = 4000;
  int smooth_radius = 3;
  int blocks = 2;
  double shift = 0.0;
  double intercept = 0.0;
  std::vector<double> beta;

  int run() {
    RunContext ctx;
    ctx.command = "synth";
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    fs::create_directories(ctx.out_dir);

    SynthParams params;
    params.ncols = grid;
    params.nrows = grid;
    params.n_samples = samples;
    params.smooth_radius = smooth_radius;
    params.region_blocks = blocks;
    params.region_shift = shift;
    params.intercept = intercept;
    params.seed = seed;
    params.beta = beta;

    ctx.config["seed"] = seed;
    ctx.config["grid"] = grid;
    ctx.config["samples"] = samples;
    ctx.config["smooth_radius"] = smooth_radius;
    ctx.config["blocks"] = blocks;
    ctx.config["shift"] = shift;
    ctx.config["intercept"] = intercept;
    ctx.config["beta"] = beta.empty() ? default_synth_beta() : beta;

    const SynthResult synth = synth_landscape(params);
    for (std::size_t j = 0; j < synth.stack.features.size(); ++j)
      ctx.emit(params.schema.at(j).name + ".asc", write_ascii_grid(synth.stack.features[j]));
    ctx.emit("truth.asc", write_ascii_grid(synth.truth));
    ctx.emit("districts.asc", write_ascii_grid(*synth.stack.districts));
    ctx.emit("strata.asc", write_ascii_grid(*synth.stack.strata));
    ctx.emit("samples.csv", write_samples_csv(synth.samples));
    ctx.write_manifest();
    std::cerr << "synthetic landscape: " << grid << "x" << grid << ", " << samples
              << " samples\n";
    return 0;
  }
};

int dispatch(int argc, char** argv) {
  CLI::App app{"firemap: wildfire susceptibility modeling toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "",
                 "INI file with one [subcommand] section per command (flags override)");

  TrainCmd train;
  auto* train_cmd = app.add_subcommand("train", "train a random forest on a sample table");
  train_cmd->add_option("--input", train.input, "samples csv")->required();
  train_cmd->add_option("--model", train.model, "output forest file name")
      ->capture_default_str();
  train_cmd->add_option("--out-dir", train.out_dir, "output directory")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "root random seed")->capture_default_str();
  train_cmd->add_option("--threads", train.threads, "worker threads")->capture_default_str();
  train.forest.attach(train_cmd);

  EvaluateCmd evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "score a test table and write a full report");
  eval_cmd->add_option("--input", evaluate.input, "samples csv")->required();
  eval_cmd->add_option("--model", evaluate.model, "forest file")->required();
  eval_cmd->add_option("--out-dir", evaluate.out_dir, "output directory")
      ->capture_default_str();
  eval_cmd->add_option("--threshold", evaluate.threshold, "positive-class threshold")
      ->capture_default_str();
  eval_cmd->add_option("--bins", evaluate.bins, "reliability bins")->capture_default_str();
  eval_cmd->add_option("--bootstrap", evaluate.bootstrap, "bootstrap resamples (0 = off)")
      ->capture_default_str();
  eval_cmd->add_option("--level", evaluate.level, "confidence level")->capture_default_str();
  eval_cmd->add_option("--seed", evaluate.seed, "bootstrap seed")->capture_default_str();
  eval_cmd->add_option("--threads", evaluate.threads, "worker threads")->capture_default_str();

  ValidateCmd validate;
  auto* val_cmd = app.add_subcommand("validate", "spatial-transfer or temporal-split runs");
  val_cmd->add_option("--input", validate.input, "samples csv")->required();
  val_cmd->add_option("--out-dir", validate.out_dir, "output directory")->capture_default_str();
  val_cmd->add_option("--plan", validate.plan_text,
                      "spatial plan: 'logo' or 'train=A,B|test=C;train=...'");
  val_cmd->add_option("--train-years", validate.train_years, "temporal split: training years");
  val_cmd->add_option("--test-years", validate.test_years, "temporal split: test years");
  val_cmd->add_flag("--shared-model", validate.shared_model,
                    "train once and reuse across folds (default retrains per fold)");
  val_cmd->add_option("--threshold", validate.threshold, "positive-class threshold")
      ->capture_default_str();
  val_cmd->add_option("--bins", validate.bins, "reliability bins")->capture_default_str();
  val_cmd->add_option("--bootstrap", validate.bootstrap,
                      "bootstrap resamples per fold (0 = off)")
      ->capture_default_str();
  val_cmd->add_option("--level", validate.level, "confidence level")->capture_default_str();
  val_cmd->add_option("--seed", validate.seed, "root random seed")->capture_default_str();
  val_cmd->add_option("--threads", validate.threads, "worker threads")->capture_default_str();
  validate.forest.attach(val_cmd);

  ExplainCmd explain;
  auto* exp_cmd = app.add_subcommand("explain", "Shapley importance/beeswarm/force exports");
  exp_cmd->add_option("--input", explain.input, "samples csv")->required();
  exp_cmd->add_option("--model", explain.model, "forest file")->required();
  exp_cmd->add_option("--out-dir", explain.out_dir, "output directory")->capture_default_str();
  exp_cmd->add_option("--sample-id", explain.sample_id,
                      "sample explained in force.csv (default: first row)");
  exp_cmd->add_option("--train-years", explain.train_years, "optional year split: train side");
  exp_cmd->add_option("--test-years", explain.test_years, "optional year split: test side");
  exp_cmd->add_flag("--explain-train", explain.explain_train,
                    "explain the train side of the year split instead of the test side");
  exp_cmd->add_option("--threads", explain.threads, "worker threads")->capture_default_str();

  ZonateCmd zonate;
  auto* zon_cmd = app.add_subcommand("zonate", "probability raster, risk classes, area table");
  zon_cmd->add_option("--model", zonate.model, "forest file")->required();
  zon_cmd->add_option("--stack-dir", zonate.stack_dir,
                      "directory holding <feature>.asc layers")
      ->required();
  zon_cmd->add_option("--districts", zonate.districts_path,
                      "district raster (default: <stack-dir>/districts.asc if present)");
  zon_cmd->add_option("--out-dir", zonate.out_dir, "output directory")->capture_default_str();
  zon_cmd->add_option("--cutoffs", zonate.cutoffs, "class cutoffs c1 c2")
      ->expected(2)
      ->capture_default_str();
  zon_cmd->add_option("--cutoff-mode", zonate.cutoff_mode, "fixed or quantile")
      ->capture_default_str();
  zon_cmd->add_option("--threads", zonate.threads, "worker threads")->capture_default_str();

  SynthCmd synth;
  auto* syn_cmd = app.add_subcommand("synth", "seeded synthetic landscape and sample table");
  syn_cmd->add_option("--out-dir", synth.out_dir, "output directory")->capture_default_str();
  syn_cmd->add_option("--seed", synth.seed, "generator seed")->capture_default_str();
  syn_cmd->add_option("--grid", synth.grid, "grid side length")->capture_default_str();
  syn_cmd->add_option("--samples", synth.samples, "sampled cells")->capture_default_str();
  syn_cmd->add_option("--smooth-radius", synth.smooth_radius, "box smoothing radius")
      ->capture_default_str();
  syn_cmd->add_option("--blocks", synth.blocks, "region blocks per axis")
      ->capture_default_str();
  syn_cmd->add_option("--shift", synth.shift, "regional distribution shift knob")
      ->capture_default_str();
  syn_cmd->add_option("--intercept", synth.intercept, "logistic intercept")
      ->capture_default_str();
  syn_cmd->add_option("--beta", synth.beta, "per-feature coefficients (default canonical)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // Input and option problems exit 2; failures inside the computation exit 1.
  try {
    if (train_cmd->parsed()) return train.run();
    if (eval_cmd->parsed()) return evaluate.run();
    if (val_cmd->parsed()) return validate.run();
    if (exp_cmd->parsed()) return explain.run();
    if (zon_cmd->parsed()) return zonate.run();
    if (syn_cmd->parsed()) return synth.run();
  } catch (const UsageError& e) {
    std::cerr << ordered_json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << ordered_json{{"error", {{"code", 1}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) { return dispatch(argc, argv); }
