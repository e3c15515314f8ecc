// creditrisk: command-line front end for the PD modelling pipeline.
//
// Every command writes its artifacts plus one <name>.manifest.json into
// --out-dir. Exit codes: 0 ok, 2 validation, 3 I/O, 4 numeric failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "creditrisk/dataset.hpp"
#include "creditrisk/error.hpp"
#include "creditrisk/gbm.hpp"
#include "creditrisk/glm.hpp"
#include "creditrisk/lime.hpp"
#include "creditrisk/metrics.hpp"
#include "creditrisk/plot.hpp"
#include "creditrisk/probe.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace creditrisk;

namespace {

constexpr int kManifestSchemaVersion = 1;

std::string ReadText(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::kMissingFile, "no such file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

std::string Absolute(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

// A loaded model of either family, seen as a PD function.
struct Scorer {
  std::string kind;
  std::vector<std::string> feature_names;
  std::function<double(std::span<const double>)> pd;
};

Scorer LoadScorer(const fs::path& path) {
  const std::string text = ReadText(path);
  std::string kind;
  try {
    kind = json::parse(text).at("kind").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedDocument, path.string() + ": not a model file");
  }
  Scorer s;
  s.kind = kind;
  if (kind == "glm") {
    auto model = std::make_shared<GlmModel>(GlmFromJson(text));
    s.feature_names = model->feature_names;
    s.pd = [model](std::span<const double> x) { return PredictPd(*model, x); };
  } else if (kind == "gbm") {
    auto model = std::make_shared<BoostedEnsemble>(GbmFromJson(text));
    s.feature_names = model->feature_names;
    s.pd = [model](std::span<const double> x) { return PredictPd(*model, x); };
  } else {
    throw Error(ErrorKind::kMalformedDocument, path.string() + ": unknown model kind '" + kind + "'");
  }
  return s;
}

void CheckFeatures(const Scorer& scorer, const Dataset& data, const std::string& what) {
  if (scorer.feature_names != data.feature_names()) {
    throw Error(ErrorKind::kDimensionMismatch,
                what + ": data columns do not match the model's features");
  }
}

std::vector<double> Score(const Scorer& scorer, const Dataset& data) {
  std::vector<double> scores(data.num_rows());
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    const auto row = data.Row(i);
    scores[i] = scorer.pd(row);
  }
  return scores;
}

PerturbationMode ParseMode(const std::string& name) {
  if (name == "continuous") return PerturbationMode::kContinuous;
  if (name == "quartile") return PerturbationMode::kQuartileBins;
  throw Error(ErrorKind::kInvalidArgument, "unknown perturbation mode '" + name + "'");
}

// ---------------------------------------------------------------------------

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::vector<std::string> argv;
};

// Collects what a command read and wrote, then writes the manifest.
class Run {
 public:
  Run(const Globals& g, std::string command, std::string manifest_stem)
      : globals_(g),
        command_(std::move(command)),
        stem_(std::move(manifest_stem)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(g.out_dir);
  }

  fs::path Output(const std::string& name) {
    fs::path p = fs::path(globals_.out_dir) / name;
    outputs_.push_back(Absolute(p));
    return p;
  }
  void Input(const fs::path& p) { inputs_.push_back(Absolute(p)); }
  json& config() { return config_; }

  void Finish() {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m;
    m["schema_version"] = kManifestSchemaVersion;
    m["command"] = command_;
    m["argv"] = globals_.argv;
    m["working_directory"] = fs::current_path().string();
    m["seed"] = globals_.seed;
    m["out_dir"] = Absolute(globals_.out_dir);
    m["config"] = config_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["duration_seconds"] = seconds;
    WriteText(fs::path(globals_.out_dir) / (stem_ + ".manifest.json"), m.dump(2) + "\n");
  }

 private:
  const Globals& globals_;
  std::string command_;
  std::string stem_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  json config_ = json::object();
};

std::string Stem(const std::string& file) { return fs::path(file).stem().string(); }

// ---------------------------------------------------------------------------
// generate

struct GenerateOpts {
  std::size_t rows = 56311;
  std::size_t features = 20;
  double bad_rate = 0.03;
  bool linear = false;
  double correlation = 0.0;
  std::string output = "synthetic.csv";
};

void RunGenerate(const Globals& g, const GenerateOpts& o) {
  Run run(g, "generate", Stem(o.output));
  SyntheticSpec spec;
  spec.n_rows = o.rows;
  spec.n_features = o.features;
  spec.bad_rate_target = o.bad_rate;
  spec.nonlinearity = o.linear ? Nonlinearity::kLinear : Nonlinearity::kNonlinear;
  spec.correlation = o.correlation;
  spec.seed = g.seed;
  run.config() = {{"rows", o.rows},          {"features", o.features},
                  {"bad_rate", o.bad_rate},  {"nonlinearity", o.linear ? "linear" : "nonlinear"},
                  {"correlation", o.correlation}};
  const SyntheticData synthetic = GenerateSynthetic(spec);
  WriteCsv(synthetic.data, run.Output(o.output));
  run.Finish();
  std::cout << "wrote " << synthetic.data.num_rows() << " rows, " << synthetic.data.num_features()
            << " features, bad rate " << std::fixed << std::setprecision(4)
            << synthetic.data.bad_rate() << "\n";
}

// ---------------------------------------------------------------------------
// split

struct SplitOpts {
  std::string data;
  double train_fraction = 0.70;
  double tolerance = 0.005;
  std::string train_out = "train.csv";
  std::string test_out = "test.csv";
};

void RunSplit(const Globals& g, const SplitOpts& o) {
  Run run(g, "split", "split");
  run.Input(o.data);
  run.config() = {{"train_fraction", o.train_fraction}, {"balance_check_tolerance", o.tolerance}};
  const Dataset data = LoadCsv(o.data);
  SplitSpec spec;
  spec.train_fraction = o.train_fraction;
  spec.balance_check_tolerance = o.tolerance;
  spec.seed = g.seed;
  const SplitResult split = Split(data, spec);
  WriteCsv(split.train, run.Output(o.train_out));
  WriteCsv(split.test, run.Output(o.test_out));
  run.Finish();
  std::cout << std::fixed << std::setprecision(4) << "train " << split.train.num_rows()
            << " rows (bad rate " << split.train.bad_rate() << "), test "
            << split.test.num_rows() << " rows (bad rate " << split.test.bad_rate() << ")\n";
}

// ---------------------------------------------------------------------------
// train

struct GlmOpts {
  std::string data;
  std::string link = "logit";
  int max_iterations = 100;
  double tolerance = 1e-8;
  std::string output;  // defaults to <link>.model
};

void RunTrainGlm(const Globals& g, const GlmOpts& o) {
  const Link link = ParseLink(o.link);
  const std::string output = o.output.empty() ? o.link + ".model" : o.output;
  Run run(g, "train glm", Stem(output));
  run.Input(o.data);
  run.config() = {{"link", o.link}, {"max_iterations", o.max_iterations}, {"tolerance", o.tolerance}};
  const Dataset data = LoadCsv(o.data);
  FitConfig config;
  config.max_iterations = o.max_iterations;
  config.tolerance = o.tolerance;
  const GlmModel model = FitGlm(data, link, config);
  SaveGlm(model, run.Output(output));
  run.Finish();
  std::cout << LinkName(link) << " fit: " << (model.converged ? "converged" : "NOT converged")
            << " after " << model.iterations << " iterations, "
            << (link == Link::kIdentity ? "rss " : "log-likelihood ") << std::setprecision(10)
            << model.final_log_likelihood << "\n";
}

struct GbmOpts {
  std::string data;
  int trees = 300;
  int depth = 3;
  double learning_rate = 0.1;
  int min_leaf = 20;
  double subsample = 1.0;
  std::string output = "gbm.model";
};

void RunTrainGbm(const Globals& g, const GbmOpts& o) {
  Run run(g, "train gbm", Stem(o.output));
  run.Input(o.data);
  run.config() = {{"trees", o.trees},         {"depth", o.depth},
                  {"learning_rate", o.learning_rate}, {"min_leaf", o.min_leaf},
                  {"subsample", o.subsample}};
  const Dataset data = LoadCsv(o.data);
  GbmConfig config;
  config.n_trees = o.trees;
  config.max_depth = o.depth;
  config.learning_rate = o.learning_rate;
  config.min_samples_leaf = o.min_leaf;
  config.subsample_fraction = o.subsample;
  config.seed = g.seed;
  const BoostedEnsemble model = FitGbm(data, config);
  SaveGbm(model, run.Output(o.output));
  run.Finish();
  std::cout << "gbm fit: " << model.trees.size() << " trees, training deviance "
            << std::setprecision(10) << model.training_deviance.front() << " -> "
            << model.training_deviance.back() << "\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOpts {
  std::string model_a;
  std::string model_b;
  std::string data;
  std::string output = "evaluation.json";
};

void RunEvaluate(const Globals& g, const EvaluateOpts& o) {
  Run run(g, "evaluate", Stem(o.output));
  run.Input(o.data);
  const Dataset data = LoadCsv(o.data);

  json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "comparison";
  doc["reports"] = json::array();
  std::vector<EvalReport> reports;
  for (const std::string& path : {o.model_a, o.model_b}) {
    if (path.empty()) continue;
    run.Input(path);
    const Scorer scorer = LoadScorer(path);
    CheckFeatures(scorer, data, path);
    reports.push_back(Evaluate(Score(scorer, data), data.target()));
    const std::string label = fs::path(path).filename().string();
    doc["reports"].push_back(json::parse(EvalReportToJson(reports.back(), label)));
    std::cout << std::fixed << std::setprecision(4) << label << ": gini " << reports.back().gini
              << ", auc " << reports.back().auc << "\n";
  }
  if (reports.size() == 2) {
    const double delta = GiniDelta(reports[0], reports[1]);
    doc["gini_delta_points"] = delta;
    std::cout << std::fixed << std::setprecision(2) << "gini delta (a - b): " << delta
              << " points\n";
  }
  run.config() = {{"model_a", o.model_a}, {"model_b", o.model_b}};
  WriteText(run.Output(o.output), doc.dump(2) + "\n");
  run.Finish();
}

// ---------------------------------------------------------------------------
// explain / stability

struct LimeOpts {
  std::string model;
  std::string data;
  std::string stats_data;  // defaults to --data
  std::size_t row = 0;
  int top = 7;
  int samples = 5000;
  double kernel_width = 0.0;
  double lambda = 1.0;
  std::string mode = "continuous";
  int runs = 3;
  std::string output;
};

struct LimeInputs {
  Scorer scorer;
  FeatureStats stats;
  std::vector<double> unit;
  std::string unit_id;
  LimeConfig config;
};

LimeInputs PrepareLime(const Globals& g, const LimeOpts& o, Run& run) {
  run.Input(o.model);
  run.Input(o.data);
  LimeInputs in;
  in.scorer = LoadScorer(o.model);
  const Dataset data = LoadCsv(o.data);
  CheckFeatures(in.scorer, data, o.data);
  if (o.row >= data.num_rows()) {
    throw Error(ErrorKind::kInvalidArgument, "row " + std::to_string(o.row) + " out of range");
  }
  if (o.stats_data.empty()) {
    in.stats = ComputeFeatureStats(data);
  } else {
    run.Input(o.stats_data);
    const Dataset stats_data = LoadCsv(o.stats_data);
    CheckFeatures(in.scorer, stats_data, o.stats_data);
    in.stats = ComputeFeatureStats(stats_data);
  }
  in.unit = data.Row(o.row);
  in.unit_id = data.row_ids()[o.row];
  in.config.n_samples = o.samples;
  in.config.kernel_width = o.kernel_width;
  in.config.n_features_shown = o.top;
  in.config.lambda = o.lambda;
  in.config.seed = g.seed;
  in.config.mode = ParseMode(o.mode);
  run.config() = {{"row", o.row},         {"top", o.top},       {"samples", o.samples},
                  {"kernel_width", o.kernel_width}, {"lambda", o.lambda}, {"mode", o.mode}};
  return in;
}

void RunExplain(const Globals& g, const LimeOpts& o) {
  const std::string output = o.output.empty() ? "explanation.json" : o.output;
  Run run(g, "explain", Stem(output));
  const LimeInputs in = PrepareLime(g, o, run);
  const Explanation e = Explain(in.scorer.pd, in.unit, in.stats, in.config, in.unit_id);
  WriteText(run.Output(output), ExplanationToJson(e));
  run.Finish();
  std::cout << std::setprecision(6) << "unit " << e.unit_id << ": model " << e.blackbox_prediction
            << ", surrogate " << e.surrogate_prediction << ", R2 " << e.surrogate_r_squared
            << ", intercept " << e.intercept << "\n";
  for (const auto& c : e.Shown()) {
    std::cout << "  " << std::setw(24) << std::left << c.description << std::right << " "
              << std::showpos << c.contribution << std::noshowpos << "\n";
  }
}

void RunStability(const Globals& g, const LimeOpts& o) {
  const std::string output = o.output.empty() ? "stability.json" : o.output;
  Run run(g, "stability", Stem(output));
  const LimeInputs in = PrepareLime(g, o, run);
  run.config()["runs"] = o.runs;
  const StabilityReport r =
      Stability(in.scorer.pd, in.unit, in.stats, in.config, o.runs, in.unit_id);
  WriteText(run.Output(output), StabilityToJson(r));
  run.Finish();
  std::cout << std::setprecision(4) << "unit " << r.unit_id << ": top-" << o.top
            << " overlap " << r.topk_overlap << ", mean dispersion " << r.MeanDispersion()
            << ", mean R2 " << r.mean_r_squared << "\n";
}

// ---------------------------------------------------------------------------
// probe

struct ProbeOpts {
  std::string scenario = "high_dim";
  std::size_t rows = ProbeSpec{}.n_rows;
  int units = ProbeSpec{}.n_units;
  int runs = ProbeSpec{}.runs;
  int trees = ProbeSpec{}.gbm.n_trees;
  std::string output;  // defaults to probe_<scenario>.json
};

void RunProbe(const Globals& g, const ProbeOpts& o) {
  const ProbeScenario scenario = ParseProbeScenario(o.scenario);
  const std::string output = o.output.empty() ? "probe_" + o.scenario + ".json" : o.output;
  Run run(g, "probe", Stem(output));
  ProbeSpec spec;
  spec.seed = g.seed;
  spec.lime.seed = g.seed;
  spec.gbm.seed = g.seed;
  spec.n_rows = o.rows;
  spec.n_units = o.units;
  spec.runs = o.runs;
  spec.gbm.n_trees = o.trees;
  run.config() = {{"scenario", o.scenario}, {"rows", o.rows}, {"units", o.units},
                  {"runs", o.runs},         {"trees", o.trees}};
  const ProbeReport report = WeaknessProbe(scenario, spec);
  WriteText(run.Output(output), ProbeReportToJson(report));
  run.Finish();
  std::cout << std::setprecision(5);
  for (const auto& r : report.rows) {
    std::cout << (scenario == ProbeScenario::kHighDim ? "p=" : "rho=") << r.parameter
              << ": overlap " << r.topk_overlap << ", |top| " << r.mean_abs_top_contribution
              << ", dispersion " << r.mean_dispersion << ", R2 " << r.mean_r_squared << "\n";
  }
  for (const auto& s : report.sweep) {
    std::cout << "width x" << s.width_multiplier << " (" << s.kernel_width << "): slope "
              << s.slope << ", R2 " << s.r_squared << "\n";
  }
}

// ---------------------------------------------------------------------------
// plot

struct PlotOpts {
  std::string input;
  std::string output;  // defaults to <input stem>.svg
};

void RunPlot(const Globals& g, const PlotOpts& o) {
  const std::string output = o.output.empty() ? Stem(o.input) + ".svg" : o.output;
  Run run(g, "plot", Stem(output) + "_svg");
  run.Input(o.input);
  const std::string text = ReadText(o.input);
  std::string kind;
  json doc;
  try {
    doc = json::parse(text);
    kind = doc.at("kind").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedDocument, o.input + ": " + e.what());
  }
  std::string svg;
  if (kind == "explanation") {
    svg = ExplanationSvg(ExplanationFromJson(text));
  } else if (kind == "comparison" || kind == "evaluation") {
    std::vector<LorenzSeries> series;
    const json reports = kind == "comparison" ? doc.at("reports") : json::array({doc});
    for (const auto& r : reports) {
      series.push_back({r.value("label", std::string("model")), EvalReportFromJson(r.dump())});
    }
    svg = LorenzSvg(series);
  } else {
    throw Error(ErrorKind::kMalformedDocument, o.input + ": cannot plot a '" + kind + "' document");
  }
  run.config() = {{"kind", kind}};
  WriteText(run.Output(output), svg);
  run.Finish();
  std::cout << "wrote " << output << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probability-of-default modelling: synthetic data, GLM and boosted-tree "
               "models, Gini evaluation and local surrogate explanations."};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with option defaults (flags take precedence)");

  Globals globals;
  globals.argv.assign(argv, argv + argc);
  app.add_option("--seed", globals.seed, "Random seed")->capture_default_str();
  app.add_option("--out-dir", globals.out_dir, "Directory for outputs and manifests")
      ->capture_default_str();

  std::function<void()> action;

  GenerateOpts gen;
  auto* generate = app.add_subcommand("generate", "Synthetic credit portfolio to CSV");
  generate->add_option("--rows", gen.rows)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--features", gen.features)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--bad-rate", gen.bad_rate)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  auto* nonlinear_flag = generate->add_flag("--nonlinear", "Nonlinear log-odds (default)");
  generate->add_flag("--linear", gen.linear, "Purely linear log-odds")->excludes(nonlinear_flag);
  generate->add_option("--correlation", gen.correlation)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  generate->add_option("-o,--output", gen.output)->capture_default_str();
  generate->callback([&] { action = [&] { RunGenerate(globals, gen); }; });

  SplitOpts spl;
  auto* split = app.add_subcommand("split", "Stratified train/test split");
  split->add_option("--data", spl.data)->required();
  split->add_option("--train-fraction", spl.train_fraction)->capture_default_str();
  split->add_option("--tolerance", spl.tolerance, "Max train/test bad-rate gap")->capture_default_str();
  split->add_option("--train-out", spl.train_out)->capture_default_str();
  split->add_option("--test-out", spl.test_out)->capture_default_str();
  split->callback([&] { action = [&] { RunSplit(globals, spl); }; });

  auto* train = app.add_subcommand("train", "Fit a PD model");
  train->require_subcommand(1);
  GlmOpts glm;
  auto* train_glm = train->add_subcommand("glm", "Linear, logit or probit model");
  train_glm->add_option("--data", glm.data)->required();
  train_glm->add_option("--link", glm.link)->capture_default_str()
      ->check(CLI::IsMember({"identity", "logit", "probit"}));
  train_glm->add_option("--max-iterations", glm.max_iterations)->capture_default_str();
  train_glm->add_option("--tolerance", glm.tolerance)->capture_default_str();
  train_glm->add_option("-o,--output", glm.output, "Default: <link>.model");
  train_glm->callback([&] { action = [&] { RunTrainGlm(globals, glm); }; });

  GbmOpts gbm;
  auto* train_gbm = train->add_subcommand("gbm", "Gradient-boosted trees");
  train_gbm->add_option("--data", gbm.data)->required();
  train_gbm->add_option("--trees", gbm.trees)->capture_default_str();
  train_gbm->add_option("--depth", gbm.depth)->capture_default_str();
  train_gbm->add_option("--learning-rate", gbm.learning_rate)->capture_default_str();
  train_gbm->add_option("--min-leaf", gbm.min_leaf)->capture_default_str();
  train_gbm->add_option("--subsample", gbm.subsample)->capture_default_str();
  train_gbm->add_option("-o,--output", gbm.output)->capture_default_str();
  train_gbm->callback([&] { action = [&] { RunTrainGbm(globals, gbm); }; });

  EvaluateOpts ev;
  auto* evaluate = app.add_subcommand("evaluate", "Gini / Lorenz report for one or two models");
  evaluate->add_option("--model-a", ev.model_a)->required();
  evaluate->add_option("--model-b", ev.model_b);
  evaluate->add_option("--data", ev.data)->required();
  evaluate->add_option("-o,--output", ev.output)->capture_default_str();
  evaluate->callback([&] { action = [&] { RunEvaluate(globals, ev); }; });

  LimeOpts ex;
  auto add_lime_options = [&](CLI::App* cmd) {
    cmd->add_option("--model", ex.model)->required();
    cmd->add_option("--data", ex.data, "CSV holding the unit to explain")->required();
    cmd->add_option("--stats-data", ex.stats_data,
                    "CSV defining the perturbation scale (default: --data)");
    cmd->add_option("--row", ex.row, "0-based row of --data")->capture_default_str();
    cmd->add_option("--top", ex.top, "Features shown")->capture_default_str();
    cmd->add_option("--samples", ex.samples)->capture_default_str();
    cmd->add_option("--kernel-width", ex.kernel_width, "<= 0 selects 0.75 sqrt(p)")
        ->capture_default_str();
    cmd->add_option("--lambda", ex.lambda)->capture_default_str();
    cmd->add_option("--mode", ex.mode)->capture_default_str()
        ->check(CLI::IsMember({"continuous", "quartile"}));
    cmd->add_option("-o,--output", ex.output);
  };
  auto* explain = app.add_subcommand("explain", "Local surrogate explanation of one unit");
  add_lime_options(explain);
  explain->callback([&] { action = [&] { RunExplain(globals, ex); }; });
  auto* stability = app.add_subcommand("stability", "Repeat an explanation with shifted seeds");
  add_lime_options(stability);
  stability->add_option("--runs", ex.runs)->capture_default_str()->check(CLI::Range(2, 1000));
  stability->callback([&] { action = [&] { RunStability(globals, ex); }; });

  ProbeOpts pr;
  auto* probe = app.add_subcommand("probe", "Explanation failure-mode experiments");
  probe->add_option("--scenario", pr.scenario)->capture_default_str()
      ->check(CLI::IsMember({"high_dim", "correlated", "kernel_sweep"}));
  probe->add_option("--rows", pr.rows)->capture_default_str()->check(CLI::PositiveNumber);
  probe->add_option("--units", pr.units)->capture_default_str()->check(CLI::PositiveNumber);
  probe->add_option("--runs", pr.runs)->capture_default_str()->check(CLI::Range(2, 1000));
  probe->add_option("--trees", pr.trees)->capture_default_str()->check(CLI::PositiveNumber);
  probe->add_option("-o,--output", pr.output);
  probe->callback([&] { action = [&] { RunProbe(globals, pr); }; });

  PlotOpts pl;
  auto* plot = app.add_subcommand("plot", "SVG from an evaluation or explanation file");
  plot->add_option("--input", pl.input)->required();
  plot->add_option("-o,--output", pl.output, "Default: <input stem>.svg");
  plot->callback([&] { action = [&] { RunPlot(globals, pl); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    action();
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorKindName(e.kind()) << "]: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error [io]: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
