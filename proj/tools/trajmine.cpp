// trajmine: command-line front end over the core library.
//
// Exit codes: 0 success, 1 usage error (bad flags or arguments),
// 2 data error (unreadable/malformed inputs, write failures).
// Diagnostics go to stderr; data goes to the output file or stdout.

#include <CLI11.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trajmine/corpus.hpp"
#include "trajmine/errors.hpp"
#include "trajmine/features.hpp"
#include "trajmine/io.hpp"
#include "trajmine/learn.hpp"
#include "trajmine/series.hpp"
#include "trajmine/stats.hpp"
#include "trajmine/svm.hpp"
#include "trajmine/synth.hpp"
#include "trajmine/timeline.hpp"
#include "trajmine/trajectory.hpp"
#include "trajmine/version.hpp"

namespace {

using nlohmann::ordered_json;
using namespace trajmine;

// ---------------------------------------------------------------------------
// Option bags. Enum-valued flags are held as validated strings and resolved
// after parsing so CLI11 can report bad values as usage errors.

struct AnalysisOpts {
  std::string input;   // empty -> stdin
  std::string output;  // empty -> stdout
  Thresholds thresholds;
  SeriesConfig series;
  std::string ma_mode = "centered";
  std::string citation_mode = "all";

  SeriesConfig resolved_series() const {
    SeriesConfig out = series;
    out.ma_mode = *ma_mode_from_string(ma_mode);
    return out;
  }
  CitationMode resolved_mode() const {
    return citation_mode == "exclude_self" ? CitationMode::exclude_self : CitationMode::all;
  }
};

struct LearnerOpts {
  std::string kernel = "rbf";
  double cost = 1.0;
  double svr_epsilon = 0.1;
  double gamma = 0.0;  // <= 0: resolved to 1/dimension at fit time
  std::string target = "success";
  int horizon = 10;
};

struct EvalOpts {
  int t_min = 3;
  int t_max = 6;
  int folds = 10;
  std::uint64_t seed = 0;
  std::string save_model;  // optional model bundle path
  int model_t = 0;         // 0: use t_min
};

struct SynthOpts {
  std::string output;  // empty -> stdout
  std::string labels;
  std::string targets;
  std::string mix;         // e.g. "SR=1,SD=2"
  std::string stratified;  // e.g. "SR=2.0:0.0,SD=0.5:0.0"
  int horizon = 10;
  SynthSpec spec;
};

// ---------------------------------------------------------------------------
// Flag registration shared between subcommands.

void add_input_flag(CLI::App* cmd, std::string& path) {
  cmd->add_option("--input", path, "Corpus JSONL path (default: stdin)");
}

void add_output_flag(CLI::App* cmd, std::string& path) {
  cmd->add_option("--output", path, "Output path (default: stdout)");
}

void add_series_flags(CLI::App* cmd, AnalysisOpts& opts) {
  cmd->add_option("--buffer", opts.series.buffer_years,
                  "Career years folded into the start-up buffer")
      ->capture_default_str();
  cmd->add_option("--ma-window", opts.series.ma_window, "Moving-average window length")
      ->capture_default_str();
  cmd->add_option("--ma-mode", opts.ma_mode, "Moving-average alignment")
      ->check(CLI::IsMember({"centered", "trailing"}))
      ->capture_default_str();
}

void add_threshold_flags(CLI::App* cmd, AnalysisOpts& opts) {
  cmd->add_option("--epsilon", opts.thresholds.epsilon,
                  "Tolerance for the monotone trend checks")
      ->capture_default_str();
  cmd->add_option("--delta", opts.thresholds.delta,
                  "Required end-of-career drop below the peak")
      ->capture_default_str();
  cmd->add_option("--peak-height", opts.thresholds.peak_height_fraction,
                  "Keep peaks at least this fraction of the tallest")
      ->capture_default_str();
  cmd->add_option("--peak-sep", opts.thresholds.peak_separation,
                  "Merge peaks at most this many years apart")
      ->capture_default_str();
}

void add_citation_flag(CLI::App* cmd, AnalysisOpts& opts) {
  cmd->add_option("--citation-mode", opts.citation_mode, "Citation counting mode")
      ->check(CLI::IsMember({"all", "exclude_self"}))
      ->capture_default_str();
}

void add_learner_flags(CLI::App* cmd, LearnerOpts& opts) {
  cmd->add_option("--kernel", opts.kernel, "SVM kernel")
      ->check(CLI::IsMember({"rbf", "linear"}))
      ->capture_default_str();
  cmd->add_option("--cost", opts.cost, "SVM box constraint C")->capture_default_str();
  cmd->add_option("--svr-epsilon", opts.svr_epsilon, "SVR tube half-width")
      ->capture_default_str();
  cmd->add_option("--gamma", opts.gamma, "RBF width (<= 0: 1/dimension)")
      ->capture_default_str();
  cmd->add_option("--target", opts.target, "Prediction target")
      ->check(CLI::IsMember({"success", "cum_citations"}))
      ->capture_default_str();
  cmd->add_option("--horizon", opts.horizon, "Career year whose value is predicted")
      ->capture_default_str();
}

// ---------------------------------------------------------------------------
// I/O plumbing.

LoadResult read_corpus(const std::string& path) {
  if (path.empty()) return load_corpus(std::cin);
  return load_corpus_file(path);
}

/// Streams to stdout directly, or through a temp file renamed into place so a
/// failed run never leaves a partial output file.
void emit(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) {
    writer(std::cout);
    std::cout.flush();
    if (!std::cout) throw DataError("failed writing to stdout");
    return;
  }
  write_file_atomic(path, writer);
}

std::string shown_path(const std::string& path) { return path.empty() ? "-" : path; }

ordered_json base_config(const char* command, const std::string& input,
                         const std::string& output) {
  ordered_json config;
  config["tool"] = "trajmine";
  config["version"] = kVersion;
  config["command"] = command;
  config["input"] = shown_path(input);
  config["output"] = shown_path(output);
  return config;
}

void echo_analysis(ordered_json& config, const AnalysisOpts& opts) {
  config["buffer"] = opts.series.buffer_years;
  config["ma_window"] = opts.series.ma_window;
  config["ma_mode"] = opts.ma_mode;
  config["citation_mode"] = opts.citation_mode;
  config["epsilon"] = opts.thresholds.epsilon;
  config["delta"] = opts.thresholds.delta;
  config["peak_height"] = opts.thresholds.peak_height_fraction;
  config["peak_sep"] = opts.thresholds.peak_separation;
  config["min_span"] = opts.thresholds.min_span;
}

void echo_learner(ordered_json& config, const LearnerOpts& opts) {
  config["kernel"] = opts.kernel;
  config["cost"] = opts.cost;
  config["svr_epsilon"] = opts.svr_epsilon;
  config["gamma"] = opts.gamma;
  config["target"] = opts.target;
  config["horizon"] = opts.horizon;
}

// ---------------------------------------------------------------------------
// Synth flag parsing: "SR=1,SD=2" weights and "SR=2.0:0.0" slope:intercept
// maps. Bad tokens are usage errors.

std::vector<std::pair<TrajectoryClass, std::string>> split_class_entries(
    const std::string& text, const char* what) {
  std::vector<std::pair<TrajectoryClass, std::string>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string entry = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    pos = comma == std::string::npos ? text.size() + 1 : comma + 1;
    if (entry.empty()) continue;
    std::size_t eq = entry.find('=');
    auto cls = eq == std::string::npos
                   ? std::nullopt
                   : trajectory_class_from_string(entry.substr(0, eq));
    if (!cls) throw ArgumentError(std::string(what) + ": bad entry '" + entry + "'");
    out.emplace_back(*cls, entry.substr(eq + 1));
  }
  return out;
}

double parse_number(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ArgumentError(std::string(what) + ": bad number '" + text + "'");
  }
}

std::map<TrajectoryClass, double> parse_mix(const std::string& text) {
  std::map<TrajectoryClass, double> mix;
  for (const auto& [cls, value] : split_class_entries(text, "--mix"))
    mix[cls] = parse_number(value, "--mix");
  return mix;
}

std::map<TrajectoryClass, TargetMap> parse_target_maps(const std::string& text) {
  std::map<TrajectoryClass, TargetMap> maps;
  for (const auto& [cls, value] : split_class_entries(text, "--stratified")) {
    std::size_t colon = value.find(':');
    TargetMap map;
    map.slope = parse_number(value.substr(0, colon), "--stratified");
    if (colon != std::string::npos)
      map.intercept = parse_number(value.substr(colon + 1), "--stratified");
    maps[cls] = map;
  }
  return maps;
}

// ---------------------------------------------------------------------------
// Subcommand runners.

void run_ingest(const AnalysisOpts& opts, const std::string& report_path) {
  LoadResult loaded = read_corpus(opts.input);
  emit(opts.output, [&](std::ostream& os) { save_corpus_jsonl(loaded.corpus, os); });
  if (!report_path.empty()) {
    ordered_json doc;
    doc["config"] = base_config("ingest", opts.input, opts.output);
    doc["report"] = to_json(loaded.report);
    emit(report_path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  }
  const IngestReport& r = loaded.report;
  std::cerr << "ingest: " << r.records_read << " records read, " << r.papers_kept
            << " papers kept, " << r.duplicate_ids_rejected << " duplicate ids, "
            << r.dangling_references_dropped << " dangling refs, " << r.self_loops_dropped
            << " self-loops\n";
}

void run_series(const AnalysisOpts& opts) {
  Corpus corpus = read_corpus(opts.input).corpus;
  SeriesConfig config = opts.resolved_series();
  CitationMode mode = opts.resolved_mode();
  emit(opts.output, [&](std::ostream& os) {
    os << kSeriesCsvHeader << '\n';
    for (const auto& [author, papers] : corpus.author_index) {
      if (corpus.span(author) <= config.buffer_years) continue;
      write_series_csv_rows(build_series(author_timeline(corpus, author, mode), config), os);
    }
  });
}

void run_classify(const AnalysisOpts& opts) {
  Corpus corpus = read_corpus(opts.input).corpus;
  ClassificationResult result =
      classify_corpus(corpus, opts.thresholds, opts.resolved_series(), opts.resolved_mode());
  for (const auto& [author, message] : result.errors)
    std::cerr << "classify: skipped " << author << ": " << message << '\n';
  emit(opts.output, [&](std::ostream& os) { write_classification_csv(result, os); });
  std::cerr << "classify: " << result.classified.size() << " authors classified, "
            << result.ineligible_skipped << " ineligible, " << result.errors.size()
            << " errors\n";
}

void run_stats(const AnalysisOpts& opts, const std::string& profiles_csv) {
  Corpus corpus = read_corpus(opts.input).corpus;
  StatsConfig config;
  config.thresholds = opts.thresholds;
  config.series = opts.resolved_series();
  StatsReport report = compute_stats(corpus, config);

  ordered_json doc;
  ordered_json config_block = base_config("stats", opts.input, opts.output);
  echo_analysis(config_block, opts);
  doc["config"] = std::move(config_block);
  ordered_json body = to_json(report);
  for (auto& [key, value] : body.items()) doc[key] = std::move(value);
  emit(opts.output, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  if (!profiles_csv.empty())
    emit(profiles_csv, [&](std::ostream& os) { write_profiles_csv(report.profiles, os); });
}

EvalConfig make_eval_config(const AnalysisOpts& analysis, const LearnerOpts& learner,
                            const EvalOpts& eval) {
  EvalConfig config;
  config.learn.thresholds = analysis.thresholds;
  config.learn.series = analysis.resolved_series();
  config.learn.regressor.kind = RegressorKind::svr;
  SvmConfig svm;
  svm.kernel = *kernel_from_string(learner.kernel);
  svm.cost = learner.cost;
  svm.svr_epsilon = learner.svr_epsilon;
  svm.gamma = learner.gamma;
  config.learn.regressor.svm = svm;
  config.learn.classifier = svm;
  config.learn.target = *target_kind_from_string(learner.target);
  config.learn.horizon = learner.horizon;
  config.t_min = eval.t_min;
  config.t_max = eval.t_max;
  config.folds = eval.folds;
  config.seed = eval.seed;
  return config;
}

void run_evaluate(const AnalysisOpts& analysis, const LearnerOpts& learner,
                  const EvalOpts& eval) {
  Corpus corpus = read_corpus(analysis.input).corpus;
  EvalConfig config = make_eval_config(analysis, learner, eval);
  EvalReport report = evaluate(corpus, config);

  ordered_json doc;
  ordered_json config_block = base_config("evaluate", analysis.input, analysis.output);
  echo_analysis(config_block, analysis);
  echo_learner(config_block, learner);
  config_block["t_min"] = eval.t_min;
  config_block["t_max"] = eval.t_max;
  config_block["folds"] = eval.folds;
  config_block["seed"] = eval.seed;
  doc["config"] = std::move(config_block);
  ordered_json body = to_json(report);
  for (auto& [key, value] : body.items()) doc[key] = std::move(value);
  emit(analysis.output, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });

  if (!eval.save_model.empty()) {
    int t = eval.model_t > 0 ? eval.model_t : eval.t_min;
    StratifiedModel model = fit_two_stage(corpus, t, config.learn);
    save_model(model, eval.save_model);
    std::cerr << "evaluate: saved t=" << t << " model to " << eval.save_model << '\n';
  }
}

void run_predict(const std::string& model_path, const AnalysisOpts& opts) {
  StratifiedModel model = load_model(model_path);
  Corpus corpus = read_corpus(opts.input).corpus;
  LearnConfig pool_config;
  pool_config.horizon = model.horizon;
  std::vector<std::string> pool = prediction_pool(corpus, pool_config);
  emit(opts.output, [&](std::ostream& os) {
    os << "author_id,prediction\n";
    for (const std::string& author : pool) {
      double value = predict_two_stage(model, extract_features(corpus, author, model.t));
      os << author << ',' << format_fixed(value) << '\n';
    }
  });
  std::cerr << "predict: " << pool.size() << " authors scored\n";
}

void run_synth(const SynthOpts& opts) {
  SynthSpec spec = opts.spec;
  spec.class_mix = parse_mix(opts.mix);

  Corpus corpus;
  std::map<std::string, TrajectoryClass> labels;
  std::map<std::string, double> targets;
  if (opts.stratified.empty()) {
    LabeledCorpus generated = generate(spec);
    corpus = std::move(generated.corpus);
    labels = std::move(generated.labels);
  } else {
    StratifiedCorpus generated =
        generate_stratified_targets(spec, parse_target_maps(opts.stratified), opts.horizon);
    corpus = std::move(generated.corpus);
    labels = std::move(generated.labels);
    targets = std::move(generated.targets);
  }

  emit(opts.output, [&](std::ostream& os) { save_corpus_jsonl(corpus, os); });
  if (!opts.labels.empty())
    emit(opts.labels, [&](std::ostream& os) { write_labels_csv(labels, os); });
  if (!opts.targets.empty()) {
    if (opts.stratified.empty())
      throw ArgumentError("--targets requires --stratified");
    emit(opts.targets, [&](std::ostream& os) { write_targets_csv(targets, os); });
  }
  std::cerr << "synth: " << labels.size() << " labeled authors, " << corpus.papers.size()
            << " papers, " << corpus.edge_count() << " citation edges\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Career-trajectory mining over citation corpora"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  AnalysisOpts ingest_opts, series_opts, classify_opts, stats_opts, eval_analysis,
      predict_opts;
  std::string ingest_report, stats_profiles_csv, predict_model;
  LearnerOpts learner;
  EvalOpts eval;
  SynthOpts synth;

  CLI::App* ingest = app.add_subcommand("ingest", "Validate and normalize a corpus");
  add_input_flag(ingest, ingest_opts.input);
  add_output_flag(ingest, ingest_opts.output);
  ingest->add_option("--report", ingest_report, "Also write an ingest report JSON here");

  CLI::App* series = app.add_subcommand("series", "Per-author success-series CSV");
  add_input_flag(series, series_opts.input);
  add_output_flag(series, series_opts.output);
  add_series_flags(series, series_opts);
  add_citation_flag(series, series_opts);

  CLI::App* classify = app.add_subcommand("classify", "Classify trajectories to CSV");
  add_input_flag(classify, classify_opts.input);
  add_output_flag(classify, classify_opts.output);
  add_series_flags(classify, classify_opts);
  add_threshold_flags(classify, classify_opts);
  add_citation_flag(classify, classify_opts);

  CLI::App* stats = app.add_subcommand("stats", "Class profiles, migration and decay JSON");
  add_input_flag(stats, stats_opts.input);
  add_output_flag(stats, stats_opts.output);
  add_series_flags(stats, stats_opts);
  add_threshold_flags(stats, stats_opts);
  stats->add_option("--profiles-csv", stats_profiles_csv,
                    "Also write the class profiles as CSV here");

  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Cross-validate stratified vs baseline prediction");
  add_input_flag(evaluate_cmd, eval_analysis.input);
  add_output_flag(evaluate_cmd, eval_analysis.output);
  add_series_flags(evaluate_cmd, eval_analysis);
  add_threshold_flags(evaluate_cmd, eval_analysis);
  add_learner_flags(evaluate_cmd, learner);
  evaluate_cmd->add_option("--t-min", eval.t_min, "Smallest early-window length")
      ->capture_default_str();
  evaluate_cmd->add_option("--t-max", eval.t_max, "Largest early-window length")
      ->capture_default_str();
  evaluate_cmd->add_option("--folds", eval.folds, "Cross-validation folds")
      ->capture_default_str();
  evaluate_cmd->add_option("--seed", eval.seed, "Fold-assignment seed")->capture_default_str();
  evaluate_cmd->add_option("--save-model", eval.save_model,
                           "Fit a final model on the full pool and save it here");
  evaluate_cmd->add_option("--model-t", eval.model_t,
                           "Early-window length for --save-model (default: t-min)");

  CLI::App* predict = app.add_subcommand("predict", "Score a corpus with a saved model");
  predict->add_option("--model", predict_model, "Model bundle from evaluate --save-model")
      ->required();
  add_input_flag(predict, predict_opts.input);
  add_output_flag(predict, predict_opts.output);

  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
  add_output_flag(synth_cmd, synth.output);
  synth_cmd->add_option("--authors", synth.spec.n_authors, "Number of labeled authors")
      ->capture_default_str();
  synth_cmd->add_option("--career-length", synth.spec.career_length, "Career years per author")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.noise_sigma, "Log-normal citation noise sigma")
      ->capture_default_str();
  synth_cmd
      ->add_option("--self-cite-rate", synth.spec.self_citation_rate,
                   "Fraction of citations that are self-citations")
      ->capture_default_str();
  synth_cmd->add_option("--pool", synth.spec.coauthor_pool, "Coauthor pool size")
      ->capture_default_str();
  synth_cmd->add_option("--base-year", synth.spec.base_year, "First career year")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Generation seed")->capture_default_str();
  synth_cmd->add_option("--mix", synth.mix,
                        "Class weights, e.g. SR=1,SD=2 (default: equal over all classes)");
  synth_cmd->add_option(
      "--stratified", synth.stratified,
      "Stratified-target mode: per-class slope:intercept maps, e.g. SR=2.0:0.0,SD=0.5:0.0");
  synth_cmd->add_option("--horizon", synth.horizon, "Target career year (stratified mode)")
      ->capture_default_str();
  synth_cmd->add_option("--labels", synth.labels, "Write author labels CSV here");
  synth_cmd->add_option("--targets", synth.targets,
                        "Write per-author targets CSV here (stratified mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 1;
  }

  try {
    if (ingest->parsed()) run_ingest(ingest_opts, ingest_report);
    else if (series->parsed()) run_series(series_opts);
    else if (classify->parsed()) run_classify(classify_opts);
    else if (stats->parsed()) run_stats(stats_opts, stats_profiles_csv);
    else if (evaluate_cmd->parsed()) run_evaluate(eval_analysis, learner, eval);
    else if (predict->parsed()) run_predict(predict_model, predict_opts);
    else if (synth_cmd->parsed()) run_synth(synth);
    return 0;
  } catch (const ArgumentError& e) {
    std::cerr << "trajmine: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "trajmine: " << e.what() << '\n';
    return 2;
  } catch (const NotFoundError& e) {
    std::cerr << "trajmine: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "trajmine: unexpected error: " << e.what() << '\n';
    return 2;
  }
}
