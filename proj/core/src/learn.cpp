#include "trajmine/learn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "trajmine/errors.hpp"
#include "trajmine/io.hpp"
#include "trajmine/series.hpp"
#include "trajmine/version.hpp"

namespace trajmine {

const char* to_string(TargetKind kind) {
  return kind == TargetKind::success ? "success" : "cum_citations";
}

std::optional<TargetKind> target_kind_from_string(std::string_view name) {
  if (name == "success") return TargetKind::success;
  if (name == "cum_citations") return TargetKind::cum_citations;
  return std::nullopt;
}

std::vector<std::string> prediction_pool(const Corpus& corpus, const LearnConfig& config) {
  int need = std::max(config.thresholds.min_span, config.horizon);
  return eligible_authors(corpus, need);
}

namespace {

double horizon_target(const AuthorTimeline& timeline, const LearnConfig& config) {
  CumulativeCounts cum = cumulative(timeline);
  int index = config.horizon - 1;
  if (config.target == TargetKind::cum_citations)
    return static_cast<double>(cum.citations[index]);
  return static_cast<double>(cum.citations[index]) / static_cast<double>(cum.papers[index]);
}

}  // namespace

std::vector<TrainingRow> build_training_rows(const Corpus& corpus,
                                             const std::vector<std::string>& authors, int t,
                                             const LearnConfig& config) {
  std::vector<TrainingRow> rows;
  rows.reserve(authors.size());
  for (const std::string& author : authors) {
    TrainingRow row;
    row.author_id = author;
    row.features = extract_features(corpus, author, t, config.thresholds.min_span);
    AuthorTimeline timeline = author_timeline(corpus, author);
    if (timeline.length() < config.horizon)
      throw ArgumentError("author " + author + " has no career year " +
                          std::to_string(config.horizon));
    row.stratum = classify(timeline, build_series(timeline, config.series),
                           config.thresholds).cls;
    row.target = horizon_target(timeline, config);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<std::vector<double>> feature_matrix(const std::vector<TrainingRow>& rows) {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const TrainingRow& row : rows) out.push_back(row.features.values);
  return out;
}

std::vector<double> target_vector(const std::vector<TrainingRow>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const TrainingRow& row : rows) out.push_back(row.target);
  return out;
}

}  // namespace

StratifiedModel fit_two_stage_rows(const std::vector<TrainingRow>& rows, int t,
                                   const LearnConfig& config) {
  if (rows.size() < 2) throw ArgumentError("need at least 2 training rows");
  for (const TrainingRow& row : rows)
    if (row.features.t != t)
      throw ArgumentError("training row for author " + row.author_id +
                          " does not match t = " + std::to_string(t));

  StratifiedModel model;
  model.t = t;
  model.target = config.target;
  model.horizon = config.horizon;
  model.min_stratum_size = config.min_stratum_size;

  std::vector<std::vector<double>> features = feature_matrix(rows);
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (const TrainingRow& row : rows) labels.push_back(static_cast<int>(row.stratum));
  model.classifier = fit_multiclass_svc(features, labels, config.classifier);
  model.global_fallback = fit_regressor(features, target_vector(rows), config.regressor);

  std::map<TrajectoryClass, std::vector<const TrainingRow*>> strata;
  for (const TrainingRow& row : rows) strata[row.stratum].push_back(&row);
  for (const auto& [cls, members] : strata) {
    if (members.size() < static_cast<std::size_t>(config.min_stratum_size)) continue;
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    x.reserve(members.size());
    y.reserve(members.size());
    for (const TrainingRow* row : members) {
      x.push_back(row->features.values);
      y.push_back(row->target);
    }
    model.per_stratum.emplace(cls, fit_regressor(x, y, config.regressor));
  }
  model.fallback_only = model.per_stratum.empty();
  return model;
}

StratifiedModel fit_two_stage(const Corpus& corpus, int t, const LearnConfig& config) {
  std::vector<std::string> pool = prediction_pool(corpus, config);
  if (pool.empty())
    throw ArgumentError("no eligible authors with career >= " +
                        std::to_string(config.horizon) + " years");
  return fit_two_stage_rows(build_training_rows(corpus, pool, t, config), t, config);
}

double predict_two_stage(const StratifiedModel& model, const FeatureVector& features) {
  if (features.t != model.t)
    throw ArgumentError("features built for t = " + std::to_string(features.t) +
                        " but the model expects t = " + std::to_string(model.t));
  int label = model.classifier.predict_label(features.values);
  auto it = model.per_stratum.find(static_cast<TrajectoryClass>(label));
  if (it != model.per_stratum.end()) return it->second.predict(features.values);
  return model.global_fallback.predict(features.values);
}

double mse(const std::vector<double>& predictions, const std::vector<double>& targets) {
  if (predictions.size() != targets.size())
    throw ArgumentError("mse requires equal-length vectors");
  if (predictions.empty()) throw ArgumentError("mse requires non-empty vectors");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double diff = predictions[i] - targets[i];
    sum += diff * diff;
  }
  return sum / static_cast<double>(predictions.size());
}

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ArgumentError("pearson requires equal-length vectors");
  if (a.empty()) throw ArgumentError("pearson requires non-empty vectors");
  double n = static_cast<double>(a.size());
  double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - mean_a, db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a <= 0.0 || var_b <= 0.0) return std::nullopt;
  return cov / std::sqrt(var_a * var_b);
}

namespace {

std::optional<double> mean_if_all(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  for (const auto& value : values) {
    if (!value) return std::nullopt;
    sum += *value;
  }
  return sum / static_cast<double>(values.size());
}

nlohmann::ordered_json json_or_null(const std::optional<double>& value) {
  if (value) return *value;
  return nullptr;
}

}  // namespace

EvalReport evaluate(const Corpus& corpus, const EvalConfig& config) {
  if (config.folds < 2) throw ArgumentError("folds must be at least 2");
  if (config.t_min < kFeatureTMin || config.t_max > kFeatureTMax || config.t_min > config.t_max)
    throw ArgumentError("t range must satisfy 3 <= t_min <= t_max <= 6");

  std::vector<std::string> pool = prediction_pool(corpus, config.learn);
  if (pool.size() < static_cast<std::size_t>(config.folds))
    throw ArgumentError("evaluate requires at least " + std::to_string(config.folds) +
                        " authors with career >= " + std::to_string(config.learn.horizon) +
                        " years; found " + std::to_string(pool.size()));

  // Author-level folds: shuffle the sorted pool, then assign round-robin.
  std::mt19937_64 rng(config.seed);
  std::vector<std::string> shuffled = pool;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::map<std::string, int> fold_of;
  for (std::size_t i = 0; i < shuffled.size(); ++i)
    fold_of[shuffled[i]] = static_cast<int>(i % config.folds);

  EvalReport report;
  report.folds = config.folds;
  report.seed = config.seed;
  report.horizon = config.learn.horizon;
  report.target = config.learn.target;
  report.pool_size = pool.size();

  for (int t = config.t_min; t <= config.t_max; ++t) {
    std::vector<TrainingRow> rows = build_training_rows(corpus, pool, t, config.learn);
    TDetail detail;
    detail.t = t;
    std::vector<double> pooled_base, pooled_strat, pooled_truth;
    for (int fold = 0; fold < config.folds; ++fold) {
      std::vector<TrainingRow> train;
      std::vector<const TrainingRow*> test;
      for (const TrainingRow& row : rows) {
        if (fold_of.at(row.author_id) == fold)
          test.push_back(&row);
        else
          train.push_back(row);
      }
      if (test.empty()) continue;
      StratifiedModel model = fit_two_stage_rows(train, t, config.learn);
      std::vector<double> base, strat, truth;
      for (const TrainingRow* row : test) {
        base.push_back(model.global_fallback.predict(row->features.values));
        strat.push_back(predict_two_stage(model, row->features));
        truth.push_back(row->target);
      }
      FoldDetail fd;
      fd.fold = fold;
      fd.test_size = test.size();
      fd.baseline_mse = mse(base, truth);
      fd.stratified_mse = mse(strat, truth);
      fd.baseline_pearson = pearson(base, truth);
      fd.stratified_pearson = pearson(strat, truth);
      detail.folds.push_back(fd);
      pooled_base.insert(pooled_base.end(), base.begin(), base.end());
      pooled_strat.insert(pooled_strat.end(), strat.begin(), strat.end());
      pooled_truth.insert(pooled_truth.end(), truth.begin(), truth.end());
    }
    detail.baseline_mse = mse(pooled_base, pooled_truth);
    detail.stratified_mse = mse(pooled_strat, pooled_truth);
    detail.baseline_pearson = pearson(pooled_base, pooled_truth);
    detail.stratified_pearson = pearson(pooled_strat, pooled_truth);
    if (detail.baseline_mse > 0.0)
      detail.mse_improvement_pct =
          100.0 * (detail.baseline_mse - detail.stratified_mse) / detail.baseline_mse;
    if (detail.baseline_pearson && detail.stratified_pearson &&
        *detail.baseline_pearson != 0.0)
      detail.pearson_improvement_pct = 100.0 *
                                       (*detail.stratified_pearson - *detail.baseline_pearson) /
                                       std::abs(*detail.baseline_pearson);
    report.per_t.push_back(std::move(detail));
  }

  double base_sum = 0.0, strat_sum = 0.0;
  std::vector<std::optional<double>> bp, sp, mi, pi;
  for (const TDetail& detail : report.per_t) {
    base_sum += detail.baseline_mse;
    strat_sum += detail.stratified_mse;
    bp.push_back(detail.baseline_pearson);
    sp.push_back(detail.stratified_pearson);
    mi.push_back(detail.mse_improvement_pct);
    pi.push_back(detail.pearson_improvement_pct);
  }
  double n_t = static_cast<double>(report.per_t.size());
  report.overall_baseline_mse = base_sum / n_t;
  report.overall_stratified_mse = strat_sum / n_t;
  report.overall_baseline_pearson = mean_if_all(bp);
  report.overall_stratified_pearson = mean_if_all(sp);
  report.overall_mse_improvement_pct = mean_if_all(mi);
  report.overall_pearson_improvement_pct = mean_if_all(pi);
  return report;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json per_t = nlohmann::ordered_json::array();
  for (const TDetail& detail : report.per_t) {
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const FoldDetail& fd : detail.folds)
      folds.push_back({
          {"fold", fd.fold},
          {"test_size", fd.test_size},
          {"baseline_mse", fd.baseline_mse},
          {"stratified_mse", fd.stratified_mse},
          {"baseline_pearson", json_or_null(fd.baseline_pearson)},
          {"stratified_pearson", json_or_null(fd.stratified_pearson)},
      });
    per_t.push_back({
        {"t", detail.t},
        {"baseline_mse", detail.baseline_mse},
        {"stratified_mse", detail.stratified_mse},
        {"baseline_pearson", json_or_null(detail.baseline_pearson)},
        {"stratified_pearson", json_or_null(detail.stratified_pearson)},
        {"mse_improvement_pct", json_or_null(detail.mse_improvement_pct)},
        {"pearson_improvement_pct", json_or_null(detail.pearson_improvement_pct)},
        {"folds", std::move(folds)},
    });
  }
  return nlohmann::ordered_json{
      {"folds", report.folds},
      {"seed", report.seed},
      {"horizon", report.horizon},
      {"target", to_string(report.target)},
      {"pool_size", report.pool_size},
      {"per_t", std::move(per_t)},
      {"overall",
       {
           {"baseline_mse", report.overall_baseline_mse},
           {"stratified_mse", report.overall_stratified_mse},
           {"baseline_pearson", json_or_null(report.overall_baseline_pearson)},
           {"stratified_pearson", json_or_null(report.overall_stratified_pearson)},
           {"mse_improvement_pct", json_or_null(report.overall_mse_improvement_pct)},
           {"pearson_improvement_pct", json_or_null(report.overall_pearson_improvement_pct)},
       }},
  };
}

nlohmann::ordered_json to_json(const StratifiedModel& model) {
  nlohmann::ordered_json strata = nlohmann::ordered_json::object();
  for (const auto& [cls, regressor] : model.per_stratum)
    strata[to_string(cls)] = to_json(regressor);
  return nlohmann::ordered_json{
      {"schema_version", 1},
      {"tool_version", kVersion},
      {"t", model.t},
      {"target", to_string(model.target)},
      {"horizon", model.horizon},
      {"min_stratum_size", model.min_stratum_size},
      {"fallback_only", model.fallback_only},
      {"classifier", to_json(model.classifier)},
      {"global_fallback", to_json(model.global_fallback)},
      {"per_stratum", std::move(strata)},
  };
}

StratifiedModel stratified_model_from_json(const nlohmann::json& doc) try {
  if (doc.at("schema_version").get<int>() != 1)
    throw DataError("unsupported model schema version");
  StratifiedModel model;
  model.t = doc.at("t").get<int>();
  auto target = target_kind_from_string(doc.at("target").get<std::string>());
  if (!target) throw DataError("unknown target kind in model document");
  model.target = *target;
  model.horizon = doc.at("horizon").get<int>();
  model.min_stratum_size = doc.at("min_stratum_size").get<int>();
  model.fallback_only = doc.at("fallback_only").get<bool>();
  model.classifier = multiclass_svc_from_json(doc.at("classifier"));
  model.global_fallback = regressor_from_json(doc.at("global_fallback"));
  for (const auto& [key, value] : doc.at("per_stratum").items()) {
    auto cls = trajectory_class_from_string(key);
    if (!cls) throw DataError("unknown stratum class: " + key);
    model.per_stratum.emplace(*cls, regressor_from_json(value));
  }
  return model;
} catch (const nlohmann::json::exception& err) {
  throw DataError(std::string("malformed model document: ") + err.what());
}

void save_model(const StratifiedModel& model, const std::string& path) {
  nlohmann::ordered_json doc = to_json(model);
  write_file_atomic(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

StratifiedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw DataError("model file is not valid JSON: " + path);
  return stratified_model_from_json(doc);
}

}  // namespace trajmine
