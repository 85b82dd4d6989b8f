#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trajmine/features.hpp"
#include "trajmine/svm.hpp"
#include "trajmine/trajectory.hpp"

namespace trajmine {

/// What the regressors predict at the horizon year: the success ratio S, or
/// the cumulative citation count.
enum class TargetKind { success, cum_citations };

const char* to_string(TargetKind kind);
std::optional<TargetKind> target_kind_from_string(std::string_view name);

struct LearnConfig {
  Thresholds thresholds;
  SeriesConfig series;
  RegressorConfig regressor;  // per-stratum and baseline regressors
  SvmConfig classifier;       // stage-1 one-vs-rest machine
  TargetKind target = TargetKind::success;
  int horizon = 10;           // career year whose value is predicted
  int min_stratum_size = 20;
};

struct TrainingRow {
  std::string author_id;
  FeatureVector features;
  TrajectoryClass stratum = TrajectoryClass::OT;  // from the FULL career
  double target = 0.0;
};

/// Authors eligible for training/evaluation at the configured horizon:
/// classified eligible authors whose span covers the horizon. Sorted by id.
std::vector<std::string> prediction_pool(const Corpus& corpus, const LearnConfig& config = {});

/// One row per pooled author: early-window features at t, full-career stratum
/// label, horizon-year target.
std::vector<TrainingRow> build_training_rows(const Corpus& corpus,
                                             const std::vector<std::string>& authors, int t,
                                             const LearnConfig& config = {});

/// Stage 1 routes a query to a stratum from early features alone; stage 2
/// applies that stratum's regressor. Strata under min_stratum_size rows get
/// no regressor and route to the global fallback, which is trained on all
/// rows and doubles as the baseline model.
struct StratifiedModel {
  int t = 0;
  TargetKind target = TargetKind::success;
  int horizon = 10;
  int min_stratum_size = 20;
  MulticlassSvc classifier;  // labels are TrajectoryClass enum values
  std::map<TrajectoryClass, Regressor> per_stratum;
  Regressor global_fallback;
  bool fallback_only = false;  // no stratum reached min_stratum_size
};

StratifiedModel fit_two_stage_rows(const std::vector<TrainingRow>& rows, int t,
                                   const LearnConfig& config = {});

/// Convenience wrapper: pool, rows, then fit.
StratifiedModel fit_two_stage(const Corpus& corpus, int t, const LearnConfig& config = {});

/// Never consults the query author's true trajectory. Throws ArgumentError on
/// a t-schema mismatch.
double predict_two_stage(const StratifiedModel& model, const FeatureVector& features);

double mse(const std::vector<double>& predictions, const std::vector<double>& targets);

/// Undefined (nullopt) when either side has zero variance.
std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b);

struct EvalConfig {
  LearnConfig learn;
  int t_min = 3;
  int t_max = 6;
  int folds = 10;
  std::uint64_t seed = 0;
};

struct FoldDetail {
  int fold = 0;
  std::size_t test_size = 0;
  double baseline_mse = 0.0;
  double stratified_mse = 0.0;
  std::optional<double> baseline_pearson;
  std::optional<double> stratified_pearson;
};

struct TDetail {
  int t = 0;
  double baseline_mse = 0.0;
  double stratified_mse = 0.0;
  std::optional<double> baseline_pearson;
  std::optional<double> stratified_pearson;
  std::optional<double> mse_improvement_pct;
  std::optional<double> pearson_improvement_pct;
  std::vector<FoldDetail> folds;
};

struct EvalReport {
  int folds = 0;
  std::uint64_t seed = 0;
  int horizon = 0;
  TargetKind target = TargetKind::success;
  std::size_t pool_size = 0;
  std::vector<TDetail> per_t;
  double overall_baseline_mse = 0.0;
  double overall_stratified_mse = 0.0;
  std::optional<double> overall_baseline_pearson;
  std::optional<double> overall_stratified_pearson;
  std::optional<double> overall_mse_improvement_pct;
  std::optional<double> overall_pearson_improvement_pct;
};

/// Author-level k-fold cross-validation of baseline vs two-stage, pooled per
/// t, improvements per t, overall = mean over t. Deterministic given seed.
/// Throws ArgumentError when the pool is smaller than `folds`.
EvalReport evaluate(const Corpus& corpus, const EvalConfig& config = {});

nlohmann::ordered_json to_json(const EvalReport& report);

/// Versioned model bundle for the predict surface.
nlohmann::ordered_json to_json(const StratifiedModel& model);
StratifiedModel stratified_model_from_json(const nlohmann::json& doc);

void save_model(const StratifiedModel& model, const std::string& path);
StratifiedModel load_model(const std::string& path);

}  // namespace trajmine
