#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace trajmine {

enum class KernelKind { rbf, linear };

const char* to_string(KernelKind kind);
std::optional<KernelKind> kernel_from_string(std::string_view name);

struct SvmConfig {
  KernelKind kernel = KernelKind::rbf;
  double cost = 1.0;        // box constraint C
  double svr_epsilon = 0.1; // regression tube half-width, on the raw target scale
  double gamma = 0.0;       // rbf width; <= 0 resolves to 1/dimension at fit time
  double tolerance = 1e-3;  // KKT stopping tolerance
  int max_passes = 10000;   // sweep cap; one sweep = one pair update per variable
};

/// Column-wise z-scoring fitted on training rows only. Constant columns get
/// scale 1 so they standardize to exactly zero.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  std::vector<double> apply(const std::vector<double>& row) const;
};

Standardizer fit_standardizer(const std::vector<std::vector<double>>& rows);

double kernel_value(KernelKind kind, double gamma, const std::vector<double>& a,
                    const std::vector<double>& b);

/// Epsilon-insensitive support-vector regressor trained by sequential pair
/// optimization of the dual. Degenerate input (all feature rows identical)
/// yields a flagged constant model predicting the mean target.
struct SvrModel {
  SvmConfig config;  // gamma holds the resolved value
  Standardizer standardizer;
  std::vector<std::vector<double>> support_vectors;  // standardized
  std::vector<double> coefficients;                  // alpha - alpha*, per SV
  double bias = 0.0;
  double kkt_residual = 0.0;  // duality-gap proxy m - M at stop
  long long iterations = 0;
  bool converged = true;
  bool degenerate = false;
  double constant = 0.0;

  double predict(const std::vector<double>& features) const;
};

SvrModel fit_svr(const std::vector<std::vector<double>>& features,
                 const std::vector<double>& targets, const SvmConfig& config = {});

/// Closed-form ridge companion under the same contract, used as an oracle.
struct RidgeModel {
  Standardizer standardizer;
  std::vector<double> weights;  // on standardized features
  double intercept = 0.0;
  double lambda = 0.0;
  bool degenerate = false;

  double predict(const std::vector<double>& features) const;
};

RidgeModel fit_ridge(const std::vector<std::vector<double>>& features,
                     const std::vector<double>& targets, double lambda = 1e-6);

enum class RegressorKind { svr, ridge };

const char* to_string(RegressorKind kind);
std::optional<RegressorKind> regressor_kind_from_string(std::string_view name);

struct RegressorConfig {
  RegressorKind kind = RegressorKind::svr;
  SvmConfig svm;
  double ridge_lambda = 1e-6;
};

/// Either regressor behind one predict surface.
struct Regressor {
  std::variant<SvrModel, RidgeModel> model;

  double predict(const std::vector<double>& features) const;
  bool degenerate() const;
};

Regressor fit_regressor(const std::vector<std::vector<double>>& features,
                        const std::vector<double>& targets,
                        const RegressorConfig& config = {});

/// One-vs-rest soft-margin kernel machine over integer labels. All binary
/// machines share the standardized training points and the kernel matrix.
/// Single-label input yields a flagged constant classifier.
struct MulticlassSvc {
  SvmConfig config;  // gamma holds the resolved value
  Standardizer standardizer;
  std::vector<std::vector<double>> points;  // standardized training points
  std::vector<int> labels;                  // present labels, ascending
  std::vector<std::vector<double>> coefficients;  // per label, aligned with points
  std::vector<double> biases;
  double max_kkt_residual = 0.0;
  bool single_class = false;
  int constant_label = 0;

  /// One decision value per entry of `labels`.
  std::vector<double> margins(const std::vector<double>& features) const;
  /// Argmax margin; ties break toward the smaller label.
  int predict_label(const std::vector<double>& features) const;
};

MulticlassSvc fit_multiclass_svc(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels,
                                 const SvmConfig& config = {});

nlohmann::ordered_json to_json(const SvrModel& model);
nlohmann::ordered_json to_json(const RidgeModel& model);
nlohmann::ordered_json to_json(const Regressor& model);
nlohmann::ordered_json to_json(const MulticlassSvc& model);

SvrModel svr_from_json(const nlohmann::json& doc);
RidgeModel ridge_from_json(const nlohmann::json& doc);
Regressor regressor_from_json(const nlohmann::json& doc);
MulticlassSvc multiclass_svc_from_json(const nlohmann::json& doc);

}  // namespace trajmine
