#include "trajmine/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "trajmine/errors.hpp"

namespace trajmine {

const char* to_string(KernelKind kind) {
  return kind == KernelKind::rbf ? "rbf" : "linear";
}

std::optional<KernelKind> kernel_from_string(std::string_view name) {
  if (name == "rbf") return KernelKind::rbf;
  if (name == "linear") return KernelKind::linear;
  return std::nullopt;
}

const char* to_string(RegressorKind kind) {
  return kind == RegressorKind::svr ? "svr" : "ridge";
}

std::optional<RegressorKind> regressor_kind_from_string(std::string_view name) {
  if (name == "svr") return RegressorKind::svr;
  if (name == "ridge") return RegressorKind::ridge;
  return std::nullopt;
}

std::vector<double> Standardizer::apply(const std::vector<double>& row) const {
  if (row.size() != mean.size())
    throw ArgumentError("feature dimension " + std::to_string(row.size()) +
                        " does not match model dimension " + std::to_string(mean.size()));
  std::vector<double> out(row.size());
  for (std::size_t d = 0; d < row.size(); ++d) out[d] = (row[d] - mean[d]) / scale[d];
  return out;
}

Standardizer fit_standardizer(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ArgumentError("cannot standardize an empty training set");
  std::size_t dim = rows.front().size();
  Standardizer out;
  out.mean.assign(dim, 0.0);
  out.scale.assign(dim, 0.0);
  for (const auto& row : rows) {
    if (row.size() != dim) throw ArgumentError("inconsistent feature dimensions");
    for (std::size_t d = 0; d < dim; ++d) out.mean[d] += row[d];
  }
  for (double& m : out.mean) m /= static_cast<double>(rows.size());
  for (const auto& row : rows)
    for (std::size_t d = 0; d < dim; ++d) {
      double centered = row[d] - out.mean[d];
      out.scale[d] += centered * centered;
    }
  for (double& s : out.scale) {
    s = std::sqrt(s / static_cast<double>(rows.size()));
    if (s < 1e-12) s = 1.0;  // constant column standardizes to zero
  }
  return out;
}

double kernel_value(KernelKind kind, double gamma, const std::vector<double>& a,
                    const std::vector<double>& b) {
  if (kind == KernelKind::linear)
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  double dist2 = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    double diff = a[d] - b[d];
    dist2 += diff * diff;
  }
  return std::exp(-gamma * dist2);
}

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dual problem min 1/2 a^T Q a + p^T a with y^T a = 0, 0 <= a <= C, where
/// Q(s,t) = y_s y_t K(point_s, point_t). Variables may alias training points
/// (the SVR dual uses each point twice with opposite signs), so the kernel
/// matrix stays n_points^2.
struct SmoProblem {
  const std::vector<double>* kernel = nullptr;  // row-major n_points^2
  int n_points = 0;
  std::vector<int> point;      // variable -> training point
  std::vector<double> sign;    // variable label, +1 or -1
  std::vector<double> linear;  // p
  double cost = 1.0;
  double tolerance = 1e-3;
  long long max_iterations = 0;
};

struct SmoSolution {
  std::vector<double> alpha;
  double rho = 0.0;
  double kkt_residual = 0.0;
  long long iterations = 0;
  bool converged = false;
};

/// Sequential pair optimization with maximal-violating-pair selection for the
/// first index and a second-order working-set rule for the partner.
SmoSolution solve_smo(const SmoProblem& prob) {
  const int n = static_cast<int>(prob.point.size());
  const double C = prob.cost;
  const auto& K = *prob.kernel;
  const int stride = prob.n_points;
  auto k = [&](int s, int t) { return K[prob.point[s] * stride + prob.point[t]]; };
  auto q = [&](int s, int t) { return prob.sign[s] * prob.sign[t] * k(s, t); };

  std::vector<double> alpha(n, 0.0);
  std::vector<double> G = prob.linear;  // gradient at alpha = 0
  std::vector<double> QD(n);
  for (int t = 0; t < n; ++t) QD[t] = k(t, t);

  SmoSolution out;
  long long iter = 0;
  double gap = 0.0;
  while (true) {
    // First index: maximal violation m(a) = max_{I_up} -y_t G_t.
    double Gmax = -kInf;
    int i = -1;
    for (int t = 0; t < n; ++t) {
      if (prob.sign[t] > 0) {
        if (alpha[t] < C && -G[t] >= Gmax) { Gmax = -G[t]; i = t; }
      } else {
        if (alpha[t] > 0 && G[t] >= Gmax) { Gmax = G[t]; i = t; }
      }
    }
    // Partner: best second-order objective decrease within I_low.
    double Gmax2 = -kInf;
    int j = -1;
    double best = kInf;
    for (int t = 0; t < n; ++t) {
      bool in_low = prob.sign[t] > 0 ? alpha[t] > 0 : alpha[t] < C;
      if (!in_low) continue;
      double yg = prob.sign[t] * G[t];  // max over I_low is -M(a)
      if (yg >= Gmax2) Gmax2 = yg;
      if (i < 0) continue;
      double grad_diff = Gmax + yg;
      if (grad_diff <= 0) continue;
      double quad = QD[i] + QD[t] - 2.0 * k(i, t);
      if (quad <= 0) quad = kTau;
      double obj = -(grad_diff * grad_diff) / quad;
      if (obj <= best) { best = obj; j = t; }
    }
    gap = Gmax + Gmax2;  // m(a) - M(a)
    if (gap < prob.tolerance || j < 0) {
      out.converged = true;
      break;
    }
    if (iter >= prob.max_iterations) break;
    ++iter;

    double old_ai = alpha[i], old_aj = alpha[j];
    double quad = QD[i] + QD[j] - 2.0 * k(i, j);
    if (quad <= 0) quad = kTau;
    if (prob.sign[i] != prob.sign[j]) {
      double delta = (-G[i] - G[j]) / quad;
      double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double delta = (G[i] - G[j]) / quad;
      double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
    if (dai != 0.0 || daj != 0.0)
      for (int t = 0; t < n; ++t) G[t] += q(i, t) * dai + q(j, t) * daj;
  }

  // rho: average y_t G_t over free variables, else midpoint of the KKT bounds.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  int n_free = 0;
  for (int t = 0; t < n; ++t) {
    double yg = prob.sign[t] * G[t];
    if (alpha[t] >= C) {
      if (prob.sign[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (prob.sign[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  out.rho = n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;
  out.kkt_residual = std::max(0.0, gap);
  out.iterations = iter;
  out.alpha = std::move(alpha);
  return out;
}

void check_config(const SvmConfig& config) {
  if (config.cost <= 0) throw ArgumentError("cost must be positive");
  if (config.svr_epsilon < 0) throw ArgumentError("svr_epsilon must be non-negative");
  if (config.tolerance <= 0) throw ArgumentError("tolerance must be positive");
  if (config.max_passes <= 0) throw ArgumentError("max_passes must be positive");
}

std::size_t checked_dimension(const std::vector<std::vector<double>>& features,
                              std::size_t min_rows) {
  if (features.size() < min_rows)
    throw ArgumentError("need at least " + std::to_string(min_rows) + " training rows, got " +
                        std::to_string(features.size()));
  std::size_t dim = features.front().size();
  if (dim == 0) throw ArgumentError("feature rows must be non-empty");
  for (const auto& row : features)
    if (row.size() != dim) throw ArgumentError("inconsistent feature dimensions");
  return dim;
}

bool all_rows_identical(const std::vector<std::vector<double>>& rows) {
  return std::all_of(rows.begin(), rows.end(),
                     [&](const auto& row) { return row == rows.front(); });
}

std::vector<std::vector<double>> standardize_all(const Standardizer& standardizer,
                                                 const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(standardizer.apply(row));
  return out;
}

std::vector<double> kernel_matrix(KernelKind kind, double gamma,
                                  const std::vector<std::vector<double>>& points) {
  std::size_t n = points.size();
  std::vector<double> K(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    K[a * n + a] = kernel_value(kind, gamma, points[a], points[a]);
    for (std::size_t b = a + 1; b < n; ++b)
      K[a * n + b] = K[b * n + a] = kernel_value(kind, gamma, points[a], points[b]);
  }
  return K;
}

double resolve_gamma(const SvmConfig& config, std::size_t dim) {
  return config.gamma > 0 ? config.gamma : 1.0 / static_cast<double>(dim);
}

}  // namespace

SvrModel fit_svr(const std::vector<std::vector<double>>& features,
                 const std::vector<double>& targets, const SvmConfig& config) {
  check_config(config);
  std::size_t dim = checked_dimension(features, 2);
  if (targets.size() != features.size())
    throw ArgumentError("target count does not match row count");

  SvrModel model;
  model.config = config;
  model.config.gamma = resolve_gamma(config, dim);
  model.standardizer = fit_standardizer(features);
  if (all_rows_identical(features)) {
    model.degenerate = true;
    model.constant = std::accumulate(targets.begin(), targets.end(), 0.0) /
                     static_cast<double>(targets.size());
    return model;
  }

  std::vector<std::vector<double>> points = standardize_all(model.standardizer, features);
  std::vector<double> K = kernel_matrix(model.config.kernel, model.config.gamma, points);

  int n = static_cast<int>(points.size());
  SmoProblem prob;
  prob.kernel = &K;
  prob.n_points = n;
  prob.point.resize(2 * n);
  prob.sign.resize(2 * n);
  prob.linear.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    prob.point[i] = i;
    prob.sign[i] = 1.0;
    prob.linear[i] = config.svr_epsilon - targets[i];
    prob.point[i + n] = i;
    prob.sign[i + n] = -1.0;
    prob.linear[i + n] = config.svr_epsilon + targets[i];
  }
  prob.cost = config.cost;
  prob.tolerance = config.tolerance;
  prob.max_iterations = static_cast<long long>(config.max_passes) * 2 * n;

  SmoSolution solution = solve_smo(prob);
  model.bias = -solution.rho;
  model.kkt_residual = solution.kkt_residual;
  model.iterations = solution.iterations;
  model.converged = solution.converged;
  for (int i = 0; i < n; ++i) {
    double coef = solution.alpha[i] - solution.alpha[i + n];
    if (coef == 0.0) continue;
    model.support_vectors.push_back(points[i]);
    model.coefficients.push_back(coef);
  }
  return model;
}

double SvrModel::predict(const std::vector<double>& features) const {
  std::vector<double> z = standardizer.apply(features);
  if (degenerate) return constant;
  double sum = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i)
    sum += coefficients[i] * kernel_value(config.kernel, config.gamma, support_vectors[i], z);
  return sum;
}

RidgeModel fit_ridge(const std::vector<std::vector<double>>& features,
                     const std::vector<double>& targets, double lambda) {
  std::size_t dim = checked_dimension(features, 2);
  if (targets.size() != features.size())
    throw ArgumentError("target count does not match row count");
  if (lambda < 0) throw ArgumentError("ridge lambda must be non-negative");

  RidgeModel model;
  model.standardizer = fit_standardizer(features);
  model.lambda = lambda;
  model.intercept = std::accumulate(targets.begin(), targets.end(), 0.0) /
                    static_cast<double>(targets.size());
  model.weights.assign(dim, 0.0);
  if (all_rows_identical(features)) {
    model.degenerate = true;
    return model;
  }

  // Columns are zero-mean after standardization, so the intercept decouples
  // from the normal equations: (Z^T Z + lambda I) w = Z^T (y - mean(y)).
  Eigen::MatrixXd Z(features.size(), dim);
  Eigen::VectorXd centered(features.size());
  for (std::size_t r = 0; r < features.size(); ++r) {
    std::vector<double> z = model.standardizer.apply(features[r]);
    for (std::size_t d = 0; d < dim; ++d) Z(r, d) = z[d];
    centered(r) = targets[r] - model.intercept;
  }
  Eigen::MatrixXd A = Z.transpose() * Z;
  A.diagonal().array() += lambda;
  Eigen::VectorXd w = A.ldlt().solve(Z.transpose() * centered);
  for (std::size_t d = 0; d < dim; ++d) model.weights[d] = w(d);
  return model;
}

double RidgeModel::predict(const std::vector<double>& features) const {
  std::vector<double> z = standardizer.apply(features);
  return std::inner_product(weights.begin(), weights.end(), z.begin(), 0.0) + intercept;
}

Regressor fit_regressor(const std::vector<std::vector<double>>& features,
                        const std::vector<double>& targets, const RegressorConfig& config) {
  if (config.kind == RegressorKind::svr)
    return Regressor{fit_svr(features, targets, config.svm)};
  return Regressor{fit_ridge(features, targets, config.ridge_lambda)};
}

double Regressor::predict(const std::vector<double>& features) const {
  return std::visit([&](const auto& m) { return m.predict(features); }, model);
}

bool Regressor::degenerate() const {
  return std::visit([](const auto& m) { return m.degenerate; }, model);
}

MulticlassSvc fit_multiclass_svc(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels, const SvmConfig& config) {
  check_config(config);
  std::size_t dim = checked_dimension(features, 1);
  if (labels.size() != features.size())
    throw ArgumentError("label count does not match row count");

  MulticlassSvc model;
  model.config = config;
  model.config.gamma = resolve_gamma(config, dim);
  model.standardizer = fit_standardizer(features);
  model.labels.assign(labels.begin(), labels.end());
  std::sort(model.labels.begin(), model.labels.end());
  model.labels.erase(std::unique(model.labels.begin(), model.labels.end()),
                     model.labels.end());

  if (model.labels.size() < 2) {
    model.single_class = true;
    model.constant_label = model.labels.front();
    return model;
  }

  model.points = standardize_all(model.standardizer, features);
  std::vector<double> K = kernel_matrix(model.config.kernel, model.config.gamma, model.points);

  int n = static_cast<int>(model.points.size());
  for (int label : model.labels) {
    SmoProblem prob;
    prob.kernel = &K;
    prob.n_points = n;
    prob.point.resize(n);
    prob.sign.resize(n);
    prob.linear.assign(n, -1.0);
    for (int i = 0; i < n; ++i) {
      prob.point[i] = i;
      prob.sign[i] = labels[i] == label ? 1.0 : -1.0;
    }
    prob.cost = config.cost;
    prob.tolerance = config.tolerance;
    prob.max_iterations = static_cast<long long>(config.max_passes) * n;

    SmoSolution solution = solve_smo(prob);
    std::vector<double> coef(n);
    for (int i = 0; i < n; ++i) coef[i] = prob.sign[i] * solution.alpha[i];
    model.coefficients.push_back(std::move(coef));
    model.biases.push_back(-solution.rho);
    model.max_kkt_residual = std::max(model.max_kkt_residual, solution.kkt_residual);
  }
  return model;
}

std::vector<double> MulticlassSvc::margins(const std::vector<double>& features) const {
  std::vector<double> z = standardizer.apply(features);
  if (single_class) return {0.0};
  std::vector<double> row(points.size());
  for (std::size_t p = 0; p < points.size(); ++p)
    row[p] = kernel_value(config.kernel, config.gamma, points[p], z);
  std::vector<double> out;
  out.reserve(labels.size());
  for (std::size_t c = 0; c < labels.size(); ++c) {
    double margin = biases[c];
    for (std::size_t p = 0; p < points.size(); ++p) margin += coefficients[c][p] * row[p];
    out.push_back(margin);
  }
  return out;
}

int MulticlassSvc::predict_label(const std::vector<double>& features) const {
  if (single_class) {
    standardizer.apply(features);  // schema check only
    return constant_label;
  }
  std::vector<double> m = margins(features);
  std::size_t best = 0;
  for (std::size_t c = 1; c < m.size(); ++c)
    if (m[c] > m[best]) best = c;  // ties keep the smaller label
  return labels[best];
}

namespace {

nlohmann::ordered_json config_to_json(const SvmConfig& config) {
  return nlohmann::ordered_json{
      {"kernel", to_string(config.kernel)}, {"cost", config.cost},
      {"svr_epsilon", config.svr_epsilon},  {"gamma", config.gamma},
      {"tolerance", config.tolerance},      {"max_passes", config.max_passes},
  };
}

SvmConfig config_from_json(const nlohmann::json& doc) {
  SvmConfig config;
  auto kernel = kernel_from_string(doc.at("kernel").get<std::string>());
  if (!kernel) throw DataError("unknown kernel in model document");
  config.kernel = *kernel;
  config.cost = doc.at("cost").get<double>();
  config.svr_epsilon = doc.at("svr_epsilon").get<double>();
  config.gamma = doc.at("gamma").get<double>();
  config.tolerance = doc.at("tolerance").get<double>();
  config.max_passes = doc.at("max_passes").get<int>();
  return config;
}

[[noreturn]] void malformed_model(const std::exception& err) {
  throw DataError(std::string("malformed model document: ") + err.what());
}

}  // namespace

nlohmann::ordered_json to_json(const SvrModel& model) {
  nlohmann::ordered_json doc = config_to_json(model.config);
  doc["type"] = "svr";
  doc["mean"] = model.standardizer.mean;
  doc["scale"] = model.standardizer.scale;
  doc["support_vectors"] = model.support_vectors;
  doc["coefficients"] = model.coefficients;
  doc["bias"] = model.bias;
  doc["kkt_residual"] = model.kkt_residual;
  doc["iterations"] = model.iterations;
  doc["converged"] = model.converged;
  doc["degenerate"] = model.degenerate;
  doc["constant"] = model.constant;
  return doc;
}

SvrModel svr_from_json(const nlohmann::json& doc) try {
  SvrModel model;
  model.config = config_from_json(doc);
  model.standardizer.mean = doc.at("mean").get<std::vector<double>>();
  model.standardizer.scale = doc.at("scale").get<std::vector<double>>();
  model.support_vectors = doc.at("support_vectors").get<std::vector<std::vector<double>>>();
  model.coefficients = doc.at("coefficients").get<std::vector<double>>();
  model.bias = doc.at("bias").get<double>();
  model.kkt_residual = doc.at("kkt_residual").get<double>();
  model.iterations = doc.at("iterations").get<long long>();
  model.converged = doc.at("converged").get<bool>();
  model.degenerate = doc.at("degenerate").get<bool>();
  model.constant = doc.at("constant").get<double>();
  return model;
} catch (const nlohmann::json::exception& err) {
  malformed_model(err);
}

nlohmann::ordered_json to_json(const RidgeModel& model) {
  return nlohmann::ordered_json{
      {"type", "ridge"},
      {"lambda", model.lambda},
      {"mean", model.standardizer.mean},
      {"scale", model.standardizer.scale},
      {"weights", model.weights},
      {"intercept", model.intercept},
      {"degenerate", model.degenerate},
  };
}

RidgeModel ridge_from_json(const nlohmann::json& doc) try {
  RidgeModel model;
  model.lambda = doc.at("lambda").get<double>();
  model.standardizer.mean = doc.at("mean").get<std::vector<double>>();
  model.standardizer.scale = doc.at("scale").get<std::vector<double>>();
  model.weights = doc.at("weights").get<std::vector<double>>();
  model.intercept = doc.at("intercept").get<double>();
  model.degenerate = doc.at("degenerate").get<bool>();
  return model;
} catch (const nlohmann::json::exception& err) {
  malformed_model(err);
}

nlohmann::ordered_json to_json(const Regressor& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model.model);
}

Regressor regressor_from_json(const nlohmann::json& doc) {
  std::string type;
  try {
    type = doc.at("type").get<std::string>();
  } catch (const nlohmann::json::exception& err) {
    malformed_model(err);
  }
  if (type == "svr") return Regressor{svr_from_json(doc)};
  if (type == "ridge") return Regressor{ridge_from_json(doc)};
  throw DataError("unknown regressor type: " + type);
}

nlohmann::ordered_json to_json(const MulticlassSvc& model) {
  nlohmann::ordered_json doc = config_to_json(model.config);
  doc["type"] = "ovr_svc";
  doc["mean"] = model.standardizer.mean;
  doc["scale"] = model.standardizer.scale;
  doc["points"] = model.points;
  doc["labels"] = model.labels;
  doc["coefficients"] = model.coefficients;
  doc["biases"] = model.biases;
  doc["max_kkt_residual"] = model.max_kkt_residual;
  doc["single_class"] = model.single_class;
  doc["constant_label"] = model.constant_label;
  return doc;
}

MulticlassSvc multiclass_svc_from_json(const nlohmann::json& doc) try {
  MulticlassSvc model;
  model.config = config_from_json(doc);
  model.standardizer.mean = doc.at("mean").get<std::vector<double>>();
  model.standardizer.scale = doc.at("scale").get<std::vector<double>>();
  model.points = doc.at("points").get<std::vector<std::vector<double>>>();
  model.labels = doc.at("labels").get<std::vector<int>>();
  model.coefficients = doc.at("coefficients").get<std::vector<std::vector<double>>>();
  model.biases = doc.at("biases").get<std::vector<double>>();
  model.max_kkt_residual = doc.at("max_kkt_residual").get<double>();
  model.single_class = doc.at("single_class").get<bool>();
  model.constant_label = doc.at("constant_label").get<int>();
  return model;
} catch (const nlohmann::json::exception& err) {
  malformed_model(err);
}

}  // namespace trajmine
