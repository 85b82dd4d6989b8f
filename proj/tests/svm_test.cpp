#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "trajmine/errors.hpp"
#include "trajmine/svm.hpp"

using namespace trajmine;

namespace {

// Plain Gaussian elimination with partial pivoting, so the ridge check does
// not lean on the same linear algebra library as the implementation.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double sum = b[r];
    for (std::size_t c = r + 1; c < n; ++c) sum -= a[r][c] * x[c];
    x[r] = sum / a[r][r];
  }
  return x;
}

}  // namespace

TEST_CASE("standardizer uses population statistics and guards constants") {
  Standardizer z = fit_standardizer({{1, 2}, {3, 4}});
  REQUIRE(z.mean.size() == 2);
  CHECK(z.mean[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(z.mean[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(z.scale[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(z.scale[1] == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> row = z.apply({1, 2});
  CHECK(row[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(row[1] == doctest::Approx(-1.0).epsilon(1e-12));

  // A constant column keeps scale 1 and maps onto exactly zero.
  Standardizer c = fit_standardizer({{5, 1}, {5, 3}, {5, 5}});
  CHECK(c.scale[0] == 1.0);
  CHECK(c.apply({5, 0})[0] == 0.0);
}

TEST_CASE("svr reproduces a noiseless linear law within the tube") {
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i <= 20; ++i) {
    double x = 0.25 * i;
    xs.push_back({x});
    ys.push_back(2.0 * x + 1.0);
  }
  SvmConfig config;
  config.kernel = KernelKind::linear;
  config.cost = 10.0;
  SvrModel model = fit_svr(xs, ys, config);
  CHECK(model.converged);
  CHECK(model.kkt_residual <= config.tolerance);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(model.predict(xs[i]) - ys[i]) <= config.svr_epsilon + 0.01);
  }
}

TEST_CASE("svr with an rbf kernel tracks a smooth curve") {
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 30; ++i) {
    double x = 0.1 * i;
    xs.push_back({x});
    ys.push_back(std::sin(x));
  }
  SvmConfig config;
  config.cost = 50.0;
  SvrModel model = fit_svr(xs, ys, config);
  CHECK(model.converged);
  CHECK(model.config.gamma == doctest::Approx(1.0));  // resolved from <= 0
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(model.predict(xs[i]) - ys[i]) <= config.svr_epsilon + 0.1);
  }
}

TEST_CASE("svr degenerates to the target mean on identical rows") {
  std::vector<std::vector<double>> xs(6, {1.0, 2.0});
  std::vector<double> ys = {1, 2, 3, 4, 5, 6};
  SvrModel model = fit_svr(xs, ys);
  CHECK(model.degenerate);
  CHECK(model.constant == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(model.predict({1.0, 2.0}) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(model.predict({9.0, -4.0}) == doctest::Approx(3.5).epsilon(1e-15));
}

TEST_CASE("svr validates its inputs") {
  CHECK_THROWS_AS(fit_svr({}, {}), ArgumentError);
  CHECK_THROWS_AS(fit_svr({{1.0}}, {1.0, 2.0}), ArgumentError);
  CHECK_THROWS_AS(fit_svr({{1.0}, {2.0, 3.0}}, {1.0, 2.0}), ArgumentError);
  SvmConfig bad;
  bad.cost = 0.0;
  CHECK_THROWS_AS(fit_svr({{1.0}, {2.0}}, {1.0, 2.0}, bad), ArgumentError);
}

TEST_CASE("ridge matches hand-rolled normal equations") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> row = {unif(rng), unif(rng), unif(rng)};
    ys.push_back(1.5 * row[0] - 0.7 * row[1] + 0.2 * row[2] + unif(rng) * 0.1);
    xs.push_back(std::move(row));
  }
  double lambda = 1e-3;
  RidgeModel model = fit_ridge(xs, ys, lambda);

  // Re-derive: intercept = mean(y); (Z^T Z + lambda I) w = Z^T (y - mean).
  Standardizer z = fit_standardizer(xs);
  double mean_y = 0.0;
  for (double y : ys) mean_y += y;
  mean_y /= static_cast<double>(ys.size());
  std::vector<std::vector<double>> gram(3, std::vector<double>(3, 0.0));
  std::vector<double> rhs(3, 0.0);
  for (std::size_t r = 0; r < xs.size(); ++r) {
    std::vector<double> row = z.apply(xs[r]);
    for (int a = 0; a < 3; ++a) {
      rhs[a] += row[a] * (ys[r] - mean_y);
      for (int b = 0; b < 3; ++b) gram[a][b] += row[a] * row[b];
    }
  }
  for (int d = 0; d < 3; ++d) gram[d][d] += lambda;
  std::vector<double> expected = solve_dense(gram, rhs);

  CHECK(model.intercept == doctest::Approx(mean_y).epsilon(1e-12));
  for (int d = 0; d < 3; ++d) {
    CAPTURE(d);
    CHECK(std::abs(model.weights[d] - expected[d]) <= 1e-8);
  }
}

TEST_CASE("regressor variant dispatches to either backend") {
  std::vector<std::vector<double>> xs = {{0}, {1}, {2}, {3}, {4}, {5}};
  std::vector<double> ys = {1, 3, 5, 7, 9, 11};
  RegressorConfig ridge_config;
  ridge_config.kind = RegressorKind::ridge;
  Regressor ridge = fit_regressor(xs, ys, ridge_config);
  CHECK(std::holds_alternative<RidgeModel>(ridge.model));
  CHECK(ridge.predict({2.5}) == doctest::Approx(6.0).epsilon(1e-6));

  RegressorConfig svr_config;
  svr_config.kind = RegressorKind::svr;
  svr_config.svm.kernel = KernelKind::linear;
  svr_config.svm.cost = 10.0;
  Regressor svr = fit_regressor(xs, ys, svr_config);
  CHECK(std::holds_alternative<SvrModel>(svr.model));
  CHECK(std::abs(svr.predict({2.5}) - 6.0) <= 0.2);
}

TEST_CASE("multiclass svc separates labelled blobs") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.15);
  std::vector<std::vector<double>> xs;
  std::vector<int> labels;
  const std::vector<std::pair<double, double>> centers = {{0, 0}, {3, 0}, {0, 3}};
  for (int cls = 0; cls < 3; ++cls)
    for (int i = 0; i < 12; ++i) {
      xs.push_back({centers[cls].first + noise(rng), centers[cls].second + noise(rng)});
      labels.push_back(cls * 2 + 1);  // labels 1, 3, 5: not necessarily dense
    }
  MulticlassSvc model = fit_multiclass_svc(xs, labels);
  CHECK(model.labels == std::vector<int>{1, 3, 5});
  CHECK(model.max_kkt_residual <= model.config.tolerance);
  int correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (model.predict_label(xs[i]) == labels[i]) ++correct;
  CHECK(correct == static_cast<int>(xs.size()));
  CHECK(model.margins({0.1, 0.1}).size() == 3);
}

TEST_CASE("single-label training degenerates to a constant classifier") {
  std::vector<std::vector<double>> xs = {{0}, {1}, {2}};
  MulticlassSvc model = fit_multiclass_svc(xs, {4, 4, 4});
  CHECK(model.single_class);
  CHECK(model.constant_label == 4);
  CHECK(model.predict_label({100.0}) == 4);
  CHECK(model.margins({100.0}) == std::vector<double>{0.0});
}

TEST_CASE("margin ties resolve toward the smaller label") {
  MulticlassSvc model;
  model.config.kernel = KernelKind::linear;
  model.config.gamma = 1.0;
  model.standardizer.mean = {0.0};
  model.standardizer.scale = {1.0};
  model.points = {{1.0}};
  model.labels = {2, 5};
  model.coefficients = {{0.0}, {0.0}};
  model.biases = {0.25, 0.25};
  CHECK(model.margins({3.0}) == std::vector<double>{0.25, 0.25});
  CHECK(model.predict_label({3.0}) == 2);
}

TEST_CASE("models survive a json round-trip") {
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  std::vector<int> labels;
  for (int i = 0; i < 14; ++i) {
    xs.push_back({0.5 * i, std::cos(i)});
    ys.push_back(0.3 * i);
    labels.push_back(i % 2);
  }
  SvmConfig config;
  config.cost = 3.0;

  SvrModel svr = fit_svr(xs, ys, config);
  SvrModel svr2 = svr_from_json(nlohmann::json::parse(to_json(svr).dump()));
  RidgeModel ridge = fit_ridge(xs, ys, 1e-4);
  RidgeModel ridge2 = ridge_from_json(nlohmann::json::parse(to_json(ridge).dump()));
  MulticlassSvc svc = fit_multiclass_svc(xs, labels, config);
  MulticlassSvc svc2 = multiclass_svc_from_json(nlohmann::json::parse(to_json(svc).dump()));
  Regressor reg = fit_regressor(xs, ys);
  Regressor reg2 = regressor_from_json(nlohmann::json::parse(to_json(reg).dump()));

  for (const auto& x : xs) {
    CHECK(svr.predict(x) == svr2.predict(x));
    CHECK(ridge.predict(x) == ridge2.predict(x));
    CHECK(svc.predict_label(x) == svc2.predict_label(x));
    CHECK(reg.predict(x) == reg2.predict(x));
  }
  CHECK(to_json(svr) == to_json(svr2));
  CHECK(to_json(svc) == to_json(svc2));
}

TEST_CASE("kernel helpers and name round-trips") {
  CHECK(kernel_value(KernelKind::linear, 1.0, {1, 2}, {3, 4}) ==
        doctest::Approx(11.0).epsilon(1e-12));
  CHECK(kernel_value(KernelKind::rbf, 0.5, {1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(kernel_value(KernelKind::rbf, 0.5, {0, 0}, {2, 0}) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(kernel_from_string("rbf") == KernelKind::rbf);
  CHECK(kernel_from_string("linear") == KernelKind::linear);
  CHECK_FALSE(kernel_from_string("poly").has_value());
  CHECK(to_string(KernelKind::rbf) == std::string("rbf"));
  CHECK(regressor_kind_from_string("ridge") == RegressorKind::ridge);
  CHECK_FALSE(regressor_kind_from_string("lasso").has_value());
}
