// End-to-end acceptance gate. Each criterion prints one [PASS]/[FAIL] line
// so the run log doubles as the acceptance report.
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trajmine/corpus.hpp"
#include "trajmine/learn.hpp"
#include "trajmine/series.hpp"
#include "trajmine/stats.hpp"
#include "trajmine/svm.hpp"
#include "trajmine/synth.hpp"
#include "trajmine/timeline.hpp"
#include "trajmine/trajectory.hpp"

using namespace trajmine;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool ok = true;
  std::string detail;

  void expect(bool condition) { ok = ok && condition; }
  void note(const std::string& text) {
    if (!detail.empty()) detail += ", ";
    detail += text;
  }
};

void announce(int number, const char* label, const Verdict& verdict) {
  std::printf("[%s] criterion %d: %s%s%s\n", verdict.ok ? "PASS" : "FAIL", number, label,
              verdict.detail.empty() ? "" : " -- ", verdict.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, pattern, value);
  return buffer;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Label-recovery rate over the labeled authors the classifier saw.
double recovery_rate(const LabeledCorpus& labeled, int* compared = nullptr) {
  ClassificationResult result = classify_corpus(labeled.corpus);
  int total = 0, agree = 0;
  for (const auto& [author, entry] : result.classified) {
    auto label = labeled.labels.find(author);
    if (label == labeled.labels.end()) continue;
    ++total;
    if (entry.cls == label->second) ++agree;
  }
  if (compared) *compared = total;
  return total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total);
}

/// Independent plateau/filter/merge reference for the peak detector.
std::vector<Peak> reference_peaks(const std::vector<double>& values, const Thresholds& th) {
  std::vector<Peak> candidates;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
    bool rises = i == 0 || values[i - 1] < values[i];
    bool falls = j + 1 == values.size() || values[j + 1] < values[i];
    if (rises && falls) candidates.push_back({static_cast<int>(i) + 1, values[i]});
    i = j + 1;
  }
  double tallest = 0.0;
  for (const Peak& peak : candidates) tallest = std::max(tallest, peak.height);
  std::vector<Peak> kept;
  for (const Peak& peak : candidates) {
    if (peak.height < th.peak_height_fraction * tallest) continue;
    if (!kept.empty() && peak.logical_year - kept.back().logical_year <= th.peak_separation) {
      if (peak.height > kept.back().height) kept.back() = peak;
    } else {
      kept.push_back(peak);
    }
  }
  return kept;
}

/// Histogram-based h-index oracle, independent of the sort-and-scan shape.
int histogram_h_index(const std::vector<int>& counts) {
  int n = static_cast<int>(counts.size());
  std::vector<int> at_exactly(n + 1, 0);
  for (int c : counts) ++at_exactly[std::min(c, n)];
  int have = 0;
  for (int h = n; h >= 0; --h) {
    have += at_exactly[h];
    if (have >= h) return h;
  }
  return 0;
}

std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
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

StratifiedCorpus two_strata_corpus(int n_authors, std::uint64_t seed) {
  SynthSpec spec;
  spec.n_authors = n_authors;
  spec.career_length = 12;
  spec.seed = seed;
  std::map<TrajectoryClass, TargetMap> maps = {
      {TrajectoryClass::SR, {2.0, 0.0}},
      {TrajectoryClass::SD, {0.5, 0.0}},
  };
  return generate_stratified_targets(spec, maps, 10);
}

}  // namespace

TEST_CASE("criterion 1: trajectory round-trip") {
  auto start = Clock::now();
  Verdict verdict;

  SynthSpec clean;
  clean.n_authors = 600;  // equal mix: one hundred per class
  clean.seed = 42;
  int compared = 0;
  double exact = recovery_rate(generate(clean), &compared);
  verdict.expect(exact >= 0.99);
  verdict.note("noise 0: " + fmt("%.4f", exact) + " of " + std::to_string(compared));

  SynthSpec noisy = clean;
  noisy.noise_sigma = 0.05;
  double fuzzy = recovery_rate(generate(noisy), &compared);
  verdict.expect(fuzzy >= 0.85);
  verdict.note("noise 0.05: " + fmt("%.4f", fuzzy));

  double elapsed = seconds_since(start);
  verdict.expect(elapsed < 10.0);
  verdict.note(fmt("%.2f", elapsed) + " s");
  announce(1, "synth labels survive classification", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 2: stratified beats baseline on two real strata") {
  auto start = Clock::now();
  Verdict verdict;

  StratifiedCorpus stratified = two_strata_corpus(1000, 0);
  EvalConfig config;
  config.folds = 10;
  EvalReport report = evaluate(stratified.corpus, config);
  REQUIRE(report.per_t.size() == 4);
  std::string ratios;
  for (const TDetail& detail : report.per_t) {
    double ratio = detail.stratified_mse / detail.baseline_mse;
    verdict.expect(ratio <= 0.85);
    ratios += (ratios.empty() ? "" : "/") + fmt("%.3f", ratio);
  }
  verdict.note("mse ratios " + ratios);

  double elapsed = seconds_since(start);
  verdict.expect(elapsed < 120.0);
  verdict.note(fmt("%.2f", elapsed) + " s");
  announce(2, "two-stage wins where strata differ", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 3: no harm on homogeneous data") {
  Verdict verdict;
  SynthSpec spec;
  spec.n_authors = 400;
  spec.career_length = 12;
  spec.seed = 1;
  std::map<TrajectoryClass, TargetMap> maps = {{TrajectoryClass::SR, {1.0, 2.0}}};
  StratifiedCorpus homogeneous = generate_stratified_targets(spec, maps, 10);

  EvalConfig config;
  config.folds = 10;
  EvalReport report = evaluate(homogeneous.corpus, config);
  std::string ratios;
  for (const TDetail& detail : report.per_t) {
    double ratio = detail.stratified_mse / detail.baseline_mse;
    verdict.expect(ratio <= 1.10);
    ratios += (ratios.empty() ? "" : "/") + fmt("%.3f", ratio);
  }
  verdict.note("mse ratios " + ratios);
  announce(3, "single stratum stays within 1.10x baseline", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 4: peak-detector oracle") {
  auto start = Clock::now();
  Verdict verdict;
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> length_dist(7, 40);
  std::uniform_int_distribution<int> grid(0, 10);  // coarse grid forces plateaus
  Thresholds thresholds;
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> series(length_dist(rng));
    for (double& v : series) v = grid(rng) / 10.0;
    if (detect_peaks(series, thresholds) != reference_peaks(series, thresholds)) ++mismatches;
  }
  verdict.expect(mismatches == 0);
  verdict.note(std::to_string(mismatches) + " mismatches in 1000 series");

  double elapsed = seconds_since(start);
  verdict.expect(elapsed < 1.0);
  verdict.note(fmt("%.3f", elapsed) + " s");
  announce(4, "detect_peaks matches brute force", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 5: h-index oracle") {
  auto start = Clock::now();
  Verdict verdict;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> size_dist(0, 200);
  std::uniform_int_distribution<int> count_dist(0, 1000);
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<int> counts(size_dist(rng));
    for (int& c : counts) c = count_dist(rng);
    if (h_index(counts) != histogram_h_index(counts)) ++mismatches;
  }
  verdict.expect(mismatches == 0);
  verdict.note(std::to_string(mismatches) + " mismatches in 10000 multisets");

  double elapsed = seconds_since(start);
  verdict.expect(elapsed < 1.0);
  verdict.note(fmt("%.3f", elapsed) + " s");
  announce(5, "h_index matches histogram oracle", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 6: series oracles") {
  Verdict verdict;
  std::vector<double> ma = moving_average({1, 2, 3, 4, 5});
  std::vector<double> expected = {2, 2.5, 3, 3.5, 4};
  verdict.expect(ma.size() == expected.size());
  for (std::size_t i = 0; i < expected.size() && i < ma.size(); ++i)
    verdict.expect(std::abs(ma[i] - expected[i]) <= 1e-12);

  std::vector<double> zeros = normalize_max({0, 0, 0});
  verdict.expect(zeros == std::vector<double>{0, 0, 0});

  // Four-year career, buffer counts included: S(4) = 12 / 4 = 3.
  AuthorTimeline steady;
  steady.author_id = "steady";
  steady.start_year = 2000;
  steady.papers_per_year = {1, 1, 1, 1};
  steady.new_citations_per_year = {0, 2, 4, 6};
  verdict.expect(raw_success(steady).raw == std::vector<double>{3.0});

  AuthorTimeline burst;
  burst.author_id = "burst";
  burst.start_year = 2000;
  burst.papers_per_year = {2, 0, 0, 0, 0};
  burst.new_citations_per_year = {0, 0, 0, 4, 4};
  verdict.expect(raw_success(burst).raw == std::vector<double>{2.0, 4.0});

  announce(6, "moving average, normalization and raw success", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 7: scale invariance") {
  Verdict verdict;
  SynthSpec spec;
  spec.n_authors = 100;
  spec.noise_sigma = 0.05;
  spec.seed = 7;
  LabeledCorpus labeled = generate(spec);

  int compared = 0, stable = 0;
  for (const std::string& author : eligible_authors(labeled.corpus)) {
    AuthorTimeline timeline = author_timeline(labeled.corpus, author);
    ClassifiedAuthor original = classify(timeline, build_series(timeline));
    if (original.reason == ClassReason::ot_low_activity) continue;  // gated out

    AuthorTimeline scaled = timeline;
    for (int& c : scaled.new_citations_per_year) c *= 7;
    ClassifiedAuthor rescaled = classify(scaled, build_series(scaled));
    ++compared;

    // Scaling integer citations by 7 perturbs IEEE division in the last ulp,
    // so peak heights are compared at the same 1e-12 used for series oracles;
    // years and classes must match exactly.
    bool peaks_match = rescaled.peaks.size() == original.peaks.size();
    for (std::size_t i = 0; peaks_match && i < original.peaks.size(); ++i)
      peaks_match = rescaled.peaks[i].logical_year == original.peaks[i].logical_year &&
                    std::fabs(rescaled.peaks[i].height - original.peaks[i].height) <= 1e-12;
    if (rescaled.cls == original.cls && peaks_match) ++stable;
  }
  verdict.expect(compared > 0);
  verdict.expect(stable == compared);
  verdict.note(std::to_string(stable) + "/" + std::to_string(compared) +
               " gate-passing authors unchanged under x7");
  announce(7, "classes and peaks are scale invariant", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 8: self-citation monotonicity") {
  Verdict verdict;
  SynthSpec spec;
  spec.n_authors = 100;
  spec.self_citation_rate = 0.5;
  spec.noise_sigma = 0.05;
  spec.seed = 13;
  LabeledCorpus labeled = generate(spec);

  bool monotone = true;
  for (const auto& [author, ids] : labeled.corpus.author_index) {
    CumulativeCounts all = cumulative(author_timeline(labeled.corpus, author));
    CumulativeCounts strict =
        cumulative(author_timeline(labeled.corpus, author, CitationMode::exclude_self));
    for (std::size_t i = 0; i < all.citations.size(); ++i)
      if (strict.citations[i] > all.citations[i]) monotone = false;
  }
  verdict.expect(monotone);
  verdict.note(monotone ? "exclude_self <= all for every author-year" : "monotonicity broken");

  ClassificationResult with_self = classify_corpus(labeled.corpus);
  ClassificationResult without_self =
      classify_corpus(labeled.corpus, {}, {}, CitationMode::exclude_self);
  int ot_total = 0, ot_kept = 0;
  for (const auto& [author, entry] : with_self.classified) {
    if (entry.cls != TrajectoryClass::OT) continue;
    ++ot_total;
    auto redone = without_self.classified.find(author);
    if (redone != without_self.classified.end() && redone->second.cls == TrajectoryClass::OT)
      ++ot_kept;
  }
  verdict.expect(ot_total > 0);
  verdict.expect(ot_kept == ot_total);
  verdict.note(std::to_string(ot_kept) + "/" + std::to_string(ot_total) + " OT stay OT");
  announce(8, "removing self-citations never invents success", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 9: learner sanity") {
  Verdict verdict;

  // Noiseless linear data sits inside the tube at every training point.
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i <= 20; ++i) {
    xs.push_back({0.25 * i});
    ys.push_back(2.0 * 0.25 * i + 1.0);
  }
  SvmConfig linear;
  linear.kernel = KernelKind::linear;
  linear.cost = 10.0;
  SvrModel svr = fit_svr(xs, ys, linear);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    worst = std::max(worst, std::abs(svr.predict(xs[i]) - ys[i]));
  verdict.expect(worst <= linear.svr_epsilon + 0.01);
  verdict.note("svr worst residual " + fmt("%.4f", worst));

  // Ridge against a normal-equations oracle solved by hand.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> rx;
  std::vector<double> ry;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> row = {unif(rng), unif(rng), unif(rng)};
    ry.push_back(0.8 * row[0] - 1.2 * row[1] + 0.5 * row[2] + 0.05 * unif(rng));
    rx.push_back(std::move(row));
  }
  double lambda = 1e-4;
  RidgeModel ridge = fit_ridge(rx, ry, lambda);
  Standardizer standardizer = fit_standardizer(rx);
  double mean_y = 0.0;
  for (double y : ry) mean_y += y;
  mean_y /= static_cast<double>(ry.size());
  std::vector<std::vector<double>> gram(3, std::vector<double>(3, 0.0));
  std::vector<double> rhs(3, 0.0);
  for (std::size_t r = 0; r < rx.size(); ++r) {
    std::vector<double> z = standardizer.apply(rx[r]);
    for (int a = 0; a < 3; ++a) {
      rhs[a] += z[a] * (ry[r] - mean_y);
      for (int b = 0; b < 3; ++b) gram[a][b] += z[a] * z[b];
    }
  }
  for (int d = 0; d < 3; ++d) gram[d][d] += lambda;
  std::vector<double> oracle = gauss_solve(gram, rhs);
  double ridge_gap = std::abs(ridge.intercept - mean_y);
  for (int d = 0; d < 3; ++d) ridge_gap = std::max(ridge_gap, std::abs(ridge.weights[d] - oracle[d]));
  verdict.expect(ridge_gap <= 1e-8);
  verdict.note("ridge oracle gap " + fmt("%.2e", ridge_gap));

  // KKT residuals within tolerance on every converged model built here.
  SvmConfig rbf;
  rbf.cost = 5.0;
  SvrModel curve = fit_svr(xs, ys, rbf);
  std::vector<int> labels;
  for (std::size_t i = 0; i < xs.size(); ++i) labels.push_back(xs[i][0] < 2.5 ? 0 : 1);
  MulticlassSvc svc = fit_multiclass_svc(xs, labels, rbf);
  bool kkt_ok = true;
  if (svr.converged) kkt_ok = kkt_ok && svr.kkt_residual <= linear.tolerance;
  if (curve.converged) kkt_ok = kkt_ok && curve.kkt_residual <= rbf.tolerance;
  kkt_ok = kkt_ok && svc.max_kkt_residual <= rbf.tolerance;
  verdict.expect(kkt_ok);
  verdict.note(kkt_ok ? "kkt residuals within tolerance" : "kkt residual above tolerance");

  announce(9, "svr, ridge and kkt checks", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 10: determinism") {
  Verdict verdict;

  SynthSpec spec;
  spec.n_authors = 150;
  spec.noise_sigma = 0.1;
  spec.self_citation_rate = 0.3;
  spec.seed = 2024;
  LabeledCorpus one = generate(spec);
  LabeledCorpus two = generate(spec);
  std::ostringstream dump_one, dump_two, labels_one, labels_two;
  save_corpus_jsonl(one.corpus, dump_one);
  save_corpus_jsonl(two.corpus, dump_two);
  write_labels_csv(one.labels, labels_one);
  write_labels_csv(two.labels, labels_two);
  verdict.expect(dump_one.str() == dump_two.str());
  verdict.expect(labels_one.str() == labels_two.str());
  verdict.note("synth corpus and labels byte-identical");

  StratifiedCorpus stratified = two_strata_corpus(150, 3);
  EvalConfig config;
  config.folds = 5;
  config.t_min = 3;
  config.t_max = 4;
  config.seed = 9;
  std::string eval_one = to_json(evaluate(stratified.corpus, config)).dump(2);
  std::string eval_two = to_json(evaluate(stratified.corpus, config)).dump(2);
  verdict.expect(eval_one == eval_two);
  verdict.note("evaluate report byte-identical");

  announce(10, "same seed, same bytes", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("criterion 11: metric identities") {
  Verdict verdict;
  auto rho = pearson({1, 2, 3}, {2, 4, 6});
  verdict.expect(rho.has_value() && std::abs(*rho - 1.0) <= 1e-12);
  auto flipped = pearson({1, 2, 3}, {-2, -4, -6});
  verdict.expect(flipped.has_value() && std::abs(*flipped + 1.0) <= 1e-12);
  verdict.expect(mse({0, 0}, {1, 1}) == 1.0);
  verdict.note("pearson and mse identities hold");
  announce(11, "metric identities", verdict);
  CHECK_MESSAGE(verdict.ok, verdict.detail);
}
