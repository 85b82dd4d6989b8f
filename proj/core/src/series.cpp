#include "trajmine/series.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "trajmine/errors.hpp"
#include "trajmine/io.hpp"

namespace trajmine {

const char* to_string(MaMode mode) {
  return mode == MaMode::centered ? "centered" : "trailing";
}

std::optional<MaMode> ma_mode_from_string(std::string_view name) {
  if (name == "centered") return MaMode::centered;
  if (name == "trailing") return MaMode::trailing;
  return std::nullopt;
}

SuccessSeries raw_success(const AuthorTimeline& timeline, const SeriesConfig& config) {
  if (config.buffer_years < 0) throw ArgumentError("buffer_years must be non-negative");
  int length = timeline.length();
  if (length <= config.buffer_years)
    throw ArgumentError("career of " + std::to_string(length) +
                        " year(s) is too short for a " +
                        std::to_string(config.buffer_years) + "-year buffer");
  if (timeline.papers_per_year.empty() || timeline.papers_per_year.front() < 1)
    throw ArgumentError("career must start with at least one paper");

  CumulativeCounts cum = cumulative(timeline);
  SuccessSeries series;
  series.author_id = timeline.author_id;
  series.n = length - config.buffer_years;
  series.raw.reserve(series.n);
  for (int j = 1; j <= series.n; ++j) {
    int t = j + config.buffer_years;  // career year behind logical year j
    series.raw.push_back(static_cast<double>(cum.citations[t - 1]) /
                         static_cast<double>(cum.papers[t - 1]));
  }
  return series;
}

std::vector<double> moving_average(const std::vector<double>& values, int window,
                                   MaMode mode) {
  if (window < 1) throw ArgumentError("moving-average window must be positive");
  if (mode == MaMode::centered && window % 2 == 0)
    throw ArgumentError("centered moving-average window must be odd");
  if (values.empty()) throw ArgumentError("moving_average requires a non-empty input");

  int n = static_cast<int>(values.size());
  int half = window / 2;
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    int lo = mode == MaMode::centered ? std::max(0, i - half) : std::max(0, i - window + 1);
    int hi = mode == MaMode::centered ? std::min(n - 1, i + half) : i;
    double sum = std::accumulate(values.begin() + lo, values.begin() + hi + 1, 0.0);
    out[i] = sum / (hi - lo + 1);
  }
  return out;
}

std::vector<double> normalize_max(const std::vector<double>& values) {
  double peak = 0.0;
  for (double v : values) {
    if (v < 0.0) throw ArgumentError("normalize_max requires non-negative values");
    peak = std::max(peak, v);
  }
  if (peak == 0.0) return std::vector<double>(values.size(), 0.0);
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [peak](double v) { return v / peak; });
  return out;
}

SuccessSeries build_series(const AuthorTimeline& timeline, const SeriesConfig& config) {
  SuccessSeries series = raw_success(timeline, config);
  series.smoothed = moving_average(series.raw, config.ma_window, config.ma_mode);
  series.normalized = normalize_max(series.smoothed);
  return series;
}

void write_series_csv_rows(const SuccessSeries& series, std::ostream& out) {
  for (int j = 0; j < series.n; ++j)
    out << series.author_id << ',' << j + 1 << ',' << format_fixed(series.raw[j]) << ','
        << format_fixed(series.smoothed[j]) << ',' << format_fixed(series.normalized[j])
        << '\n';
}

}  // namespace trajmine
