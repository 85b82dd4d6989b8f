#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajmine/timeline.hpp"

namespace trajmine {

/// Moving-average edge alignment: centered (truncated symmetric window) or
/// trailing (window ends at the current point).
enum class MaMode { centered, trailing };

const char* to_string(MaMode mode);
std::optional<MaMode> ma_mode_from_string(std::string_view name);

struct SeriesConfig {
  int buffer_years = 3;
  int ma_window = 5;
  MaMode ma_mode = MaMode::centered;
};

/// Success trajectory over logical years 1..n, where logical year j is career
/// year j + buffer. raw[j-1] = cumC(j+buffer) / cumP(j+buffer); buffer-year
/// counts are included in the cumulatives, only reporting starts later.
struct SuccessSeries {
  std::string author_id;
  int n = 0;
  std::vector<double> raw;
  std::vector<double> smoothed;
  std::vector<double> normalized;
};

/// Cumulative citation/paper ratio past the buffer window. Career length must
/// exceed the buffer (at least one logical year) or ArgumentError is thrown.
SuccessSeries raw_success(const AuthorTimeline& timeline, const SeriesConfig& config = {});

/// Mean over the window around each point, truncated at the boundaries.
/// Window must be odd and positive (centered mode) or just positive (trailing).
std::vector<double> moving_average(const std::vector<double>& values, int window = 5,
                                   MaMode mode = MaMode::centered);

/// Divides by the maximum; an all-zero input stays all zeros. Negative values
/// raise ArgumentError.
std::vector<double> normalize_max(const std::vector<double>& values);

/// raw_success, then smoothing, then max-normalization — in that order.
SuccessSeries build_series(const AuthorTimeline& timeline, const SeriesConfig& config = {});

inline constexpr const char* kSeriesCsvHeader = "author_id,logical_year,raw,smoothed,normalized";

/// One CSV row per logical year, 6-decimal fixed notation, no header.
void write_series_csv_rows(const SuccessSeries& series, std::ostream& out);

}  // namespace trajmine
