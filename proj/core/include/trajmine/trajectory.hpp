#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trajmine/corpus.hpp"
#include "trajmine/series.hpp"

namespace trajmine {

/// The six trajectory classes. Enum order is the canonical report order and
/// the tie-break order wherever one class must win.
enum class TrajectoryClass { ER, LR, FR, SR, SD, OT };

inline constexpr TrajectoryClass kAllClasses[] = {
    TrajectoryClass::ER, TrajectoryClass::LR, TrajectoryClass::FR,
    TrajectoryClass::SR, TrajectoryClass::SD, TrajectoryClass::OT};

const char* to_string(TrajectoryClass cls);
std::optional<TrajectoryClass> trajectory_class_from_string(std::string_view name);

/// Which rule of the decision tree fired, for the audit trail.
enum class ClassReason {
  ot_low_activity,
  ot_too_short,
  sr_monotone,
  sd_first_year,
  fr_multi_peak,
  er_single_early,
  lr_single_late,
  ot_residual,
};

const char* to_string(ClassReason reason);

/// A detected peak, collapsed to the leftmost index of its plateau.
struct Peak {
  int logical_year = 0;
  double height = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

struct Thresholds {
  double epsilon = 0.01;          // monotonicity tolerance on the normalized scale
  double delta = 0.05;            // decay: final value must sit below 1 - delta
  double peak_height_fraction = 0.75;
  int peak_separation = 2;        // merge peaks this close (in logical years)
  int min_span = 10;              // eligibility span in calendar years
  int er_min_year = 2;            // single-peak window for ER ...
  int er_max_year = 5;            // ... inclusive; later single peaks are LR
};

struct ClassifiedAuthor {
  std::string author_id;
  TrajectoryClass cls = TrajectoryClass::OT;
  ClassReason reason = ClassReason::ot_residual;
  std::vector<Peak> peaks;
};

/// Plateau candidates strictly above both neighbors (endpoints one-sided),
/// filtered below `peak_height_fraction` of the tallest, then merged left to
/// right whenever two kept peaks are within `peak_separation` logical years
/// (the taller survives; the earlier on a tie). Empty input raises
/// ArgumentError. An all-equal input yields one peak at year 1.
std::vector<Peak> detect_peaks(const std::vector<double>& normalized,
                               const Thresholds& thresholds = {});

/// Assigns exactly one class via the fixed-precedence decision tree: activity
/// gate, short-series gate, monotone rise, first-year peak with decline,
/// multiple peaks, single early/late peak with decay, residual. The timeline
/// must span at least `min_span` years or ArgumentError is thrown.
ClassifiedAuthor classify(const AuthorTimeline& timeline, const SuccessSeries& series,
                          const Thresholds& thresholds = {});

struct ClassificationResult {
  std::map<std::string, ClassifiedAuthor> classified;
  std::size_t ineligible_skipped = 0;
  std::vector<std::pair<std::string, std::string>> errors;  // author id, message
};

/// Classifies every eligible author. Per-author failures are recorded and
/// skipped, never fatal.
ClassificationResult classify_corpus(const Corpus& corpus, const Thresholds& thresholds = {},
                                     const SeriesConfig& series_config = {},
                                     CitationMode mode = CitationMode::all);

inline constexpr const char* kClassifyCsvHeader = "author_id,class,reason,n_peaks,peak_years";

/// One row per author sorted by id; peak_years is a `;`-separated list.
void write_classification_csv(const ClassificationResult& result, std::ostream& out);

}  // namespace trajmine
