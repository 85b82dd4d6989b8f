#include "trajmine/trajectory.hpp"

#include <algorithm>
#include <ostream>

#include "trajmine/errors.hpp"

namespace trajmine {

const char* to_string(TrajectoryClass cls) {
  switch (cls) {
    case TrajectoryClass::ER: return "ER";
    case TrajectoryClass::LR: return "LR";
    case TrajectoryClass::FR: return "FR";
    case TrajectoryClass::SR: return "SR";
    case TrajectoryClass::SD: return "SD";
    case TrajectoryClass::OT: return "OT";
  }
  return "OT";
}

std::optional<TrajectoryClass> trajectory_class_from_string(std::string_view name) {
  for (TrajectoryClass cls : kAllClasses)
    if (name == to_string(cls)) return cls;
  return std::nullopt;
}

const char* to_string(ClassReason reason) {
  switch (reason) {
    case ClassReason::ot_low_activity: return "ot_low_activity";
    case ClassReason::ot_too_short: return "ot_too_short";
    case ClassReason::sr_monotone: return "sr_monotone";
    case ClassReason::sd_first_year: return "sd_first_year";
    case ClassReason::fr_multi_peak: return "fr_multi_peak";
    case ClassReason::er_single_early: return "er_single_early";
    case ClassReason::lr_single_late: return "lr_single_late";
    case ClassReason::ot_residual: return "ot_residual";
  }
  return "ot_residual";
}

std::vector<Peak> detect_peaks(const std::vector<double>& normalized,
                               const Thresholds& thresholds) {
  if (normalized.empty()) throw ArgumentError("detect_peaks requires a non-empty series");
  int n = static_cast<int>(normalized.size());

  // Candidate plateaus strictly above both existing neighbors.
  std::vector<Peak> candidates;
  for (int i = 0; i < n;) {
    int j = i;
    while (j + 1 < n && normalized[j + 1] == normalized[i]) ++j;
    bool above_left = i == 0 || normalized[i] > normalized[i - 1];
    bool above_right = j == n - 1 || normalized[i] > normalized[j + 1];
    if (above_left && above_right) candidates.push_back({i + 1, normalized[i]});
    i = j + 1;
  }

  double tallest = 0.0;
  for (const Peak& p : candidates) tallest = std::max(tallest, p.height);
  double floor = thresholds.peak_height_fraction * tallest;

  std::vector<Peak> kept;
  for (const Peak& p : candidates) {
    if (p.height < floor) continue;
    if (!kept.empty() && p.logical_year - kept.back().logical_year <= thresholds.peak_separation) {
      // Close pair merges into one peak; the taller representative survives
      // and later candidates measure separation against it.
      if (p.height > kept.back().height) kept.back() = p;
      continue;
    }
    kept.push_back(p);
  }
  return kept;
}

namespace {

bool nondecreasing_within(const std::vector<double>& values, double epsilon) {
  for (std::size_t j = 0; j + 1 < values.size(); ++j)
    if (values[j + 1] < values[j] - epsilon) return false;
  return true;
}

bool nonincreasing_within(const std::vector<double>& values, double epsilon) {
  for (std::size_t j = 0; j + 1 < values.size(); ++j)
    if (values[j + 1] > values[j] + epsilon) return false;
  return true;
}

}  // namespace

ClassifiedAuthor classify(const AuthorTimeline& timeline, const SuccessSeries& series,
                          const Thresholds& thresholds) {
  if (!series.author_id.empty() && series.author_id != timeline.author_id)
    throw ArgumentError("series and timeline belong to different authors");
  int span = timeline.length();
  if (span < thresholds.min_span)
    throw ArgumentError("author " + timeline.author_id + " ineligible: span " +
                        std::to_string(span) + " < " + std::to_string(thresholds.min_span));

  ClassifiedAuthor out;
  out.author_id = timeline.author_id;

  double papers_rate = static_cast<double>(timeline.total_papers()) / span;
  double citations_rate = static_cast<double>(timeline.total_citations()) / span;
  if (papers_rate < 1.0 && citations_rate < 1.0) {
    out.cls = TrajectoryClass::OT;
    out.reason = ClassReason::ot_low_activity;
    return out;
  }

  if (series.n < 3) {
    out.cls = TrajectoryClass::OT;
    out.reason = ClassReason::ot_too_short;
    return out;
  }

  const std::vector<double>& norm = series.normalized;
  if (nondecreasing_within(norm, thresholds.epsilon)) {
    out.cls = TrajectoryClass::SR;
    out.reason = ClassReason::sr_monotone;
    return out;
  }

  out.peaks = detect_peaks(norm, thresholds);

  if (!out.peaks.empty() && out.peaks.front().logical_year == 1 &&
      nonincreasing_within(norm, thresholds.epsilon)) {
    out.cls = TrajectoryClass::SD;
    out.reason = ClassReason::sd_first_year;
    return out;
  }

  if (out.peaks.size() >= 2) {
    out.cls = TrajectoryClass::FR;
    out.reason = ClassReason::fr_multi_peak;
    return out;
  }

  if (out.peaks.size() == 1) {
    int p = out.peaks.front().logical_year;
    bool decayed = norm.back() <= 1.0 - thresholds.delta;
    if (p < series.n && decayed) {
      if (p >= thresholds.er_min_year && p <= thresholds.er_max_year) {
        out.cls = TrajectoryClass::ER;
        out.reason = ClassReason::er_single_early;
        return out;
      }
      if (p > thresholds.er_max_year) {
        out.cls = TrajectoryClass::LR;
        out.reason = ClassReason::lr_single_late;
        return out;
      }
    }
  }

  out.cls = TrajectoryClass::OT;
  out.reason = ClassReason::ot_residual;
  return out;
}

ClassificationResult classify_corpus(const Corpus& corpus, const Thresholds& thresholds,
                                     const SeriesConfig& series_config, CitationMode mode) {
  ClassificationResult result;
  std::vector<std::string> eligible = eligible_authors(corpus, thresholds.min_span);
  result.ineligible_skipped = corpus.author_index.size() - eligible.size();
  for (const std::string& author : eligible) {
    try {
      AuthorTimeline timeline = author_timeline(corpus, author, mode);
      SuccessSeries series = build_series(timeline, series_config);
      result.classified.emplace(author, classify(timeline, series, thresholds));
    } catch (const std::exception& err) {
      result.errors.emplace_back(author, err.what());
    }
  }
  return result;
}

void write_classification_csv(const ClassificationResult& result, std::ostream& out) {
  out << kClassifyCsvHeader << '\n';
  for (const auto& [author, entry] : result.classified) {
    out << author << ',' << to_string(entry.cls) << ',' << to_string(entry.reason) << ','
        << entry.peaks.size() << ',';
    for (std::size_t i = 0; i < entry.peaks.size(); ++i) {
      if (i) out << ';';
      out << entry.peaks[i].logical_year;
    }
    out << '\n';
  }
}

}  // namespace trajmine
