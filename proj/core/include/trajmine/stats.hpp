#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trajmine/corpus.hpp"
#include "trajmine/trajectory.hpp"

namespace trajmine {

struct StatsConfig {
  Thresholds thresholds;
  SeriesConfig series;
  // Publication-driven decay requires window pace >= multiplier * pre-peak pace.
  double decay_multiplier = 1.0;
};

/// Per-class slice of the eligible population. Means are absent (not NaN)
/// when the class is empty.
struct ClassProfile {
  TrajectoryClass cls = TrajectoryClass::OT;
  std::size_t count = 0;
  double share = 0.0;
  std::optional<double> mean_h_index;
  std::optional<double> journal_fraction;
  std::optional<double> conference_fraction;
  std::optional<double> mean_papers_per_year;
};

struct MigrationRow {
  std::size_t count = 0;           // authors originally in this class
  std::size_t migrated_to_ot = 0;  // of those, OT once self-citations are excluded
  std::optional<double> migration_fraction;
};

/// Keyed by original (all-citations) class; OT itself is not reported.
struct MigrationReport {
  std::map<TrajectoryClass, MigrationRow> by_class;
};

struct DecayRow {
  std::size_t count = 0;  // decaying authors in the class
  std::size_t publication_driven = 0;
  std::optional<double> publication_driven_fraction;
  std::size_t with_coauthors = 0;  // retention denominator
  std::size_t lost_collaborator = 0;
  std::optional<double> collaborator_lost_fraction;
  std::size_t no_coauthor = 0;  // solo authors excluded from retention
};

/// Keyed by class, covering ER, LR and SD.
struct DecayReport {
  std::map<TrajectoryClass, DecayRow> by_class;
};

struct StatsReport {
  std::vector<ClassProfile> profiles;  // all six classes in canonical order
  MigrationReport migration;
  DecayReport decay;
};

/// Largest h such that at least h entries are >= h.
int h_index(std::vector<int> citation_counts);

/// Per-paper citation counts for one author, optionally truncated so that
/// only papers and citing papers up to `up_to_year` count. Throws
/// NotFoundError for unknown authors.
std::vector<int> author_citation_counts(const Corpus& corpus, const std::string& author_id,
                                        CitationMode mode = CitationMode::all,
                                        std::optional<int> up_to_year = std::nullopt);

int author_h_index(const Corpus& corpus, const std::string& author_id,
                   CitationMode mode = CitationMode::all,
                   std::optional<int> up_to_year = std::nullopt);

/// Share, mean h-index, venue fractions (pooled over each class author's own
/// paper list) and mean papers per observed career year, for all six classes.
std::vector<ClassProfile> class_profiles(const Corpus& corpus,
                                         const ClassificationResult& classifications);

/// Classifies every eligible author with and without self-citations and
/// reports, per original non-OT class, the fraction landing in OT.
MigrationReport self_citation_migration(const Corpus& corpus, const StatsConfig& config = {});

/// Publication-driven share of the decay among ER/LR/SD authors. The decay
/// window is logical years peak+1..n; pace before and including the peak
/// (buffer years included) is the comparison base.
DecayReport decay_attribution(const Corpus& corpus, const ClassificationResult& classifications,
                              const StatsConfig& config = {});

/// Share of decaying ER/LR/SD authors who lost their most prominent pre-peak
/// collaborator (max end-of-corpus h-index, ties to the smallest id): no
/// joint paper in the decay window's calendar years. Solo authors are counted
/// but excluded from the denominator.
DecayReport collaborator_retention(const Corpus& corpus,
                                   const ClassificationResult& classifications,
                                   const StatsConfig& config = {});

/// Both decay analyses merged into one report.
DecayReport decay_report(const Corpus& corpus, const ClassificationResult& classifications,
                         const StatsConfig& config = {});

/// Classifies the corpus and assembles profiles, migration and decay.
StatsReport compute_stats(const Corpus& corpus, const StatsConfig& config = {});

nlohmann::ordered_json to_json(const ClassProfile& profile);
nlohmann::ordered_json to_json(const MigrationReport& report);
nlohmann::ordered_json to_json(const DecayReport& report);
nlohmann::ordered_json to_json(const StatsReport& report);

inline constexpr const char* kProfilesCsvHeader =
    "class,count,share,mean_h_index,journal_fraction,conference_fraction,mean_papers_per_year";

/// One row per class in canonical order; absent means rendered as NA.
void write_profiles_csv(const std::vector<ClassProfile>& profiles, std::ostream& out);

}  // namespace trajmine
