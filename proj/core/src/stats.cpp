#include "trajmine/stats.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "trajmine/errors.hpp"
#include "trajmine/io.hpp"

namespace trajmine {

int h_index(std::vector<int> citation_counts) {
  std::sort(citation_counts.begin(), citation_counts.end(), std::greater<>());
  int h = 0;
  while (h < static_cast<int>(citation_counts.size()) && citation_counts[h] >= h + 1) ++h;
  return h;
}

std::vector<int> author_citation_counts(const Corpus& corpus, const std::string& author_id,
                                        CitationMode mode, std::optional<int> up_to_year) {
  auto it = corpus.author_index.find(author_id);
  if (it == corpus.author_index.end() || it->second.empty())
    throw NotFoundError("unknown author: " + author_id);

  std::vector<int> counts;
  for (const auto& paper_id : it->second) {
    if (up_to_year && corpus.papers.at(paper_id).year > *up_to_year) continue;
    int count = 0;
    if (auto cited = corpus.citation_index.find(paper_id); cited != corpus.citation_index.end())
      for (const CitingRef& ref : cited->second) {
        if (mode == CitationMode::exclude_self && ref.is_self) continue;
        if (up_to_year && ref.year > *up_to_year) continue;
        ++count;
      }
    counts.push_back(count);
  }
  return counts;
}

int author_h_index(const Corpus& corpus, const std::string& author_id, CitationMode mode,
                   std::optional<int> up_to_year) {
  return h_index(author_citation_counts(corpus, author_id, mode, up_to_year));
}

std::vector<ClassProfile> class_profiles(const Corpus& corpus,
                                         const ClassificationResult& classifications) {
  struct Tally {
    std::size_t authors = 0;
    double h_sum = 0.0;
    std::size_t papers = 0, journal = 0, conference = 0;
    double rate_sum = 0.0;  // per-author papers per observed year
  };
  std::map<TrajectoryClass, Tally> tallies;

  for (const auto& [author, entry] : classifications.classified) {
    Tally& tally = tallies[entry.cls];
    ++tally.authors;
    tally.h_sum += author_h_index(corpus, author);
    const auto& ids = corpus.author_index.at(author);
    for (const auto& paper_id : ids) {
      ++tally.papers;
      VenueKind kind = corpus.papers.at(paper_id).venue_kind;
      if (kind == VenueKind::journal) ++tally.journal;
      if (kind == VenueKind::conference) ++tally.conference;
    }
    tally.rate_sum += static_cast<double>(ids.size()) / corpus.span(author);
  }

  std::size_t total = classifications.classified.size();
  std::vector<ClassProfile> profiles;
  for (TrajectoryClass cls : kAllClasses) {
    ClassProfile profile;
    profile.cls = cls;
    if (auto it = tallies.find(cls); it != tallies.end()) {
      const Tally& tally = it->second;
      profile.count = tally.authors;
      profile.share = static_cast<double>(tally.authors) / static_cast<double>(total);
      profile.mean_h_index = tally.h_sum / static_cast<double>(tally.authors);
      profile.journal_fraction =
          static_cast<double>(tally.journal) / static_cast<double>(tally.papers);
      profile.conference_fraction =
          static_cast<double>(tally.conference) / static_cast<double>(tally.papers);
      profile.mean_papers_per_year = tally.rate_sum / static_cast<double>(tally.authors);
    }
    profiles.push_back(profile);
  }
  return profiles;
}

MigrationReport self_citation_migration(const Corpus& corpus, const StatsConfig& config) {
  ClassificationResult with_self =
      classify_corpus(corpus, config.thresholds, config.series, CitationMode::all);
  ClassificationResult without_self =
      classify_corpus(corpus, config.thresholds, config.series, CitationMode::exclude_self);

  MigrationReport report;
  for (const auto& [author, entry] : with_self.classified) {
    if (entry.cls == TrajectoryClass::OT) continue;
    MigrationRow& row = report.by_class[entry.cls];
    ++row.count;
    auto redone = without_self.classified.find(author);
    if (redone != without_self.classified.end() && redone->second.cls == TrajectoryClass::OT)
      ++row.migrated_to_ot;
  }
  for (auto& [cls, row] : report.by_class)
    row.migration_fraction =
        static_cast<double>(row.migrated_to_ot) / static_cast<double>(row.count);
  return report;
}

namespace {

bool is_decaying_class(TrajectoryClass cls) {
  return cls == TrajectoryClass::ER || cls == TrajectoryClass::LR ||
         cls == TrajectoryClass::SD;
}

/// Invokes fn(author, entry, peak_career_year) for every ER/LR/SD author.
template <typename Fn>
void for_each_decaying(const ClassificationResult& classifications, int buffer, Fn&& fn) {
  for (const auto& [author, entry] : classifications.classified) {
    if (!is_decaying_class(entry.cls) || entry.peaks.empty()) continue;
    fn(author, entry, entry.peaks.front().logical_year + buffer);
  }
}

}  // namespace

DecayReport decay_attribution(const Corpus& corpus, const ClassificationResult& classifications,
                              const StatsConfig& config) {
  DecayReport report;
  for (TrajectoryClass cls : {TrajectoryClass::ER, TrajectoryClass::LR, TrajectoryClass::SD})
    report.by_class[cls];

  int buffer = config.series.buffer_years;
  for_each_decaying(classifications, buffer, [&](const std::string& author,
                                                 const ClassifiedAuthor& entry,
                                                 int peak_career_year) {
    AuthorTimeline timeline = author_timeline(corpus, author);
    int length = timeline.length();
    if (peak_career_year >= length) return;  // no decay window to attribute
    DecayRow& row = report.by_class[entry.cls];
    ++row.count;

    auto mean_over = [&](int from, int to) {  // career years, inclusive
      double sum = 0.0;
      for (int year = from; year <= to; ++year) sum += timeline.papers_per_year[year - 1];
      return sum / (to - from + 1);
    };
    double pre = mean_over(1, peak_career_year);
    double post = mean_over(peak_career_year + 1, length);
    if (post >= config.decay_multiplier * pre) ++row.publication_driven;
  });

  for (auto& [cls, row] : report.by_class)
    if (row.count > 0)
      row.publication_driven_fraction =
          static_cast<double>(row.publication_driven) / static_cast<double>(row.count);
  return report;
}

DecayReport collaborator_retention(const Corpus& corpus,
                                   const ClassificationResult& classifications,
                                   const StatsConfig& config) {
  DecayReport report;
  for (TrajectoryClass cls : {TrajectoryClass::ER, TrajectoryClass::LR, TrajectoryClass::SD})
    report.by_class[cls];

  int buffer = config.series.buffer_years;
  for_each_decaying(classifications, buffer, [&](const std::string& author,
                                                 const ClassifiedAuthor& entry,
                                                 int peak_career_year) {
    int first = corpus.first_year(author);
    int peak_calendar = first + peak_career_year - 1;
    if (peak_calendar >= corpus.end_year) return;  // no decay window
    DecayRow& row = report.by_class[entry.cls];
    ++row.count;

    const auto& ids = corpus.author_index.at(author);
    std::set<std::string> coauthors;
    for (const auto& paper_id : ids) {
      const PaperRecord& paper = corpus.papers.at(paper_id);
      if (paper.year > peak_calendar) continue;
      for (const auto& other : paper.author_ids)
        if (other != author) coauthors.insert(other);
    }
    if (coauthors.empty()) {
      ++row.no_coauthor;
      return;
    }
    ++row.with_coauthors;

    // std::set iterates ids ascending, so ties keep the smallest id.
    std::string prominent;
    int best_h = -1;
    for (const auto& candidate : coauthors)
      if (int h = author_h_index(corpus, candidate); h > best_h) {
        best_h = h;
        prominent = candidate;
      }

    bool retained = false;
    for (const auto& paper_id : ids) {
      const PaperRecord& paper = corpus.papers.at(paper_id);
      if (paper.year <= peak_calendar) continue;
      if (std::find(paper.author_ids.begin(), paper.author_ids.end(), prominent) !=
          paper.author_ids.end()) {
        retained = true;
        break;
      }
    }
    if (!retained) ++row.lost_collaborator;
  });

  for (auto& [cls, row] : report.by_class)
    if (row.with_coauthors > 0)
      row.collaborator_lost_fraction =
          static_cast<double>(row.lost_collaborator) / static_cast<double>(row.with_coauthors);
  return report;
}

DecayReport decay_report(const Corpus& corpus, const ClassificationResult& classifications,
                         const StatsConfig& config) {
  DecayReport publication = decay_attribution(corpus, classifications, config);
  DecayReport retention = collaborator_retention(corpus, classifications, config);
  for (auto& [cls, row] : publication.by_class) {
    const DecayRow& other = retention.by_class.at(cls);
    row.with_coauthors = other.with_coauthors;
    row.lost_collaborator = other.lost_collaborator;
    row.collaborator_lost_fraction = other.collaborator_lost_fraction;
    row.no_coauthor = other.no_coauthor;
  }
  return publication;
}

StatsReport compute_stats(const Corpus& corpus, const StatsConfig& config) {
  ClassificationResult classifications =
      classify_corpus(corpus, config.thresholds, config.series, CitationMode::all);
  StatsReport report;
  report.profiles = class_profiles(corpus, classifications);
  report.migration = self_citation_migration(corpus, config);
  report.decay = decay_report(corpus, classifications, config);
  return report;
}

namespace {

nlohmann::ordered_json json_or_null(const std::optional<double>& value) {
  if (value) return *value;
  return nullptr;
}

}  // namespace

nlohmann::ordered_json to_json(const ClassProfile& profile) {
  return nlohmann::ordered_json{
      {"class", to_string(profile.cls)},
      {"count", profile.count},
      {"share", profile.share},
      {"mean_h_index", json_or_null(profile.mean_h_index)},
      {"journal_fraction", json_or_null(profile.journal_fraction)},
      {"conference_fraction", json_or_null(profile.conference_fraction)},
      {"mean_papers_per_year", json_or_null(profile.mean_papers_per_year)},
  };
}

nlohmann::ordered_json to_json(const MigrationReport& report) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [cls, row] : report.by_class)
    out[to_string(cls)] = nlohmann::ordered_json{
        {"count", row.count},
        {"migrated_to_ot", row.migrated_to_ot},
        {"migration_fraction", json_or_null(row.migration_fraction)},
    };
  return out;
}

nlohmann::ordered_json to_json(const DecayReport& report) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [cls, row] : report.by_class)
    out[to_string(cls)] = nlohmann::ordered_json{
        {"count", row.count},
        {"publication_driven", row.publication_driven},
        {"publication_driven_fraction", json_or_null(row.publication_driven_fraction)},
        {"with_coauthors", row.with_coauthors},
        {"lost_collaborator", row.lost_collaborator},
        {"collaborator_lost_fraction", json_or_null(row.collaborator_lost_fraction)},
        {"no_coauthor", row.no_coauthor},
    };
  return out;
}

nlohmann::ordered_json to_json(const StatsReport& report) {
  nlohmann::ordered_json profiles = nlohmann::ordered_json::array();
  for (const ClassProfile& profile : report.profiles) profiles.push_back(to_json(profile));
  return nlohmann::ordered_json{
      {"profiles", std::move(profiles)},
      {"migration", to_json(report.migration)},
      {"decay", to_json(report.decay)},
  };
}

void write_profiles_csv(const std::vector<ClassProfile>& profiles, std::ostream& out) {
  out << kProfilesCsvHeader << '\n';
  auto cell = [](const std::optional<double>& value) {
    return value ? format_fixed(*value) : std::string("NA");
  };
  for (const ClassProfile& profile : profiles)
    out << to_string(profile.cls) << ',' << profile.count << ',' << format_fixed(profile.share)
        << ',' << cell(profile.mean_h_index) << ',' << cell(profile.journal_fraction) << ','
        << cell(profile.conference_fraction) << ',' << cell(profile.mean_papers_per_year)
        << '\n';
}

}  // namespace trajmine
