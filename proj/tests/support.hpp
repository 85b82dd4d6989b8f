// Shared corpus builders for the test suite.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "trajmine/corpus.hpp"
#include "trajmine/timeline.hpp"

namespace test_support {

using trajmine::Corpus;
using trajmine::PaperRecord;
using trajmine::VenueKind;

inline PaperRecord paper(std::string id, int year, std::vector<std::string> authors,
                         std::vector<std::string> references = {},
                         VenueKind venue = VenueKind::journal) {
  PaperRecord record;
  record.id = std::move(id);
  record.year = year;
  record.venue_kind = venue;
  record.author_ids = std::move(authors);
  record.reference_ids = std::move(references);
  return record;
}

/// Per-year publication and citation plan for one author. Venues rotate
/// through `venues` (default: journal only); `coauthor_by_year` attaches a
/// coauthor to the first paper of that career year.
struct PlanAuthor {
  std::string id;
  int start_year = 2000;
  std::vector<int> papers;  // per career year
  std::vector<int> cites;   // new citations credited per career year
  std::vector<VenueKind> venues = {VenueKind::journal};
  std::map<int, std::string> coauthor_by_year;  // career year -> coauthor id
};

/// Realizes plans as records. Citations come from single-paper filler
/// authors, each citing the planned author's first paper in the planned
/// year, so filler spans are 1 and the citing-year clamp is never hit.
inline std::vector<PaperRecord> realize_plan(const std::vector<PlanAuthor>& plans) {
  std::vector<PaperRecord> records;
  int citer_serial = 0;
  for (const PlanAuthor& plan : plans) {
    std::string first_id = plan.id + "_p0";
    int serial = 0;
    for (std::size_t k = 0; k < plan.papers.size(); ++k) {
      for (int p = 0; p < plan.papers[k]; ++p) {
        PaperRecord record;
        record.id = plan.id + "_p" + std::to_string(serial);
        record.year = plan.start_year + static_cast<int>(k);
        record.venue_kind = plan.venues[serial % plan.venues.size()];
        record.author_ids = {plan.id};
        if (p == 0) {
          auto coauthor = plan.coauthor_by_year.find(static_cast<int>(k) + 1);
          if (coauthor != plan.coauthor_by_year.end())
            record.author_ids.push_back(coauthor->second);
        }
        records.push_back(std::move(record));
        ++serial;
      }
    }
    for (std::size_t k = 0; k < plan.cites.size(); ++k)
      for (int c = 0; c < plan.cites[k]; ++c) {
        std::string citer = "z" + std::to_string(citer_serial++);
        records.push_back(paper(citer + "_p0", plan.start_year + static_cast<int>(k),
                                {citer}, {first_id}, VenueKind::other));
      }
  }
  return records;
}

inline Corpus corpus_from(const std::vector<PlanAuthor>& plans) {
  return trajmine::build_corpus(realize_plan(plans)).corpus;
}

inline trajmine::AuthorTimeline timeline_of(std::string author, int start_year,
                                            std::vector<int> papers, std::vector<int> cites) {
  trajmine::AuthorTimeline timeline;
  timeline.author_id = std::move(author);
  timeline.start_year = start_year;
  timeline.papers_per_year = std::move(papers);
  timeline.new_citations_per_year = std::move(cites);
  return timeline;
}

}  // namespace test_support
