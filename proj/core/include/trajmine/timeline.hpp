#pragma once

#include <string>
#include <vector>

namespace trajmine {

/// Whether received citations count every edge or skip self-citations.
enum class CitationMode { all, exclude_self };

const char* to_string(CitationMode mode);

/// Per-author yearly counts over career years 1..length(). Career year 1 is
/// the calendar year of the author's first paper; the vectors run through the
/// corpus end year, so trailing inactive years are zeros, not truncation.
struct AuthorTimeline {
  std::string author_id;
  int start_year = 0;
  std::vector<int> papers_per_year;         // index t-1 holds career year t
  std::vector<int> new_citations_per_year;  // same indexing

  int length() const { return static_cast<int>(papers_per_year.size()); }
  long long total_papers() const;
  long long total_citations() const;
};

/// Running totals P and C per career year.
struct CumulativeCounts {
  std::vector<long long> papers;
  std::vector<long long> citations;
};

CumulativeCounts cumulative(const AuthorTimeline& timeline);

}  // namespace trajmine
