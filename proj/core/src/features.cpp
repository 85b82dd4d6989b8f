#include "trajmine/features.hpp"

#include <algorithm>
#include <set>

#include "trajmine/errors.hpp"
#include "trajmine/stats.hpp"

namespace trajmine {

int feature_dimension(int t) { return 2 * t + 9; }

std::vector<std::string> feature_names(int t) {
  std::vector<std::string> names;
  for (int j = 1; j <= t; ++j) names.push_back("papers_y" + std::to_string(j));
  for (int j = 1; j <= t; ++j) names.push_back("cites_y" + std::to_string(j));
  names.insert(names.end(),
               {"cum_papers", "cum_citations", "h_index", "coauthor_count",
                "max_coauthor_h_index", "journal_fraction", "self_cite_fraction",
                "mean_authors_per_paper", "zero_pub_years"});
  return names;
}

FeatureVector extract_features(const Corpus& corpus, const std::string& author_id, int t,
                               int min_span) {
  if (t < kFeatureTMin || t > kFeatureTMax)
    throw ArgumentError("t must lie in [" + std::to_string(kFeatureTMin) + "," +
                        std::to_string(kFeatureTMax) + "], got " + std::to_string(t));
  int span = corpus.span(author_id);  // throws NotFoundError for unknown authors
  if (span < min_span)
    throw ArgumentError("author " + author_id + " ineligible: span " + std::to_string(span) +
                        " < " + std::to_string(min_span));

  int first = corpus.first_year(author_id);
  int window_end = first + t - 1;

  FeatureVector out;
  out.t = t;
  out.values.reserve(feature_dimension(t));

  AuthorTimeline timeline = author_timeline(corpus, author_id);
  for (int j = 0; j < t; ++j) out.values.push_back(timeline.papers_per_year[j]);

  // Window citations: edges received in career years 1..t, all-mode; the
  // self-citation share among them is its own feature below.
  long long window_citations = 0, window_self_citations = 0;
  std::vector<int> window_cites_per_year(t, 0);
  const auto& ids = corpus.author_index.at(author_id);
  for (const auto& paper_id : ids) {
    auto cited = corpus.citation_index.find(paper_id);
    if (cited == corpus.citation_index.end()) continue;
    for (const CitingRef& ref : cited->second) {
      int year_index = std::max(0, ref.year - first);
      if (year_index >= t) continue;
      ++window_cites_per_year[year_index];
      ++window_citations;
      if (ref.is_self) ++window_self_citations;
    }
  }
  for (int j = 0; j < t; ++j) out.values.push_back(window_cites_per_year[j]);

  long long window_papers = 0;
  for (int j = 0; j < t; ++j) window_papers += timeline.papers_per_year[j];
  out.values.push_back(static_cast<double>(window_papers));
  out.values.push_back(static_cast<double>(window_citations));
  out.values.push_back(author_h_index(corpus, author_id, CitationMode::all, window_end));

  std::set<std::string> coauthors;
  long long journal_papers = 0, author_slots = 0;
  for (const auto& paper_id : ids) {
    const PaperRecord& paper = corpus.papers.at(paper_id);
    if (paper.year > window_end) continue;
    if (paper.venue_kind == VenueKind::journal) ++journal_papers;
    author_slots += static_cast<long long>(paper.author_ids.size());
    for (const auto& other : paper.author_ids)
      if (other != author_id) coauthors.insert(other);
  }
  out.values.push_back(static_cast<double>(coauthors.size()));

  int max_coauthor_h = 0;
  for (const auto& coauthor : coauthors)
    max_coauthor_h =
        std::max(max_coauthor_h, author_h_index(corpus, coauthor, CitationMode::all, window_end));
  out.values.push_back(max_coauthor_h);

  out.values.push_back(static_cast<double>(journal_papers) /
                       static_cast<double>(window_papers));
  out.values.push_back(window_citations == 0
                           ? 0.0
                           : static_cast<double>(window_self_citations) /
                                 static_cast<double>(window_citations));
  out.values.push_back(static_cast<double>(author_slots) /
                       static_cast<double>(window_papers));

  int zero_years = 0;
  for (int j = 0; j < t; ++j)
    if (timeline.papers_per_year[j] == 0) ++zero_years;
  out.values.push_back(zero_years);

  return out;
}

}  // namespace trajmine
