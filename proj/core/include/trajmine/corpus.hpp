#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trajmine/timeline.hpp"

namespace trajmine {

enum class VenueKind { journal, conference, other };

const char* to_string(VenueKind kind);
std::optional<VenueKind> venue_kind_from_string(std::string_view name);

/// One bibliographic record. `author_ids` is ordered, non-empty and
/// duplicate-free; `reference_ids` is deduplicated at ingest.
struct PaperRecord {
  std::string id;
  int year = 0;
  VenueKind venue_kind = VenueKind::other;
  std::vector<std::string> author_ids;
  std::vector<std::string> reference_ids;
};

/// One retained citation into a cited paper.
struct CitingRef {
  std::string citing_id;
  int year = 0;       // citing paper's calendar year
  bool is_self = false;

  friend bool operator==(const CitingRef&, const CitingRef&) = default;
};

/// A fully resolved citation edge (query/result form of CitingRef).
struct CitationEdge {
  std::string citing_id;
  std::string cited_id;
  int year = 0;
  bool is_self = false;
};

struct IngestReport {
  std::size_t records_read = 0;
  std::size_t papers_kept = 0;
  std::size_t duplicate_ids_rejected = 0;
  std::size_t dangling_references_dropped = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t references_retained = 0;
};

nlohmann::ordered_json to_json(const IngestReport& report);

/// Immutable bibliographic corpus with author and citation indices. All
/// queries are read-only and safe to run concurrently once built.
struct Corpus {
  std::map<std::string, PaperRecord> papers;
  // author id -> paper ids sorted ascending by (year, id)
  std::map<std::string, std::vector<std::string>> author_index;
  // cited paper id -> citing refs sorted by (year, citing id)
  std::map<std::string, std::vector<CitingRef>> citation_index;
  int end_year = 0;

  bool has_author(const std::string& author_id) const {
    return author_index.count(author_id) != 0;
  }
  /// Calendar year of the author's first paper. Throws NotFoundError.
  int first_year(const std::string& author_id) const;
  /// end_year - first_year + 1. Throws NotFoundError.
  int span(const std::string& author_id) const;
  std::size_t edge_count() const;
};

struct LoadResult {
  Corpus corpus;
  IngestReport report;
};

/// True iff the citing and cited papers share at least one author.
bool is_self_citation(const PaperRecord& citing, const PaperRecord& cited);

/// Builds the indices from in-memory records. Duplicate ids are rejected and
/// counted, dangling references and self-loops dropped and counted. Records
/// violating structural invariants (empty author list, duplicate authors,
/// year out of 1900..2100) raise ArgumentError.
LoadResult build_corpus(std::vector<PaperRecord> records);

/// Parses the JSONL corpus format (one record object per line; fields `id`,
/// `year`, optional `venue_kind`, `authors`, optional `references`; unknown
/// fields ignored) and builds the corpus. Malformed lines raise DataError
/// naming the line number.
LoadResult load_corpus(std::istream& in);
LoadResult load_corpus_file(const std::string& path);

/// Writes the corpus back out in the JSONL input format, papers sorted by id.
/// Reloading the output reproduces identical indices.
void save_corpus_jsonl(const Corpus& corpus, std::ostream& out);

/// Yearly publication and newly-received citation counts for one author.
/// Citations attribute to the citing paper's year; years before the first
/// paper clamp to career year 1. Throws NotFoundError for unknown authors.
AuthorTimeline author_timeline(const Corpus& corpus, const std::string& author_id,
                               CitationMode mode = CitationMode::all);

/// Authors whose observation span (end_year - first paper year + 1) is at
/// least `min_span`, sorted by id.
std::vector<std::string> eligible_authors(const Corpus& corpus, int min_span = 10);

}  // namespace trajmine
