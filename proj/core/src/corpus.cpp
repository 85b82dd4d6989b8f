#include "trajmine/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "trajmine/errors.hpp"

namespace trajmine {

const char* to_string(CitationMode mode) {
  return mode == CitationMode::all ? "all" : "exclude_self";
}

const char* to_string(VenueKind kind) {
  switch (kind) {
    case VenueKind::journal: return "journal";
    case VenueKind::conference: return "conference";
    case VenueKind::other: return "other";
  }
  return "other";
}

std::optional<VenueKind> venue_kind_from_string(std::string_view name) {
  if (name == "journal") return VenueKind::journal;
  if (name == "conference") return VenueKind::conference;
  if (name == "other") return VenueKind::other;
  return std::nullopt;
}

long long AuthorTimeline::total_papers() const {
  return std::accumulate(papers_per_year.begin(), papers_per_year.end(), 0LL);
}

long long AuthorTimeline::total_citations() const {
  return std::accumulate(new_citations_per_year.begin(), new_citations_per_year.end(), 0LL);
}

CumulativeCounts cumulative(const AuthorTimeline& timeline) {
  CumulativeCounts out;
  out.papers.resize(timeline.papers_per_year.size());
  out.citations.resize(timeline.new_citations_per_year.size());
  std::partial_sum(timeline.papers_per_year.begin(), timeline.papers_per_year.end(),
                   out.papers.begin());
  std::partial_sum(timeline.new_citations_per_year.begin(),
                   timeline.new_citations_per_year.end(), out.citations.begin());
  return out;
}

nlohmann::ordered_json to_json(const IngestReport& report) {
  return nlohmann::ordered_json{
      {"records_read", report.records_read},
      {"papers_kept", report.papers_kept},
      {"duplicate_ids_rejected", report.duplicate_ids_rejected},
      {"dangling_references_dropped", report.dangling_references_dropped},
      {"self_loops_dropped", report.self_loops_dropped},
      {"references_retained", report.references_retained},
  };
}

int Corpus::first_year(const std::string& author_id) const {
  auto it = author_index.find(author_id);
  if (it == author_index.end() || it->second.empty())
    throw NotFoundError("unknown author: " + author_id);
  return papers.at(it->second.front()).year;
}

int Corpus::span(const std::string& author_id) const {
  return end_year - first_year(author_id) + 1;
}

std::size_t Corpus::edge_count() const {
  std::size_t n = 0;
  for (const auto& [id, refs] : citation_index) n += refs.size();
  return n;
}

bool is_self_citation(const PaperRecord& citing, const PaperRecord& cited) {
  for (const auto& a : citing.author_ids)
    if (std::find(cited.author_ids.begin(), cited.author_ids.end(), a) !=
        cited.author_ids.end())
      return true;
  return false;
}

namespace {

// Returns a diagnostic for records violating structural invariants, empty on
// success. Shared between the in-memory and stream ingest paths so they agree.
std::string validate_record(const PaperRecord& record) {
  if (record.id.empty()) return "empty paper id";
  if (record.year < 1900 || record.year > 2100)
    return "year " + std::to_string(record.year) + " out of range 1900..2100";
  if (record.author_ids.empty()) return "paper " + record.id + " has no authors";
  std::set<std::string> seen;
  for (const auto& a : record.author_ids) {
    if (a.empty()) return "paper " + record.id + " has an empty author id";
    if (!seen.insert(a).second)
      return "paper " + record.id + " lists author " + a + " twice";
  }
  return {};
}

void dedupe_references(PaperRecord& record) {
  std::set<std::string> seen;
  auto last = std::remove_if(record.reference_ids.begin(), record.reference_ids.end(),
                             [&](const std::string& r) { return !seen.insert(r).second; });
  record.reference_ids.erase(last, record.reference_ids.end());
}

}  // namespace

LoadResult build_corpus(std::vector<PaperRecord> records) {
  LoadResult result;
  Corpus& corpus = result.corpus;
  IngestReport& report = result.report;
  report.records_read = records.size();

  for (auto& record : records) {
    if (auto why = validate_record(record); !why.empty()) throw ArgumentError(why);
    dedupe_references(record);
    std::string id = record.id;
    if (!corpus.papers.emplace(std::move(id), std::move(record)).second)
      ++report.duplicate_ids_rejected;
  }
  report.papers_kept = corpus.papers.size();

  for (auto& [id, paper] : corpus.papers) {
    corpus.end_year = std::max(corpus.end_year, paper.year);
    for (const auto& author : paper.author_ids)
      corpus.author_index[author].push_back(id);
    std::vector<std::string> kept;
    kept.reserve(paper.reference_ids.size());
    for (const auto& ref : paper.reference_ids) {
      if (ref == id) {
        ++report.self_loops_dropped;
        continue;
      }
      auto cited = corpus.papers.find(ref);
      if (cited == corpus.papers.end()) {
        ++report.dangling_references_dropped;
        continue;
      }
      corpus.citation_index[ref].push_back(
          {id, paper.year, is_self_citation(paper, cited->second)});
      ++report.references_retained;
      kept.push_back(ref);
    }
    // The stored record mirrors the cleaned graph, so save -> load is
    // idempotent and reports zero drops the second time around.
    paper.reference_ids = std::move(kept);
  }

  for (auto& [author, ids] : corpus.author_index)
    std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
      int ya = corpus.papers.at(a).year, yb = corpus.papers.at(b).year;
      return std::tie(ya, a) < std::tie(yb, b);
    });
  for (auto& [id, refs] : corpus.citation_index)
    std::sort(refs.begin(), refs.end(), [](const CitingRef& a, const CitingRef& b) {
      return std::tie(a.year, a.citing_id) < std::tie(b.year, b.citing_id);
    });
  return result;
}

namespace {

[[noreturn]] void line_error(std::size_t line_no, const std::string& why) {
  throw DataError("line " + std::to_string(line_no) + ": " + why);
}

PaperRecord parse_record_line(const std::string& line, std::size_t line_no) {
  nlohmann::json doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) line_error(line_no, "malformed JSON record");

  PaperRecord record;
  auto id = doc.find("id");
  if (id == doc.end() || !id->is_string()) line_error(line_no, "missing string field 'id'");
  record.id = id->get<std::string>();

  auto year = doc.find("year");
  if (year == doc.end() || !year->is_number_integer())
    line_error(line_no, "missing integer field 'year'");
  record.year = year->get<int>();

  if (auto kind = doc.find("venue_kind"); kind != doc.end()) {
    if (!kind->is_string()) line_error(line_no, "'venue_kind' must be a string");
    auto parsed = venue_kind_from_string(kind->get<std::string>());
    if (!parsed) line_error(line_no, "unknown venue_kind '" + kind->get<std::string>() + "'");
    record.venue_kind = *parsed;
  }

  auto read_string_array = [&](const char* field, bool required) {
    std::vector<std::string> out;
    auto it = doc.find(field);
    if (it == doc.end()) {
      if (required) line_error(line_no, std::string("missing array field '") + field + "'");
      return out;
    }
    if (!it->is_array())
      line_error(line_no, std::string("'") + field + "' must be an array of strings");
    for (const auto& entry : *it) {
      if (!entry.is_string())
        line_error(line_no, std::string("'") + field + "' must be an array of strings");
      out.push_back(entry.get<std::string>());
    }
    return out;
  };
  record.author_ids = read_string_array("authors", /*required=*/true);
  record.reference_ids = read_string_array("references", /*required=*/false);

  if (auto why = validate_record(record); !why.empty()) line_error(line_no, why);
  return record;
}

}  // namespace

LoadResult load_corpus(std::istream& in) {
  std::vector<PaperRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_record_line(line, line_no));
  }
  return build_corpus(std::move(records));
}

LoadResult load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return load_corpus(in);
}

void save_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& [id, paper] : corpus.papers) {
    nlohmann::ordered_json doc{
        {"id", paper.id},
        {"year", paper.year},
        {"venue_kind", to_string(paper.venue_kind)},
        {"authors", paper.author_ids},
        {"references", paper.reference_ids},
    };
    out << doc.dump() << '\n';
  }
}

AuthorTimeline author_timeline(const Corpus& corpus, const std::string& author_id,
                               CitationMode mode) {
  auto it = corpus.author_index.find(author_id);
  if (it == corpus.author_index.end() || it->second.empty())
    throw NotFoundError("unknown author: " + author_id);

  AuthorTimeline timeline;
  timeline.author_id = author_id;
  timeline.start_year = corpus.papers.at(it->second.front()).year;
  int length = corpus.end_year - timeline.start_year + 1;
  timeline.papers_per_year.assign(length, 0);
  timeline.new_citations_per_year.assign(length, 0);

  for (const auto& paper_id : it->second) {
    const PaperRecord& paper = corpus.papers.at(paper_id);
    ++timeline.papers_per_year[paper.year - timeline.start_year];
    auto cited = corpus.citation_index.find(paper_id);
    if (cited == corpus.citation_index.end()) continue;
    for (const CitingRef& ref : cited->second) {
      if (mode == CitationMode::exclude_self && ref.is_self) continue;
      // Citing years before the first paper (data noise) clamp to career year 1.
      int index = std::max(0, ref.year - timeline.start_year);
      ++timeline.new_citations_per_year[index];
    }
  }
  return timeline;
}

std::vector<std::string> eligible_authors(const Corpus& corpus, int min_span) {
  std::vector<std::string> out;
  for (const auto& [author, ids] : corpus.author_index) {
    if (ids.empty()) continue;
    int first = corpus.papers.at(ids.front()).year;
    if (corpus.end_year - first + 1 >= min_span) out.push_back(author);
  }
  return out;
}

}  // namespace trajmine
