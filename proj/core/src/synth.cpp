#include "trajmine/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>

#include "trajmine/errors.hpp"
#include "trajmine/io.hpp"

namespace trajmine {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4B9FBULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent per-author RNG stream: parallel-safe and order-independent.
std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

std::string pad(std::size_t value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width)
    digits.insert(0, width - digits.size(), '0');
  return digits;
}

int width_for(std::size_t count) {
  int width = 1;
  for (std::size_t v = count > 0 ? count - 1 : 0; v >= 10; v /= 10) ++width;
  return width;
}

/// Largest-remainder apportionment of n authors over the weighted classes,
/// canonical class order throughout; output is grouped by class.
std::vector<TrajectoryClass> apportion(int n, const std::map<TrajectoryClass, double>& mix) {
  double total = 0.0;
  for (const auto& [cls, weight] : mix) {
    if (weight < 0) throw ArgumentError("class weights must be non-negative");
    total += weight;
  }
  if (total <= 0) throw ArgumentError("class weights must not all be zero");

  struct Slot {
    TrajectoryClass cls;
    int count;
    double remainder;
  };
  std::vector<Slot> slots;
  int assigned = 0;
  for (TrajectoryClass cls : kAllClasses) {
    auto it = mix.find(cls);
    if (it == mix.end() || it->second <= 0) continue;
    double quota = n * it->second / total;
    int base = static_cast<int>(quota);
    slots.push_back({cls, base, quota - base});
    assigned += base;
  }
  std::vector<std::size_t> order(slots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return slots[a].remainder > slots[b].remainder;
  });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++slots[order[i % order.size()]].count;

  std::vector<TrajectoryClass> out;
  out.reserve(n);
  for (const Slot& slot : slots)
    for (int i = 0; i < slot.count; ++i) out.push_back(slot.cls);
  return out;
}

/// Piecewise-linear curve through (logical year, value) anchors, sampled at
/// logical years 1..n. Anchor positions must be strictly increasing.
std::vector<double> anchored(int n, const std::vector<std::pair<int, double>>& anchors) {
  std::vector<double> out(n);
  std::size_t seg = 0;
  for (int j = 1; j <= n; ++j) {
    while (seg + 1 < anchors.size() - 1 && j > anchors[seg + 1].first) ++seg;
    auto [x0, y0] = anchors[seg];
    auto [x1, y1] = anchors[seg + 1];
    double v = j <= x0   ? y0
               : j >= x1 ? y1
                         : y0 + (y1 - y0) * (j - x0) / static_cast<double>(x1 - x0);
    out[j - 1] = v;
  }
  return out;
}

/// Normalized success-ratio template over logical years 1..n. Margins are
/// deliberately far from the classifier thresholds so zero-noise recovery is
/// certain and sigma = 0.05 recovery stays high.
std::vector<double> class_template(TrajectoryClass cls, int n) {
  switch (cls) {
    case TrajectoryClass::SR: return anchored(n, {{1, 0.25}, {n, 1.0}});
    case TrajectoryClass::SD: return anchored(n, {{1, 1.0}, {n, 0.35}});
    case TrajectoryClass::ER: return anchored(n, {{1, 0.4}, {3, 1.0}, {n, 0.25}});
    case TrajectoryClass::LR: return anchored(n, {{1, 0.3}, {7, 1.0}, {n, 0.5}});
    case TrajectoryClass::FR:
      return anchored(n, {{1, 0.5}, {3, 1.0}, {n / 2, 0.43}, {n - 3, 0.95}, {n, 0.85}});
    case TrajectoryClass::OT: break;
  }
  throw ArgumentError("no ratio template for class OT");
}

struct AuthorPlan {
  std::string id;
  TrajectoryClass cls = TrajectoryClass::OT;
  std::vector<int> papers;               // per career year
  std::vector<long long> cum_citations;  // per career year, nondecreasing
};

AuthorPlan plan_author(TrajectoryClass cls, const SynthSpec& spec, std::mt19937_64& rng) {
  const int length = spec.career_length;
  AuthorPlan plan;
  plan.cls = cls;
  plan.papers.assign(length, 0);
  plan.cum_citations.assign(length, 0);

  if (cls == TrajectoryClass::OT) {
    // Both span averages stay under 1 whatever the draws: papers < length,
    // citations <= 0.4 * length.
    int total_papers = std::uniform_int_distribution<int>(4, std::min(8, length - 1))(rng);
    for (int j = 0; j < total_papers; ++j) plan.papers[j * length / total_papers] = 1;
    int total_citations =
        std::uniform_int_distribution<int>(2, static_cast<int>(0.4 * length))(rng);
    for (int k = 1; k <= length; ++k)
      plan.cum_citations[k - 1] = static_cast<long long>(total_citations) * k / length;
    return plan;
  }

  // Steady pace m papers/year; the success ratio follows the class template
  // scaled by amplitude A. SD runs hot so rounding jitter stays well under
  // the monotonicity tolerance.
  bool steady_drop = cls == TrajectoryClass::SD;
  int m = steady_drop ? 3 : std::uniform_int_distribution<int>(2, 3)(rng);
  double amplitude =
      std::uniform_real_distribution<double>(steady_drop ? 6.0 : 4.0, 10.0)(rng);
  std::fill(plan.papers.begin(), plan.papers.end(), m);

  int n = length - 3;
  std::vector<double> ratio = class_template(cls, n);
  if (spec.noise_sigma > 0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (double& r : ratio) r *= std::exp(noise(rng));
  }
  for (int k = 4; k <= length; ++k)
    plan.cum_citations[k - 1] =
        std::llround(static_cast<double>(m) * k * amplitude * ratio[k - 4]);
  for (int k = 1; k <= 3; ++k)
    plan.cum_citations[k - 1] = std::llround(plan.cum_citations[3] * k / 4.0);
  for (int k = 1; k < length; ++k)
    plan.cum_citations[k] = std::max(plan.cum_citations[k], plan.cum_citations[k - 1]);
  return plan;
}

/// Ratio ramp for the stratified-target corpus, anchored to 1 at the horizon
/// so S(horizon) equals the mapped target while the overall shape still
/// classifies as the intended class.
double strat_ramp(TrajectoryClass cls, int k, int length, int horizon) {
  double h = horizon, l = length;
  switch (cls) {
    case TrajectoryClass::SR:
      return k <= horizon ? 0.55 + 0.45 * (k - 4) / (h - 4) : 1.0 + 0.15 * (k - h) / (l - h);
    case TrajectoryClass::SD:
      return k <= horizon ? 1.5 - 0.5 * (k - 4) / (h - 4) : 1.0 - 0.15 * (k - h) / (l - h);
    case TrajectoryClass::ER:
      if (k <= 6) return 0.8 + 0.25 * (k - 4);
      return k <= horizon ? 1.3 - 0.3 * (k - 6) / (h - 6) : 1.0 - 0.5 * (k - h) / (l - h);
    case TrajectoryClass::LR:
      return k <= horizon ? 0.4 + 0.6 * (k - 4) / (h - 4) : 1.0 - 0.35 * (k - h) / (l - h);
    default:
      throw ArgumentError("stratified targets support SR, SD, ER and LR only");
  }
}

/// Buffer-year citation split: the same x lands with class-specific timing,
/// which is what makes the stratum recoverable from early features.
std::array<double, 3> buffer_split(TrajectoryClass cls) {
  switch (cls) {
    case TrajectoryClass::SR: return {0.05, 0.30, 0.65};
    case TrajectoryClass::SD: return {0.65, 0.30, 0.05};
    case TrajectoryClass::ER: return {0.15, 0.70, 0.15};
    default: return {1.0 / 3, 1.0 / 3, 1.0 / 3};  // LR
  }
}

AuthorPlan plan_stratified(TrajectoryClass cls, const TargetMap& map, const SynthSpec& spec,
                           int horizon, std::mt19937_64& rng, double& realized_target) {
  const int length = spec.career_length;
  AuthorPlan plan;
  plan.cls = cls;
  plan.papers.assign(length, 1);
  plan.cum_citations.assign(length, 0);

  int x = std::uniform_int_distribution<int>(6, 24)(rng);
  double target = map.slope * x + map.intercept;
  std::array<double, 3> split = buffer_split(cls);
  plan.cum_citations[0] = std::llround(split[0] * x);
  plan.cum_citations[1] = std::llround((split[0] + split[1]) * x);
  plan.cum_citations[2] = x;
  for (int k = 4; k <= length; ++k)
    plan.cum_citations[k - 1] =
        std::llround(k * target * strat_ramp(cls, k, length, horizon));
  for (int k = 1; k < length; ++k)
    plan.cum_citations[k] = std::max(plan.cum_citations[k], plan.cum_citations[k - 1]);
  realized_target =
      static_cast<double>(plan.cum_citations[horizon - 1]) / static_cast<double>(horizon);
  return plan;
}

struct RealizedAuthor {
  std::vector<std::vector<int>> papers_by_year;  // career year -> record indices
  std::vector<int> solo_papers;                  // ascending (year, id)
  std::vector<int> solo_prefix;                  // solo papers in years 1..k
  std::size_t cursor = 0;                        // round-robin over solo papers
};

void validate_common(const SynthSpec& spec) {
  if (spec.n_authors < 0) throw ArgumentError("n_authors must be non-negative");
  if (spec.career_length < 10) throw ArgumentError("career_length must be at least 10");
  if (spec.noise_sigma < 0) throw ArgumentError("noise_sigma must be non-negative");
  if (spec.self_citation_rate < 0 || spec.self_citation_rate > 1)
    throw ArgumentError("self_citation_rate must lie in [0,1]");
  if (spec.coauthor_pool < 0) throw ArgumentError("coauthor_pool must be non-negative");
  if (spec.base_year < 1900 || spec.base_year + spec.career_length - 1 > 2100)
    throw ArgumentError("career years must fit in 1900..2100");
}

/// Turns plans into actual records: papers first, then citation edges
/// realized as references. Self-citations are the author's own later papers
/// citing their earlier solo papers; the rest are references added to other
/// authors' same-year papers (rotating donors), with fresh single-use filler
/// authors as overflow. Cited papers are always solo, so is_self is exact.
LabeledCorpus realize(const SynthSpec& spec, std::vector<AuthorPlan> plans) {
  const int length = spec.career_length;
  const int end_year = spec.base_year + length - 1;
  const int pool_start_year = end_year - 8;  // keeps pool coauthors ineligible
  const std::size_t n = plans.size();
  const int pool_width = width_for(std::max(spec.coauthor_pool, 1));

  std::vector<PaperRecord> records;
  std::vector<std::vector<int>> refs;  // per record, cited record indices
  std::vector<RealizedAuthor> realized(n);

  for (std::size_t a = 0; a < n; ++a) {
    AuthorPlan& plan = plans[a];
    RealizedAuthor& mine = realized[a];
    mine.papers_by_year.resize(length);
    std::mt19937_64 venue_rng(substream(spec.seed, 0x76656E75ULL + a));
    std::bernoulli_distribution journal(0.5);
    int serial = 0;
    for (int k = 1; k <= length; ++k) {
      int year = spec.base_year + k - 1;
      for (int p = 0; p < plan.papers[k - 1]; ++p) {
        PaperRecord rec;
        rec.id = plan.id + "_p" + pad(serial++, 3);
        rec.year = year;
        rec.venue_kind = journal(venue_rng) ? VenueKind::journal : VenueKind::conference;
        rec.author_ids = {plan.id};
        bool pooled = p == 0 && spec.coauthor_pool > 0 && year >= pool_start_year;
        if (pooled)
          rec.author_ids.push_back(
              "q" + pad((a + k) % static_cast<std::size_t>(spec.coauthor_pool), pool_width));
        int index = static_cast<int>(records.size());
        records.push_back(std::move(rec));
        refs.emplace_back();
        mine.papers_by_year[k - 1].push_back(index);
        if (!pooled) mine.solo_papers.push_back(index);
      }
      mine.solo_prefix.push_back(static_cast<int>(mine.solo_papers.size()));
    }
  }

  auto add_ref = [&](int citing, int cited) {
    auto& list = refs[citing];
    if (std::find(list.begin(), list.end(), cited) != list.end()) return false;
    list.push_back(cited);
    return true;
  };
  // Round-robin pick among the first `cap` solo papers, skipping pairs the
  // citing paper already has.
  auto cite_some = [&](RealizedAuthor& mine, int cap, int citing, long long& need,
                       int budget) {
    while (need > 0 && budget > 0 && cap > 0) {
      bool placed = false;
      for (int tries = 0; tries < cap; ++tries) {
        int cited = mine.solo_papers[mine.cursor++ % cap];
        if (add_ref(citing, cited)) {
          --need;
          --budget;
          placed = true;
          break;
        }
      }
      if (!placed) return;  // citing paper already cites everything available
    }
  };

  std::map<std::string, TrajectoryClass> labels;
  std::size_t filler_serial = 0;
  for (std::size_t a = 0; a < n; ++a) {
    const AuthorPlan& plan = plans[a];
    RealizedAuthor& mine = realized[a];
    for (int k = 1; k <= length; ++k) {
      long long prev = k >= 2 ? plan.cum_citations[k - 2] : 0;
      long long need = plan.cum_citations[k - 1] - prev;
      if (need <= 0) continue;

      long long want_self = std::llround(spec.self_citation_rate * static_cast<double>(need));
      int earlier_solo = k >= 2 ? mine.solo_prefix[k - 2] : 0;
      for (int citing : mine.papers_by_year[k - 1]) {
        if (want_self <= 0) break;
        long long batch = want_self;
        cite_some(mine, earlier_solo, citing, batch, static_cast<int>(want_self));
        need -= want_self - batch;
        want_self = batch;
      }

      int citable = mine.solo_prefix[k - 1];
      for (std::size_t off = 1; off < n && need > 0; ++off) {
        std::size_t donor = (a + static_cast<std::size_t>(k) + off) % n;
        if (donor == a) continue;
        for (int citing : realized[donor].papers_by_year[k - 1]) {
          cite_some(mine, citable, citing, need, 8);
          if (need <= 0) break;
        }
      }
      while (need > 0 && citable > 0) {
        std::string filler = "f" + pad(filler_serial++, 6);
        PaperRecord rec;
        rec.id = filler + "_p000";
        rec.year = spec.base_year + k - 1;
        rec.venue_kind = VenueKind::other;
        rec.author_ids = {filler};
        int index = static_cast<int>(records.size());
        records.push_back(std::move(rec));
        refs.emplace_back();
        labels.emplace(filler, TrajectoryClass::OT);  // gate-certain by construction
        cite_some(mine, citable, index, need, 8);
      }
    }
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].reference_ids.reserve(refs[i].size());
    for (int cited : refs[i]) records[i].reference_ids.push_back(records[cited].id);
  }

  LabeledCorpus out;
  for (const AuthorPlan& plan : plans) out.labels.emplace(plan.id, plan.cls);
  out.labels.merge(labels);
  out.corpus = build_corpus(std::move(records)).corpus;
  return out;
}

}  // namespace

LabeledCorpus generate(const SynthSpec& spec) {
  validate_common(spec);
  std::map<TrajectoryClass, double> mix = spec.class_mix;
  if (mix.empty())
    for (TrajectoryClass cls : kAllClasses) mix[cls] = 1.0;
  std::vector<TrajectoryClass> classes = apportion(spec.n_authors, mix);
  for (TrajectoryClass cls : classes) {
    // Cumulative citations cannot decrease, so past the peak the success
    // ratio can fall no faster than peak/k. LR needs enough tail years for
    // that decay to survive the boundary-truncated smoothing window.
    if (cls == TrajectoryClass::LR && spec.career_length < 14)
      throw ArgumentError("career_length must be at least 14 to realize LR");
    if (cls == TrajectoryClass::FR && spec.career_length < 13)
      throw ArgumentError("career_length must be at least 13 to realize FR");
  }

  std::vector<AuthorPlan> plans;
  plans.reserve(classes.size());
  int width = width_for(classes.size());
  for (std::size_t a = 0; a < classes.size(); ++a) {
    std::mt19937_64 rng(substream(spec.seed, a));
    plans.push_back(plan_author(classes[a], spec, rng));
    plans.back().id = "a" + pad(a, width);
  }
  return realize(spec, std::move(plans));
}

StratifiedCorpus generate_stratified_targets(const SynthSpec& spec,
                                             const std::map<TrajectoryClass, TargetMap>& maps,
                                             int horizon) {
  validate_common(spec);
  if (horizon < 7 || spec.career_length < horizon + 2)
    throw ArgumentError("stratified targets need 7 <= horizon <= career_length - 2");
  if (maps.empty()) throw ArgumentError("at least one target map is required");

  std::map<TrajectoryClass, double> mix = spec.class_mix;
  if (mix.empty())
    for (const auto& [cls, map] : maps) mix[cls] = 1.0;
  for (const auto& [cls, weight] : mix) {
    if (weight <= 0) continue;
    if (cls == TrajectoryClass::FR || cls == TrajectoryClass::OT)
      throw ArgumentError("stratified targets support SR, SD, ER and LR only");
    if (maps.find(cls) == maps.end())
      throw ArgumentError(std::string("missing target map for class ") + to_string(cls));
    // The LR ramp peaks at the horizon; the rise must reach logical year 6
    // and the post-horizon tail must outlast the smoothing window.
    if (cls == TrajectoryClass::LR &&
        (horizon < 9 || spec.career_length < horizon + 4))
      throw ArgumentError("LR stratified targets need horizon >= 9 and career_length >= horizon + 4");
  }

  std::vector<TrajectoryClass> classes = apportion(spec.n_authors, mix);
  std::vector<AuthorPlan> plans;
  std::vector<double> targets(classes.size());
  plans.reserve(classes.size());
  int width = width_for(classes.size());
  for (std::size_t a = 0; a < classes.size(); ++a) {
    std::mt19937_64 rng(substream(spec.seed, a));
    plans.push_back(
        plan_stratified(classes[a], maps.at(classes[a]), spec, horizon, rng, targets[a]));
    plans.back().id = "a" + pad(a, width);
  }

  StratifiedCorpus out;
  for (std::size_t a = 0; a < plans.size(); ++a)
    out.targets.emplace(plans[a].id, targets[a]);
  LabeledCorpus labeled = realize(spec, std::move(plans));
  out.corpus = std::move(labeled.corpus);
  out.labels = std::move(labeled.labels);
  return out;
}

void write_labels_csv(const std::map<std::string, TrajectoryClass>& labels,
                      std::ostream& out) {
  out << kLabelsCsvHeader << '\n';
  for (const auto& [author, cls] : labels) out << author << ',' << to_string(cls) << '\n';
}

void write_targets_csv(const std::map<std::string, double>& targets, std::ostream& out) {
  out << kTargetsCsvHeader << '\n';
  for (const auto& [author, target] : targets)
    out << author << ',' << format_fixed(target) << '\n';
}

}  // namespace trajmine
