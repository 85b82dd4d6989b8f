#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "trajmine/corpus.hpp"
#include "trajmine/trajectory.hpp"

namespace trajmine {

struct SynthSpec {
  int n_authors = 600;
  // Empty mix means equal weight over all six classes. Weights must be
  // non-negative and not all zero.
  std::map<TrajectoryClass, double> class_mix;
  int career_length = 15;
  double noise_sigma = 0.0;        // multiplicative log-normal noise on the template
  double self_citation_rate = 0.1; // share of each year's new citations that are self
  int coauthor_pool = 50;          // decorative coauthors, kept ineligible by design
  std::uint64_t seed = 0;
  int base_year = 2000;            // every career starts here
};

struct LabeledCorpus {
  Corpus corpus;
  std::map<std::string, TrajectoryClass> labels;  // intended class per author
};

/// Linear target map: target = slope * x + intercept over the citation draw x.
struct TargetMap {
  double slope = 1.0;
  double intercept = 0.0;
};

struct StratifiedCorpus {
  Corpus corpus;
  std::map<std::string, TrajectoryClass> labels;
  std::map<std::string, double> targets;  // realized horizon-year success
};

/// Synthesizes careers per class template, realizes citations as actual
/// citing papers inside the corpus (self-citations cite the author's own
/// earlier solo papers; the rest are references added to other authors'
/// same-year papers), and labels every author whose class is certain by
/// construction. Pool coauthors only ever appear in the last nine calendar
/// years, which keeps them ineligible and therefore unlabeled. Deterministic
/// given the seed. Throws ArgumentError for infeasible specs (career too
/// short for the requested classes, bad weights).
LabeledCorpus generate(const SynthSpec& spec);

/// Careers whose full-career classification lands in the keyed class while
/// the horizon-year success follows that class's linear map of the buffer
/// citation draw x ~ U{6..24} (the same marginal for every class; only the
/// within-buffer timing differs by class). Supports SR, SD, ER and LR.
/// Slopes should keep slope * x above x/4, or the early clamp bends the
/// intended shape.
StratifiedCorpus generate_stratified_targets(const SynthSpec& spec,
                                             const std::map<TrajectoryClass, TargetMap>& maps,
                                             int horizon = 10);

inline constexpr const char* kLabelsCsvHeader = "author_id,class";
inline constexpr const char* kTargetsCsvHeader = "author_id,target";

void write_labels_csv(const std::map<std::string, TrajectoryClass>& labels, std::ostream& out);
void write_targets_csv(const std::map<std::string, double>& targets, std::ostream& out);

}  // namespace trajmine
