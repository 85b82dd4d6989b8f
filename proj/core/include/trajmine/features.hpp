#pragma once

#include <string>
#include <vector>

#include "trajmine/corpus.hpp"

namespace trajmine {

/// Early-career feature row over career years 1..t. Fixed schema of
/// dimension 2t + 9: per-year papers, per-year new citations, cumulative
/// papers, cumulative citations, h-index, distinct coauthors, max coauthor
/// h-index, journal fraction, self-citation fraction, mean authors per
/// paper, zero-publication-year count. Everything is computed on the corpus
/// truncated to the window's last calendar year — no future leakage.
struct FeatureVector {
  int t = 0;
  std::vector<double> values;
};

inline constexpr int kFeatureTMin = 3;
inline constexpr int kFeatureTMax = 6;

int feature_dimension(int t);
std::vector<std::string> feature_names(int t);

/// Throws ArgumentError for t outside [3,6] or an author whose span is below
/// `min_span`; NotFoundError for unknown authors.
FeatureVector extract_features(const Corpus& corpus, const std::string& author_id, int t,
                               int min_span = 10);

}  // namespace trajmine
