#pragma once

#include <string>
#include <vector>

#include "autolabel/discovery.hpp"

namespace autolabel {

/// K x |C| attribute-set similarities; rows are source classes, columns candidates.
struct SimilarityMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::size_t> col_clusters;
  std::vector<std::vector<double>> values;

  std::size_t rows() const noexcept { return values.size(); }
  std::size_t cols() const noexcept { return col_clusters.size(); }
};

/// [n-1, ..., 0] min-max scaled to [1, ..., 0]; n == 1 gives [1].
std::vector<double> position_weights(std::size_t n);

/// Position-weighted overlap of two attribute lists. Each common attribute
/// adds weights[|i_t - i_s|] (weights sized by the source list, distances past
/// its end weigh 0); the sum is divided by the source length. Not symmetric.
/// Errors: EmptyProfile.
double attribute_sim(std::span<const AttributeIndex> source, std::span<const AttributeIndex> target);
double attribute_sim(const AttributeProfile& source, const AttributeProfile& target);

SimilarityMatrix build_similarity_matrix(std::span<const std::string> source_names,
                                         std::span<const AttributeProfile> source_profiles,
                                         std::span<const CandidateLabel> candidates);

struct PrunedPair {
  std::size_t row = 0;
  std::size_t col = 0;
  double score = 0.0;
};

/// A candidate matches a source class when its score is positive and at
/// least gamma.
bool is_match(double score, double gamma) noexcept;

std::vector<PrunedPair> matched_pairs(const SimilarityMatrix& s, double gamma);

/// Candidates matching no source class, in column order. Errors: InvalidConfig
/// when gamma is outside [0, 1] or the candidate count disagrees with S.
std::vector<CandidateLabel> match_and_prune(const SimilarityMatrix& s, double gamma,
                                            std::span<const CandidateLabel> candidates);

}  // namespace autolabel
