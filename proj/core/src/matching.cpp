#include "autolabel/matching.hpp"

#include <cstdlib>

#include "autolabel/error.hpp"

namespace autolabel {

std::vector<double> position_weights(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::EmptyProfile, "position weights need n >= 1");
  if (n == 1) return {1.0};
  std::vector<double> w(n);
  const double span = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(n - 1 - i) / span;
  return w;
}

double attribute_sim(std::span<const AttributeIndex> source, std::span<const AttributeIndex> target) {
  if (source.empty() || target.empty()) throw Error(ErrorKind::EmptyProfile, "attribute_sim on an empty profile");
  const auto w = position_weights(source.size());
  double s = 0.0;
  for (std::size_t is = 0; is < source.size(); ++is) {
    for (std::size_t it = 0; it < target.size(); ++it) {
      if (source[is] != target[it]) continue;
      const std::size_t dist = is > it ? is - it : it - is;
      if (dist < w.size()) s += w[dist];
    }
  }
  return s / static_cast<double>(source.size());
}

double attribute_sim(const AttributeProfile& source, const AttributeProfile& target) {
  const auto a = source.attributes();
  const auto b = target.attributes();
  return attribute_sim(a, b);
}

SimilarityMatrix build_similarity_matrix(std::span<const std::string> source_names,
                                         std::span<const AttributeProfile> source_profiles,
                                         std::span<const CandidateLabel> candidates) {
  if (source_names.size() != source_profiles.size()) {
    throw Error(ErrorKind::DimensionMismatch, "source names and profiles differ in length");
  }
  SimilarityMatrix s;
  s.row_labels.assign(source_names.begin(), source_names.end());
  for (const auto& c : candidates) s.col_clusters.push_back(c.source_cluster);
  s.values.assign(source_profiles.size(), std::vector<double>(candidates.size(), 0.0));
  for (std::size_t i = 0; i < source_profiles.size(); ++i) {
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      try {
        s.values[i][j] = attribute_sim(source_profiles[i], candidates[j].profile);
      } catch (const Error& e) {
        throw Error(e.kind(), "S[" + std::to_string(i) + "," + std::to_string(j) + "] (class '" + source_names[i] +
                                  "', cluster " + std::to_string(candidates[j].source_cluster) + "): " + e.what());
      }
    }
  }
  return s;
}

bool is_match(double score, double gamma) noexcept { return score > 0.0 && score >= gamma; }

std::vector<PrunedPair> matched_pairs(const SimilarityMatrix& s, double gamma) {
  std::vector<PrunedPair> out;
  for (std::size_t j = 0; j < s.cols(); ++j) {
    for (std::size_t i = 0; i < s.rows(); ++i) {
      if (is_match(s.values[i][j], gamma)) out.push_back({i, j, s.values[i][j]});
    }
  }
  return out;
}

std::vector<CandidateLabel> match_and_prune(const SimilarityMatrix& s, double gamma,
                                            std::span<const CandidateLabel> candidates) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorKind::InvalidConfig, "gamma must lie in [0, 1]");
  if (candidates.size() != s.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "similarity matrix has " + std::to_string(s.cols()) +
                                                  " columns for " + std::to_string(candidates.size()) + " candidates");
  }
  std::vector<CandidateLabel> survivors;
  for (std::size_t j = 0; j < s.cols(); ++j) {
    bool matched = false;
    for (std::size_t i = 0; i < s.rows() && !matched; ++i) matched = is_match(s.values[i][j], gamma);
    if (!matched) survivors.push_back(candidates[j]);
  }
  return survivors;
}

}  // namespace autolabel
