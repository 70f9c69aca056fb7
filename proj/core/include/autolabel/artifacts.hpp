#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "autolabel/clustering.hpp"
#include "autolabel/discovery.hpp"
#include "autolabel/matching.hpp"
#include "autolabel/metrics.hpp"
#include "autolabel/pseudolabel.hpp"
#include "autolabel/zeroshot.hpp"

// Readers and writers for the per-stage files, so each CLI stage can start
// from the previous stage's output.
namespace autolabel::artifacts {

inline constexpr const char* kClustersFile = "clusters.json";
inline constexpr const char* kCandidatesFile = "candidates.json";
inline constexpr const char* kMatchesFile = "matches.json";
inline constexpr const char* kPredictionsFile = "predictions.jsonl";
inline constexpr const char* kPseudoLabelsFile = "pseudolabels.json";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kComparisonFile = "comparison.json";

struct ClusterArtifact {
  std::vector<std::string> video_ids;  // parallel to model.assignments
  ClusterModel model;
};

void write_clusters(const ClusterArtifact& clusters, const std::filesystem::path& path);
ClusterArtifact read_clusters(const std::filesystem::path& path);

void write_candidates(std::span<const CandidateLabel> candidates, std::span<const std::string> vocab,
                      const std::filesystem::path& path);
/// Tokens are resolved back to vocabulary indices; unknown tokens are DanglingIndex.
std::vector<CandidateLabel> read_candidates(const std::filesystem::path& path, std::span<const std::string> vocab);

struct MatchArtifact {
  double gamma = 0.5;
  SimilarityMatrix similarity;
  std::vector<AttributeProfile> source_profiles;  // parallel to similarity rows
  std::vector<CandidateLabel> candidates;         // parallel to similarity columns
  std::vector<CandidateLabel> survivors;
};

void write_matches(const MatchArtifact& matches, std::span<const std::string> vocab, const std::filesystem::path& path);
MatchArtifact read_matches(const std::filesystem::path& path, std::span<const std::string> vocab);

void write_predictions(std::span<const Prediction> predictions, const std::filesystem::path& path);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

void write_pseudo_labels(const PseudoLabelSet& set, const std::filesystem::path& path);
PseudoLabelSet read_pseudo_labels(const std::filesystem::path& path);

std::string metrics_json(const OpenSetMetrics& m);
void write_metrics(const OpenSetMetrics& m, const std::filesystem::path& path);

void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace autolabel::artifacts
