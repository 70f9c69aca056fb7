#pragma once

#include <optional>
#include <string>
#include <vector>

#include "autolabel/dataset.hpp"
#include "autolabel/discovery.hpp"
#include "autolabel/synth.hpp"

namespace autolabel {

struct LabelEmbedding {
  std::string name;
  Vector embedding;  // unit-norm
};

/// Shared labels followed by target-private labels. Index i < K is shared,
/// i >= K private. `candidates` is parallel to `private_labels` when the
/// private labels were discovered, and empty otherwise (oracle).
struct ExtendedLabelSet {
  std::vector<LabelEmbedding> shared;
  std::vector<LabelEmbedding> private_labels;
  std::vector<CandidateLabel> candidates;
  double tau = 0.01;

  std::size_t size() const noexcept { return shared.size() + private_labels.size(); }
  const LabelEmbedding& at(std::size_t i) const;
  std::vector<Vector> embeddings() const;
};

struct Prediction {
  std::string video_id;
  std::size_t label_index = 0;
  std::string label_name;
  double confidence = 0.0;
  bool is_private = false;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

inline constexpr double kDefaultTau = 0.01;
inline constexpr const char* kUnknownLabel = "unknown";

/// Clamped to [-1, 1]. Errors: DegenerateVector, DimensionMismatch.
double cosine(std::span<const double> v, std::span<const double> w);

/// Temperature-scaled softmax over cosine similarities, max-subtracted.
std::vector<double> softmax_scores(std::span<const double> video, std::span<const Vector> labels, double tau);
std::vector<double> softmax_scores(std::span<const double> video, const ExtendedLabelSet& labels);

/// Normalized mean of the profile's attribute embeddings.
/// Errors: EmptyProfile, DanglingIndex, DegenerateVector.
Vector compose_label_embedding(const AttributeProfile& profile, const FloatMatrix& attribute_embeddings);
Vector compose_label_embedding(std::span<const AttributeIndex> attributes, const FloatMatrix& attribute_embeddings);

std::vector<LabelEmbedding> shared_label_embeddings(const DatasetBundle& bundle);

/// Shared labels plus one composed label per candidate. Candidates repeating
/// an earlier name (identical profile, hence identical embedding) or a shared
/// name are dropped so all names stay distinct.
ExtendedLabelSet extend_label_set(const DatasetBundle& bundle, std::span<const CandidateLabel> candidates, double tau);

/// Argmax of softmax_scores, ties to the lowest index.
Prediction predict(const std::string& video_id, std::span<const double> embedding, const ExtendedLabelSet& labels);
Prediction predict(const VideoRecord& video, const DatasetBundle& bundle, const ExtendedLabelSet& labels);

/// Closed-set argmax over the shared labels; rejected as unknown when the best
/// cosine is below `threshold`. Rejected predictions carry label_index K and
/// the name "unknown".
Prediction baseline_threshold_predict(const std::string& video_id, std::span<const double> embedding,
                                      std::span<const LabelEmbedding> shared, double threshold, double tau);

/// Shared labels extended, for this video only, with each of its own top-m
/// attributes as a one-token candidate. A win by an attribute candidate is a
/// rejection; its label_index is K + vocabulary index.
Prediction baseline_instance_extension_predict(const VideoRecord& video, std::span<const double> embedding,
                                               const DatasetBundle& bundle, std::span<const LabelEmbedding> shared,
                                               std::size_t m, double tau);

/// Shared labels plus the true private-class prototypes.
/// Errors: GroundTruthUnavailable when no private prototypes are known.
ExtendedLabelSet oracle_extend(std::span<const LabelEmbedding> shared, const GroundTruth* truth, double tau);

}  // namespace autolabel
