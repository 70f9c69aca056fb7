#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "autolabel/clustering.hpp"
#include "autolabel/dataset.hpp"

namespace autolabel {

/// A document belongs to a source class (by name) or a target cluster (by index).
using DocumentOwner = std::variant<std::string, std::size_t>;

std::string describe(const DocumentOwner& owner);

struct AttributeDocument {
  DocumentOwner owner;
  std::map<AttributeIndex, std::size_t> counts;  // only strictly positive counts
};

struct ProfileEntry {
  AttributeIndex attribute = 0;
  double score = 0.0;
  std::size_t count = 0;

  friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

/// Distinct attributes in descending tf-idf order (ties: count desc, index asc).
struct AttributeProfile {
  DocumentOwner owner;
  std::vector<ProfileEntry> entries;

  std::vector<AttributeIndex> attributes() const;
};

struct CandidateLabel {
  std::string name;  // profile tokens joined by single spaces
  AttributeProfile profile;
  std::size_t source_cluster = 0;
};

struct DiscoveryParams {
  std::size_t m = 5;          // attributes kept per video
  std::size_t t = 5;          // profile length
  std::size_t argtop_k = 20;  // frequency cut applied before tf-idf filtering
  double threshold = 0.5;     // tf-idf threshold

  void validate() const;
};

/// The m most frequent attributes over the video's frames. Ties go to the
/// attribute with the best (lowest) rank in any frame, then to the lower
/// vocabulary index.
std::vector<AttributeIndex> video_attributes(const VideoRecord& record, std::size_t m);

/// One document per class, in `class_names` order. `labels[i]` is the class of
/// `videos[i]`; classes without videos get an empty document.
std::vector<AttributeDocument> build_class_documents(std::span<const VideoRecord* const> videos,
                                                     std::span<const std::string> labels,
                                                     std::span<const std::string> class_names, std::size_t m);

/// One document per cluster of `model`; `model.assignments[i]` is the cluster of `videos[i]`.
std::vector<AttributeDocument> build_cluster_documents(std::span<const VideoRecord* const> videos,
                                                       const ClusterModel& model, std::size_t m);

/// tf(t,d) = count / total count of d, idf(t) = ln(N / df(t)), N = number of
/// documents. Result is parallel to `documents`; attributes absent from a
/// document have no entry.
using TfidfScores = std::vector<std::map<AttributeIndex, double>>;
TfidfScores tfidf_scores(std::span<const AttributeDocument> documents);

/// Keeps the argtop_k most frequent attributes, then those scoring at least
/// `threshold`, ordered and truncated to t. When nothing passes the threshold
/// the top t of the frequency cut are taken instead, so the profile is never
/// empty. Errors: EmptyDocument.
AttributeProfile filter_profile(const AttributeDocument& document, const std::map<AttributeIndex, double>& scores,
                                const DiscoveryParams& params);

std::string candidate_name(const AttributeProfile& profile, std::span<const std::string> vocab);

struct DiscoveryResult {
  std::vector<CandidateLabel> candidates;
  std::vector<std::string> warnings;
};

/// One candidate per nonempty cluster, in cluster order. Clusters whose
/// document is empty are skipped with a warning.
DiscoveryResult discover_candidates(std::span<const VideoRecord* const> target_videos, const ClusterModel& model,
                                    std::span<const std::string> vocab, const DiscoveryParams& params);

struct SourceProfiles {
  std::vector<std::string> class_names;  // classes that have a profile
  std::vector<AttributeProfile> profiles;
  std::vector<std::string> warnings;
};

/// Per-shared-class profiles from the labelled source videos (corpus N = K).
SourceProfiles source_profiles(const DatasetBundle& bundle, const DiscoveryParams& params);

}  // namespace autolabel
