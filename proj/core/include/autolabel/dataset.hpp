#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "autolabel/binary_matrix.hpp"
#include "autolabel/vector_ops.hpp"

namespace autolabel {

enum class Domain { Source, Target };

using AttributeIndex = std::uint32_t;

/// One video: its row in the video embedding matrix and, per sampled frame,
/// the attribute vocabulary indices in extraction-confidence order.
struct VideoRecord {
  std::string id;
  Domain domain = Domain::Source;
  std::size_t embedding_index = 0;
  std::vector<std::vector<AttributeIndex>> frames;
  // Always set for Source. For Target it is held-out evaluation ground truth
  // and is read only by the metrics module.
  std::optional<std::string> true_label;

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct LabelEntry {
  std::string name;
  std::vector<float> embedding;  // unit-norm

  friend bool operator==(const LabelEntry& a, const LabelEntry& b) noexcept;
};

struct DatasetBundle {
  std::size_t dim = 0;
  std::vector<LabelEntry> shared_labels;
  std::vector<std::string> attribute_vocab;
  FloatMatrix attribute_embeddings;  // |vocab| x dim, unit-norm rows
  FloatMatrix video_embeddings;      // N x dim
  std::vector<VideoRecord> videos;

  std::span<const float> embedding_of(const VideoRecord& v) const { return video_embeddings.row(v.embedding_index); }

  std::vector<const VideoRecord*> videos_in(Domain d) const;

  friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;
};

inline constexpr double kUnitNormTolerance = 1e-5;

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kVideoEmbeddingsFile = "video_embeddings.bin";
inline constexpr const char* kLabelEmbeddingsFile = "label_embeddings.bin";
inline constexpr const char* kAttributeEmbeddingsFile = "attribute_embeddings.bin";

/// Case-folds and trims an attribute token.
std::string normalize_token(std::string_view token);

/// Checks every bundle invariant; throws the matching typed Error naming the
/// offending record. Does not require both domains to be present.
void validate_bundle(const DatasetBundle& bundle);

DatasetBundle load_bundle(const std::filesystem::path& dir);

/// Writes manifest.json and the three ALEB files. Rejects invalid bundles and
/// bundles without videos with ValidationError; filesystem failures are IoError.
void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);

}  // namespace autolabel
