#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "autolabel/dataset.hpp"

namespace autolabel {

struct SynthConfig {
  std::size_t dim = 64;
  std::size_t shared_classes = 4;   // K
  std::size_t private_classes = 3;  // M
  std::size_t videos_per_class = 20;
  std::size_t frames_per_video = 8;       // r
  std::size_t attributes_per_frame = 5;   // m
  double noise_sigma = 0.15;
  std::size_t salient_per_class = 3;
  std::size_t distractor_vocab = 40;
  double distractor_probability = 0.3;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig naming the first violated bound.
  void validate() const;
};

/// What the generator knows and the engine must not: true classes, salient
/// attributes, and the private-class prototypes used by the oracle baseline.
struct GroundTruth {
  std::map<std::string, std::string> video_class;
  std::map<std::string, std::vector<AttributeIndex>> salient;
  std::vector<std::string> shared_classes;
  std::vector<std::string> private_classes;
  FloatMatrix private_prototypes;  // one row per private class, same order

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct SynthOutput {
  DatasetBundle bundle;
  GroundTruth truth;
};

/// Class prototypes are rejection-sampled until every pair has |cos| < 0.3;
/// gives up with RejectionExceeded after 10*(K+M)^2 draws.
SynthOutput generate(const SynthConfig& config);

inline constexpr double kMaxPrototypeCosine = 0.3;
inline constexpr const char* kGroundTruthFile = "ground_truth.json";
inline constexpr const char* kPrivatePrototypesFile = "private_prototypes.bin";

void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& dir);

/// Reads ground_truth.json (and private_prototypes.bin when present). Accepts
/// either the file itself or the directory holding it.
GroundTruth load_ground_truth(const std::filesystem::path& where);

}  // namespace autolabel
