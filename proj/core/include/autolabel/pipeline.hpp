#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autolabel/adapter.hpp"
#include "autolabel/clustering.hpp"
#include "autolabel/dataset.hpp"
#include "autolabel/discovery.hpp"
#include "autolabel/matching.hpp"
#include "autolabel/metrics.hpp"
#include "autolabel/pseudolabel.hpp"
#include "autolabel/synth.hpp"
#include "autolabel/zeroshot.hpp"

namespace autolabel {

enum class Strategy { AutoLabel, Threshold, InstanceExtension, Oracle };

std::string_view to_string(Strategy s) noexcept;
/// Accepts "autolabel", "threshold", "instance-extension", "oracle".
Strategy parse_strategy(std::string_view name);

struct PipelineConfig {
  std::filesystem::path bundle;
  std::filesystem::path ground_truth;  // ground_truth.json or its directory; optional
  std::filesystem::path output;        // empty: write nothing

  std::size_t clusters = 0;  // 0: 2 * K
  std::size_t max_iter = 100;
  DiscoveryParams discovery;
  double gamma = 0.5;
  double tau = kDefaultTau;
  double pseudo_percent = kDefaultPseudoPercent;
  Strategy strategy = Strategy::AutoLabel;
  double rejection_threshold = 0.9;
  TrainConfig train;
  std::size_t outer_epochs = 5;
  bool train_enabled = true;
  bool include_source_batches = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Overlays the keys of a flat JSON object onto `base`. Unknown keys and
/// ill-typed values are InvalidConfig.
PipelineConfig load_pipeline_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Output of the discovery stages (cluster, discover, match) for one pass.
struct DiscoveryState {
  std::vector<std::string> target_ids;
  ClusterModel clusters;
  std::vector<CandidateLabel> candidates;
  SourceProfiles source;
  SimilarityMatrix similarity;
  std::vector<CandidateLabel> survivors;
  ExtendedLabelSet labels;
  std::vector<std::string> warnings;
};

/// Embeddings of the given videos after the adapter. The identity adapter
/// returns the stored embeddings untouched, so it reproduces the no-adapter
/// path bit for bit.
std::vector<Vector> adapted_embeddings(const DatasetBundle& bundle, std::span<const VideoRecord* const> videos,
                                       const AdapterParams& adapter);

/// Label embeddings indexed the way the strategy's predictions index labels:
/// the extended set for AutoLabel and Oracle, the shared labels for Threshold,
/// and shared labels followed by every vocabulary attribute for
/// InstanceExtension.
std::vector<Vector> training_label_table(Strategy strategy, const DatasetBundle& bundle,
                                         const ExtendedLabelSet* labels);

/// Target ground truth for evaluation: the bundle's held-out target labels,
/// completed from the ground-truth file when one is given.
std::map<std::string, std::string> evaluation_truth(const DatasetBundle& bundle, const GroundTruth* truth);

/// Labelled source videos (optionally) plus the pseudo-labelled target
/// videos whose label has an entry in a table of `table_size` embeddings.
std::vector<TrainingSample> build_training_samples(const DatasetBundle& bundle, const PseudoLabelSet& pseudo,
                                                   std::size_t table_size, bool include_source);

/// `epoch` only labels error messages.
DiscoveryState run_discovery(const DatasetBundle& bundle, const AdapterParams& adapter, const PipelineConfig& config,
                             std::uint64_t cluster_seed, const std::string& epoch = "0");

struct PipelineResult {
  OpenSetMetrics metrics;
  std::vector<Prediction> predictions;
  AdapterParams adapter;
  std::vector<std::vector<double>> loss_traces;  // one per outer epoch that trained
  std::vector<std::string> warnings;
};

/// Each outer epoch: adapt, cluster, discover, match, predict, pseudo-label,
/// fit the adapter. Then one final discovery + predict pass that is evaluated.
/// Non-AutoLabel strategies replace discovery with their own label set. Stage
/// failures are rethrown with the stage name and epoch index.
PipelineResult run_pipeline(const PipelineConfig& config, const DatasetBundle& bundle, const GroundTruth* truth);
PipelineResult run_pipeline(const PipelineConfig& config);

struct StrategyRow {
  Strategy strategy;
  std::optional<OpenSetMetrics> metrics;  // empty: not applicable (oracle without ground truth)
};

std::vector<StrategyRow> compare_strategies(const PipelineConfig& config, const DatasetBundle& bundle,
                                            const GroundTruth* truth);
std::vector<StrategyRow> compare_strategies(const PipelineConfig& config);

std::string comparison_json(const std::vector<StrategyRow>& rows);
std::string comparison_table(const std::vector<StrategyRow>& rows);

}  // namespace autolabel
