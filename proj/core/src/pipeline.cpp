#include "autolabel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "autolabel/artifacts.hpp"
#include "autolabel/error.hpp"
#include "autolabel/rng.hpp"

namespace autolabel {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
auto stage(const char* name, const std::string& epoch, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage '") + name + "' epoch " + epoch + ": " + e.what());
  }
}

std::string epoch_dir_name(std::size_t e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "epoch_%02zu", e);
  return buf;
}

std::size_t shared_index(const DatasetBundle& bundle, const std::string& name) {
  for (std::size_t i = 0; i < bundle.shared_labels.size(); ++i) {
    if (bundle.shared_labels[i].name == name) return i;
  }
  throw Error(ErrorKind::DanglingIndex, "label '" + name + "' is not a shared label");
}

}  // namespace

std::vector<Vector> training_label_table(Strategy strategy, const DatasetBundle& bundle,
                                         const ExtendedLabelSet* labels) {
  std::vector<Vector> table;
  switch (strategy) {
    case Strategy::AutoLabel:
    case Strategy::Oracle:
      if (labels == nullptr) throw Error(ErrorKind::InvalidConfig, "strategy needs an extended label set");
      return labels->embeddings();
    case Strategy::Threshold:
      for (const auto& l : bundle.shared_labels) table.push_back(to_vector(l.embedding));
      return table;
    case Strategy::InstanceExtension:
      for (const auto& l : bundle.shared_labels) table.push_back(to_vector(l.embedding));
      for (std::size_t a = 0; a < bundle.attribute_vocab.size(); ++a) {
        table.push_back(to_vector(bundle.attribute_embeddings.row(a)));
      }
      return table;
  }
  return table;
}

std::vector<TrainingSample> build_training_samples(const DatasetBundle& bundle, const PseudoLabelSet& pseudo,
                                                   std::size_t table_size, bool include_source) {
  std::vector<TrainingSample> samples;
  if (include_source) {
    for (const auto* v : bundle.videos_in(Domain::Source)) {
      samples.push_back({to_vector(bundle.embedding_of(*v)), shared_index(bundle, *v->true_label)});
    }
  }
  std::map<std::string, const VideoRecord*> by_id;
  for (const auto* v : bundle.videos_in(Domain::Target)) by_id[v->id] = v;
  for (const auto& p : pseudo.pairs) {
    if (p.label_index >= table_size) continue;  // rejected as unknown, no label embedding to pull towards
    const auto it = by_id.find(p.video_id);
    if (it == by_id.end()) throw Error(ErrorKind::DanglingIndex, "pseudo-label for unknown target video '" + p.video_id + "'");
    samples.push_back({to_vector(bundle.embedding_of(*it->second)), p.label_index});
  }
  return samples;
}

std::map<std::string, std::string> evaluation_truth(const DatasetBundle& bundle, const GroundTruth* truth) {
  auto gt = target_ground_truth(bundle);
  if (truth) {
    for (const auto* v : bundle.videos_in(Domain::Target)) {
      if (gt.contains(v->id)) continue;
      if (auto it = truth->video_class.find(v->id); it != truth->video_class.end()) gt[v->id] = it->second;
    }
  }
  return gt;
}

namespace {

struct StrategyPass {
  std::optional<DiscoveryState> discovery;
  std::optional<ExtendedLabelSet> labels;
  std::vector<Prediction> predictions;
};

class PipelineRunner {
 public:
  PipelineRunner(const PipelineConfig& config, const DatasetBundle& bundle, const GroundTruth* truth)
      : config_(config), bundle_(bundle), truth_(truth), targets_(bundle.videos_in(Domain::Target)) {}

  PipelineResult run() {
    PipelineResult result;
    AdapterParams adapter = AdapterParams::identity(bundle_.dim);
    const std::size_t epochs = config_.train_enabled ? config_.outer_epochs : 0;
    for (std::size_t e = 0; e < epochs; ++e) {
      const std::string tag = std::to_string(e);
      StrategyPass pass = predict_pass(adapter, derive_seed(config_.seed, 1000 + e), tag);
      const PseudoLabelSet pseudo =
          stage("pseudolabel", tag, [&] { return select_pseudo_labels(pass.predictions, config_.pseudo_percent); });
      FitResult fitted = stage("train", tag, [&] {
        const auto table = training_label_table(config_.strategy, bundle_, pass.labels ? &*pass.labels : nullptr);
        const auto samples =
            build_training_samples(bundle_, pseudo, table.size(), config_.include_source_batches);
        TrainConfig tc = config_.train;
        tc.tau = config_.tau;
        tc.seed = derive_seed(config_.seed, 2000 + e);
        return fit(adapter, samples, table, tc);
      });
      adapter = std::move(fitted.params);
      write_pass(epoch_dir_name(e), pass, &pseudo);
      result.loss_traces.push_back(std::move(fitted.loss_trace));
      if (pass.discovery) append(result.warnings, pass.discovery->warnings);
    }

    StrategyPass final_pass = predict_pass(adapter, derive_seed(config_.seed, 1000 + epochs), "final");
    if (final_pass.discovery) append(result.warnings, final_pass.discovery->warnings);
    result.metrics = stage("evaluate", "final", [&] {
      std::vector<std::string> names;
      for (const auto& l : bundle_.shared_labels) names.push_back(l.name);
      return evaluate(final_pass.predictions, evaluation_truth(bundle_, truth_), names);
    });
    write_pass("final", final_pass, nullptr);
    if (!config_.output.empty()) {
      std::vector<double> flat;
      for (const auto& t : result.loss_traces) flat.insert(flat.end(), t.begin(), t.end());
      save_adapter(adapter, flat, config_.output / "adapter");
      artifacts::write_metrics(result.metrics, config_.output / artifacts::kMetricsFile);
    }
    result.predictions = std::move(final_pass.predictions);
    result.adapter = std::move(adapter);
    return result;
  }

 private:
  static void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
    to.insert(to.end(), from.begin(), from.end());
  }

  StrategyPass predict_pass(const AdapterParams& adapter, std::uint64_t cluster_seed, const std::string& tag) {
    StrategyPass pass;
    const auto embeddings = stage("adapt", tag, [&] { return adapted_embeddings(bundle_, targets_, adapter); });
    switch (config_.strategy) {
      case Strategy::AutoLabel:
        pass.discovery = run_discovery(bundle_, adapter, config_, cluster_seed, tag);
        pass.labels = pass.discovery->labels;
        break;
      case Strategy::Oracle:
        pass.labels = stage("oracle", tag, [&] {
          return oracle_extend(shared_label_embeddings(bundle_), truth_, config_.tau);
        });
        break;
      default:
        break;
    }
    pass.predictions = stage("predict", tag, [&] {
      std::vector<Prediction> preds;
      const auto shared = shared_label_embeddings(bundle_);
      for (std::size_t i = 0; i < targets_.size(); ++i) {
        const VideoRecord& v = *targets_[i];
        switch (config_.strategy) {
          case Strategy::AutoLabel:
          case Strategy::Oracle:
            preds.push_back(predict(v.id, embeddings[i], *pass.labels));
            break;
          case Strategy::Threshold:
            preds.push_back(
                baseline_threshold_predict(v.id, embeddings[i], shared, config_.rejection_threshold, config_.tau));
            break;
          case Strategy::InstanceExtension:
            preds.push_back(baseline_instance_extension_predict(v, embeddings[i], bundle_, shared,
                                                                config_.discovery.m, config_.tau));
            break;
        }
      }
      return preds;
    });
    return pass;
  }

  void write_pass(const std::string& name, const StrategyPass& pass, const PseudoLabelSet* pseudo) const {
    if (config_.output.empty()) return;
    const fs::path dir = config_.output / name;
    if (pass.discovery) {
      const DiscoveryState& d = *pass.discovery;
      artifacts::write_clusters({d.target_ids, d.clusters}, dir / artifacts::kClustersFile);
      artifacts::write_candidates(d.candidates, bundle_.attribute_vocab, dir / artifacts::kCandidatesFile);
      artifacts::MatchArtifact m{config_.gamma, d.similarity, d.source.profiles, d.candidates, d.survivors};
      artifacts::write_matches(m, bundle_.attribute_vocab, dir / artifacts::kMatchesFile);
    }
    artifacts::write_predictions(pass.predictions, dir / artifacts::kPredictionsFile);
    if (pseudo) artifacts::write_pseudo_labels(*pseudo, dir / artifacts::kPseudoLabelsFile);
  }

  const PipelineConfig& config_;
  const DatasetBundle& bundle_;
  const GroundTruth* truth_;
  std::vector<const VideoRecord*> targets_;
};

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::AutoLabel: return "autolabel";
    case Strategy::Threshold: return "threshold";
    case Strategy::InstanceExtension: return "instance-extension";
    case Strategy::Oracle: return "oracle";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::AutoLabel, Strategy::Threshold, Strategy::InstanceExtension, Strategy::Oracle}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown strategy '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  discovery.validate();
  train.validate();
  if (max_iter == 0) throw Error(ErrorKind::InvalidConfig, "max_iter must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorKind::InvalidConfig, "gamma must lie in [0, 1]");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidConfig, "tau must be positive");
  if (!(pseudo_percent > 0.0 && pseudo_percent <= 100.0)) {
    throw Error(ErrorKind::InvalidPercent, "pseudo_percent must lie in (0, 100]");
  }
  if (!(rejection_threshold >= -1.0 && rejection_threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "threshold must lie in [-1, 1]");
  }
}

PipelineConfig load_pipeline_config(const fs::path& path, PipelineConfig c) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, path.string() + ": expected a JSON object");
  static const char* kKeys[] = {"bundle", "ground_truth", "out", "clusters", "max_iter", "m", "t", "argtop_k",
                                "tfidf_threshold", "gamma", "tau", "pseudo_percent", "strategy", "threshold",
                                "learning_rate", "epochs", "batch_size", "smoothing", "epochs_outer", "train",
                                "include_source_batches", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* k) { return key == k; }) == std::end(kKeys)) {
      throw Error(ErrorKind::InvalidConfig, path.string() + ": unknown key '" + key + "'");
    }
  }
  std::string s;
  if (j.contains("bundle")) { read_key(j, "bundle", s); c.bundle = s; }
  if (j.contains("ground_truth")) { read_key(j, "ground_truth", s); c.ground_truth = s; }
  if (j.contains("out")) { read_key(j, "out", s); c.output = s; }
  read_key(j, "clusters", c.clusters);
  read_key(j, "max_iter", c.max_iter);
  read_key(j, "m", c.discovery.m);
  read_key(j, "t", c.discovery.t);
  read_key(j, "argtop_k", c.discovery.argtop_k);
  read_key(j, "tfidf_threshold", c.discovery.threshold);
  read_key(j, "gamma", c.gamma);
  read_key(j, "tau", c.tau);
  read_key(j, "pseudo_percent", c.pseudo_percent);
  if (j.contains("strategy")) { read_key(j, "strategy", s); c.strategy = parse_strategy(s); }
  read_key(j, "threshold", c.rejection_threshold);
  read_key(j, "learning_rate", c.train.learning_rate);
  read_key(j, "epochs", c.train.epochs);
  read_key(j, "batch_size", c.train.batch_size);
  read_key(j, "smoothing", c.train.smoothing);
  read_key(j, "epochs_outer", c.outer_epochs);
  read_key(j, "train", c.train_enabled);
  read_key(j, "include_source_batches", c.include_source_batches);
  read_key(j, "seed", c.seed);
  return c;
}

std::vector<Vector> adapted_embeddings(const DatasetBundle& bundle, std::span<const VideoRecord* const> videos,
                                       const AdapterParams& adapter) {
  const bool identity = adapter.is_identity();
  std::vector<Vector> out;
  out.reserve(videos.size());
  for (const auto* v : videos) {
    const Vector raw = to_vector(bundle.embedding_of(*v));
    out.push_back(identity ? raw : adapt(adapter, raw));
  }
  return out;
}

DiscoveryState run_discovery(const DatasetBundle& bundle, const AdapterParams& adapter, const PipelineConfig& config,
                             std::uint64_t cluster_seed, const std::string& epoch) {
  DiscoveryState s;
  const auto targets = bundle.videos_in(Domain::Target);
  for (const auto* v : targets) s.target_ids.push_back(v->id);
  const std::string& tag = epoch;
  const auto points = stage("adapt", tag, [&] { return adapted_embeddings(bundle, targets, adapter); });
  s.clusters = stage("cluster", tag, [&] {
    KMeansOptions opts;
    opts.num_clusters = config.clusters == 0 ? 2 * bundle.shared_labels.size() : config.clusters;
    opts.seed = cluster_seed;
    opts.max_iter = config.max_iter;
    return kmeans_fit(points, opts);
  });
  stage("discover", tag, [&] {
    auto found = discover_candidates(targets, s.clusters, bundle.attribute_vocab, config.discovery);
    s.candidates = std::move(found.candidates);
    s.warnings = std::move(found.warnings);
    s.source = source_profiles(bundle, config.discovery);
    s.warnings.insert(s.warnings.end(), s.source.warnings.begin(), s.source.warnings.end());
    return 0;
  });
  stage("match", tag, [&] {
    s.similarity = build_similarity_matrix(s.source.class_names, s.source.profiles, s.candidates);
    s.survivors = match_and_prune(s.similarity, config.gamma, s.candidates);
    s.labels = extend_label_set(bundle, s.survivors, config.tau);
    return 0;
  });
  return s;
}

PipelineResult run_pipeline(const PipelineConfig& config, const DatasetBundle& bundle, const GroundTruth* truth) {
  config.validate();
  if (bundle.videos_in(Domain::Source).empty() || bundle.videos_in(Domain::Target).empty()) {
    throw Error(ErrorKind::ValidationError, "pipeline needs at least one source and one target video");
  }
  return PipelineRunner(config, bundle, truth).run();
}

namespace {

std::optional<GroundTruth> load_optional_truth(const PipelineConfig& config) {
  if (config.ground_truth.empty()) return std::nullopt;
  return load_ground_truth(config.ground_truth);
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  const DatasetBundle bundle = load_bundle(config.bundle);
  const auto truth = load_optional_truth(config);
  return run_pipeline(config, bundle, truth ? &*truth : nullptr);
}

std::vector<StrategyRow> compare_strategies(const PipelineConfig& config, const DatasetBundle& bundle,
                                            const GroundTruth* truth) {
  std::vector<StrategyRow> rows;
  for (Strategy s : {Strategy::Threshold, Strategy::InstanceExtension, Strategy::AutoLabel, Strategy::Oracle}) {
    PipelineConfig c = config;
    c.strategy = s;
    if (!config.output.empty()) c.output = config.output / std::string(to_string(s));
    if (s == Strategy::Oracle && (truth == nullptr || truth->private_prototypes.rows() == 0)) {
      rows.push_back({s, std::nullopt});
      continue;
    }
    rows.push_back({s, run_pipeline(c, bundle, truth).metrics});
  }
  if (!config.output.empty()) {
    artifacts::write_text(comparison_json(rows), config.output / artifacts::kComparisonFile);
  }
  return rows;
}

std::vector<StrategyRow> compare_strategies(const PipelineConfig& config) {
  const DatasetBundle bundle = load_bundle(config.bundle);
  const auto truth = load_optional_truth(config);
  return compare_strategies(config, bundle, truth ? &*truth : nullptr);
}

std::string comparison_json(const std::vector<StrategyRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    if (!r.metrics) {
      arr.push_back({{"strategy", to_string(r.strategy)}, {"metrics", "n/a"}});
      continue;
    }
    arr.push_back({{"strategy", to_string(r.strategy)},
                   {"metrics", json::parse(artifacts::metrics_json(*r.metrics))}});
  }
  return arr.dump(2) + "\n";
}

std::string comparison_table(const std::vector<StrategyRow>& rows) {
  std::vector<std::pair<std::string, const OpenSetMetrics*>> table;
  for (const auto& r : rows) table.emplace_back(std::string(to_string(r.strategy)), r.metrics ? &*r.metrics : nullptr);
  return format_metrics_table(table);
}

}  // namespace autolabel
