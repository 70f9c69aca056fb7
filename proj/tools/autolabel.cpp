// autolabel: command-line front end for the open-set label discovery engine.
//
// Every stage reads the previous stage's files, so `pipeline` is equivalent to
// running cluster -> discover -> match -> predict -> pseudolabel -> train per
// outer epoch followed by a final predict -> evaluate.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "autolabel/artifacts.hpp"
#include "autolabel/error.hpp"
#include "autolabel/pipeline.hpp"

namespace fs = std::filesystem;
using namespace autolabel;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> bundle;
  std::optional<std::string> out;
  std::optional<std::string> ground_truth;
  std::optional<std::string> adapter;
  std::optional<std::size_t> clusters;
  std::optional<std::size_t> max_iter;
  std::optional<std::size_t> m;
  std::optional<std::size_t> t;
  std::optional<std::size_t> argtop_k;
  std::optional<double> tfidf_threshold;
  std::optional<double> gamma;
  std::optional<double> tau;
  std::optional<double> pseudo_percent;
  std::optional<std::string> strategy;
  std::optional<double> threshold;
  std::optional<double> learning_rate;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> smoothing;
  std::optional<std::size_t> epochs_outer;
  std::optional<bool> include_source_batches;
  std::optional<std::uint64_t> seed;
  bool no_train = false;

  // stage inputs
  std::string clusters_file;
  std::string candidates_file;
  std::string matches_file;
  std::string predictions_file;
  std::string pseudolabels_file;
  std::string candidate_embeddings;
};

void add_params(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file (flags override it)");
  app->add_option("--clusters", f.clusters, "number of target clusters (default 2*K)");
  app->add_option("--max-iter", f.max_iter, "k-means iteration cap");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--m", f.m, "attributes kept per video");
  app->add_option("--t", f.t, "attributes per profile");
  app->add_option("--argtop-k", f.argtop_k, "frequency cut before tf-idf filtering");
  app->add_option("--tfidf-threshold", f.tfidf_threshold, "tf-idf threshold");
  app->add_option("--gamma", f.gamma, "attribute matching threshold");
  app->add_option("--tau", f.tau, "softmax temperature");
  app->add_option("--pseudo-percent", f.pseudo_percent, "top-k% pseudo-labels kept per class");
  app->add_option("--strategy", f.strategy, "autolabel | threshold | instance-extension | oracle");
  app->add_option("--threshold", f.threshold, "cosine threshold of the threshold baseline");
  app->add_option("--lr", f.learning_rate, "adapter learning rate");
  app->add_option("--epochs", f.epochs, "adapter epochs per fit");
  app->add_option("--batch-size", f.batch_size, "adapter batch size");
  app->add_option("--smoothing", f.smoothing, "target smoothing epsilon");
  app->add_option("--epochs-outer", f.epochs_outer, "pipeline discovery epochs");
  app->add_option("--include-source-batches", f.include_source_batches, "train on source videos too (true/false)");
  app->add_flag("--no-train", f.no_train, "skip adapter training");
  app->add_option("--ground-truth", f.ground_truth, "ground_truth.json or the directory holding it");
}

PipelineConfig build_config(const Flags& f) {
  PipelineConfig c;
  if (f.config) c = load_pipeline_config(*f.config, c);
  if (f.bundle) c.bundle = *f.bundle;
  if (f.out) c.output = *f.out;
  if (f.ground_truth) c.ground_truth = *f.ground_truth;
  if (f.clusters) c.clusters = *f.clusters;
  if (f.max_iter) c.max_iter = *f.max_iter;
  if (f.m) c.discovery.m = *f.m;
  if (f.t) c.discovery.t = *f.t;
  if (f.argtop_k) c.discovery.argtop_k = *f.argtop_k;
  if (f.tfidf_threshold) c.discovery.threshold = *f.tfidf_threshold;
  if (f.gamma) c.gamma = *f.gamma;
  if (f.tau) c.tau = *f.tau;
  if (f.pseudo_percent) c.pseudo_percent = *f.pseudo_percent;
  if (f.strategy) c.strategy = parse_strategy(*f.strategy);
  if (f.threshold) c.rejection_threshold = *f.threshold;
  if (f.learning_rate) c.train.learning_rate = *f.learning_rate;
  if (f.epochs) c.train.epochs = *f.epochs;
  if (f.batch_size) c.train.batch_size = *f.batch_size;
  if (f.smoothing) c.train.smoothing = *f.smoothing;
  if (f.epochs_outer) c.outer_epochs = *f.epochs_outer;
  if (f.include_source_batches) c.include_source_batches = *f.include_source_batches;
  if (f.seed) c.seed = *f.seed;
  if (f.no_train) c.train_enabled = false;
  c.validate();
  if (c.bundle.empty()) throw Error(ErrorKind::InvalidConfig, "no bundle given (--bundle or config key 'bundle')");
  if (c.output.empty()) throw Error(ErrorKind::InvalidConfig, "no output directory given (--out or config key 'out')");
  return c;
}

std::optional<GroundTruth> maybe_truth(const PipelineConfig& c) {
  if (c.ground_truth.empty()) return std::nullopt;
  return load_ground_truth(c.ground_truth);
}

AdapterParams adapter_or_identity(const Flags& f, std::size_t dim) {
  if (!f.adapter) return AdapterParams::identity(dim);
  AdapterParams p = load_adapter(*f.adapter);
  if (p.dim != dim) throw Error(ErrorKind::DimensionMismatch, "adapter dim " + std::to_string(p.dim));
  return p;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// ---- synth ---------------------------------------------------------------

SynthConfig read_synth_config(const std::optional<std::string>& path) {
  SynthConfig c;
  if (!path) return c;
  std::ifstream in(*path);
  if (!in) throw Error(ErrorKind::MissingFile, *path);
  nlohmann::json j;
  try {
    in >> j;
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    for (const auto& [key, _] : j.items()) {
      static const std::set<std::string> known = {
          "dim", "shared_classes", "private_classes", "videos_per_class", "frames_per_video",
          "attributes_per_frame", "sigma", "salient_per_class", "distractor_vocab", "distractor_probability", "seed"};
      if (!known.contains(key)) throw Error(ErrorKind::InvalidConfig, *path + ": unknown key '" + key + "'");
    }
    get("dim", c.dim);
    get("shared_classes", c.shared_classes);
    get("private_classes", c.private_classes);
    get("videos_per_class", c.videos_per_class);
    get("frames_per_video", c.frames_per_video);
    get("attributes_per_frame", c.attributes_per_frame);
    get("sigma", c.noise_sigma);
    get("salient_per_class", c.salient_per_class);
    get("distractor_vocab", c.distractor_vocab);
    get("distractor_probability", c.distractor_probability);
    get("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, *path + ": " + e.what());
  }
  return c;
}

void cmd_synth(const std::optional<std::string>& config, const std::string& out, std::optional<std::uint64_t> seed) {
  SynthConfig c = read_synth_config(config);
  if (seed) c.seed = *seed;
  const SynthOutput s = generate(c);
  save_bundle(s.bundle, out);
  save_ground_truth(s.truth, out);
  std::cout << "wrote bundle with " << s.bundle.videos.size() << " videos to " << out << '\n';
}

// ---- stages --------------------------------------------------------------

void cmd_cluster(const Flags& f) {
  const PipelineConfig c = build_config(f);
  const DatasetBundle bundle = load_bundle(c.bundle);
  const auto targets = bundle.videos_in(Domain::Target);
  const auto points = adapted_embeddings(bundle, targets, adapter_or_identity(f, bundle.dim));
  KMeansOptions opts;
  opts.num_clusters = c.clusters == 0 ? 2 * bundle.shared_labels.size() : c.clusters;
  opts.seed = c.seed;
  opts.max_iter = c.max_iter;
  artifacts::ClusterArtifact art;
  for (const auto* v : targets) art.video_ids.push_back(v->id);
  art.model = kmeans_fit(points, opts);
  artifacts::write_clusters(art, c.output / artifacts::kClustersFile);
  std::cout << "k=" << art.model.num_clusters() << " inertia=" << art.model.inertia
            << " iterations=" << art.model.iterations_run << '\n';
}

std::vector<const VideoRecord*> videos_by_id(const DatasetBundle& bundle, const std::vector<std::string>& ids) {
  std::map<std::string, const VideoRecord*> index;
  for (const auto& v : bundle.videos) index[v.id] = &v;
  std::vector<const VideoRecord*> out;
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorKind::DanglingIndex, "video '" + id + "' is not in the bundle");
    out.push_back(it->second);
  }
  return out;
}

void cmd_discover(const Flags& f) {
  const PipelineConfig c = build_config(f);
  const DatasetBundle bundle = load_bundle(c.bundle);
  const auto clusters = artifacts::read_clusters(f.clusters_file);
  const auto videos = videos_by_id(bundle, clusters.video_ids);
  const auto found = discover_candidates(videos, clusters.model, bundle.attribute_vocab, c.discovery);
  print_warnings(found.warnings);
  artifacts::write_candidates(found.candidates, bundle.attribute_vocab, c.output / artifacts::kCandidatesFile);
  for (const auto& cand : found.candidates) std::cout << cand.source_cluster << '\t' << cand.name << '\n';
}

void cmd_match(const Flags& f) {
  const PipelineConfig c = build_config(f);
  const DatasetBundle bundle = load_bundle(c.bundle);
  artifacts::MatchArtifact m;
  m.gamma = c.gamma;
  m.candidates = artifacts::read_candidates(f.candidates_file, bundle.attribute_vocab);
  const SourceProfiles source = source_profiles(bundle, c.discovery);
  print_warnings(source.warnings);
  m.source_profiles = source.profiles;
  m.similarity = build_similarity_matrix(source.class_names, source.profiles, m.candidates);
  m.survivors = match_and_prune(m.similarity, c.gamma, m.candidates);
  artifacts::write_matches(m, bundle.attribute_vocab, c.output / artifacts::kMatchesFile);
  std::cout << m.survivors.size() << " of " << m.candidates.size() << " candidates survive gamma=" << c.gamma << '\n';
}

std::optional<ExtendedLabelSet> strategy_labels(const Flags& f, const PipelineConfig& c, const DatasetBundle& bundle) {
  switch (c.strategy) {
    case Strategy::AutoLabel: {
      if (f.matches_file.empty()) throw Error(ErrorKind::InvalidConfig, "autolabel strategy needs --matches");
      const auto m = artifacts::read_matches(f.matches_file, bundle.attribute_vocab);
      ExtendedLabelSet labels = extend_label_set(bundle, m.survivors, c.tau);
      if (!f.candidate_embeddings.empty()) {
        const FloatMatrix override_rows = read_aleb(f.candidate_embeddings);
        if (override_rows.rows() != labels.private_labels.size() || override_rows.cols() != bundle.dim) {
          throw Error(ErrorKind::ShapeMismatch, f.candidate_embeddings + " must have one row per surviving candidate");
        }
        for (std::size_t i = 0; i < override_rows.rows(); ++i) {
          labels.private_labels[i].embedding = l2_normalize(to_vector(override_rows.row(i)));
        }
      }
      return labels;
    }
    case Strategy::Oracle: {
      const auto truth = maybe_truth(c);
      return oracle_extend(shared_label_embeddings(bundle), truth ? &*truth : nullptr, c.tau);
    }
    default:
      return std::nullopt;
  }
}

void cmd_predict(const Flags& f) {
  const PipelineConfig c = build_config(f);
  const DatasetBundle bundle = load_bundle(c.bundle);
  const auto labels = strategy_labels(f, c, bundle);
  const auto targets = bundle.videos_in(Domain::Target);
  const auto embeddings = adapted_embeddings(bundle, targets, adapter_or_identity(f, bundle.dim));
  const auto shared = shared_label_embeddings(bundle);
  std::vector<Prediction> preds;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    switch (c.strategy) {
      case Strategy::AutoLabel:
      case Strategy::Oracle:
        preds.push_back(predict(targets[i]->id, embeddings[i], *labels));
        break;
      case Strategy::Threshold:
        preds.push_back(baseline_threshold_predict(targets[i]->id, embeddings[i], shared, c.rejection_threshold, c.tau));
        break;
      case Strategy::InstanceExtension:
        preds.push_back(
            baseline_instance_extension_predict(*targets[i], embeddings[i], bundle, shared, c.discovery.m, c.tau));
        break;
    }
  }
  artifacts::write_predictions(preds, c.output / artifacts::kPredictionsFile);
  std::cout << preds.size() << " predictions written\n";
}

void cmd_pseudolabel(const Flags& f) {
  double percent = kDefaultPseudoPercent;
  if (f.config) percent = load_pipeline_config(*f.config).pseudo_percent;
  if (f.pseudo_percent) percent = *f.pseudo_percent;
  if (!f.out) throw Error(ErrorKind::InvalidConfig, "--out is required");
  const auto preds = artifacts::read_predictions(f.predictions_file);
  const PseudoLabelSet set = select_pseudo_labels(preds, percent);
  artifacts::write_pseudo_labels(set, fs::path(*f.out) / artifacts::kPseudoLabelsFile);
  std::cout << set.pairs.size() << " of " << preds.size() << " predictions kept\n";
}

void cmd_train(const Flags& f) {
  const PipelineConfig c = build_config(f);
  const DatasetBundle bundle = load_bundle(c.bundle);
  const auto labels = strategy_labels(f, c, bundle);
  const auto table = training_label_table(c.strategy, bundle, labels ? &*labels : nullptr);
  const PseudoLabelSet pseudo = artifacts::read_pseudo_labels(f.pseudolabels_file);
  const auto samples = build_training_samples(bundle, pseudo, table.size(), c.include_source_batches);
  TrainConfig tc = c.train;
  tc.tau = c.tau;
  tc.seed = c.seed;
  const FitResult fitted = fit(adapter_or_identity(f, bundle.dim), samples, table, tc);
  save_adapter(fitted.params, fitted.loss_trace, c.output);
  for (std::size_t e = 0; e < fitted.loss_trace.size(); ++e) {
    std::cout << "epoch " << e + 1 << " loss " << fitted.loss_trace[e] << '\n';
  }
}

void cmd_evaluate(const Flags& f) {
  const PipelineConfig c = build_config(f);
  const DatasetBundle bundle = load_bundle(c.bundle);
  const auto truth = maybe_truth(c);
  const auto preds = artifacts::read_predictions(f.predictions_file);
  std::vector<std::string> names;
  for (const auto& l : bundle.shared_labels) names.push_back(l.name);
  const OpenSetMetrics m = evaluate(preds, evaluation_truth(bundle, truth ? &*truth : nullptr), names);
  artifacts::write_metrics(m, c.output / artifacts::kMetricsFile);
  std::cout << format_metrics_table({{std::string(to_string(c.strategy)), &m}});
}

void cmd_pipeline(const Flags& f) {
  const PipelineConfig c = build_config(f);
  const PipelineResult r = run_pipeline(c);
  print_warnings(r.warnings);
  std::cout << format_metrics_table({{std::string(to_string(c.strategy)), &r.metrics}});
}

void cmd_compare(const Flags& f) {
  const PipelineConfig c = build_config(f);
  const auto rows = compare_strategies(c);
  std::cout << comparison_table(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"autolabel: open-set label discovery over precomputed embedding bundles"};
  app.require_subcommand(1);
  Flags f;

  auto* synth = app.add_subcommand("synth", "generate a synthetic bundle with ground truth");
  std::optional<std::string> synth_config;
  std::string synth_out;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--config", synth_config, "synth.json");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "override the config seed");

  auto stage = [&](const char* name, const char* help, bool needs_bundle = true) {
    auto* sub = app.add_subcommand(name, help);
    add_params(sub, f);
    sub->add_option("--out", f.out, "output directory")->required();
    auto* b = sub->add_option("--bundle", f.bundle, "bundle directory");
    if (!needs_bundle) b->description("unused");
    sub->add_option("--adapter", f.adapter, "adapter checkpoint directory");
    return sub;
  };

  auto* cluster = stage("cluster", "k-means over target embeddings");
  auto* discover = stage("discover", "candidate labels from clusters");
  discover->add_option("--clusters-file", f.clusters_file, "clusters.json")->required();
  auto* match = stage("match", "match candidates against source classes");
  match->add_option("--candidates", f.candidates_file, "candidates.json")->required();
  auto* predict_cmd = stage("predict", "zero-shot prediction over the extended label set");
  predict_cmd->add_option("--matches", f.matches_file, "matches.json (autolabel strategy)");
  predict_cmd->add_option("--candidate-embeddings", f.candidate_embeddings,
                          "ALEB file overriding composed candidate embeddings");
  auto* pseudo = stage("pseudolabel", "top-k% pseudo-label selection", false);
  pseudo->add_option("--predictions", f.predictions_file, "predictions.jsonl")->required();
  auto* train = stage("train", "fit the adapter on source + pseudo-labelled target");
  train->add_option("--pseudolabels", f.pseudolabels_file, "pseudolabels.json")->required();
  train->add_option("--matches", f.matches_file, "matches.json (autolabel strategy)");
  auto* eval = stage("evaluate", "ALL / OS* / UNK / HOS");
  eval->add_option("--predictions", f.predictions_file, "predictions.jsonl")->required();
  auto* pipeline = stage("pipeline", "run every stage end to end");
  auto* compare = stage("compare", "run all rejection strategies on one bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*synth) cmd_synth(synth_config, synth_out, synth_seed);
    else if (*cluster) cmd_cluster(f);
    else if (*discover) cmd_discover(f);
    else if (*match) cmd_match(f);
    else if (*predict_cmd) cmd_predict(f);
    else if (*pseudo) cmd_pseudolabel(f);
    else if (*train) cmd_train(f);
    else if (*eval) cmd_evaluate(f);
    else if (*pipeline) cmd_pipeline(f);
    else if (*compare) cmd_compare(f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_validation_error(e.kind()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
