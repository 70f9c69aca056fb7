#include "autolabel/artifacts.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "autolabel/error.hpp"

namespace autolabel::artifacts {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ValidationError, path.string() + ": " + e.what());
  }
}

void write_json(const json& j, const fs::path& path) { write_text(j.dump(2) + "\n", path); }

AttributeIndex token_index(const std::string& token, std::span<const std::string> vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (vocab[i] == token) return static_cast<AttributeIndex>(i);
  }
  throw Error(ErrorKind::DanglingIndex, "attribute token '" + token + "' is not in the vocabulary");
}

json profile_entries(const AttributeProfile& p, std::span<const std::string> vocab) {
  json arr = json::array();
  for (const auto& e : p.entries) arr.push_back({{"token", vocab[e.attribute]}, {"score", e.score}});
  return arr;
}

std::vector<ProfileEntry> parse_entries(const json& arr, std::span<const std::string> vocab) {
  std::vector<ProfileEntry> out;
  for (const auto& e : arr) {
    out.push_back({token_index(e.at("token").get<std::string>(), vocab), e.at("score").get<double>(), 0});
  }
  return out;
}

json candidate_json(const CandidateLabel& c, std::span<const std::string> vocab) {
  return {{"cluster", c.source_cluster}, {"name", c.name}, {"attributes", profile_entries(c.profile, vocab)}};
}

CandidateLabel parse_candidate(const json& j, std::span<const std::string> vocab) {
  CandidateLabel c;
  c.source_cluster = j.at("cluster").get<std::size_t>();
  c.name = j.at("name").get<std::string>();
  c.profile.owner = c.source_cluster;
  c.profile.entries = parse_entries(j.at("attributes"), vocab);
  if (candidate_name(c.profile, vocab) != c.name) {
    throw Error(ErrorKind::ValidationError, "candidate '" + c.name + "' does not match its attribute list");
  }
  return c;
}

template <typename F>
auto guarded(const fs::path& path, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ValidationError, path.string() + ": " + e.what());
  }
}

}  // namespace

void write_text(const std::string& text, const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void write_clusters(const ClusterArtifact& c, const fs::path& path) {
  json assignments = json::array();
  for (std::size_t i = 0; i < c.video_ids.size(); ++i) {
    assignments.push_back({{"video", c.video_ids[i]}, {"cluster", c.model.assignments[i]}});
  }
  write_json({{"num_clusters", c.model.num_clusters()},
              {"inertia", c.model.inertia},
              {"iterations", c.model.iterations_run},
              {"inertia_trace", c.model.inertia_trace},
              {"assignments", std::move(assignments)},
              {"centroids", c.model.centroids}},
             path);
}

ClusterArtifact read_clusters(const fs::path& path) {
  const json j = read_json(path);
  return guarded(path, [&] {
    ClusterArtifact c;
    c.model.centroids = j.at("centroids").get<std::vector<Vector>>();
    c.model.inertia = j.at("inertia").get<double>();
    c.model.iterations_run = j.at("iterations").get<std::size_t>();
    c.model.inertia_trace = j.value("inertia_trace", std::vector<double>{});
    for (const auto& a : j.at("assignments")) {
      c.video_ids.push_back(a.at("video").get<std::string>());
      const auto cluster = a.at("cluster").get<std::size_t>();
      if (cluster >= c.model.centroids.size()) throw Error(ErrorKind::DanglingIndex, path.string() + ": cluster index");
      c.model.assignments.push_back(cluster);
    }
    return c;
  });
}

void write_candidates(std::span<const CandidateLabel> candidates, std::span<const std::string> vocab,
                      const fs::path& path) {
  json arr = json::array();
  for (const auto& c : candidates) arr.push_back(candidate_json(c, vocab));
  write_json(arr, path);
}

std::vector<CandidateLabel> read_candidates(const fs::path& path, std::span<const std::string> vocab) {
  const json j = read_json(path);
  return guarded(path, [&] {
    std::vector<CandidateLabel> out;
    for (const auto& c : j) out.push_back(parse_candidate(c, vocab));
    return out;
  });
}

void write_matches(const MatchArtifact& m, std::span<const std::string> vocab, const fs::path& path) {
  json profiles = json::array();
  for (std::size_t i = 0; i < m.source_profiles.size(); ++i) {
    profiles.push_back({{"class", m.similarity.row_labels[i]}, {"attributes", profile_entries(m.source_profiles[i], vocab)}});
  }
  json candidates = json::array();
  for (const auto& c : m.candidates) candidates.push_back(candidate_json(c, vocab));
  json pruned = json::array();
  for (const auto& p : matched_pairs(m.similarity, m.gamma)) {
    pruned.push_back({{"class", m.similarity.row_labels[p.row]},
                      {"cluster", m.similarity.col_clusters[p.col]},
                      {"score", p.score}});
  }
  json survivors = json::array();
  for (const auto& c : m.survivors) survivors.push_back(candidate_json(c, vocab));
  write_json({{"gamma", m.gamma},
              {"source_classes", m.similarity.row_labels},
              {"clusters", m.similarity.col_clusters},
              {"S", m.similarity.values},
              {"source_profiles", std::move(profiles)},
              {"candidates", std::move(candidates)},
              {"pruned", std::move(pruned)},
              {"survivors", std::move(survivors)}},
             path);
}

MatchArtifact read_matches(const fs::path& path, std::span<const std::string> vocab) {
  const json j = read_json(path);
  return guarded(path, [&] {
    MatchArtifact m;
    m.gamma = j.at("gamma").get<double>();
    m.similarity.row_labels = j.at("source_classes").get<std::vector<std::string>>();
    m.similarity.col_clusters = j.at("clusters").get<std::vector<std::size_t>>();
    m.similarity.values = j.at("S").get<std::vector<std::vector<double>>>();
    for (const auto& p : j.at("source_profiles")) {
      AttributeProfile profile;
      profile.owner = p.at("class").get<std::string>();
      profile.entries = parse_entries(p.at("attributes"), vocab);
      m.source_profiles.push_back(std::move(profile));
    }
    for (const auto& c : j.at("candidates")) m.candidates.push_back(parse_candidate(c, vocab));
    for (const auto& c : j.at("survivors")) m.survivors.push_back(parse_candidate(c, vocab));
    return m;
  });
}

void write_predictions(std::span<const Prediction> predictions, const fs::path& path) {
  std::string text;
  for (const auto& p : predictions) {
    text += json{{"video_id", p.video_id},
                 {"label_index", p.label_index},
                 {"label_name", p.label_name},
                 {"confidence", p.confidence},
                 {"is_private", p.is_private}}
                .dump();
    text += '\n';
  }
  write_text(text, path);
}

std::vector<Prediction> read_predictions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::vector<Prediction> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    guarded(path, [&] {
      const json j = json::parse(line);
      out.push_back({j.at("video_id").get<std::string>(), j.at("label_index").get<std::size_t>(),
                     j.at("label_name").get<std::string>(), j.at("confidence").get<double>(),
                     j.at("is_private").get<bool>()});
      return 0;
    });
  }
  return out;
}

void write_pseudo_labels(const PseudoLabelSet& set, const fs::path& path) {
  json pairs = json::array();
  for (const auto& p : set.pairs) {
    pairs.push_back({{"video_id", p.video_id}, {"label_index", p.label_index}, {"confidence", p.confidence}});
  }
  write_json({{"k_percent", set.k_percent}, {"pairs", std::move(pairs)}}, path);
}

PseudoLabelSet read_pseudo_labels(const fs::path& path) {
  const json j = read_json(path);
  return guarded(path, [&] {
    PseudoLabelSet set;
    set.k_percent = j.at("k_percent").get<double>();
    for (const auto& p : j.at("pairs")) {
      set.pairs.push_back({p.at("video_id").get<std::string>(), p.at("label_index").get<std::size_t>(),
                           p.at("confidence").get<double>()});
    }
    return set;
  });
}

std::string metrics_json(const OpenSetMetrics& m) {
  const json j = {{"all", m.all},
                  {"os_star", m.os_star},
                  {"unk", m.unk},
                  {"hos", m.hos},
                  {"per_class_accuracy", m.per_class_accuracy},
                  {"counts",
                   {{"total", m.counts.total},
                    {"correct", m.counts.correct},
                    {"known", m.counts.known},
                    {"unknown", m.counts.unknown},
                    {"unknown_correct", m.counts.unknown_correct}}}};
  return j.dump(2) + "\n";
}

void write_metrics(const OpenSetMetrics& m, const fs::path& path) { write_text(metrics_json(m), path); }

}  // namespace autolabel::artifacts
