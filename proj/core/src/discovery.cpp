#include "autolabel/discovery.hpp"

#include <algorithm>
#include <cmath>

#include "autolabel/error.hpp"

namespace autolabel {
namespace {

struct AttributeTally {
  AttributeIndex attribute;
  std::size_t count;
  std::size_t best_rank;
};

bool profile_order(const ProfileEntry& a, const ProfileEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.count != b.count) return a.count > b.count;
  return a.attribute < b.attribute;
}

void add_video(AttributeDocument& doc, const VideoRecord& v, std::size_t m) {
  for (AttributeIndex a : video_attributes(v, m)) ++doc.counts[a];
}

}  // namespace

std::string describe(const DocumentOwner& owner) {
  if (const auto* name = std::get_if<std::string>(&owner)) return "class '" + *name + "'";
  return "cluster " + std::to_string(std::get<std::size_t>(owner));
}

std::vector<AttributeIndex> AttributeProfile::attributes() const {
  std::vector<AttributeIndex> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.attribute);
  return out;
}

void DiscoveryParams::validate() const {
  if (m == 0) throw Error(ErrorKind::InvalidConfig, "m must be >= 1");
  if (t == 0) throw Error(ErrorKind::InvalidConfig, "t must be >= 1");
  if (argtop_k == 0) throw Error(ErrorKind::InvalidConfig, "argtop_k must be >= 1");
  if (!std::isfinite(threshold)) throw Error(ErrorKind::InvalidConfig, "tf-idf threshold must be finite");
}

std::vector<AttributeIndex> video_attributes(const VideoRecord& record, std::size_t m) {
  std::vector<AttributeTally> tally;
  for (const auto& frame : record.frames) {
    for (std::size_t rank = 0; rank < frame.size(); ++rank) {
      auto it = std::find_if(tally.begin(), tally.end(), [&](const auto& t) { return t.attribute == frame[rank]; });
      if (it == tally.end()) {
        tally.push_back({frame[rank], 1, rank});
      } else {
        ++it->count;
        it->best_rank = std::min(it->best_rank, rank);
      }
    }
  }
  std::sort(tally.begin(), tally.end(), [](const AttributeTally& a, const AttributeTally& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.best_rank != b.best_rank) return a.best_rank < b.best_rank;
    return a.attribute < b.attribute;
  });
  if (tally.size() > m) tally.resize(m);
  std::vector<AttributeIndex> out;
  for (const auto& t : tally) out.push_back(t.attribute);
  return out;
}

std::vector<AttributeDocument> build_class_documents(std::span<const VideoRecord* const> videos,
                                                     std::span<const std::string> labels,
                                                     std::span<const std::string> class_names, std::size_t m) {
  if (labels.size() != videos.size()) {
    throw Error(ErrorKind::DimensionMismatch, "class grouping does not cover every video");
  }
  std::vector<AttributeDocument> docs;
  for (const auto& name : class_names) docs.push_back({name, {}});
  for (std::size_t i = 0; i < videos.size(); ++i) {
    auto it = std::find(class_names.begin(), class_names.end(), labels[i]);
    if (it == class_names.end()) {
      throw Error(ErrorKind::DanglingIndex, "video '" + videos[i]->id + "' has unknown class '" + labels[i] + "'");
    }
    add_video(docs[static_cast<std::size_t>(it - class_names.begin())], *videos[i], m);
  }
  return docs;
}

std::vector<AttributeDocument> build_cluster_documents(std::span<const VideoRecord* const> videos,
                                                       const ClusterModel& model, std::size_t m) {
  if (model.assignments.size() != videos.size()) {
    throw Error(ErrorKind::DimensionMismatch, "cluster model covers " + std::to_string(model.assignments.size()) +
                                                  " videos, got " + std::to_string(videos.size()));
  }
  std::vector<AttributeDocument> docs;
  for (std::size_t c = 0; c < model.num_clusters(); ++c) docs.push_back({c, {}});
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const std::size_t c = model.assignments[i];
    if (c >= docs.size()) throw Error(ErrorKind::DanglingIndex, "cluster index " + std::to_string(c));
    add_video(docs[c], *videos[i], m);
  }
  return docs;
}

TfidfScores tfidf_scores(std::span<const AttributeDocument> documents) {
  std::map<AttributeIndex, std::size_t> document_frequency;
  for (const auto& d : documents) {
    for (const auto& [a, _] : d.counts) ++document_frequency[a];
  }
  const double n = static_cast<double>(documents.size());
  TfidfScores scores(documents.size());
  for (std::size_t i = 0; i < documents.size(); ++i) {
    std::size_t total = 0;
    for (const auto& [_, c] : documents[i].counts) total += c;
    for (const auto& [a, c] : documents[i].counts) {
      const double tf = static_cast<double>(c) / static_cast<double>(total);
      const double idf = std::log(n / static_cast<double>(document_frequency[a]));
      scores[i][a] = tf * idf;
    }
  }
  return scores;
}

AttributeProfile filter_profile(const AttributeDocument& document, const std::map<AttributeIndex, double>& scores,
                                const DiscoveryParams& params) {
  if (document.counts.empty()) throw Error(ErrorKind::EmptyDocument, describe(document.owner));

  std::vector<ProfileEntry> frequent;
  for (const auto& [a, c] : document.counts) {
    const auto it = scores.find(a);
    frequent.push_back({a, it == scores.end() ? 0.0 : it->second, c});
  }
  std::stable_sort(frequent.begin(), frequent.end(), [](const ProfileEntry& a, const ProfileEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.attribute < b.attribute;
  });
  if (frequent.size() > params.argtop_k) frequent.resize(params.argtop_k);

  std::vector<ProfileEntry> kept;
  std::copy_if(frequent.begin(), frequent.end(), std::back_inserter(kept),
               [&](const ProfileEntry& e) { return e.score >= params.threshold; });
  if (kept.empty()) kept = frequent;
  std::sort(kept.begin(), kept.end(), profile_order);
  if (kept.size() > params.t) kept.resize(params.t);
  return {document.owner, std::move(kept)};
}

std::string candidate_name(const AttributeProfile& profile, std::span<const std::string> vocab) {
  std::string name;
  for (const auto& e : profile.entries) {
    if (e.attribute >= vocab.size()) throw Error(ErrorKind::DanglingIndex, "attribute " + std::to_string(e.attribute));
    if (!name.empty()) name += ' ';
    name += vocab[e.attribute];
  }
  return name;
}

DiscoveryResult discover_candidates(std::span<const VideoRecord* const> target_videos, const ClusterModel& model,
                                    std::span<const std::string> vocab, const DiscoveryParams& params) {
  params.validate();
  const auto docs = build_cluster_documents(target_videos, model, params.m);
  const auto scores = tfidf_scores(docs);
  DiscoveryResult result;
  for (std::size_t c = 0; c < docs.size(); ++c) {
    if (docs[c].counts.empty()) {
      result.warnings.push_back("skipped " + describe(docs[c].owner) + ": empty attribute document");
      continue;
    }
    AttributeProfile profile = filter_profile(docs[c], scores[c], params);
    std::string name = candidate_name(profile, vocab);
    result.candidates.push_back({std::move(name), std::move(profile), c});
  }
  return result;
}

SourceProfiles source_profiles(const DatasetBundle& bundle, const DiscoveryParams& params) {
  params.validate();
  std::vector<const VideoRecord*> videos;
  std::vector<std::string> labels;
  for (const auto& v : bundle.videos) {
    if (v.domain != Domain::Source) continue;
    videos.push_back(&v);
    labels.push_back(v.true_label.value_or(""));
  }
  std::vector<std::string> names;
  for (const auto& l : bundle.shared_labels) names.push_back(l.name);
  const auto docs = build_class_documents(videos, labels, names, params.m);
  const auto scores = tfidf_scores(docs);

  SourceProfiles out;
  for (std::size_t k = 0; k < docs.size(); ++k) {
    if (docs[k].counts.empty()) {
      out.warnings.push_back("no source profile for " + describe(docs[k].owner) + ": no source videos");
      continue;
    }
    out.class_names.push_back(names[k]);
    out.profiles.push_back(filter_profile(docs[k], scores[k], params));
  }
  return out;
}

}  // namespace autolabel
