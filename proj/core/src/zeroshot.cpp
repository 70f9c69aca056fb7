#include "autolabel/zeroshot.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "autolabel/error.hpp"

namespace autolabel {
namespace {

std::size_t argmax(const std::vector<double>& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidConfig, "temperature must be positive");
}

}  // namespace

const LabelEmbedding& ExtendedLabelSet::at(std::size_t i) const {
  return i < shared.size() ? shared.at(i) : private_labels.at(i - shared.size());
}

std::vector<Vector> ExtendedLabelSet::embeddings() const {
  std::vector<Vector> out;
  out.reserve(size());
  for (const auto& l : shared) out.push_back(l.embedding);
  for (const auto& l : private_labels) out.push_back(l.embedding);
  return out;
}

double cosine(std::span<const double> v, std::span<const double> w) {
  const double nv = l2_norm(v);
  const double nw = l2_norm(w);
  if (!(nv > kDegenerateNorm) || !(nw > kDegenerateNorm)) {
    throw Error(ErrorKind::DegenerateVector, "cosine of a zero-length vector");
  }
  return std::clamp(dot(v, w) / (nv * nw), -1.0, 1.0);
}

std::vector<double> softmax_scores(std::span<const double> video, std::span<const Vector> labels, double tau) {
  check_tau(tau);
  if (labels.empty()) throw Error(ErrorKind::InvalidConfig, "softmax over an empty label set");
  std::vector<double> logits(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) logits[j] = cosine(video, labels[j]) / tau;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - top);
    total += z;
  }
  for (double& z : logits) z /= total;
  return logits;
}

std::vector<double> softmax_scores(std::span<const double> video, const ExtendedLabelSet& labels) {
  return softmax_scores(video, labels.embeddings(), labels.tau);
}

Vector compose_label_embedding(std::span<const AttributeIndex> attributes, const FloatMatrix& attribute_embeddings) {
  if (attributes.empty()) throw Error(ErrorKind::EmptyProfile, "cannot compose an embedding from no attributes");
  Vector mean(attribute_embeddings.cols(), 0.0);
  for (AttributeIndex a : attributes) {
    if (a >= attribute_embeddings.rows()) throw Error(ErrorKind::DanglingIndex, "attribute " + std::to_string(a));
    const auto row = attribute_embeddings.row(a);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += row[j];
  }
  for (double& x : mean) x /= static_cast<double>(attributes.size());
  return l2_normalize(mean);
}

Vector compose_label_embedding(const AttributeProfile& profile, const FloatMatrix& attribute_embeddings) {
  const auto attrs = profile.attributes();
  return compose_label_embedding(attrs, attribute_embeddings);
}

std::vector<LabelEmbedding> shared_label_embeddings(const DatasetBundle& bundle) {
  std::vector<LabelEmbedding> out;
  for (const auto& l : bundle.shared_labels) out.push_back({l.name, to_vector(l.embedding)});
  return out;
}

ExtendedLabelSet extend_label_set(const DatasetBundle& bundle, std::span<const CandidateLabel> candidates,
                                  double tau) {
  check_tau(tau);
  ExtendedLabelSet set;
  set.tau = tau;
  set.shared = shared_label_embeddings(bundle);
  std::set<std::string> names;
  for (const auto& l : set.shared) names.insert(l.name);
  for (const auto& c : candidates) {
    if (!names.insert(c.name).second) continue;
    set.private_labels.push_back({c.name, compose_label_embedding(c.profile, bundle.attribute_embeddings)});
    set.candidates.push_back(c);
  }
  return set;
}

Prediction predict(const std::string& video_id, std::span<const double> embedding, const ExtendedLabelSet& labels) {
  const auto p = softmax_scores(embedding, labels);
  const std::size_t best = argmax(p);
  return {video_id, best, labels.at(best).name, p[best], best >= labels.shared.size()};
}

Prediction predict(const VideoRecord& video, const DatasetBundle& bundle, const ExtendedLabelSet& labels) {
  const Vector v = to_vector(bundle.embedding_of(video));
  return predict(video.id, v, labels);
}

Prediction baseline_threshold_predict(const std::string& video_id, std::span<const double> embedding,
                                      std::span<const LabelEmbedding> shared, double threshold, double tau) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) throw Error(ErrorKind::InvalidConfig, "threshold must lie in [-1, 1]");
  std::vector<Vector> labels;
  for (const auto& l : shared) labels.push_back(l.embedding);
  const auto p = softmax_scores(embedding, labels, tau);
  const std::size_t best = argmax(p);
  const double best_cos = cosine(embedding, labels[best]);
  if (best_cos < threshold) return {video_id, shared.size(), kUnknownLabel, p[best], true};
  return {video_id, best, shared[best].name, p[best], false};
}

Prediction baseline_instance_extension_predict(const VideoRecord& video, std::span<const double> embedding,
                                               const DatasetBundle& bundle, std::span<const LabelEmbedding> shared,
                                               std::size_t m, double tau) {
  std::vector<Vector> labels;
  for (const auto& l : shared) labels.push_back(l.embedding);
  const auto attrs = video_attributes(video, m);
  for (AttributeIndex a : attrs) {
    const AttributeIndex single[] = {a};
    labels.push_back(compose_label_embedding(single, bundle.attribute_embeddings));
  }
  const auto p = softmax_scores(embedding, labels, tau);
  const std::size_t best = argmax(p);
  if (best < shared.size()) return {video.id, best, shared[best].name, p[best], false};
  const AttributeIndex a = attrs[best - shared.size()];
  return {video.id, shared.size() + a, bundle.attribute_vocab[a], p[best], true};
}

ExtendedLabelSet oracle_extend(std::span<const LabelEmbedding> shared, const GroundTruth* truth, double tau) {
  check_tau(tau);
  if (truth == nullptr || truth->private_prototypes.rows() == 0 ||
      truth->private_prototypes.rows() != truth->private_classes.size()) {
    throw Error(ErrorKind::GroundTruthUnavailable, "oracle extension needs the true private-class prototypes");
  }
  ExtendedLabelSet set;
  set.tau = tau;
  set.shared.assign(shared.begin(), shared.end());
  for (std::size_t i = 0; i < truth->private_classes.size(); ++i) {
    set.private_labels.push_back(
        {truth->private_classes[i], l2_normalize(to_vector(truth->private_prototypes.row(i)))});
  }
  return set;
}

}  // namespace autolabel
