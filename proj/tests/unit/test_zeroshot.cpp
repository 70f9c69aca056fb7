#include <gtest/gtest.h>

#include <cmath>

#include "autolabel/discovery.hpp"
#include "autolabel/error.hpp"
#include "autolabel/rng.hpp"
#include "autolabel/synth.hpp"
#include "autolabel/zeroshot.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace autolabel;

namespace {

ExtendedLabelSet basis_set(std::size_t shared, std::size_t priv, std::size_t dim) {
  ExtendedLabelSet s;
  s.tau = kDefaultTau;
  for (std::size_t i = 0; i < shared + priv; ++i) {
    Vector e(dim, 0.0);
    e[i] = 1.0;
    LabelEmbedding l{(i < shared ? "known" : "new") + std::to_string(i), e};
    (i < shared ? s.shared : s.private_labels).push_back(l);
  }
  return s;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::StageFailed;
}

}  // namespace

TEST(Cosine, KnownValues) {
  const Vector e1{1.0, 0.0};
  EXPECT_DOUBLE_EQ(cosine(e1, e1), 1.0);
  EXPECT_DOUBLE_EQ(cosine(e1, Vector{0.0, 1.0}), 0.0);
  EXPECT_NEAR(cosine(Vector{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}, e1), 0.7071, 1e-4);
  EXPECT_EQ(kind_of([] { cosine(Vector{0.0, 0.0}, Vector{1.0, 0.0}); }), ErrorKind::DegenerateVector);
}

TEST(Softmax, KnownValues) {
  const Vector v{1.0, 0.0};
  EXPECT_EQ(softmax_scores(v, std::vector<Vector>{{0.0, 1.0}}, 0.01), (std::vector<double>{1.0}));
  const auto p = softmax_scores(v, std::vector<Vector>{{1.0, 0.0}, {0.0, 1.0}}, 0.01);
  EXPECT_NEAR(p[0], 1.0, 1e-9);
  const auto flat = softmax_scores(v, std::vector<Vector>{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}}, 1e6);
  for (double x : flat) EXPECT_NEAR(x, 1.0 / 3.0, 1e-6);
}

TEST(Softmax, SumsToOneOnRandomInputs) {
  SplitMix64 r(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vector> labels(1 + r.below(10), Vector(6));
    for (auto& l : labels) {
      for (auto& x : l) x = r.gaussian();
    }
    Vector v(6);
    for (auto& x : v) x = r.gaussian();
    const auto p = softmax_scores(v, labels, 0.01 + r.uniform());
    double sum = 0.0;
    for (double x : p) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(ComposeLabel, SingleAttributeIsItsEmbedding) {
  const FloatMatrix attrs(2, 3, {0.0f, 1.0f, 0.0f, 0.6f, 0.8f, 0.0f});
  const AttributeIndex one[] = {1};
  const Vector v = compose_label_embedding(one, attrs);
  EXPECT_NEAR(v[0], 0.6, 1e-7);
  EXPECT_NEAR(v[1], 0.8, 1e-7);
}

TEST(ComposeLabel, OppositeVectorsAreDegenerate) {
  const FloatMatrix attrs(2, 2, {1.0f, 0.0f, -1.0f, 0.0f});
  const AttributeIndex both[] = {0, 1};
  EXPECT_EQ(kind_of([&] { compose_label_embedding(both, attrs); }), ErrorKind::DegenerateVector);
  EXPECT_EQ(kind_of([&] { compose_label_embedding(std::span<const AttributeIndex>{}, attrs); }),
            ErrorKind::EmptyProfile);
  const AttributeIndex dangling[] = {5};
  EXPECT_EQ(kind_of([&] { compose_label_embedding(dangling, attrs); }), ErrorKind::DanglingIndex);
}

TEST(ComposeLabel, PrivateSalientProfileLandsNearItsPrototype) {
  const auto s = generate(fixtures::clean_synth(4, 3, 10, 42));
  for (std::size_t c = 0; c < s.truth.private_classes.size(); ++c) {
    const auto& salient = s.truth.salient.at(s.truth.private_classes[c]);
    const Vector label = compose_label_embedding(salient, s.bundle.attribute_embeddings);
    const double own = oracle::cosine(label, to_vector(s.truth.private_prototypes.row(c)));
    for (const auto& shared : s.bundle.shared_labels) EXPECT_GT(own, oracle::cosine(label, to_vector(shared.embedding)));
  }
}

TEST(Predict, PicksEqualEmbedding) {
  const auto set = basis_set(3, 2, 5);
  const Prediction known = predict("v", Vector{0.0, 0.0, 1.0, 0.0, 0.0}, set);
  EXPECT_EQ(known.label_index, 2u);
  EXPECT_FALSE(known.is_private);
  const Prediction priv = predict("v", Vector{0.0, 0.0, 0.0, 0.0, 1.0}, set);
  EXPECT_EQ(priv.label_index, 4u);
  EXPECT_EQ(priv.label_name, "new4");
  EXPECT_TRUE(priv.is_private);
}

TEST(Predict, MatchesExhaustiveScanOnSynthTargets) {
  const auto s = generate(fixtures::clean_synth(4, 3, 10, 9));
  const auto shared = shared_label_embeddings(s.bundle);
  const auto set = oracle_extend(shared, &s.truth, kDefaultTau);
  const auto labels = set.embeddings();
  for (const auto* v : s.bundle.videos_in(Domain::Target)) {
    const Prediction p = predict(*v, s.bundle, set);
    EXPECT_EQ(p.label_index, oracle::argmax_cosine(to_vector(s.bundle.embedding_of(*v)), labels)) << v->id;
  }
}

TEST(ExtendLabelSet, AddsOneLabelPerDistinctCandidate) {
  const auto s = generate(fixtures::clean_synth(4, 2, 5, 1));
  std::vector<CandidateLabel> cands;
  for (std::size_t c = 0; c < 2; ++c) {
    AttributeProfile p{c, {}};
    for (auto a : s.truth.salient.at(s.truth.private_classes[c])) p.entries.push_back({a, 1.0, 1});
    cands.push_back({candidate_name(p, s.bundle.attribute_vocab), p, c});
  }
  cands.push_back(cands[0]);
  const auto set = extend_label_set(s.bundle, cands, kDefaultTau);
  EXPECT_EQ(set.size(), 4u + 2u);
  EXPECT_EQ(set.at(4).name, cands[0].name);
}

TEST(ThresholdBaseline, RejectsBelowThreshold) {
  const std::vector<LabelEmbedding> shared{{"a", {1.0, 0.0}}, {"b", {0.0, 1.0}}};
  const Vector close{0.95, std::sqrt(1.0 - 0.95 * 0.95)};
  const Vector far{0.85, std::sqrt(1.0 - 0.85 * 0.85)};
  const Prediction k = baseline_threshold_predict("v", close, shared, 0.9, kDefaultTau);
  EXPECT_FALSE(k.is_private);
  EXPECT_EQ(k.label_name, "a");
  const Prediction u = baseline_threshold_predict("v", far, shared, 0.9, kDefaultTau);
  EXPECT_TRUE(u.is_private);
  EXPECT_EQ(u.label_index, 2u);
  EXPECT_EQ(u.label_name, kUnknownLabel);
}

TEST(ThresholdBaseline, UnknownRecallGrowsWithThreshold) {
  const auto s = generate(fixtures::clean_synth(4, 3, 10, 4));
  const auto shared = shared_label_embeddings(s.bundle);
  std::size_t previous = 0;
  for (double th = 0.0; th <= 1.0; th += 0.05) {
    std::size_t rejected = 0;
    for (const auto* v : s.bundle.videos_in(Domain::Target)) {
      if (s.truth.video_class.at(v->id).starts_with("shared")) continue;
      const auto emb = to_vector(s.bundle.embedding_of(*v));
      rejected += baseline_threshold_predict(v->id, emb, shared, th, kDefaultTau).is_private ? 1 : 0;
    }
    EXPECT_GE(rejected, previous) << "threshold " << th;
    previous = rejected;
  }
}

TEST(InstanceExtension, KnownAndUnknownCases) {
  const auto s = generate(fixtures::clean_synth(3, 1, 5, 2));
  const auto shared = shared_label_embeddings(s.bundle);
  const std::size_t k = shared.size();

  VideoRecord on_class{"x", Domain::Target, 0, {s.truth.salient.at("shared_00")}, std::nullopt};
  const Prediction known =
      baseline_instance_extension_predict(on_class, shared[0].embedding, s.bundle, shared, 5, kDefaultTau);
  EXPECT_FALSE(known.is_private);
  EXPECT_EQ(known.label_index, 0u);

  const auto& priv = s.truth.salient.at("private_00");
  VideoRecord off_class{"y", Domain::Target, 0, {priv}, std::nullopt};
  const Vector proto = to_vector(s.truth.private_prototypes.row(0));
  const Prediction unknown = baseline_instance_extension_predict(off_class, proto, s.bundle, shared, 5, kDefaultTau);
  EXPECT_TRUE(unknown.is_private);
  EXPECT_GE(unknown.label_index, k);
  EXPECT_EQ(unknown.label_name, s.bundle.attribute_vocab[unknown.label_index - k]);

  VideoRecord bare{"z", Domain::Target, 0, {}, std::nullopt};
  const Prediction closed = baseline_instance_extension_predict(bare, proto, s.bundle, shared, 5, kDefaultTau);
  EXPECT_FALSE(closed.is_private);
  EXPECT_EQ(closed.label_index, oracle::argmax_cosine(proto, [&] {
              std::vector<Vector> l;
              for (const auto& e : shared) l.push_back(e.embedding);
              return l;
            }()));
}

TEST(Oracle, ExtendsWithTruePrototypes) {
  SynthConfig c = fixtures::clean_synth(3, 2, 4, 8);
  const auto s = generate(c);
  const auto set = oracle_extend(shared_label_embeddings(s.bundle), &s.truth, kDefaultTau);
  EXPECT_EQ(set.size(), 5u);
  EXPECT_EQ(set.private_labels[1].name, "private_01");
  EXPECT_EQ(kind_of([&] { oracle_extend(shared_label_embeddings(s.bundle), nullptr, kDefaultTau); }),
            ErrorKind::GroundTruthUnavailable);
}
