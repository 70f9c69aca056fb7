// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes within its time budget.
//
//   autolabel_acceptance [--write-golden]
//
// --write-golden records the end-to-end HOS values to the golden file instead
// of comparing against it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "autolabel/adapter.hpp"
#include "autolabel/artifacts.hpp"
#include "autolabel/clustering.hpp"
#include "autolabel/discovery.hpp"
#include "autolabel/matching.hpp"
#include "autolabel/metrics.hpp"
#include "autolabel/pipeline.hpp"
#include "autolabel/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace autolabel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

bool g_write_golden = false;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome metric_arithmetic() {
  const struct {
    double os, unk, expected;
  } rows[] = {{82.5, 94.3, 88.0}, {82.9, 88.2, 85.5}, {26.1, 52.3, 34.8}};
  Outcome o{true, ""};
  for (const auto& r : rows) {
    const double h = hos(r.os, r.unk);
    o.pass = o.pass && std::abs(h - r.expected) <= 0.05;
    o.detail += fmt("%.2f ", h);
  }
  return o;
}

Outcome sim_oracle() {
  SplitMix64 r(1);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto draw = [&] {
      std::vector<AttributeIndex> all(12);
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<AttributeIndex>(i);
      r.shuffle(std::span<AttributeIndex>(all));
      all.resize(1 + r.below(8));
      return all;
    };
    const auto s = draw();
    const auto t = draw();
    if (attribute_sim(s, t) != oracle::sim(s, t)) ++mismatches;
  }
  const bool fixed = attribute_sim(std::vector<AttributeIndex>{0, 1, 2}, std::vector<AttributeIndex>{0, 1, 2}) == 1.0 &&
                     attribute_sim(std::vector<AttributeIndex>{0, 1}, std::vector<AttributeIndex>{1, 0}) == 0.0;
  return {mismatches == 0 && fixed, std::to_string(mismatches) + " mismatches of 1000"};
}

Outcome tfidf_hand() {
  const std::vector<AttributeDocument> docs{{std::size_t{0}, {{0, 2}, {1, 1}}}, {std::size_t{1}, {{1, 3}, {2, 1}}}};
  const auto s = tfidf_scores(docs);
  const double a = s[0].at(0);
  const bool ok = std::abs(a - 0.4621) <= 1e-4 && s[0].at(1) == 0.0 && s[1].at(1) == 0.0;
  return {ok, fmt("tfidf(a,d1)=%.6f", a)};
}

Outcome kmeans_properties() {
  SplitMix64 r(2);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + r.below(80);
    const std::size_t d = 2 + r.below(10);
    std::vector<Vector> pts(n, Vector(d));
    for (auto& p : pts) {
      for (auto& x : p) x = r.gaussian();
      p = l2_normalize(p);
    }
    const ClusterModel m = kmeans_fit(pts, {1 + r.below(10), r.next(), 100});
    for (std::size_t i = 1; i < m.inertia_trace.size(); ++i) {
      if (m.inertia_trace[i] > m.inertia_trace[i - 1]) ++violations;
    }
  }
  const auto s = generate(fixtures::clean_synth(3, 2, 10, 0));
  std::vector<Vector> pts;
  std::vector<std::size_t> truth;
  std::map<std::string, std::size_t> ids;
  for (const auto* v : s.bundle.videos_in(Domain::Target)) {
    pts.push_back(to_vector(s.bundle.embedding_of(*v)));
    truth.push_back(ids.emplace(s.truth.video_class.at(v->id), ids.size()).first->second);
  }
  const double ari = oracle::adjusted_rand_index(kmeans_fit(pts, {5, 0, 100}).assignments, truth);
  return {violations == 0 && ari >= 0.9, std::to_string(violations) + " increases, ARI " + fmt("%.4f", ari)};
}

Outcome gradient_check() {
  const std::size_t d = 8;
  const std::size_t n = 4;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SplitMix64 r(seed);
    auto unit = [&] {
      Vector v(d);
      for (auto& x : v) x = r.gaussian();
      return l2_normalize(v);
    };
    AdapterParams p = AdapterParams::identity(d);
    for (auto& w : p.weight) w += 0.3 * r.gaussian();
    for (auto& b : p.bias) b = 0.3 * r.gaussian();
    std::vector<Vector> labels{unit(), unit(), unit()};
    std::vector<TrainingSample> batch;
    for (std::size_t i = 0; i < n; ++i) batch.push_back({unit(), r.below(labels.size())});
    const double tau = kDefaultTau;
    const double eps = 1e-3;
    const ContrastiveGrad g = contrastive_grad(p, batch, labels, tau, eps);
    std::vector<double> x = p.weight;
    x.insert(x.end(), p.bias.begin(), p.bias.end());
    const auto numeric = oracle::central_difference(
        [&](const std::vector<double>& v) {
          AdapterParams q = p;
          std::copy(v.begin(), v.begin() + static_cast<long>(d * d), q.weight.begin());
          std::copy(v.begin() + static_cast<long>(d * d), v.end(), q.bias.begin());
          return contrastive_loss(q, batch, labels, tau, eps);
        },
        x, 1e-5);
    std::vector<double> analytic = g.weight;
    analytic.insert(analytic.end(), g.bias.begin(), g.bias.end());
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-6});
      worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
    }
  }
  return {worst <= 1e-4, "max relative error " + fmt("%.3e", worst)};
}

Outcome identity_equivalence() {
  const auto s = generate(fixtures::clean_synth(4, 3, 20, 42));
  PipelineConfig c;
  c.seed = 42;
  c.train_enabled = false;
  const auto r = run_pipeline(c, s.bundle, &s.truth);

  const auto targets = s.bundle.videos_in(Domain::Target);
  std::vector<Vector> points;
  for (const auto* v : targets) points.push_back(to_vector(s.bundle.embedding_of(*v)));
  const ClusterModel model =
      kmeans_fit(points, {2 * s.bundle.shared_labels.size(), derive_seed(c.seed, 1000), c.max_iter});
  const auto found = discover_candidates(targets, model, s.bundle.attribute_vocab, c.discovery);
  const auto src = source_profiles(s.bundle, c.discovery);
  const auto sim = build_similarity_matrix(src.class_names, src.profiles, found.candidates);
  const auto labels = extend_label_set(s.bundle, match_and_prune(sim, c.gamma, found.candidates), c.tau);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!(predict(*targets[i], s.bundle, labels) == r.predictions[i])) ++differ;
  }
  return {differ == 0 && r.adapter.is_identity() && r.predictions.size() == targets.size(),
          std::to_string(differ) + " of " + std::to_string(targets.size()) + " predictions differ"};
}

Outcome end_to_end_ordering() {
  const auto s = generate(fixtures::clean_synth(4, 3, 20, 42));
  PipelineConfig c;
  c.seed = 42;
  const auto rows = compare_strategies(c, s.bundle, &s.truth);
  std::map<std::string, double> hos_by;
  for (const auto& r : rows) {
    if (r.metrics) hos_by[std::string(to_string(r.strategy))] = r.metrics->hos;
  }
  const double unk = rows[2].metrics->unk;
  bool ok = hos_by.at("oracle") >= hos_by.at("autolabel") && hos_by.at("autolabel") >= hos_by.at("threshold") &&
            unk >= 80.0;
  std::string detail = "HOS oracle " + fmt("%.1f", hos_by.at("oracle")) + ", autolabel " +
                       fmt("%.1f", hos_by.at("autolabel")) + ", threshold " + fmt("%.1f", hos_by.at("threshold")) +
                       "; UNK " + fmt("%.1f", unk);

  nlohmann::json golden_now = nlohmann::json::object();
  for (const auto& [k, v] : hos_by) golden_now[k] = v;
  const std::filesystem::path golden = AUTOLABEL_GOLDEN_DIR "/e2e_hos.json";
  if (g_write_golden) {
    std::ofstream(golden) << golden_now.dump(2) << '\n';
    detail += "; golden written";
  } else if (std::filesystem::exists(golden)) {
    std::ifstream in(golden);
    const auto recorded = nlohmann::json::parse(in);
    bool same = recorded.size() == golden_now.size();
    for (const auto& [k, v] : golden_now.items()) {
      same = same && recorded.contains(k) && std::abs(recorded[k].get<double>() - v.get<double>()) <= 1e-9;
    }
    ok = ok && same;
    detail += same ? "; matches golden" : "; differs from golden";
  } else {
    detail += "; no golden recorded";
  }
  return {ok, detail};
}

Outcome determinism() {
  const auto s = generate(fixtures::clean_synth(4, 3, 10, 7));
  oracle::TempDir a;
  oracle::TempDir b;
  PipelineConfig c;
  c.seed = 7;
  c.outer_epochs = 2;
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  c.output = a.path();
  run_pipeline(c, s.bundle, &s.truth);
  c.output = b.path();
  run_pipeline(c, s.bundle, &s.truth);
  const std::string ma = slurp(a.path() / artifacts::kMetricsFile);
  const std::string mb = slurp(b.path() / artifacts::kMetricsFile);
  return {!ma.empty() && ma == mb, std::to_string(ma.size()) + " bytes"};
}

Outcome pruning_monotonicity() {
  SplitMix64 r(3);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    SimilarityMatrix s;
    std::vector<CandidateLabel> cands;
    const std::size_t rows = 1 + r.below(8);
    const std::size_t cols = 1 + r.below(12);
    for (std::size_t j = 0; j < cols; ++j) {
      s.col_clusters.push_back(j);
      cands.push_back({"c" + std::to_string(j), {j, {{static_cast<AttributeIndex>(j), 1.0, 1}}}, j});
    }
    for (std::size_t i = 0; i < rows; ++i) {
      s.row_labels.push_back("r" + std::to_string(i));
      auto& row = s.values.emplace_back();
      for (std::size_t j = 0; j < cols; ++j) row.push_back(r.uniform());
    }
    std::set<std::size_t> low;
    std::set<std::size_t> high;
    for (const auto& c : match_and_prune(s, 0.3, cands)) low.insert(c.source_cluster);
    for (const auto& c : match_and_prune(s, 0.7, cands)) high.insert(c.source_cluster);
    if (!std::includes(high.begin(), high.end(), low.begin(), low.end())) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations of 100"};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--write-golden") g_write_golden = true;
  }
  const std::vector<Criterion> criteria = {
      {"metric arithmetic (HOS rows)", 1.0, metric_arithmetic},
      {"sim oracle, 1000 random pairs", 5.0, sim_oracle},
      {"tf-idf hand corpus", 1.0, tfidf_hand},
      {"k-means monotone inertia and ARI", 10.0, kmeans_properties},
      {"contrastive gradient vs finite differences", 10.0, gradient_check},
      {"identity adapter equivalence", 10.0, identity_equivalence},
      {"end-to-end ordering on clean synth", 60.0, end_to_end_ordering},
      {"determinism of metrics.json", 30.0, determinism},
      {"pruning monotonicity in gamma", 1.0, pruning_monotonicity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs <= c.budget_seconds;
    if (!pass) ++failures;
    std::printf("%s  %-45s %7.3fs / %4.0fs  %s\n", pass ? "PASS" : "FAIL", c.name.c_str(), secs, c.budget_seconds,
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
