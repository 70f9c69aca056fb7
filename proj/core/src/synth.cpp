#include "autolabel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "autolabel/error.hpp"
#include "autolabel/rng.hpp"

namespace autolabel {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02zu", prefix, i);
  return buf;
}

Vector gaussian_vector(SplitMix64& rng, std::size_t dim, double sigma) {
  Vector v(dim);
  for (double& x : v) x = sigma * rng.gaussian();
  return v;
}

Vector perturbed_unit(SplitMix64& rng, const Vector& center, double sigma) {
  Vector v = gaussian_vector(rng, center.size(), sigma);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += center[i];
  return l2_normalize(v);
}

void append_row(std::vector<float>& data, const Vector& v) {
  for (double x : v) data.push_back(static_cast<float>(x));
}

// Distractor not yet present in the frame; the vocabulary is checked to be
// larger than m so this terminates.
AttributeIndex draw_distractor(SplitMix64& rng, AttributeIndex first, std::size_t count,
                               const std::vector<AttributeIndex>& frame) {
  for (;;) {
    const auto a = static_cast<AttributeIndex>(first + rng.below(count));
    if (std::find(frame.begin(), frame.end(), a) == frame.end()) return a;
  }
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidConfig, "synth: " + what); };
  if (dim < 2) fail("dim must be >= 2");
  if (shared_classes < 2) fail("K must be >= 2");
  if (private_classes < 1) fail("M must be >= 1");
  if (videos_per_class < 2) fail("videos per class must be >= 2");
  if (frames_per_video < 1) fail("frames per video must be >= 1");
  if (attributes_per_frame < 1) fail("attributes per frame must be >= 1");
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) fail("sigma must be > 0");
  if (salient_per_class < 1) fail("salient attributes per class must be >= 1");
  if (distractor_vocab < attributes_per_frame) fail("distractor vocabulary must hold at least m tokens");
  if (!(distractor_probability >= 0.0 && distractor_probability < 1.0)) fail("p_distract must be in [0, 1)");
}

SynthOutput generate(const SynthConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(cfg.seed);
  const std::size_t classes = cfg.shared_classes + cfg.private_classes;
  const std::size_t d = cfg.dim;

  std::vector<Vector> prototypes;
  const std::size_t budget = 10 * classes * classes;
  std::size_t tries = 0;
  while (prototypes.size() < classes) {
    if (tries++ >= budget) {
      throw Error(ErrorKind::RejectionExceeded, "could not draw " + std::to_string(classes) +
                                                    " quasi-orthogonal prototypes in dim " + std::to_string(d));
    }
    Vector candidate = l2_normalize(gaussian_vector(rng, d, 1.0));
    const bool ok = std::all_of(prototypes.begin(), prototypes.end(), [&](const Vector& p) {
      return std::abs(dot(p, candidate)) < kMaxPrototypeCosine;
    });
    if (ok) prototypes.push_back(std::move(candidate));
  }

  SynthOutput out;
  GroundTruth& truth = out.truth;
  DatasetBundle& b = out.bundle;
  b.dim = d;

  std::vector<std::string> class_names;
  for (std::size_t c = 0; c < cfg.shared_classes; ++c) class_names.push_back(numbered("shared_", c));
  for (std::size_t c = 0; c < cfg.private_classes; ++c) class_names.push_back(numbered("private_", c));
  truth.shared_classes.assign(class_names.begin(), class_names.begin() + cfg.shared_classes);
  truth.private_classes.assign(class_names.begin() + cfg.shared_classes, class_names.end());

  // Vocabulary: salient tokens class-major, then distractors.
  std::vector<float> attr_data;
  for (std::size_t c = 0; c < classes; ++c) {
    auto& salient = truth.salient[class_names[c]];
    for (std::size_t j = 0; j < cfg.salient_per_class; ++j) {
      salient.push_back(static_cast<AttributeIndex>(b.attribute_vocab.size()));
      b.attribute_vocab.push_back("c" + std::to_string(c) + "_attr" + std::to_string(j));
      append_row(attr_data, perturbed_unit(rng, prototypes[c], cfg.noise_sigma / 2.0));
    }
  }
  const auto first_distractor = static_cast<AttributeIndex>(b.attribute_vocab.size());
  for (std::size_t j = 0; j < cfg.distractor_vocab; ++j) {
    b.attribute_vocab.push_back("distractor" + std::to_string(j));
    append_row(attr_data, l2_normalize(gaussian_vector(rng, d, 1.0)));
  }
  b.attribute_embeddings = FloatMatrix(b.attribute_vocab.size(), d, std::move(attr_data));

  for (std::size_t c = 0; c < cfg.shared_classes; ++c) {
    std::vector<float> row;
    append_row(row, prototypes[c]);
    b.shared_labels.push_back({class_names[c], std::move(row)});
  }
  std::vector<float> private_data;
  for (std::size_t c = cfg.shared_classes; c < classes; ++c) append_row(private_data, prototypes[c]);
  truth.private_prototypes = FloatMatrix(cfg.private_classes, d, std::move(private_data));

  std::vector<float> video_data;
  std::size_t source_count = 0;
  std::size_t target_count = 0;
  auto add_video = [&](std::size_t c, Domain domain) {
    VideoRecord v;
    v.id = domain == Domain::Source ? "src_" + std::to_string(source_count++)
                                    : "tgt_" + std::to_string(target_count++);
    v.domain = domain;
    v.embedding_index = b.videos.size();
    v.true_label = class_names[c];
    append_row(video_data, perturbed_unit(rng, prototypes[c], cfg.noise_sigma));
    const auto& salient = truth.salient[class_names[c]];
    for (std::size_t f = 0; f < cfg.frames_per_video; ++f) {
      std::vector<AttributeIndex> frame;
      for (AttributeIndex s : salient) {
        if (rng.uniform() < cfg.distractor_probability) {
          frame.push_back(draw_distractor(rng, first_distractor, cfg.distractor_vocab, frame));
        }
        frame.push_back(s);
      }
      while (frame.size() < cfg.attributes_per_frame) {
        frame.push_back(draw_distractor(rng, first_distractor, cfg.distractor_vocab, frame));
      }
      frame.resize(cfg.attributes_per_frame);
      v.frames.push_back(std::move(frame));
    }
    truth.video_class[v.id] = class_names[c];
    b.videos.push_back(std::move(v));
  };
  for (std::size_t c = 0; c < cfg.shared_classes; ++c) {
    for (std::size_t i = 0; i < cfg.videos_per_class; ++i) add_video(c, Domain::Source);
  }
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < cfg.videos_per_class; ++i) add_video(c, Domain::Target);
  }
  b.video_embeddings = FloatMatrix(b.videos.size(), d, std::move(video_data));

  validate_bundle(b);
  return out;
}

void save_ground_truth(const GroundTruth& truth, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  json j;
  j["videos"] = truth.video_class;
  j["salient_attributes"] = truth.salient;
  j["shared_classes"] = truth.shared_classes;
  j["private_classes"] = truth.private_classes;
  std::ofstream out(dir / kGroundTruthFile, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + (dir / kGroundTruthFile).string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + (dir / kGroundTruthFile).string());
  if (truth.private_prototypes.rows() > 0) write_aleb(truth.private_prototypes, dir / kPrivatePrototypesFile);
}

GroundTruth load_ground_truth(const fs::path& where) {
  const fs::path dir = fs::is_regular_file(where) ? where.parent_path() : where;
  const fs::path path = fs::is_regular_file(where) ? where : dir / kGroundTruthFile;
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  GroundTruth truth;
  try {
    json j;
    in >> j;
    truth.video_class = j.at("videos").get<std::map<std::string, std::string>>();
    if (j.contains("salient_attributes")) {
      truth.salient = j.at("salient_attributes").get<std::map<std::string, std::vector<AttributeIndex>>>();
    }
    if (j.contains("shared_classes")) truth.shared_classes = j.at("shared_classes").get<std::vector<std::string>>();
    if (j.contains("private_classes")) {
      truth.private_classes = j.at("private_classes").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ValidationError, path.string() + ": " + e.what());
  }
  std::error_code ec;
  if (fs::is_regular_file(dir / kPrivatePrototypesFile, ec)) {
    truth.private_prototypes = read_aleb(dir / kPrivatePrototypesFile);
    if (truth.private_prototypes.rows() != truth.private_classes.size()) {
      throw Error(ErrorKind::ShapeMismatch, std::string(kPrivatePrototypesFile) + " rows do not match private_classes");
    }
  }
  return truth;
}

}  // namespace autolabel
