#include "autolabel/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "autolabel/error.hpp"

namespace autolabel {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_finite_rows(const FloatMatrix& m, const std::string& what) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (float x : m.row(r)) {
      if (!std::isfinite(x)) {
        throw Error(ErrorKind::NonFiniteValue, what + " row " + std::to_string(r));
      }
    }
  }
}

void check_unit_norm(std::span<const float> row, const std::string& what) {
  double s = 0.0;
  for (float x : row) s += static_cast<double>(x) * x;
  const double n = std::sqrt(s);
  if (std::abs(n - 1.0) > kUnitNormTolerance) {
    throw Error(ErrorKind::ValidationError, what + " is not unit-norm (norm " + std::to_string(n) + ")");
  }
}

template <typename T>
T field(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) throw Error(ErrorKind::ValidationError, ctx + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ValidationError, ctx + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

bool operator==(const LabelEntry& a, const LabelEntry& b) noexcept {
  return a.name == b.name && a.embedding.size() == b.embedding.size() &&
         (a.embedding.empty() ||
          std::memcmp(a.embedding.data(), b.embedding.data(), a.embedding.size() * sizeof(float)) == 0);
}

std::vector<const VideoRecord*> DatasetBundle::videos_in(Domain d) const {
  std::vector<const VideoRecord*> out;
  for (const auto& v : videos) {
    if (v.domain == d) out.push_back(&v);
  }
  return out;
}

std::string normalize_token(std::string_view token) {
  std::size_t first = 0;
  std::size_t last = token.size();
  while (first < last && std::isspace(static_cast<unsigned char>(token[first]))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(token[last - 1]))) --last;
  std::string out(token.substr(first, last - first));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void validate_bundle(const DatasetBundle& b) {
  if (b.dim == 0) throw Error(ErrorKind::ValidationError, "dim must be positive");
  if (b.shared_labels.empty()) throw Error(ErrorKind::ValidationError, "at least one shared label is required");

  std::set<std::string> label_names;
  for (const auto& l : b.shared_labels) {
    if (!label_names.insert(l.name).second) {
      throw Error(ErrorKind::DuplicateId, "shared label '" + l.name + "'");
    }
    if (l.embedding.size() != b.dim) {
      throw Error(ErrorKind::ShapeMismatch, "shared label '" + l.name + "' embedding has length " +
                                                std::to_string(l.embedding.size()));
    }
    for (float x : l.embedding) {
      if (!std::isfinite(x)) throw Error(ErrorKind::NonFiniteValue, "shared label '" + l.name + "'");
    }
    check_unit_norm(l.embedding, "shared label '" + l.name + "'");
  }

  std::set<std::string> tokens;
  for (const auto& t : b.attribute_vocab) {
    if (t.empty() || t != normalize_token(t)) {
      throw Error(ErrorKind::ValidationError, "attribute token '" + t + "' is not case-folded and trimmed");
    }
    if (!tokens.insert(t).second) throw Error(ErrorKind::DuplicateId, "attribute token '" + t + "'");
  }

  const auto& att = b.attribute_embeddings;
  if (att.rows() != b.attribute_vocab.size() || att.cols() != b.dim) {
    throw Error(ErrorKind::ShapeMismatch, std::string(kAttributeEmbeddingsFile) + " is " +
                                              std::to_string(att.rows()) + "x" + std::to_string(att.cols()) +
                                              ", expected " + std::to_string(b.attribute_vocab.size()) + "x" +
                                              std::to_string(b.dim));
  }
  check_finite_rows(att, kAttributeEmbeddingsFile);
  for (std::size_t r = 0; r < att.rows(); ++r) {
    check_unit_norm(att.row(r), std::string(kAttributeEmbeddingsFile) + " row " + std::to_string(r));
  }

  const auto& vid = b.video_embeddings;
  if (vid.rows() != b.videos.size() || vid.cols() != b.dim) {
    throw Error(ErrorKind::ShapeMismatch, std::string(kVideoEmbeddingsFile) + " is " +
                                              std::to_string(vid.rows()) + "x" + std::to_string(vid.cols()) +
                                              ", manifest lists " + std::to_string(b.videos.size()) +
                                              " videos of dim " + std::to_string(b.dim));
  }
  check_finite_rows(vid, kVideoEmbeddingsFile);

  std::set<std::string> ids;
  for (const auto& v : b.videos) {
    if (!ids.insert(v.id).second) throw Error(ErrorKind::DuplicateId, "video '" + v.id + "'");
    if (v.embedding_index >= vid.rows()) {
      throw Error(ErrorKind::DanglingIndex, "video '" + v.id + "' embedding_index " +
                                                std::to_string(v.embedding_index));
    }
    if (v.frames.empty()) throw Error(ErrorKind::ValidationError, "video '" + v.id + "' has no frames");
    for (std::size_t f = 0; f < v.frames.size(); ++f) {
      if (v.frames[f].empty()) {
        throw Error(ErrorKind::ValidationError, "video '" + v.id + "' frame " + std::to_string(f) + " is empty");
      }
      for (AttributeIndex a : v.frames[f]) {
        if (a >= b.attribute_vocab.size()) {
          throw Error(ErrorKind::DanglingIndex, "video '" + v.id + "' frame " + std::to_string(f) +
                                                    " attribute " + std::to_string(a));
        }
      }
    }
    if (v.domain == Domain::Source) {
      if (!v.true_label) throw Error(ErrorKind::ValidationError, "source video '" + v.id + "' has no label");
      if (!label_names.contains(*v.true_label)) {
        throw Error(ErrorKind::DanglingIndex, "source video '" + v.id + "' label '" + *v.true_label +
                                                  "' is not a shared label");
      }
    }
  }
}

DatasetBundle load_bundle(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestFile;
  std::error_code ec;
  if (!fs::is_regular_file(manifest_path, ec)) throw Error(ErrorKind::MissingFile, manifest_path.string());
  for (const char* f : {kVideoEmbeddingsFile, kLabelEmbeddingsFile, kAttributeEmbeddingsFile}) {
    if (!fs::is_regular_file(dir / f, ec)) throw Error(ErrorKind::MissingFile, (dir / f).string());
  }

  json manifest;
  {
    std::ifstream in(manifest_path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + manifest_path.string());
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ValidationError, manifest_path.string() + ": " + e.what());
    }
  }
  const std::string ctx = manifest_path.string();
  if (!manifest.is_object()) throw Error(ErrorKind::ValidationError, ctx + ": not a JSON object");
  const auto version = field<std::int64_t>(manifest, "version", ctx);
  if (version != 1) throw Error(ErrorKind::VersionMismatch, ctx + ": version " + std::to_string(version));

  DatasetBundle b;
  const auto dim = field<std::int64_t>(manifest, "dim", ctx);
  if (dim <= 0) throw Error(ErrorKind::ValidationError, ctx + ": dim must be positive");
  b.dim = static_cast<std::size_t>(dim);

  const FloatMatrix labels = read_aleb(dir / kLabelEmbeddingsFile);
  if (labels.cols() != b.dim) {
    throw Error(ErrorKind::ShapeMismatch, std::string(kLabelEmbeddingsFile) + " has " +
                                              std::to_string(labels.cols()) + " columns, dim is " +
                                              std::to_string(b.dim));
  }
  check_finite_rows(labels, kLabelEmbeddingsFile);

  for (const auto& entry : field<json>(manifest, "shared_labels", ctx)) {
    const auto name = field<std::string>(entry, "name", ctx + " shared_labels");
    const auto idx = field<std::int64_t>(entry, "embedding_index", ctx + " shared label '" + name + "'");
    if (idx < 0 || static_cast<std::size_t>(idx) >= labels.rows()) {
      throw Error(ErrorKind::DanglingIndex, "shared label '" + name + "' embedding_index " + std::to_string(idx));
    }
    const auto row = labels.row(static_cast<std::size_t>(idx));
    b.shared_labels.push_back({name, std::vector<float>(row.begin(), row.end())});
  }

  b.attribute_vocab = field<std::vector<std::string>>(manifest, "attribute_vocab", ctx);
  b.attribute_embeddings = read_aleb(dir / kAttributeEmbeddingsFile);
  b.video_embeddings = read_aleb(dir / kVideoEmbeddingsFile);

  for (const auto& entry : field<json>(manifest, "videos", ctx)) {
    VideoRecord v;
    v.id = field<std::string>(entry, "id", ctx + " videos");
    const std::string vctx = ctx + " video '" + v.id + "'";
    const auto domain = field<std::string>(entry, "domain", vctx);
    if (domain == "source") {
      v.domain = Domain::Source;
    } else if (domain == "target") {
      v.domain = Domain::Target;
    } else {
      throw Error(ErrorKind::ValidationError, vctx + ": unknown domain '" + domain + "'");
    }
    const auto idx = field<std::int64_t>(entry, "embedding_index", vctx);
    if (idx < 0) throw Error(ErrorKind::DanglingIndex, vctx + ": negative embedding_index");
    v.embedding_index = static_cast<std::size_t>(idx);
    for (const auto& frame : field<json>(entry, "frames", vctx)) {
      std::vector<AttributeIndex> attrs;
      for (const auto& a : frame) {
        if (!a.is_number_integer() || a.get<std::int64_t>() < 0) {
          throw Error(ErrorKind::DanglingIndex, vctx + ": bad attribute index " + a.dump());
        }
        const auto value = a.get<std::int64_t>();
        if (static_cast<std::uint64_t>(value) > std::numeric_limits<AttributeIndex>::max()) {
          throw Error(ErrorKind::DanglingIndex, vctx + ": attribute index " + a.dump());
        }
        attrs.push_back(static_cast<AttributeIndex>(value));
      }
      v.frames.push_back(std::move(attrs));
    }
    if (entry.contains("label") && !entry.at("label").is_null()) {
      v.true_label = field<std::string>(entry, "label", vctx);
    }
    b.videos.push_back(std::move(v));
  }

  validate_bundle(b);
  return b;
}

void save_bundle(const DatasetBundle& b, const fs::path& dir) {
  if (b.videos.empty()) throw Error(ErrorKind::ValidationError, "bundle has no videos");
  validate_bundle(b);

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());

  json manifest;
  manifest["version"] = 1;
  manifest["dim"] = b.dim;
  manifest["shared_labels"] = json::array();
  std::vector<float> label_data;
  for (std::size_t i = 0; i < b.shared_labels.size(); ++i) {
    manifest["shared_labels"].push_back({{"name", b.shared_labels[i].name}, {"embedding_index", i}});
    label_data.insert(label_data.end(), b.shared_labels[i].embedding.begin(), b.shared_labels[i].embedding.end());
  }
  manifest["attribute_vocab"] = b.attribute_vocab;
  manifest["videos"] = json::array();
  for (const auto& v : b.videos) {
    json entry = {{"id", v.id},
                  {"domain", v.domain == Domain::Source ? "source" : "target"},
                  {"embedding_index", v.embedding_index},
                  {"frames", v.frames}};
    if (v.true_label) entry["label"] = *v.true_label;
    manifest["videos"].push_back(std::move(entry));
  }

  write_aleb(FloatMatrix(b.shared_labels.size(), b.dim, std::move(label_data)), dir / kLabelEmbeddingsFile);
  write_aleb(b.attribute_embeddings, dir / kAttributeEmbeddingsFile);
  write_aleb(b.video_embeddings, dir / kVideoEmbeddingsFile);

  std::ofstream out(dir / kManifestFile, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + (dir / kManifestFile).string() + " for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + (dir / kManifestFile).string());
}

}  // namespace autolabel
