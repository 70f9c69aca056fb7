#include "autolabel/adapter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "autolabel/binary_matrix.hpp"
#include "autolabel/error.hpp"
#include "autolabel/rng.hpp"

namespace autolabel {
namespace {

struct ForwardPass {
  std::size_t n = 0;
  std::vector<Vector> hidden;  // W v_i + b
  std::vector<double> norms;   // ||h_i||
  std::vector<Vector> videos;  // u_i
  std::vector<Vector> texts;   // unit label embedding of sample j
  std::vector<double> logits;  // n x n, z_ij
  std::vector<double> target;  // n x n, q_ij (symmetric)
};

// log-softmax of a strided slice of z
void log_softmax(const std::vector<double>& z, std::size_t start, std::size_t stride, std::size_t n,
                 std::vector<double>& out) {
  out.resize(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) top = std::max(top, z[start + k * stride]);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) total += std::exp(z[start + k * stride] - top);
  const double log_total = std::log(total) + top;
  for (std::size_t k = 0; k < n; ++k) out[k] = z[start + k * stride] - log_total;
}

// f = KL(p||q) + KL(q||p) for one distribution; writes df/dz into grad (strided)
double symmetric_kl(const std::vector<double>& logp, const std::vector<double>& q, std::size_t start,
                    std::size_t stride, std::vector<double>* grad, double scale) {
  const std::size_t n = logp.size();
  double kl_pq = 0.0;
  double kl_qp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = std::exp(logp[k]);
    const double logq = std::log(q[start + k * stride]);
    kl_pq += p * (logp[k] - logq);
    if (q[start + k * stride] > 0.0) kl_qp += q[start + k * stride] * (logq - logp[k]);
  }
  if (grad) {
    // df/dz_k = p_k log(p_k/q_k) + p_k - q_k - p_k KL(p||q)
    for (std::size_t k = 0; k < n; ++k) {
      const double p = std::exp(logp[k]);
      const double qk = q[start + k * stride];
      (*grad)[start + k * stride] += scale * (p * (logp[k] - std::log(qk)) + p - qk - p * kl_pq);
    }
  }
  return kl_pq + kl_qp;
}

ForwardPass forward(const AdapterParams& params, std::span<const TrainingSample> batch,
                    std::span<const Vector> labels, double tau, double smoothing) {
  if (batch.size() < 2) throw Error(ErrorKind::InvalidConfig, "contrastive loss needs a batch of at least 2");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidConfig, "temperature must be positive");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw Error(ErrorKind::InvalidConfig, "smoothing must lie in [0, 1)");
  ForwardPass f;
  f.n = batch.size();
  const std::size_t n = f.n;
  for (const auto& s : batch) {
    if (s.label >= labels.size()) throw Error(ErrorKind::DanglingIndex, "label " + std::to_string(s.label));
    if (labels[s.label].size() != params.dim) {
      throw Error(ErrorKind::DimensionMismatch, "label embedding dim " + std::to_string(labels[s.label].size()));
    }
    Vector h(params.dim);
    if (s.embedding.size() != params.dim) {
      throw Error(ErrorKind::DimensionMismatch, "video embedding dim " + std::to_string(s.embedding.size()));
    }
    for (std::size_t r = 0; r < params.dim; ++r) {
      double acc = params.bias[r];
      for (std::size_t c = 0; c < params.dim; ++c) acc += params.w(r, c) * s.embedding[c];
      h[r] = acc;
    }
    const double norm = l2_norm(h);
    f.videos.push_back(l2_normalize(h));
    f.norms.push_back(norm);
    f.hidden.push_back(std::move(h));
    f.texts.push_back(l2_normalize(labels[s.label]));
  }
  f.logits.resize(n * n);
  f.target.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t same = 0;
    for (std::size_t j = 0; j < n; ++j) same += batch[j].label == batch[i].label ? 1 : 0;
    for (std::size_t j = 0; j < n; ++j) {
      f.logits[i * n + j] = dot(f.videos[i], f.texts[j]) / tau;
      const double hard = batch[j].label == batch[i].label ? 1.0 / static_cast<double>(same) : 0.0;
      f.target[i * n + j] = (1.0 - smoothing) * hard + smoothing / static_cast<double>(n);
    }
  }
  return f;
}

double loss_and_logit_grad(const ForwardPass& f, std::vector<double>* dz) {
  const std::size_t n = f.n;
  const double scale = 1.0 / (4.0 * static_cast<double>(n));
  if (dz) dz->assign(n * n, 0.0);
  std::vector<double> logp;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    log_softmax(f.logits, i * n, 1, n, logp);
    total += symmetric_kl(logp, f.target, i * n, 1, dz, scale);
  }
  for (std::size_t j = 0; j < n; ++j) {
    log_softmax(f.logits, j, n, n, logp);
    total += symmetric_kl(logp, f.target, j, n, dz, scale);
  }
  return scale * total;
}

}  // namespace

AdapterParams AdapterParams::identity(std::size_t dim) {
  AdapterParams p;
  p.dim = dim;
  p.weight.assign(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) p.weight[i * dim + i] = 1.0;
  p.bias.assign(dim, 0.0);
  return p;
}

bool AdapterParams::is_identity() const noexcept { return *this == identity(dim); }

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::InvalidConfig, "learning rate must be non-negative");
  }
  if (batch_size < 2) throw Error(ErrorKind::InvalidConfig, "batch size must be >= 2");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidConfig, "temperature must be positive");
  if (!(smoothing > 0.0 && smoothing < 1.0)) throw Error(ErrorKind::InvalidConfig, "smoothing must lie in (0, 1)");
}

Vector adapt(const AdapterParams& params, std::span<const double> v) {
  if (v.size() != params.dim) {
    throw Error(ErrorKind::DimensionMismatch,
                "adapter of dim " + std::to_string(params.dim) + " applied to vector of dim " + std::to_string(v.size()));
  }
  Vector h(params.dim);
  for (std::size_t r = 0; r < params.dim; ++r) {
    double acc = params.bias[r];
    for (std::size_t c = 0; c < params.dim; ++c) acc += params.w(r, c) * v[c];
    h[r] = acc;
  }
  return l2_normalize(h);
}

double contrastive_loss(const AdapterParams& params, std::span<const TrainingSample> batch,
                        std::span<const Vector> label_embeddings, double tau, double smoothing) {
  const ForwardPass f = forward(params, batch, label_embeddings, tau, smoothing);
  return loss_and_logit_grad(f, nullptr);
}

ContrastiveGrad contrastive_grad(const AdapterParams& params, std::span<const TrainingSample> batch,
                                 std::span<const Vector> label_embeddings, double tau, double smoothing) {
  const ForwardPass f = forward(params, batch, label_embeddings, tau, smoothing);
  const std::size_t n = f.n;
  const std::size_t d = params.dim;
  std::vector<double> dz;
  ContrastiveGrad g;
  g.loss = loss_and_logit_grad(f, &dz);
  g.weight.assign(d * d, 0.0);
  g.bias.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Vector du(d, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double dc = dz[i * n + j] / tau;
      for (std::size_t k = 0; k < d; ++k) du[k] += dc * f.texts[j][k];
    }
    // through u = h / ||h||: dh = (du - (u . du) u) / ||h||
    const double radial = dot(f.videos[i], du);
    Vector dh(d);
    for (std::size_t k = 0; k < d; ++k) dh[k] = (du[k] - radial * f.videos[i][k]) / f.norms[i];
    for (std::size_t r = 0; r < d; ++r) {
      g.bias[r] += dh[r];
      for (std::size_t c = 0; c < d; ++c) g.weight[r * d + c] += dh[r] * batch[i].embedding[c];
    }
    g.per_sample.push_back(std::move(dh));
  }
  return g;
}

FitResult fit(AdapterParams params, std::span<const TrainingSample> samples, std::span<const Vector> label_embeddings,
              const TrainConfig& config) {
  config.validate();
  if (samples.empty()) throw Error(ErrorKind::ValidationError, "no training samples");
  SplitMix64 rng(config.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  // One seeded shuffle fixes the batch partition for every epoch, so the
  // epoch losses are comparable (and constant when nothing is learned).
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
    ranges.emplace_back(start, std::min(order.size(), start + config.batch_size));
  }
  if (ranges.size() > 1 && ranges.back().second - ranges.back().first == 1) {
    ranges[ranges.size() - 2].second = ranges.back().second;
    ranges.pop_back();
  }

  FitResult result;
  std::vector<TrainingSample> batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (const auto& [begin, end] : ranges) {
      if (end - begin < 2) continue;  // a single sample in total has nothing to contrast
      batch.clear();
      for (std::size_t k = begin; k < end; ++k) batch.push_back(samples[order[k]]);
      const ContrastiveGrad g = contrastive_grad(params, batch, label_embeddings, config.tau, config.smoothing);
      if (!std::isfinite(g.loss)) {
        throw Error(ErrorKind::NonFiniteLoss, "epoch " + std::to_string(epoch));
      }
      loss_sum += g.loss;
      ++batches;
      if (config.learning_rate == 0.0) continue;
      for (std::size_t k = 0; k < params.weight.size(); ++k) params.weight[k] -= config.learning_rate * g.weight[k];
      for (std::size_t k = 0; k < params.bias.size(); ++k) params.bias[k] -= config.learning_rate * g.bias[k];
    }
    result.loss_trace.push_back(batches == 0 ? 0.0 : loss_sum / static_cast<double>(batches));
  }
  result.params = std::move(params);
  return result;
}

void save_adapter(const AdapterParams& params, std::span<const double> loss_trace, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<float> w(params.weight.begin(), params.weight.end());
  std::vector<float> b(params.bias.begin(), params.bias.end());
  write_aleb(FloatMatrix(params.dim, params.dim, std::move(w)), dir / kAdapterWeightFile);
  write_aleb(FloatMatrix(1, params.dim, std::move(b)), dir / kAdapterBiasFile);
  nlohmann::json meta = {{"version", 1},
                         {"dim", params.dim},
                         {"loss_trace", std::vector<double>(loss_trace.begin(), loss_trace.end())}};
  std::ofstream out(dir / kAdapterMetaFile, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + (dir / kAdapterMetaFile).string());
  out << meta.dump(2) << '\n';
}

AdapterParams load_adapter(const std::filesystem::path& dir) {
  const FloatMatrix w = read_aleb(dir / kAdapterWeightFile);
  const FloatMatrix b = read_aleb(dir / kAdapterBiasFile);
  if (w.rows() != w.cols() || b.rows() != 1 || b.cols() != w.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "adapter checkpoint in " + dir.string() + " has inconsistent shapes");
  }
  AdapterParams p;
  p.dim = w.rows();
  p.weight.assign(w.data().begin(), w.data().end());
  p.bias.assign(b.data().begin(), b.data().end());
  for (double x : p.weight) {
    if (!std::isfinite(x)) throw Error(ErrorKind::NonFiniteValue, (dir / kAdapterWeightFile).string());
  }
  for (double x : p.bias) {
    if (!std::isfinite(x)) throw Error(ErrorKind::NonFiniteValue, (dir / kAdapterBiasFile).string());
  }
  return p;
}

}  // namespace autolabel
