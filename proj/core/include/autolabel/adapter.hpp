#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "autolabel/vector_ops.hpp"

namespace autolabel {

/// Linear map on video embeddings: adapt(v) = normalize(W v + b).
struct AdapterParams {
  std::size_t dim = 0;
  std::vector<double> weight;  // dim x dim, row-major
  Vector bias;

  static AdapterParams identity(std::size_t dim);

  double& w(std::size_t r, std::size_t c) { return weight[r * dim + c]; }
  double w(std::size_t r, std::size_t c) const { return weight[r * dim + c]; }

  bool is_identity() const noexcept;

  friend bool operator==(const AdapterParams&, const AdapterParams&) = default;
};

struct TrainingSample {
  Vector embedding;
  std::size_t label = 0;  // index into the label embedding table
};

struct TrainConfig {
  double learning_rate = 1e-2;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double tau = 0.01;
  double smoothing = 1e-6;  // q <- (1 - eps) q + eps / N
  std::uint64_t seed = 0;

  void validate() const;
};

/// Errors: DimensionMismatch, DegenerateVector.
Vector adapt(const AdapterParams& params, std::span<const double> v);

/// Symmetric KL contrastive loss over a batch.
///
/// With u_i = adapt(v_i) and w_j the unit label embedding of sample j, the
/// logits are z_ij = u_i . w_j / tau. Video-to-text distributions are the row
/// softmaxes of z, text-to-video the column softmaxes. The target q puts equal
/// mass on every batch position sharing the label, smoothed with eps. Each
/// direction contributes 1/2 * mean[KL(p||q) + KL(q||p)] and the loss is the
/// mean of the two directions.
///
/// Errors: InvalidConfig (N < 2, bad tau/eps), DimensionMismatch,
/// DanglingIndex (label out of range), DegenerateVector.
double contrastive_loss(const AdapterParams& params, std::span<const TrainingSample> batch,
                        std::span<const Vector> label_embeddings, double tau, double smoothing);

struct ContrastiveGrad {
  double loss = 0.0;
  std::vector<double> weight;     // dL/dW, dim x dim row-major
  Vector bias;                    // dL/db
  std::vector<Vector> per_sample; // dL/dh_i for h_i = W v_i + b; bias is their sum
};

/// Analytic gradient of contrastive_loss, through the normalization in adapt.
ContrastiveGrad contrastive_grad(const AdapterParams& params, std::span<const TrainingSample> batch,
                                 std::span<const Vector> label_embeddings, double tau, double smoothing);

struct FitResult {
  AdapterParams params;
  std::vector<double> loss_trace;  // mean batch loss per epoch
};

/// One seeded shuffle fixes the batch partition for all epochs, then plain
/// mini-batch gradient descent. A trailing batch of one sample is merged into
/// the previous batch. Label embeddings are frozen.
/// Errors: ValidationError (no samples), NonFiniteLoss (names the epoch).
FitResult fit(AdapterParams params, std::span<const TrainingSample> samples, std::span<const Vector> label_embeddings,
              const TrainConfig& config);

inline constexpr const char* kAdapterWeightFile = "adapter_W.bin";
inline constexpr const char* kAdapterBiasFile = "adapter_b.bin";
inline constexpr const char* kAdapterMetaFile = "adapter.json";

void save_adapter(const AdapterParams& params, std::span<const double> loss_trace, const std::filesystem::path& dir);
AdapterParams load_adapter(const std::filesystem::path& dir);

}  // namespace autolabel
