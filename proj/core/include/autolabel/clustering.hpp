#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "autolabel/vector_ops.hpp"

namespace autolabel {

struct ClusterModel {
  std::vector<Vector> centroids;
  std::vector<std::size_t> assignments;  // one per fitted point
  double inertia = 0.0;                  // sum of squared Euclidean distances
  std::size_t iterations_run = 0;
  // inertia after the initial assignment and after every Lloyd iteration
  std::vector<double> inertia_trace;

  std::size_t num_clusters() const noexcept { return centroids.size(); }
};

struct KMeansOptions {
  std::size_t num_clusters = 2;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
};

/// Lloyd's algorithm with greedy k-means++ seeding. Stops when assignments
/// repeat or after max_iter iterations. A cluster that empties is re-seeded with the
/// point farthest from its own centroid (taken from a cluster with at least
/// two members), so the returned model never has an empty cluster.
///
/// Errors: TooFewPoints, DimensionMismatch, InvalidConfig (k == 0 or
/// max_iter == 0).
ClusterModel kmeans_fit(std::span<const Vector> points, const KMeansOptions& options);

/// Nearest centroid for each point, ties to the lowest index.
std::vector<std::size_t> assign(const ClusterModel& model, std::span<const Vector> points);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace autolabel
