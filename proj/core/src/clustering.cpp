#include "autolabel/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "autolabel/error.hpp"
#include "autolabel/rng.hpp"

namespace autolabel {
namespace {

std::size_t nearest(std::span<const Vector> centroids, std::span<const double> p, double* best_out = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double dist = squared_distance(centroids[c], p);
    if (dist < best_d) {
      best_d = dist;
      best = c;
    }
  }
  if (best_out) *best_out = best_d;
  return best;
}

double assign_all(std::span<const Vector> centroids, std::span<const Vector> points,
                  std::vector<std::size_t>& out) {
  out.resize(points.size());
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d = 0.0;
    out[i] = nearest(centroids, points[i], &d);
    inertia += d;
  }
  return inertia;
}

// Index drawn with probability proportional to d2.
std::size_t draw_weighted(std::span<const double> d2, double total, SplitMix64& rng) {
  if (total <= 0.0) return rng.below(d2.size());  // every point already coincides with a centroid
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < d2.size(); ++i) {
    acc += d2[i];
    if (acc > target && d2[i] > 0.0) return i;
  }
  std::size_t last = d2.size() - 1;
  while (last > 0 && d2[last] == 0.0) --last;
  return last;
}

// Greedy k-means++: each step draws 2 + floor(ln k) candidates by D^2 weight
// and keeps the one that lowers the total potential most (first on ties).
std::vector<Vector> seed_plus_plus(std::span<const Vector> points, std::size_t k, SplitMix64& rng) {
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  std::vector<Vector> centroids;
  centroids.push_back(points[rng.below(points.size())]);
  std::vector<double> d2(points.size());
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    d2[i] = squared_distance(points[i], centroids[0]);
    total += d2[i];
  }
  std::vector<double> trial(points.size());
  std::vector<double> best(points.size());
  while (centroids.size() < k) {
    std::size_t pick = 0;
    double best_total = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t cand = draw_weighted(d2, total, rng);
      double cand_total = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        trial[i] = std::min(d2[i], squared_distance(points[i], points[cand]));
        cand_total += trial[i];
      }
      if (cand_total < best_total) {
        best_total = cand_total;
        pick = cand;
        best.swap(trial);
      }
    }
    centroids.push_back(points[pick]);
    d2.swap(best);
    total = best_total;
  }
  return centroids;
}

// Fixed-order accumulation so the result does not depend on scheduling.
void update_means(std::span<const Vector> points, const std::vector<std::size_t>& assignment,
                  std::vector<Vector>& centroids, std::vector<std::size_t>& sizes) {
  const std::size_t dim = points[0].size();
  sizes.assign(centroids.size(), 0);
  std::vector<Vector> sums(centroids.size(), Vector(dim, 0.0));
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& s = sums[assignment[i]];
    for (std::size_t j = 0; j < dim; ++j) s[j] += points[i][j];
    ++sizes[assignment[i]];
  }
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (sizes[c] == 0) continue;
    for (std::size_t j = 0; j < dim; ++j) centroids[c][j] = sums[c][j] / static_cast<double>(sizes[c]);
  }
}

void reseed_empty(std::span<const Vector> points, std::vector<std::size_t>& assignment,
                  std::vector<Vector>& centroids, std::vector<std::size_t>& sizes) {
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (sizes[c] != 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[assignment[i]] < 2) continue;
      const double d = squared_distance(points[i], centroids[assignment[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    // k <= n guarantees some cluster has two members while one is empty
    --sizes[assignment[far]];
    assignment[far] = c;
    sizes[c] = 1;
    centroids[c] = points[far];
  }
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "point of dim " + std::to_string(b.size()) + " vs centroid of dim " + std::to_string(a.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

ClusterModel kmeans_fit(std::span<const Vector> points, const KMeansOptions& options) {
  const std::size_t k = options.num_clusters;
  if (k == 0) throw Error(ErrorKind::InvalidConfig, "k-means needs at least one cluster");
  if (options.max_iter == 0) throw Error(ErrorKind::InvalidConfig, "k-means max_iter must be >= 1");
  if (k > points.size()) {
    throw Error(ErrorKind::TooFewPoints,
                std::to_string(k) + " clusters requested for " + std::to_string(points.size()) + " points");
  }
  const std::size_t dim = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorKind::DimensionMismatch, "k-means input has mixed dimensions");
  }

  SplitMix64 rng(options.seed);
  ClusterModel model;
  model.centroids = seed_plus_plus(points, k, rng);
  model.inertia = assign_all(model.centroids, points, model.assignments);
  model.inertia_trace.push_back(model.inertia);

  std::vector<std::size_t> sizes;
  std::vector<std::size_t> next;
  bool converged = false;
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    update_means(points, model.assignments, model.centroids, sizes);
    reseed_empty(points, model.assignments, model.centroids, sizes);
    model.inertia = assign_all(model.centroids, points, next);
    model.inertia_trace.push_back(model.inertia);
    model.iterations_run = it;
    if (next == model.assignments) {
      converged = true;
      break;
    }
    model.assignments.swap(next);
  }
  if (!converged) {
    // Out of iterations: make the centroids consistent with the last
    // assignment without leaving a cluster empty.
    update_means(points, model.assignments, model.centroids, sizes);
    reseed_empty(points, model.assignments, model.centroids, sizes);
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      inertia += squared_distance(points[i], model.centroids[model.assignments[i]]);
    }
    model.inertia = inertia;
  }
  return model;
}

std::vector<std::size_t> assign(const ClusterModel& model, std::span<const Vector> points) {
  if (model.centroids.empty()) throw Error(ErrorKind::InvalidConfig, "cluster model has no centroids");
  std::vector<std::size_t> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(nearest(model.centroids, p));
  return out;
}

}  // namespace autolabel
