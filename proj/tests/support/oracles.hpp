#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library under test except for plain data types.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

namespace oracle {

/// Similarity exactly as the pseudo-code reads: ref = reverse(range(n)),
/// w = (ref - min) / (max - min), then a double loop over both lists adding
/// w[|i_t - i_s|] for every equal pair. An out-of-range weight index counts 0;
/// n == 1 uses w = [1].
inline double sim(const std::vector<std::uint32_t>& source, const std::vector<std::uint32_t>& target) {
  const std::size_t n = source.size();
  std::vector<double> ref;
  for (std::size_t i = n; i-- > 0;) ref.push_back(static_cast<double>(i));
  std::vector<double> w(n, 1.0);
  if (n > 1) {
    const double lo = *std::min_element(ref.begin(), ref.end());
    const double hi = *std::max_element(ref.begin(), ref.end());
    for (std::size_t i = 0; i < n; ++i) w[i] = (ref[i] - lo) / (hi - lo);
  }
  double s = 0.0;
  for (std::size_t is = 0; is < source.size(); ++is) {
    for (std::size_t it = 0; it < target.size(); ++it) {
      if (source[is] != target[it]) continue;
      const std::size_t d = is > it ? is - it : it - is;
      if (d < w.size()) s += w[d];
    }
  }
  return s / static_cast<double>(n);
}

/// Adjusted Rand index from the contingency table (Hubert and Arabie).
inline double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> ra;
  std::map<std::size_t, double> rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [_, n] : table) index += c2(n);
  double sa = 0.0;
  double sb = 0.0;
  for (const auto& [_, n] : ra) sa += c2(n);
  for (const auto& [_, n] : rb) sb += c2(n);
  const double expected = sa * sb / c2(static_cast<double>(a.size()));
  const double max_index = (sa + sb) / 2.0;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

/// Exhaustive nearest-centroid scan, ties to the first.
inline std::size_t nearest(const std::vector<std::vector<double>>& centroids, const std::vector<double>& p) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) d += (p[j] - centroids[c][j]) * (p[j] - centroids[c][j]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

/// Index of the highest cosine, first on ties.
inline std::size_t argmax_cosine(const std::vector<double>& v, const std::vector<std::vector<double>>& labels) {
  std::size_t best = 0;
  double best_c = -INFINITY;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double c = cosine(v, labels[i]);
    if (c > best_c) {
      best_c = c;
      best = i;
    }
  }
  return best;
}

inline double harmonic_mean(double a, double b) { return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b); }

/// Central differences of f at x, one coordinate at a time.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("autolabel_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
