#include "autolabel/vector_ops.hpp"

#include <cmath>
#include <string>

#include "autolabel/error.hpp"

namespace autolabel {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "dot of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Vector l2_normalize(std::span<const double> v) {
  const double n = l2_norm(v);
  if (!(n > kDegenerateNorm)) {
    throw Error(ErrorKind::DegenerateVector, "norm " + std::to_string(n) + " is too small to normalize");
  }
  Vector out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

Vector to_vector(std::span<const float> v) { return Vector(v.begin(), v.end()); }

}  // namespace autolabel
