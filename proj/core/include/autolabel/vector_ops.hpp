#pragma once

#include <span>
#include <vector>

namespace autolabel {

/// Working precision for every similarity, loss and gradient computation.
using Vector = std::vector<double>;

inline constexpr double kDegenerateNorm = 1e-12;

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

/// Unit vector in the direction of v. Throws DegenerateVector when
/// ||v|| <= 1e-12.
Vector l2_normalize(std::span<const double> v);

Vector to_vector(std::span<const float> v);

}  // namespace autolabel
