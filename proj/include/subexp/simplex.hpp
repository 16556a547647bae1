// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "subexp/distribution.hpp"

namespace subexp {

/// Residual above which a target is declared not attainable as a mixture.
inline constexpr double kAttainTolerance = 1e-9;

struct SimplexFit {
    std::vector<double> weights;  // one per vertex, nonnegative, sums to 1
    Point achieved;               // sum_i weights[i] * vertices[i]
    double residual = 0.0;        // |achieved - target|
};

/// Nearest point to `target` in the convex hull of `vertices`, as a
/// convex combination.
///
/// Exhaustive over affinely independent vertex subsets of size <= d + 1
/// (Caratheodory); smaller subsets win ties, so the result is deterministic.
SimplexFit simplex_least_squares(std::span<const Point> vertices, std::span<const double> target);

}  // namespace subexp
