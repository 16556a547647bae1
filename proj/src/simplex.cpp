// SPDX-License-Identifier: Apache-2.0
#include "subexp/simplex.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "subexp/errors.hpp"

namespace subexp {

namespace {

// Affine least squares over one vertex subset; false when the subset is
// affinely dependent or the optimum leaves the simplex.
bool fit_subset(std::span<const Point> vertices, const std::vector<std::size_t>& subset,
                std::span<const double> target, std::vector<double>& weights) {
    const std::size_t d = target.size();
    const std::size_t s = subset.size();
    weights.assign(s, 0.0);
    if (s == 1) {
        weights[0] = 1.0;
        return true;
    }
    const Point& base = vertices[subset[0]];
    Eigen::MatrixXd D(d, s - 1);
    Eigen::VectorXd rhs(d);
    for (std::size_t r = 0; r < d; ++r) {
        rhs(r) = target[r] - base[r];
        for (std::size_t c = 1; c < s; ++c) D(r, c - 1) = vertices[subset[c]][r] - base[r];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
    qr.setThreshold(1e-12);
    if (qr.rank() < static_cast<Eigen::Index>(s - 1)) return false;
    const Eigen::VectorXd tail = qr.solve(rhs);
    double head = 1.0;
    for (std::size_t c = 1; c < s; ++c) {
        weights[c] = tail(c - 1);
        head -= tail(c - 1);
    }
    weights[0] = head;
    constexpr double kSlack = 1e-12;
    if (std::any_of(weights.begin(), weights.end(), [](double w) { return w < -kSlack; })) return false;
    double total = 0.0;
    for (double& w : weights) total += (w = std::max(0.0, w));
    for (double& w : weights) w /= total;
    return true;
}

}  // namespace

SimplexFit simplex_least_squares(std::span<const Point> vertices, std::span<const double> target) {
    if (vertices.empty()) throw ValueError("simplex fit needs at least one vertex");
    const std::size_t d = target.size();
    for (const auto& v : vertices)
        if (v.size() != d) throw ValueError("vertex dimension does not match target");
    const std::size_t n = vertices.size();
    const std::size_t max_size = std::min(n, d + 1);

    SimplexFit best;
    best.residual = kInf;
    std::vector<double> local;
    for (std::size_t s = 1; s <= max_size; ++s) {
        // Lexicographic enumeration of s-subsets via a selection mask.
        std::vector<bool> mask(n, false);
        std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(s), true);
        do {
            std::vector<std::size_t> subset;
            for (std::size_t i = 0; i < n; ++i)
                if (mask[i]) subset.push_back(i);
            if (!fit_subset(vertices, subset, target, local)) continue;
            Point achieved(d, 0.0);
            for (std::size_t k = 0; k < subset.size(); ++k)
                for (std::size_t r = 0; r < d; ++r) achieved[r] += local[k] * vertices[subset[k]][r];
            double res2 = 0.0;
            for (std::size_t r = 0; r < d; ++r) res2 += (achieved[r] - target[r]) * (achieved[r] - target[r]);
            const double res = std::sqrt(res2);
            if (res < best.residual - 1e-15) {
                best.residual = res;
                best.achieved = std::move(achieved);
                best.weights.assign(n, 0.0);
                for (std::size_t k = 0; k < subset.size(); ++k) best.weights[subset[k]] = local[k];
            }
        } while (std::prev_permutation(mask.begin(), mask.end()));
        if (best.residual <= kAttainTolerance * 1e-3) break;
    }
    return best;
}

}  // namespace subexp
