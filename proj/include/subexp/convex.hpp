// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "subexp/distribution.hpp"

namespace subexp {

inline constexpr std::size_t kMaxMeanSetDimension = 4;
inline constexpr std::size_t kMaxNetSize = 100000;

/// Finite set of unit directions covering the sphere with mesh about `delta`.
///
/// d = 1 uses {-1, +1}; d = 2 a uniform angular grid of ceil(2*pi/delta)
/// directions; d = 3 a Fibonacci sphere and d = 4 a Kronecker lattice pushed
/// through the area-preserving map onto S^3, each with ceil((4/delta)^(d-1))
/// points capped at kMaxNetSize.
struct DirectionNet {
    std::size_t dimension = 0;
    double delta = 0.0;
    std::vector<Point> directions;

    static DirectionNet build(std::size_t dimension, double delta);

    /// Largest distance from a random unit vector to its nearest net member,
    /// over `probes` draws.
    double probe_mesh(std::size_t probes, std::uint64_t seed) const;
};

/// g(p) = breve upper mean of <p, X>. Throws NotConvergent.
double support_function(const AmbiguitySet& set, std::span<const double> direction);

/// The mean set, held only through its support values on a direction net.
class MeanSet {
public:
    MeanSet(DirectionNet net, std::vector<double> support_values);

    std::size_t dimension() const { return net_.dimension; }
    const DirectionNet& net() const { return net_; }
    const std::vector<double>& support_values() const { return support_; }
    double support(std::size_t i) const { return support_.at(i); }

    /// max(0, max_p <p,y> - g(p)): an outer approximation of dist(y, M) with
    /// error O(delta * (|y| + sup |g|)).
    double distance(std::span<const double> y) const;
    bool contains(std::span<const double> y, double tol) const { return distance(y) <= tol; }
    /// Default membership tolerance, 10 * delta.
    double default_tolerance() const { return 10.0 * net_.delta; }

private:
    DirectionNet net_;
    std::vector<double> support_;
};

/// Throws DimensionTooLarge for d > 4, ValueError for delta outside (0, 1].
MeanSet build_mean_set(const AmbiguitySet& set, double delta);

double distance_to_mean_set(const MeanSet& mean_set, std::span<const double> y);

}  // namespace subexp
