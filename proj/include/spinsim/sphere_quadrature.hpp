#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spinsim/core_math.hpp"

namespace spinsim {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int points);

struct SphereAverage {
  double value = 0.0;
  double std_error = 0.0;  // zero for deterministic quadrature
  std::uint64_t evaluations = 0;
};

/// Average of f over the unit sphere, (1/4pi) * integral f dOmega, with a
/// product rule: Gauss-Legendre in z = axis . x (one panel per interval
/// between sorted `z_breaks`, `polar_nodes` points each) times the periodic
/// trapezoid rule in azimuth. Placing the breaks on the integrand's jump
/// circles makes the polar rule exact for piecewise polynomial integrands.
SphereAverage sphere_average_quadrature(const std::function<double(const UnitVector&)>& f,
                                        const UnitVector& axis, std::vector<double> z_breaks,
                                        int polar_nodes, int azimuth_nodes);

/// Monte Carlo average of f(x) with x uniform on the sphere, using the same
/// (seed, index) substreams as the estimator. The result depends on
/// (seed, samples, shards) only.
SphereAverage sphere_average_monte_carlo(const std::function<double(const UnitVector&)>& f,
                                         std::uint64_t samples, std::uint64_t seed,
                                         int shards = 64);

/// Monte Carlo average of f over three independent uniform directions.
SphereAverage sphere_average_monte_carlo3(
    const std::function<double(const UnitVector&, const UnitVector&, const UnitVector&)>& f,
    std::uint64_t samples, std::uint64_t seed, int shards = 64);

}  // namespace spinsim
