#include "spinsim/sphere_quadrature.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <cmath>
#include <numbers>

#include "spinsim/parallel.hpp"
#include "spinsim/random_stream.hpp"

namespace spinsim {

GaussLegendreRule gauss_legendre(int points) {
  if (points < 1) throw ContractViolation("gauss_legendre: need at least one point");
  GaussLegendreRule rule;
  if (points == 1) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));

  // P_n(x) and P_n'(x) by the three-term recurrence.
  const auto legendre = [points](double x) {
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= points; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, points * (x * p1 - p0) / (x * x - 1.0)};
  };

  for (int i = 0; i < (points + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(points - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  return rule;
}

namespace {

// Orthonormal (e1, e2) completing `axis` to a right-handed frame.
std::pair<std::array<double, 3>, std::array<double, 3>> complete_frame(const UnitVector& axis) {
  const std::array<double, 3> u{axis.x(), axis.y(), axis.z()};
  std::array<double, 3> helper = std::abs(u[0]) < 0.9 ? std::array<double, 3>{1, 0, 0}
                                                       : std::array<double, 3>{0, 1, 0};
  std::array<double, 3> e1{u[1] * helper[2] - u[2] * helper[1],
                           u[2] * helper[0] - u[0] * helper[2],
                           u[0] * helper[1] - u[1] * helper[0]};
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (auto& c : e1) c /= n1;
  std::array<double, 3> e2{u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2],
                           u[0] * e1[1] - u[1] * e1[0]};
  return {e1, e2};
}

struct MeanAccumulator {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double v) {
    ++count;
    sum += v;
    sum_sq += v * v;
  }
  void merge(const MeanAccumulator& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  SphereAverage result() const {
    SphereAverage r;
    r.evaluations = count;
    if (count == 0) return r;
    const double n = static_cast<double>(count);
    r.value = sum / n;
    const double var = count > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) : 0.0;
    r.std_error = std::sqrt(var / n);
    return r;
  }
};

}  // namespace

SphereAverage sphere_average_quadrature(const std::function<double(const UnitVector&)>& f,
                                        const UnitVector& axis, std::vector<double> z_breaks,
                                        int polar_nodes, int azimuth_nodes) {
  if (polar_nodes < 1 || azimuth_nodes < 1) {
    throw ContractViolation("sphere_average_quadrature: node counts must be positive");
  }
  std::vector<double> edges{-1.0, 1.0};
  for (double z : z_breaks) {
    if (z > -1.0 && z < 1.0) edges.push_back(z);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const auto rule = gauss_legendre(polar_nodes);
  const auto [e1, e2] = complete_frame(axis);
  const double dphi = 2.0 * std::numbers::pi / azimuth_nodes;

  // Panels are evaluated at their interior Gauss nodes only, so a jump exactly
  // on a break never lands on a node.
  double total = 0.0;
  std::uint64_t evaluations = 0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p], hi = edges[p + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double z = mid + half * rule.nodes[i];
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double ring = 0.0;
      for (int j = 0; j < azimuth_nodes; ++j) {
        const double phi = dphi * j;
        const double c = r * std::cos(phi), s = r * std::sin(phi);
        ring += f(UnitVector::normalized(c * e1[0] + s * e2[0] + z * axis.x(),
                                         c * e1[1] + s * e2[1] + z * axis.y(),
                                         c * e1[2] + s * e2[2] + z * axis.z()));
      }
      total += half * rule.weights[i] * ring / azimuth_nodes;
      evaluations += static_cast<std::uint64_t>(azimuth_nodes);
    }
  }
  // The z-integral of 1 over [-1, 1] is 2.
  return {0.5 * total, 0.0, evaluations};
}

SphereAverage sphere_average_monte_carlo(const std::function<double(const UnitVector&)>& f,
                                         std::uint64_t samples, std::uint64_t seed, int shards) {
  if (samples < 2 || shards < 1) throw ContractViolation("sphere_average_monte_carlo: bad size");
  return sharded_reduce<MeanAccumulator>(samples, shards, [&](ShardRange range, MeanAccumulator& acc) {
           for (std::uint64_t i = range.first; i < range.last; ++i) {
             auto rng = RandomStream::for_round(seed, i);
             acc.add(f(sample_unit_vector(rng)));
           }
         })
      .result();
}

SphereAverage sphere_average_monte_carlo3(
    const std::function<double(const UnitVector&, const UnitVector&, const UnitVector&)>& f,
    std::uint64_t samples, std::uint64_t seed, int shards) {
  if (samples < 2 || shards < 1) throw ContractViolation("sphere_average_monte_carlo3: bad size");
  return sharded_reduce<MeanAccumulator>(samples, shards, [&](ShardRange range, MeanAccumulator& acc) {
           for (std::uint64_t i = range.first; i < range.last; ++i) {
             auto rng = RandomStream::for_round(seed, i);
             const auto u = sample_unit_vector(rng);
             const auto v = sample_unit_vector(rng);
             const auto w = sample_unit_vector(rng);
             acc.add(f(u, v, w));
           }
         })
      .result();
}

}  // namespace spinsim
