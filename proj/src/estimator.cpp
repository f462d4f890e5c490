#include "spinsim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spinsim {

namespace {

void check_batch(std::uint64_t rounds, std::uint64_t min_rounds, int shards, const char* what) {
  if (rounds < min_rounds) {
    throw ContractViolation(std::string(what) + ": need at least " + std::to_string(min_rounds) +
                            " rounds, got " + std::to_string(rounds));
  }
  if (shards < 1) throw ContractViolation(std::string(what) + ": shards must be >= 1");
}

double angle_between(const UnitVector& a, const UnitVector& b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

CorrelationEstimate to_estimate(const SampleSums& sums, const UnitVector& a,
                                const UnitVector& b, const SpinParameters& params) {
  CorrelationEstimate e;
  e.mean = sums.mean();
  e.std_error = sums.std_error();
  e.count = sums.count;
  e.theta = angle_between(a, b);
  e.params = params;
  e.ledger = make_ledger(params, sums.count);
  return e;
}

}  // namespace

CommLedger make_ledger(const SpinParameters& params, std::uint64_t rounds) {
  CommLedger l;
  l.cbits_per_round = params.cbits_per_round();
  l.rounds = rounds;
  l.total_cbits = static_cast<std::uint64_t>(l.cbits_per_round) * rounds;
  return l;
}

CorrelationEstimate estimate_correlation(const UnitVector& a, const UnitVector& b,
                                         const SpinParameters& params, std::uint64_t rounds,
                                         std::uint64_t seed, int shards) {
  check_batch(rounds, 100, shards, "estimate_correlation");
  // The sum of (alpha beta)^2 is accumulated exactly in 128 bits.
  const long double s2 = static_cast<long double>(params.s()) * static_cast<long double>(params.s());
  if (s2 * s2 * static_cast<long double>(rounds) > 0x1.0p125L) {
    throw ContractViolation("estimate_correlation: rounds x s^4 exceeds exact accumulator range");
  }
  return to_estimate(kernels::correlation_omp(a, b, params, seed, rounds, shards), a, b, params);
}

std::pair<MarginalHistogram, MarginalHistogram> estimate_marginals(
    const UnitVector& a, const UnitVector& b, const SpinParameters& params,
    std::uint64_t rounds, std::uint64_t seed, int shards) {
  check_batch(rounds, 1000, shards, "estimate_marginals");
  return kernels::marginals_omp(a, b, params, seed, rounds, shards);
}

CorrelationEstimate estimate_cross_term(int k, int l, const SpinParameters& params,
                                        const UnitVector& a, const UnitVector& b,
                                        std::uint64_t rounds, std::uint64_t seed, int shards) {
  if (k < 1 || k > params.n() || l < 1 || l > params.n()) {
    throw ContractViolation("estimate_cross_term: indices must lie in [1, n]");
  }
  check_batch(rounds, 100, shards, "estimate_cross_term");
  return to_estimate(kernels::cross_term_omp(k, l, a, b, params, seed, rounds, shards), a, b,
                     params);
}

std::vector<CorrelationEstimate> sweep_angles(const SpinParameters& params,
                                              std::vector<double> thetas,
                                              std::uint64_t rounds_per_point, std::uint64_t seed,
                                              int shards) {
  if (thetas.empty()) throw ContractViolation("sweep_angles: empty angle list");
  std::sort(thetas.begin(), thetas.end());
  std::vector<CorrelationEstimate> out;
  out.reserve(thetas.size());
  const auto a = UnitVector::ez();
  for (double t : thetas) {
    auto e = estimate_correlation(a, UnitVector::in_xz_plane(t), params, rounds_per_point, seed,
                                  shards);
    e.theta = t;  // keep the requested angle rather than acos(cos t)
    out.push_back(e);
  }
  return out;
}

CommCost comm_cost(const SpinParameters& params) {
  CommCost c;
  c.worst_case = params.cbits_per_round();
  c.as_log = 2.0 * std::log(static_cast<double>(params.d())) / std::log(3.0);
  return c;
}

std::int64_t geometric_weight_sum(int n) {
  if (n < 1 || n > 19) throw ContractViolation("geometric_weight_sum: n out of range");
  std::int64_t total = 0;
  for (int k = 1; k <= n; ++k) total += pow3(2 * n - 2 * k);
  return total;
}

}  // namespace spinsim
