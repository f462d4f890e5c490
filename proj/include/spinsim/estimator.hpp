#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spinsim/core_math.hpp"
#include "spinsim/protocol.hpp"
#include "spinsim/statistics.hpp"

namespace spinsim {

/// Classical communication spent by a batch. All bits flow Alice -> Bob.
struct CommLedger {
  int cbits_per_round = 0;
  std::uint64_t total_cbits = 0;
  std::uint64_t rounds = 0;
  std::uint64_t bob_to_alice_bits = 0;
  bool operator==(const CommLedger&) const = default;
};

CommLedger make_ledger(const SpinParameters& params, std::uint64_t rounds);

struct CorrelationEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
  double theta = 0.0;  // angle between a and b, radians
  SpinParameters params{1};
  CommLedger ledger;

  bool operator==(const CorrelationEstimate&) const = default;
};

inline constexpr std::uint64_t kDefaultRounds = 1'000'000;

/// Sample mean and standard error of alpha * beta over `rounds` rounds. Round i
/// draws its randomness from the (seed, i) substream, so the result does not
/// depend on `shards`. Requires rounds >= 100 and shards >= 1.
CorrelationEstimate estimate_correlation(const UnitVector& a, const UnitVector& b,
                                         const SpinParameters& params, std::uint64_t rounds,
                                         std::uint64_t seed, int shards = 1);

/// Histograms of alpha and beta. Requires rounds >= 1000.
std::pair<MarginalHistogram, MarginalHistogram> estimate_marginals(
    const UnitVector& a, const UnitVector& b, const SpinParameters& params,
    std::uint64_t rounds, std::uint64_t seed, int shards = 1);

/// Estimates E{theta1(a.lambda_k) theta2[b.(c_{2l-1} mu_{2l-1} + c_{2l} mu_{2l})]}
/// for one (k, l) pair, 1-based, with the cbits Alice would send.
CorrelationEstimate estimate_cross_term(int k, int l, const SpinParameters& params,
                                        const UnitVector& a, const UnitVector& b,
                                        std::uint64_t rounds, std::uint64_t seed, int shards = 1);

/// One correlation estimate per angle with a = z and b = (sin t, 0, cos t).
/// Every point reuses `seed`. Output is sorted by angle.
std::vector<CorrelationEstimate> sweep_angles(const SpinParameters& params,
                                              std::vector<double> thetas,
                                              std::uint64_t rounds_per_point, std::uint64_t seed,
                                              int shards = 1);

struct CommCost {
  int worst_case = 0;  // cbits per round
  double as_log = 0.0;  // log_3(d^2)
};

CommCost comm_cost(const SpinParameters& params);

/// sum_{k=1..n} 9^(n-k), computed term by term.
std::int64_t geometric_weight_sum(int n);

namespace kernels {

/// Straightforward loop over rounds [first, last) through run_round_indexed.
/// The reference the parallel kernels are tested against.
SampleSums correlation_serial(const UnitVector& a, const UnitVector& b,
                              const SpinParameters& params, std::uint64_t seed,
                              std::uint64_t first, std::uint64_t last);
std::pair<MarginalHistogram, MarginalHistogram> marginals_serial(
    const UnitVector& a, const UnitVector& b, const SpinParameters& params, std::uint64_t seed,
    std::uint64_t first, std::uint64_t last);
SampleSums cross_term_serial(int k, int l, const UnitVector& a, const UnitVector& b,
                             const SpinParameters& params, std::uint64_t seed,
                             std::uint64_t first, std::uint64_t last);

/// OpenMP kernels over rounds [0, rounds) split into `shards` contiguous blocks.
SampleSums correlation_omp(const UnitVector& a, const UnitVector& b,
                           const SpinParameters& params, std::uint64_t seed,
                           std::uint64_t rounds, int shards);
std::pair<MarginalHistogram, MarginalHistogram> marginals_omp(
    const UnitVector& a, const UnitVector& b, const SpinParameters& params, std::uint64_t seed,
    std::uint64_t rounds, int shards);
SampleSums cross_term_omp(int k, int l, const UnitVector& a, const UnitVector& b,
                          const SpinParameters& params, std::uint64_t seed, std::uint64_t rounds,
                          int shards);

}  // namespace kernels

}  // namespace spinsim
