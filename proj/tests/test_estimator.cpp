#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spinsim/estimator.hpp"
#include "test_support.hpp"

namespace spinsim {
namespace {

using testing::Gen;
using testing::within_sigmas;

// Exact protocol correlation at a = b, derived independently of the code:
// per level, E[theta1(a.l) sgn(a.l)] = 2/3 (two caps of height 2/3), and with
// a = b the Bob argument is |z1| + |z2| for |z_i| uniform on [0, 1], which
// reaches 2/3 with probability 1 - (2/3)^2 / 2 = 7/9. Levels k != l are
// independent and cancel, leaving -(2/3)(7/9) sum_k 9^(n-k).
double protocol_correlation_parallel(int n) {
  return -(14.0 / 27.0) * static_cast<double>(geometric_weight_sum(n));
}

TEST(Kernels, ParallelMatchesSerialReference) {
  Gen g(31);
  for (int n = 1; n <= 3; ++n) {
    const SpinParameters params(n);
    const auto a = g.direction(), b = g.direction();
    const std::uint64_t rounds = 3000;
    const auto serial = kernels::correlation_serial(a, b, params, 99, 0, rounds);
    for (int shards : {1, 2, 7, 16}) {
      const auto par = kernels::correlation_omp(a, b, params, 99, rounds, shards);
      EXPECT_EQ(par.count, serial.count);
      EXPECT_TRUE(par.sum == serial.sum);
      EXPECT_TRUE(par.sum_sq == serial.sum_sq);
    }
    const auto [sa, sb] = kernels::marginals_serial(a, b, params, 99, 0, rounds);
    const auto [pa, pb] = kernels::marginals_omp(a, b, params, 99, rounds, 5);
    EXPECT_EQ(sa.counts(), pa.counts());
    EXPECT_EQ(sb.counts(), pb.counts());
    for (int k = 1; k <= n; ++k) {
      for (int l = 1; l <= n; ++l) {
        const auto s = kernels::cross_term_serial(k, l, a, b, params, 99, 0, rounds);
        const auto p = kernels::cross_term_omp(k, l, a, b, params, 99, rounds, 3);
        EXPECT_TRUE(s.sum == p.sum && s.sum_sq == p.sum_sq);
      }
    }
  }
}

TEST(EstimateCorrelation, IndependentOfShardCount) {
  const SpinParameters params(2);
  const auto a = UnitVector::ez(), b = UnitVector::in_xz_plane(1.0);
  const auto one = estimate_correlation(a, b, params, 20000, 5, 1);
  for (int shards : {2, 8, 13}) EXPECT_EQ(estimate_correlation(a, b, params, 20000, 5, shards), one);
}

TEST(EstimateCorrelation, LedgerAndFields) {
  const SpinParameters params(3);
  const auto e = estimate_correlation(UnitVector::ez(), UnitVector::ex(), params, 1000, 1);
  EXPECT_EQ(e.count, 1000u);
  EXPECT_EQ(e.ledger.cbits_per_round, 6);
  EXPECT_EQ(e.ledger.total_cbits, 6000u);
  EXPECT_EQ(e.ledger.bob_to_alice_bits, 0u);
  EXPECT_NEAR(e.theta, std::numbers::pi / 2, 1e-15);
  EXPECT_GE(e.std_error, 0.0);
  EXPECT_LE(std::abs(e.mean), static_cast<double>(params.s() * params.s()));
}

TEST(EstimateCorrelation, RejectsBadArguments) {
  const SpinParameters params(1);
  const auto z = UnitVector::ez();
  EXPECT_THROW(estimate_correlation(z, z, params, 0, 1), ContractViolation);
  EXPECT_THROW(estimate_correlation(z, z, params, 99, 1), ContractViolation);
  EXPECT_THROW(estimate_correlation(z, z, params, 1000, 1, 0), ContractViolation);
  EXPECT_THROW(estimate_correlation(z, z, SpinParameters(20), 1000, 1), ContractViolation);
}

TEST(EstimateCorrelation, OrthogonalSettingsAverageToZero) {
  for (int n = 1; n <= 2; ++n) {
    const auto e = estimate_correlation(UnitVector::ez(), UnitVector::ex(), SpinParameters(n),
                                        200000, 17, 4);
    EXPECT_TRUE(within_sigmas(e.mean, 0.0, e.std_error)) << e.mean << " +- " << e.std_error;
  }
}

TEST(EstimateCorrelation, ParallelSettingsMatchExactProtocolValue) {
  for (int n = 1; n <= 2; ++n) {
    const auto e = estimate_correlation(UnitVector::ez(), UnitVector::ez(), SpinParameters(n),
                                        400000, 23, 4);
    EXPECT_TRUE(within_sigmas(e.mean, protocol_correlation_parallel(n), e.std_error))
        << "n=" << n << " mean " << e.mean << " +- " << e.std_error;
  }
}

TEST(EstimateCorrelation, AntiparallelFlipsSign) {
  const auto up = estimate_correlation(UnitVector::ez(), UnitVector::ez(), SpinParameters(1),
                                       10000, 3);
  const auto down = estimate_correlation(UnitVector::ez(), -UnitVector::ez(), SpinParameters(1),
                                         10000, 3);
  // b -> -b negates every theta2 argument, so beta flips round by round.
  EXPECT_DOUBLE_EQ(up.mean, -down.mean);
}

TEST(EstimateMarginals, AliceUniformAndBobCentred) {
  Gen g(32);
  for (int n = 1; n <= 2; ++n) {
    const SpinParameters params(n);
    const auto [alpha, beta] = estimate_marginals(g.direction(), g.direction(), params, 300000, 41, 4);
    EXPECT_EQ(alpha.total(), 300000u);
    EXPECT_EQ(alpha.bins(), static_cast<std::size_t>(params.d()));
    EXPECT_TRUE(chi_square_uniformity(alpha).pass);
    const auto ma = moments(alpha), mb = moments(beta);
    EXPECT_TRUE(within_sigmas(ma.mean, 0.0, ma.std_error_mean));
    EXPECT_TRUE(within_sigmas(mb.mean, 0.0, mb.std_error_mean));
    const double s = static_cast<double>(params.s());
    EXPECT_TRUE(within_sigmas(ma.variance, s * (s + 1) / 3.0, ma.std_error_variance));
  }
  EXPECT_THROW(estimate_marginals(UnitVector::ez(), UnitVector::ez(), SpinParameters(1), 999, 1),
               ContractViolation);
}

TEST(EstimateCrossTerm, DifferentLevelsAreUncorrelated) {
  const SpinParameters params(2);
  const auto z = UnitVector::ez();
  for (auto [k, l] : {std::pair{1, 2}, std::pair{2, 1}}) {
    const auto e = estimate_cross_term(k, l, params, z, z, 200000, 7, 4);
    EXPECT_TRUE(within_sigmas(e.mean, 0.0, e.std_error)) << k << "," << l << ": " << e.mean;
  }
  const auto same = estimate_cross_term(1, 1, params, z, z, 200000, 7, 4);
  EXPECT_TRUE(within_sigmas(same.mean, 14.0 / 27.0, same.std_error)) << same.mean;
  EXPECT_THROW(estimate_cross_term(0, 1, params, z, z, 1000, 1), ContractViolation);
  EXPECT_THROW(estimate_cross_term(1, 3, params, z, z, 1000, 1), ContractViolation);
}

TEST(SweepAngles, SortedAndReproducible) {
  const SpinParameters params(1);
  const auto sweep = sweep_angles(params, {std::numbers::pi, 0.0, std::numbers::pi / 2}, 5000, 9);
  ASSERT_EQ(sweep.size(), 3u);
  EXPECT_DOUBLE_EQ(sweep[0].theta, 0.0);
  EXPECT_DOUBLE_EQ(sweep[1].theta, std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(sweep[2].theta, std::numbers::pi);
  const auto direct = estimate_correlation(UnitVector::ez(), UnitVector::in_xz_plane(std::numbers::pi / 2),
                                           params, 5000, 9);
  EXPECT_EQ(sweep[1].mean, direct.mean);
  EXPECT_THROW(sweep_angles(params, {}, 5000, 9), ContractViolation);
}

TEST(CommCost, TwoCbitsPerLevel) {
  EXPECT_EQ(comm_cost(SpinParameters(1)).worst_case, 2);
  EXPECT_EQ(comm_cost(SpinParameters(2)).worst_case, 4);
  for (int n = 1; n <= 10; ++n) {
    const auto c = comm_cost(SpinParameters(n));
    EXPECT_EQ(c.worst_case, 2 * n);
    EXPECT_NEAR(c.as_log, 2.0 * n, 1e-12);
  }
  EXPECT_NEAR(comm_cost(SpinParameters(3)).as_log, std::log(27.0 * 27.0) / std::log(3.0), 1e-12);
}

TEST(GeometricSeries, ClosedFormInIntegers) {
  for (int n = 1; n <= 10; ++n) {
    const std::int64_t sum = geometric_weight_sum(n);
    const std::int64_t nine_n = pow3(2 * n);
    EXPECT_EQ(8 * sum, nine_n - 1);
    const std::int64_t s = (pow3(n) - 1) / 2;
    // (2/3) * sum == s(s+1)/3  <=>  2 * sum == s(s+1)
    EXPECT_EQ(2 * sum, s * (s + 1));
  }
}

}  // namespace
}  // namespace spinsim
