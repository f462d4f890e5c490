#include <gtest/gtest.h>

#include <cmath>

#include "spinsim/core_math.hpp"
#include "spinsim/statistics.hpp"

namespace spinsim {
namespace {

TEST(ChiSquare, ExactlyUniformCountsGiveZero) {
  MarginalHistogram h(1);
  for (int v = -1; v <= 1; ++v) h.add(v, 1000);
  const auto r = chi_square_uniformity(h);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.dof, 2);
  EXPECT_TRUE(r.pass);
}

TEST(ChiSquare, AllMassInOneBin) {
  MarginalHistogram h(1);
  h.add(0, 1'000'000);
  const auto r = chi_square_uniformity(h);
  EXPECT_NEAR(r.statistic, 2e6, 1e-6);
  EXPECT_FALSE(r.pass);
}

TEST(ChiSquare, RequiresEnoughSamples) {
  MarginalHistogram h(1);
  h.add(0, 299);
  EXPECT_THROW(chi_square_uniformity(h), ContractViolation);
  h.add(1, 1);
  EXPECT_NO_THROW(chi_square_uniformity(h));
}

TEST(ChiSquare, CriticalTable) {
  EXPECT_NEAR(chi_square_critical_999(2), 13.815511, 1e-6);
  EXPECT_NEAR(chi_square_critical_999(8), 26.124482, 1e-6);
  EXPECT_NEAR(chi_square_critical_999(80), 124.839224, 1e-6);
  EXPECT_THROW(chi_square_critical_999(0), ContractViolation);
  EXPECT_THROW(chi_square_critical_999(81), ContractViolation);
}

TEST(MarginalHistogram, RangeAndMerge) {
  MarginalHistogram a(4), b(4);
  a.add(-4);
  a.add(4, 2);
  b.add(0, 3);
  EXPECT_THROW(a.add(5), ContractViolation);
  a.merge(b);
  EXPECT_EQ(a.total(), 6u);
  EXPECT_EQ(a.count(4), 2u);
  EXPECT_EQ(a.count(0), 3u);
  EXPECT_EQ(a.count(17), 0u);
  MarginalHistogram empty;
  empty.merge(a);
  EXPECT_EQ(empty.total(), 6u);
  EXPECT_THROW(a.merge(MarginalHistogram(1)), ContractViolation);
}

TEST(Moments, KnownDistribution) {
  // Uniform on {-1, 0, 1}: mean 0, variance 2/3, fourth central moment 2/3.
  MarginalHistogram h(1);
  for (int v = -1; v <= 1; ++v) h.add(v, 100000);
  const auto m = moments(h);
  const double n = 300000.0;
  EXPECT_DOUBLE_EQ(m.mean, 0.0);
  EXPECT_NEAR(m.variance, 2.0 / 3.0 * n / (n - 1), 1e-12);
  EXPECT_NEAR(m.std_error_variance, std::sqrt((2.0 / 3.0 - 4.0 / 9.0) / n), 1e-12);
}

TEST(SampleSums, MeanAndStandardError) {
  SampleSums s;
  for (int x : {2, 4, 4, 4, 5, 5, 7, 9}) s.add(x);
  EXPECT_DOUBLE_EQ(s.mean(), 5.0);
  // Sample variance 32/7.
  EXPECT_NEAR(s.std_error(), std::sqrt(32.0 / 7.0 / 8.0), 1e-15);
  SampleSums one;
  one.add(3);
  EXPECT_EQ(one.std_error(), 0.0);
}

}  // namespace
}  // namespace spinsim
