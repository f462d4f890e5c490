#pragma once

#include <cstdint>
#include <vector>

namespace spinsim {

/// Outcome counts for an integer variable taking values in [-s, s].
class MarginalHistogram {
 public:
  MarginalHistogram() = default;
  explicit MarginalHistogram(std::int64_t s);

  std::int64_t spin() const { return s_; }
  std::size_t bins() const { return counts_.size(); }
  std::uint64_t total() const { return total_; }

  /// Throws ContractViolation for values outside [-s, s].
  void add(std::int64_t value, std::uint64_t times = 1);
  std::uint64_t count(std::int64_t value) const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  /// Adopts the other histogram's range when this one is empty.
  void merge(const MarginalHistogram& other);

 private:
  std::int64_t s_ = 0;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> counts_;
};

struct HistogramMoments {
  double mean = 0.0;
  double variance = 0.0;          // unbiased sample variance
  double std_error_mean = 0.0;    // sqrt(variance / N)
  double std_error_variance = 0.0;  // sqrt((m4 - m2^2) / N), normal approximation
};

HistogramMoments moments(const MarginalHistogram& h);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double critical = 0.0;  // 0.999 quantile of chi-square(dof)
  bool pass = false;
};

/// 0.999 quantile of the chi-square distribution, tabulated for 1 <= dof <= 80.
double chi_square_critical_999(int dof);

/// Pearson chi-square against the uniform distribution over all bins of `h`.
/// Requires total >= 100 * bins.
ChiSquareResult chi_square_uniformity(const MarginalHistogram& h);

/// Sample mean and standard error from exact integer sums.
struct SampleSums {
  std::uint64_t count = 0;
  __int128 sum = 0;
  __int128 sum_sq = 0;

  void add(std::int64_t x) {
    ++count;
    sum += x;
    sum_sq += static_cast<__int128>(x) * x;
  }
  void merge(const SampleSums& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const;
  /// Sample standard deviation over sqrt(count); 0 for count < 2.
  double std_error() const;
};

}  // namespace spinsim
