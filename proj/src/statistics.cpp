#include "spinsim/statistics.hpp"

#include <array>
#include <cmath>
#include <string>

#include "spinsim/core_math.hpp"

namespace spinsim {

MarginalHistogram::MarginalHistogram(std::int64_t s) : s_(s) {
  if (s < 0 || s > 50'000'000) throw ContractViolation("MarginalHistogram: unsupported range");
  counts_.assign(static_cast<std::size_t>(2 * s + 1), 0);
}

void MarginalHistogram::add(std::int64_t value, std::uint64_t times) {
  if (counts_.empty() || value < -s_ || value > s_) {
    throw ContractViolation("MarginalHistogram: value " + std::to_string(value) + " out of range");
  }
  counts_[static_cast<std::size_t>(value + s_)] += times;
  total_ += times;
}

std::uint64_t MarginalHistogram::count(std::int64_t value) const {
  if (counts_.empty() || value < -s_ || value > s_) return 0;
  return counts_[static_cast<std::size_t>(value + s_)];
}

void MarginalHistogram::merge(const MarginalHistogram& other) {
  if (other.counts_.empty()) return;
  if (counts_.empty()) {
    *this = other;
    return;
  }
  if (other.s_ != s_) throw ContractViolation("MarginalHistogram: merging different ranges");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

HistogramMoments moments(const MarginalHistogram& h) {
  HistogramMoments m;
  const auto n = static_cast<double>(h.total());
  if (h.total() == 0) return m;
  long double sum = 0;
  for (std::int64_t v = -h.spin(); v <= h.spin(); ++v) {
    sum += static_cast<long double>(v) * h.count(v);
  }
  const long double mean = sum / n;
  long double m2 = 0, m4 = 0;
  for (std::int64_t v = -h.spin(); v <= h.spin(); ++v) {
    const long double d = v - mean;
    const long double d2 = d * d;
    m2 += d2 * h.count(v);
    m4 += d2 * d2 * h.count(v);
  }
  m2 /= n;
  m4 /= n;
  m.mean = static_cast<double>(mean);
  m.variance = h.total() > 1 ? static_cast<double>(m2 * n / (n - 1)) : 0.0;
  m.std_error_mean = std::sqrt(m.variance / n);
  m.std_error_variance = static_cast<double>(std::sqrt(std::max(0.0L, m4 - m2 * m2) / n));
  return m;
}

namespace {

// scipy.stats.chi2.ppf(0.999, dof) for dof = 1..80.
constexpr std::array<double, 80> kChiSquare999 = {
    10.827566,  13.815511,  16.266236,  18.466827,  20.515006,  22.457744,  24.321886,
    26.124482,  27.877165,  29.588298,  31.264134,  32.909490,  34.528179,  36.123274,
    37.697298,  39.252355,  40.790217,  42.312396,  43.820196,  45.314747,  46.797038,
    48.267942,  49.728232,  51.178598,  52.619656,  54.051962,  55.476020,  56.892285,
    58.301173,  59.703064,  61.098306,  62.487219,  63.870099,  65.247217,  66.618829,
    67.985168,  69.346452,  70.702887,  72.054663,  73.401958,  74.744938,  76.083763,
    77.418578,  78.749524,  80.076732,  81.400326,  82.720423,  84.037134,  85.350565,
    86.660815,  87.967980,  89.272151,  90.573412,  91.871847,  93.167533,  94.460545,
    95.750954,  97.038829,  98.324234,  99.607233,  100.887885, 102.166248, 103.442377,
    104.716325, 105.988143, 107.257880, 108.525582, 109.791296, 111.055066, 112.316932,
    113.576936, 114.835117, 116.091513, 117.346161, 118.599095, 119.850350, 121.099959,
    122.347954, 123.594366, 124.839224};

}  // namespace

double chi_square_critical_999(int dof) {
  if (dof < 1 || dof > static_cast<int>(kChiSquare999.size())) {
    throw ContractViolation("chi-square table covers 1..80 degrees of freedom, got " +
                            std::to_string(dof));
  }
  return kChiSquare999[static_cast<std::size_t>(dof - 1)];
}

ChiSquareResult chi_square_uniformity(const MarginalHistogram& h) {
  const auto bins = h.bins();
  if (bins < 2) throw ContractViolation("chi_square_uniformity: need at least two bins");
  if (h.total() < 100 * bins) {
    throw ContractViolation("chi_square_uniformity: insufficient samples (" +
                            std::to_string(h.total()) + " < 100 x " + std::to_string(bins) + ")");
  }
  ChiSquareResult r;
  const double expected = static_cast<double>(h.total()) / static_cast<double>(bins);
  for (auto c : h.counts()) {
    const double diff = static_cast<double>(c) - expected;
    r.statistic += diff * diff / expected;
  }
  r.dof = static_cast<int>(bins) - 1;
  r.critical = chi_square_critical_999(r.dof);
  r.pass = r.statistic < r.critical;
  return r;
}

double SampleSums::mean() const {
  if (count == 0) return 0.0;
  return static_cast<double>(static_cast<long double>(sum) / static_cast<long double>(count));
}

double SampleSums::std_error() const {
  if (count < 2) return 0.0;
  const auto n = static_cast<__int128>(count);
  const __int128 numerator = n * sum_sq - sum * sum;  // N^2 * biased variance, exact
  const long double var = static_cast<long double>(numerator) /
                          (static_cast<long double>(count) * static_cast<long double>(count - 1));
  return static_cast<double>(std::sqrt(var / static_cast<long double>(count)));
}

}  // namespace spinsim
