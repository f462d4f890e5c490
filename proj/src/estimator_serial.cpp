#include "spinsim/estimator.hpp"

#include "spinsim/random_stream.hpp"

namespace spinsim::kernels {

SampleSums correlation_serial(const UnitVector& a, const UnitVector& b,
                              const SpinParameters& params, std::uint64_t seed,
                              std::uint64_t first, std::uint64_t last) {
  SampleSums sums;
  for (std::uint64_t i = first; i < last; ++i) {
    const auto round = run_round_indexed(a, b, seed, i, params);
    sums.add(round.alpha * round.beta);
  }
  return sums;
}

std::pair<MarginalHistogram, MarginalHistogram> marginals_serial(
    const UnitVector& a, const UnitVector& b, const SpinParameters& params, std::uint64_t seed,
    std::uint64_t first, std::uint64_t last) {
  MarginalHistogram alpha(params.s()), beta(params.s());
  for (std::uint64_t i = first; i < last; ++i) {
    const auto round = run_round_indexed(a, b, seed, i, params);
    alpha.add(round.alpha);
    beta.add(round.beta);
  }
  return {alpha, beta};
}

SampleSums cross_term_serial(int k, int l, const UnitVector& a, const UnitVector& b,
                             const SpinParameters& params, std::uint64_t seed,
                             std::uint64_t first, std::uint64_t last) {
  SampleSums sums;
  for (std::uint64_t i = first; i < last; ++i) {
    const auto round = run_round_indexed(a, b, seed, i, params);
    const auto& r = round.randomness;
    const int alice_digit = theta1(dot(a, r.lambdas[k - 1])).value();
    const int c1 = round.cbits[2 * l - 2].value();
    const int c2 = round.cbits[2 * l - 1].value();
    const int bob_digit =
        theta2(c1 * dot(b, r.mus[2 * l - 2]) + c2 * dot(b, r.mus[2 * l - 1])).value();
    sums.add(alice_digit * bob_digit);
  }
  return sums;
}

}  // namespace spinsim::kernels
