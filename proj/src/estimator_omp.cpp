#include "spinsim/estimator.hpp"
#include "spinsim/parallel.hpp"
#include "spinsim/random_stream.hpp"

namespace spinsim::kernels {

namespace {

// Per-shard scratch: the shared randomness buffer is reused across rounds.
struct RoundScratch {
  SharedRandomness randomness;

  void draw(std::uint64_t seed, std::uint64_t index, const SpinParameters& params) {
    auto rng = RandomStream::for_round(seed, index);
    fill_shared_randomness(rng, params, randomness);
  }
};

struct HistogramPair {
  MarginalHistogram alpha, beta;
  void merge(const HistogramPair& o) {
    alpha.merge(o.alpha);
    beta.merge(o.beta);
  }
};

}  // namespace

SampleSums correlation_omp(const UnitVector& a, const UnitVector& b,
                           const SpinParameters& params, std::uint64_t seed,
                           std::uint64_t rounds, int shards) {
  return sharded_reduce<SampleSums>(rounds, shards, [&](ShardRange range, SampleSums& acc) {
    RoundScratch scratch;
    for (std::uint64_t i = range.first; i < range.last; ++i) {
      scratch.draw(seed, i, params);
      const auto& r = scratch.randomness;
      const auto alpha = alice_output(a, r);
      const auto beta = bob_output_simplified(b, alice_cbits(a, r), r);
      acc.add(alpha * beta);
    }
  });
}

std::pair<MarginalHistogram, MarginalHistogram> marginals_omp(
    const UnitVector& a, const UnitVector& b, const SpinParameters& params, std::uint64_t seed,
    std::uint64_t rounds, int shards) {
  auto h = sharded_reduce<HistogramPair>(rounds, shards, [&](ShardRange range, HistogramPair& acc) {
    acc.alpha = MarginalHistogram(params.s());
    acc.beta = MarginalHistogram(params.s());
    RoundScratch scratch;
    for (std::uint64_t i = range.first; i < range.last; ++i) {
      scratch.draw(seed, i, params);
      const auto& r = scratch.randomness;
      acc.alpha.add(alice_output(a, r));
      acc.beta.add(bob_output_simplified(b, alice_cbits(a, r), r));
    }
  });
  return {std::move(h.alpha), std::move(h.beta)};
}

SampleSums cross_term_omp(int k, int l, const UnitVector& a, const UnitVector& b,
                          const SpinParameters& params, std::uint64_t seed, std::uint64_t rounds,
                          int shards) {
  return sharded_reduce<SampleSums>(rounds, shards, [&](ShardRange range, SampleSums& acc) {
    RoundScratch scratch;
    for (std::uint64_t i = range.first; i < range.last; ++i) {
      scratch.draw(seed, i, params);
      const auto& r = scratch.randomness;
      const auto c = alice_cbits(a, r);
      const int alice_digit = theta1(dot(a, r.lambdas[k - 1])).value();
      const double arg = c[2 * l - 2].value() * dot(b, r.mus[2 * l - 2]) +
                         c[2 * l - 1].value() * dot(b, r.mus[2 * l - 1]);
      acc.add(alice_digit * theta2(arg).value());
    }
  });
}

}  // namespace spinsim::kernels
