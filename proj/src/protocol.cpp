#include "spinsim/protocol.hpp"

#include <string>

#include "spinsim/random_stream.hpp"

namespace spinsim {

SpinParameters::SpinParameters(int n) : n_(n), d_(0) {
  if (n < 1 || n > kMaxLevel) {
    throw ContractViolation("SpinParameters: level n must be in [1, " +
                            std::to_string(kMaxLevel) + "], got " + std::to_string(n));
  }
  d_ = pow3(n);
}

std::int64_t pow3(int e) {
  if (e < 0 || e > 39) throw ContractViolation("pow3: exponent out of range");
  std::int64_t p = 1;
  for (int i = 0; i < e; ++i) p *= 3;
  return p;
}

void SharedRandomness::validate() const {
  if (lambdas.empty() || mus.size() != 2 * lambdas.size() ||
      lambdas.size() > static_cast<std::size_t>(SpinParameters::kMaxLevel)) {
    throw ContractViolation("SharedRandomness: expected n lambdas and 2n mus");
  }
}

void fill_shared_randomness(RandomStream& rng, const SpinParameters& params,
                            SharedRandomness& out) {
  const auto n = static_cast<std::size_t>(params.n());
  out.lambdas.resize(n);
  out.mus.resize(2 * n);
  for (auto& v : out.lambdas) v = sample_unit_vector(rng);
  for (auto& v : out.mus) v = sample_unit_vector(rng);
}

SharedRandomness draw_shared_randomness(RandomStream& rng, const SpinParameters& params) {
  SharedRandomness r;
  fill_shared_randomness(rng, params, r);
  return r;
}

CbitVector::CbitVector(std::span<const SignBit> bits) {
  for (auto b : bits) push_back(b);
}

CbitVector CbitVector::from_mask(int size, std::uint64_t mask) {
  if (size < 0 || size > kMaxBits) throw ContractViolation("CbitVector: bad size");
  if (size < 64 && (mask >> size) != 0) {
    throw ContractViolation("CbitVector: mask has bits beyond size");
  }
  CbitVector c;
  c.size_ = size;
  c.mask_ = mask;
  return c;
}

SignBit CbitVector::operator[](int i) const {
  if (i < 0 || i >= size_) throw ContractViolation("CbitVector: index out of range");
  return SignBit(((mask_ >> i) & 1U) ? 1 : -1);
}

void CbitVector::set(int i, SignBit b) {
  if (i < 0 || i >= size_) throw ContractViolation("CbitVector: index out of range");
  const std::uint64_t bit = std::uint64_t{1} << i;
  mask_ = b.value() > 0 ? (mask_ | bit) : (mask_ & ~bit);
}

void CbitVector::push_back(SignBit b) {
  if (size_ >= kMaxBits) throw ContractViolation("CbitVector: too many bits");
  ++size_;
  set(size_ - 1, b);
}

std::int64_t alice_output(const UnitVector& a, const SharedRandomness& r) {
  r.validate();
  const int n = r.level();
  std::int64_t alpha = 0;
  std::int64_t weight = pow3(n - 1);
  for (int k = 0; k < n; ++k, weight /= 3) {
    alpha -= weight * theta1(dot(a, r.lambdas[k])).value();
  }
  return alpha;
}

CbitVector alice_cbits(const UnitVector& a, const SharedRandomness& r) {
  r.validate();
  const int n = r.level();
  CbitVector c;
  for (int k = 0; k < n; ++k) {
    const SignBit lam = sgn(dot(a, r.lambdas[k]));
    c.push_back(lam * sgn(dot(a, r.mus[2 * k])));
    c.push_back(lam * sgn(dot(a, r.mus[2 * k + 1])));
  }
  return c;
}

namespace {

int check_bob_inputs(const CbitVector& c, std::span<const UnitVector> mus) {
  if (mus.empty() || mus.size() % 2 != 0 ||
      mus.size() > static_cast<std::size_t>(CbitVector::kMaxBits)) {
    throw ContractViolation("Bob: expected 2n mus");
  }
  if (static_cast<std::size_t>(c.size()) != mus.size()) {
    throw ContractViolation("Bob: cbit count does not match the shared randomness");
  }
  return static_cast<int>(mus.size() / 2);
}

}  // namespace

std::int64_t bob_output_simplified(const UnitVector& b, const CbitVector& c,
                                   std::span<const UnitVector> mus) {
  const int n = check_bob_inputs(c, mus);
  std::int64_t beta = 0;
  std::int64_t weight = pow3(n - 1);
  for (int k = 0; k < n; ++k, weight /= 3) {
    // Projections are taken once so that +-p1 +- p2 are exact negations of each other.
    const double p1 = dot(b, mus[2 * k]);
    const double p2 = dot(b, mus[2 * k + 1]);
    const int sum = theta2(p1 + p2).value();
    const int diff = theta2(p1 - p2).value();
    const int c1 = c[2 * k].value();
    const int c2 = c[2 * k + 1].value();
    beta += weight * ((c1 * (sum + diff) + c2 * (sum - diff)) / 2);
  }
  return beta;
}

std::int64_t bob_output_simplified(const UnitVector& b, const CbitVector& c,
                                   const SharedRandomness& r) {
  return bob_output_simplified(b, c, std::span<const UnitVector>(r.mus));
}

std::int64_t bob_output_expanded(const UnitVector& b, const CbitVector& c,
                                 std::span<const UnitVector> mus) {
  const int n = check_bob_inputs(c, mus);
  std::int64_t beta = 0;
  std::int64_t weight = pow3(n - 1);
  for (int k = 0; k < n; ++k, weight /= 3) {
    const double p1 = dot(b, mus[2 * k]);
    const double p2 = dot(b, mus[2 * k + 1]);
    const int c1 = c[2 * k].value();
    const int c2 = c[2 * k + 1].value();
    // Sum of the sixteen-term expansion, scaled by 4 to stay in integers.
    int four_digit = 0;
    for (int d1 : {-1, 1}) {
      for (int d2 : {-1, 1}) {
        four_digit += (1 + c1 * d1) * (1 + c2 * d2) * theta2(d1 * p1 + d2 * p2).value();
      }
    }
    beta += weight * (four_digit / 4);
  }
  return beta;
}

std::int64_t bob_output_expanded(const UnitVector& b, const CbitVector& c,
                                 const SharedRandomness& r) {
  return bob_output_expanded(b, c, std::span<const UnitVector>(r.mus));
}

ProtocolRound run_round(const UnitVector& a, const UnitVector& b, RandomStream& rng,
                        const SpinParameters& params) {
  ProtocolRound round{a, b, draw_shared_randomness(rng, params), {}, 0, 0};
  round.alpha = alice_output(a, round.randomness);
  round.cbits = alice_cbits(a, round.randomness);
  round.beta = bob_output_simplified(b, round.cbits, std::span<const UnitVector>(round.randomness.mus));
  return round;
}

ProtocolRound run_round_indexed(const UnitVector& a, const UnitVector& b, std::uint64_t seed,
                                std::uint64_t round_index, const SpinParameters& params) {
  auto rng = RandomStream::for_round(seed, round_index);
  return run_round(a, b, rng, params);
}

}  // namespace spinsim
