#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spinsim/core_math.hpp"

namespace spinsim {

/// Protocol level n with spin s = (3^n - 1) / 2 and dimension d = 3^n.
class SpinParameters {
 public:
  static constexpr int kMaxLevel = 20;

  /// Throws ContractViolation unless 1 <= n <= 20.
  explicit SpinParameters(int n);

  int n() const { return n_; }
  std::int64_t d() const { return d_; }
  std::int64_t s() const { return (d_ - 1) / 2; }
  int cbits_per_round() const { return 2 * n_; }
  /// Number of shared unit vectors per round (n lambdas + 2n mus).
  int shared_vectors() const { return 3 * n_; }

  bool operator==(const SpinParameters&) const = default;

 private:
  int n_;
  std::int64_t d_;
};

/// 3^e as an exact integer, for 0 <= e <= 39.
std::int64_t pow3(int e);

/// The 3n shared directions of one round: lambda_1..lambda_n, mu_1..mu_2n.
struct SharedRandomness {
  std::vector<UnitVector> lambdas;
  std::vector<UnitVector> mus;

  int level() const { return static_cast<int>(lambdas.size()); }
  /// Throws ContractViolation unless there are n >= 1 lambdas and 2n mus.
  void validate() const;
};

/// Draws n lambdas then 2n mus from the stream, in that order.
SharedRandomness draw_shared_randomness(RandomStream& rng, const SpinParameters& params);
/// In-place variant; resizes `out` and overwrites every vector.
void fill_shared_randomness(RandomStream& rng, const SpinParameters& params, SharedRandomness& out);

/// The 2n cbits c_1..c_2n. Stored as a bit mask: bit i set iff c_{i+1} = +1.
class CbitVector {
 public:
  static constexpr int kMaxBits = 2 * SpinParameters::kMaxLevel;

  CbitVector() = default;
  explicit CbitVector(std::span<const SignBit> bits);
  static CbitVector from_mask(int size, std::uint64_t mask);

  int size() const { return size_; }
  std::uint64_t mask() const { return mask_; }
  /// 0-based: operator[](0) is c_1.
  SignBit operator[](int i) const;
  void set(int i, SignBit b);
  void push_back(SignBit b);

  bool operator==(const CbitVector&) const = default;

 private:
  int size_ = 0;
  std::uint64_t mask_ = 0;
};

struct ProtocolRound {
  UnitVector a;
  UnitVector b;
  SharedRandomness randomness;
  CbitVector cbits;
  std::int64_t alpha = 0;
  std::int64_t beta = 0;
};

/// alpha = -sum_k 3^(n-k) theta1(a . lambda_k).
std::int64_t alice_output(const UnitVector& a, const SharedRandomness& r);

/// c_{2k-1} = sgn(a . lambda_k) sgn(a . mu_{2k-1}), c_{2k} = sgn(a . lambda_k) sgn(a . mu_{2k}).
CbitVector alice_cbits(const UnitVector& a, const SharedRandomness& r);

/// Bob's production path. Per level k, with A = theta2(b.(mu_{2k-1} + mu_{2k}))
/// and B = theta2(b.(mu_{2k-1} - mu_{2k})), the digit is
/// ((c_{2k-1} + c_{2k}) A + (c_{2k-1} - c_{2k}) B) / 2.
/// Reads only b, the cbits and the mus; the lambdas are never touched.
std::int64_t bob_output_simplified(const UnitVector& b, const CbitVector& c,
                                   std::span<const UnitVector> mus);
std::int64_t bob_output_simplified(const UnitVector& b, const CbitVector& c,
                                   const SharedRandomness& r);

/// Bob's output written as the literal sum over d_{2k-1}, d_{2k} in {-1, +1}
/// with selector weights (1 + c d) / 2. Kept as a test oracle for the
/// simplified form; the two must agree exactly.
std::int64_t bob_output_expanded(const UnitVector& b, const CbitVector& c,
                                 std::span<const UnitVector> mus);
std::int64_t bob_output_expanded(const UnitVector& b, const CbitVector& c,
                                 const SharedRandomness& r);

/// One full round with fresh randomness drawn from `rng`.
ProtocolRound run_round(const UnitVector& a, const UnitVector& b, RandomStream& rng,
                        const SpinParameters& params);

/// One round whose randomness is the (seed, round_index) substream.
ProtocolRound run_round_indexed(const UnitVector& a, const UnitVector& b, std::uint64_t seed,
                                std::uint64_t round_index, const SpinParameters& params);

}  // namespace spinsim
