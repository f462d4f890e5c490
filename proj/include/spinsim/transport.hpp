#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsim/byte_stream.hpp"
#include "spinsim/core_math.hpp"
#include "spinsim/protocol.hpp"

namespace spinsim {

enum class Role : std::uint8_t { alice = 0, bob = 1, coordinator = 2 };

struct SessionConfig {
  int n = 1;
  std::uint64_t seed = 0;
  std::uint64_t rounds = 0;
  Role role = Role::coordinator;

  /// Endpoints agree when (n, seed, rounds) match; roles may differ.
  bool compatible_with(const SessionConfig& other) const {
    return n == other.n && seed == other.seed && rounds == other.rounds;
  }
};

enum class FrameKind : std::uint8_t { hello = 1, data = 2, result = 3, bye = 4 };

/// Wire layout, little-endian: kind (1 byte), round_index (8), payload length
/// (4), payload.
struct Frame {
  FrameKind kind = FrameKind::hello;
  std::uint64_t round_index = 0;
  std::vector<std::byte> payload;
};

inline constexpr std::size_t kFrameHeaderBytes = 13;
inline constexpr std::uint32_t kMaxPayloadBytes = 1 << 16;

std::vector<std::byte> encode_frame(const Frame& f);
/// Reads one frame. Unknown kinds and oversized payloads are malformed.
Frame read_frame(ByteStream& in);
void write_frame(ByteStream& out, const Frame& f);

/// HELLO payload: n (u32), seed (u64), rounds (u64), role (u8).
std::vector<std::byte> encode_hello(const SessionConfig& c);
SessionConfig decode_hello(std::span<const std::byte> payload);

std::vector<std::byte> encode_result(std::int64_t value);
std::int64_t decode_result(std::span<const std::byte> payload);

/// Bit i of the payload (LSB-first within each byte) is 1 iff c_{i+1} = +1.
/// Length ceil(2n / 8); pad bits are zero.
std::vector<std::byte> encode_cbits(const CbitVector& c);
/// Throws TransportError(malformed_frame) on wrong length or nonzero padding.
CbitVector decode_cbits(std::span<const std::byte> bytes, int n);

inline std::size_t cbit_payload_bytes(int n) { return static_cast<std::size_t>((2 * n + 7) / 8); }

/// Traffic seen by one endpoint.
struct WireLedger {
  std::uint64_t payload_bits = 0;   // 2n per DATA frame, Alice -> Bob
  std::uint64_t framing_bytes = 0;  // every byte Alice sent to Bob, headers included
  std::uint64_t rounds = 0;
  std::uint64_t reverse_payload_bits = 0;  // DATA bits Bob -> Alice; always zero
};

struct EndpointResult {
  std::vector<std::int64_t> outputs;  // alpha for Alice, beta for Bob
  WireLedger ledger;
};

/// Alice's side. Knows `a` and the shared seed; sends one DATA frame per round
/// and nothing else but HELLO / BYE. Each alpha is also emitted as a RESULT
/// frame on `results` when given.
EndpointResult run_alice(ByteStream& peer, const SessionConfig& config, const UnitVector& a,
                         ByteStream* results = nullptr);

/// Bob's side. Knows `b` and the shared seed; reads cbits only. Each beta is
/// emitted as a RESULT frame on `results` when given, never to Alice.
EndpointResult run_bob(ByteStream& peer, const SessionConfig& config, const UnitVector& b,
                       ByteStream* results = nullptr);

struct SessionResult {
  std::vector<std::pair<std::int64_t, std::int64_t>> outputs;  // (alpha, beta) per round
  WireLedger alice_ledger;
  WireLedger bob_ledger;
};

/// Runs Alice and Bob on their own threads over a connected stream pair and
/// collects their RESULT streams as the coordinator. The first endpoint error
/// is rethrown.
SessionResult run_session(ByteStream& alice_end, ByteStream& bob_end,
                          const SessionConfig& alice_config, const SessionConfig& bob_config,
                          const UnitVector& a, const UnitVector& b);

SessionResult run_session(ByteStream& alice_end, ByteStream& bob_end,
                          const SessionConfig& config, const UnitVector& a, const UnitVector& b);

}  // namespace spinsim
