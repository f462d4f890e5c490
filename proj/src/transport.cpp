#include "spinsim/transport.hpp"

#include <exception>
#include <thread>

#include "spinsim/random_stream.hpp"

namespace spinsim {

namespace {

void put_le(std::vector<std::byte>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::span<const std::byte> in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(in[offset + i])) << (8 * i);
  }
  return v;
}

[[noreturn]] void malformed(const std::string& what) {
  throw TransportError(TransportErrorCode::malformed_frame, what);
}

constexpr std::size_t kHelloBytes = 4 + 8 + 8 + 1;

// Closes a stream when the owning scope exits, normally or by exception.
struct CloseOnExit {
  ByteStream& stream;
  ~CloseOnExit() { stream.close(); }
};

}  // namespace

std::vector<std::byte> encode_frame(const Frame& f) {
  if (f.payload.size() > kMaxPayloadBytes) malformed("payload too large");
  std::vector<std::byte> out;
  out.reserve(kFrameHeaderBytes + f.payload.size());
  out.push_back(static_cast<std::byte>(f.kind));
  put_le(out, f.round_index, 8);
  put_le(out, f.payload.size(), 4);
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

void write_frame(ByteStream& out, const Frame& f) { out.write(encode_frame(f)); }

Frame read_frame(ByteStream& in) {
  std::array<std::byte, kFrameHeaderBytes> header{};
  in.read_exact(header);
  const auto kind = std::to_integer<std::uint8_t>(header[0]);
  if (kind < 1 || kind > 4) malformed("unknown frame kind " + std::to_string(kind));
  Frame f;
  f.kind = static_cast<FrameKind>(kind);
  f.round_index = get_le(header, 1, 8);
  const auto length = get_le(header, 9, 4);
  if (length > kMaxPayloadBytes) malformed("payload length " + std::to_string(length));
  f.payload.resize(length);
  in.read_exact(f.payload);
  return f;
}

std::vector<std::byte> encode_hello(const SessionConfig& c) {
  std::vector<std::byte> out;
  put_le(out, static_cast<std::uint32_t>(c.n), 4);
  put_le(out, c.seed, 8);
  put_le(out, c.rounds, 8);
  out.push_back(static_cast<std::byte>(c.role));
  return out;
}

SessionConfig decode_hello(std::span<const std::byte> payload) {
  if (payload.size() != kHelloBytes) malformed("HELLO payload has wrong length");
  SessionConfig c;
  const auto n = get_le(payload, 0, 4);
  if (n < 1 || n > static_cast<std::uint64_t>(SpinParameters::kMaxLevel)) {
    malformed("HELLO carries invalid level n");
  }
  c.n = static_cast<int>(n);
  c.seed = get_le(payload, 4, 8);
  c.rounds = get_le(payload, 12, 8);
  const auto role = std::to_integer<std::uint8_t>(payload[20]);
  if (role > 2) malformed("HELLO carries invalid role");
  c.role = static_cast<Role>(role);
  return c;
}

std::vector<std::byte> encode_result(std::int64_t value) {
  std::vector<std::byte> out;
  put_le(out, static_cast<std::uint64_t>(value), 8);
  return out;
}

std::int64_t decode_result(std::span<const std::byte> payload) {
  if (payload.size() != 8) malformed("RESULT payload must be 8 bytes");
  return static_cast<std::int64_t>(get_le(payload, 0, 8));
}

std::vector<std::byte> encode_cbits(const CbitVector& c) {
  std::vector<std::byte> out((static_cast<std::size_t>(c.size()) + 7) / 8, std::byte{0});
  for (int i = 0; i < c.size(); ++i) {
    if (c[i].value() > 0) out[static_cast<std::size_t>(i / 8)] |= std::byte{1} << (i % 8);
  }
  return out;
}

CbitVector decode_cbits(std::span<const std::byte> bytes, int n) {
  if (n < 1 || n > SpinParameters::kMaxLevel) malformed("cbit level out of range");
  const int bits = 2 * n;
  if (bytes.size() != cbit_payload_bytes(n)) malformed("DATA payload has wrong length");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    mask |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(bytes[i])) << (8 * i);
  }
  if (bits < 64 && (mask >> bits) != 0) malformed("DATA payload has nonzero padding bits");
  return CbitVector::from_mask(bits, mask);
}

EndpointResult run_alice(ByteStream& peer, const SessionConfig& config, const UnitVector& a,
                         ByteStream* results) {
  CloseOnExit guard{peer};
  const SpinParameters params(config.n);
  EndpointResult out;
  auto send = [&](const Frame& f) {
    const auto bytes = encode_frame(f);
    peer.write(bytes);
    out.ledger.framing_bytes += bytes.size();
  };

  SessionConfig mine = config;
  mine.role = Role::alice;
  send({FrameKind::hello, 0, encode_hello(mine)});
  const auto reply = read_frame(peer);
  if (reply.kind != FrameKind::hello) malformed("expected HELLO from Bob");
  if (!decode_hello(reply.payload).compatible_with(config)) {
    throw TransportError(TransportErrorCode::handshake_mismatch,
                         "Bob's session parameters differ from Alice's");
  }

  out.outputs.reserve(config.rounds);
  SharedRandomness shared;
  for (std::uint64_t i = 0; i < config.rounds; ++i) {
    auto rng = RandomStream::for_round(config.seed, i);
    fill_shared_randomness(rng, params, shared);
    const auto alpha = alice_output(a, shared);
    send({FrameKind::data, i, encode_cbits(alice_cbits(a, shared))});
    out.ledger.payload_bits += static_cast<std::uint64_t>(params.cbits_per_round());
    ++out.ledger.rounds;
    out.outputs.push_back(alpha);
    if (results) write_frame(*results, {FrameKind::result, i, encode_result(alpha)});
  }
  send({FrameKind::bye, config.rounds, {}});

  const auto last = read_frame(peer);
  if (last.kind == FrameKind::data) {
    out.ledger.reverse_payload_bits += 8 * last.payload.size();
    malformed("Bob sent application data to Alice");
  }
  if (last.kind != FrameKind::bye) malformed("expected BYE from Bob");
  if (results) write_frame(*results, {FrameKind::bye, config.rounds, {}});
  return out;
}

EndpointResult run_bob(ByteStream& peer, const SessionConfig& config, const UnitVector& b,
                       ByteStream* results) {
  CloseOnExit guard{peer};
  const SpinParameters params(config.n);
  EndpointResult out;

  const auto hello = read_frame(peer);
  if (hello.kind != FrameKind::hello) malformed("expected HELLO from Alice");
  out.ledger.framing_bytes += kFrameHeaderBytes + hello.payload.size();
  SessionConfig mine = config;
  mine.role = Role::bob;
  write_frame(peer, {FrameKind::hello, 0, encode_hello(mine)});
  if (!decode_hello(hello.payload).compatible_with(config)) {
    throw TransportError(TransportErrorCode::handshake_mismatch,
                         "Alice's session parameters differ from Bob's");
  }

  out.outputs.reserve(config.rounds);
  SharedRandomness shared;
  for (std::uint64_t i = 0; i < config.rounds; ++i) {
    const auto f = read_frame(peer);
    out.ledger.framing_bytes += kFrameHeaderBytes + f.payload.size();
    if (f.kind != FrameKind::data) malformed("expected DATA for round " + std::to_string(i));
    if (f.round_index != i) malformed("DATA frame out of order");
    const auto cbits = decode_cbits(f.payload, config.n);
    auto rng = RandomStream::for_round(config.seed, i);
    fill_shared_randomness(rng, params, shared);
    const auto beta = bob_output_simplified(b, cbits, std::span<const UnitVector>(shared.mus));
    out.ledger.payload_bits += static_cast<std::uint64_t>(params.cbits_per_round());
    ++out.ledger.rounds;
    out.outputs.push_back(beta);
    if (results) write_frame(*results, {FrameKind::result, i, encode_result(beta)});
  }

  const auto bye = read_frame(peer);
  out.ledger.framing_bytes += kFrameHeaderBytes + bye.payload.size();
  if (bye.kind != FrameKind::bye) malformed("expected BYE after the last round");
  write_frame(peer, {FrameKind::bye, config.rounds, {}});
  if (results) write_frame(*results, {FrameKind::bye, config.rounds, {}});
  return out;
}

namespace {

std::vector<std::int64_t> collect_results(ByteStream& in, std::uint64_t rounds) {
  std::vector<std::int64_t> values;
  values.reserve(rounds);
  for (;;) {
    const auto f = read_frame(in);
    if (f.kind == FrameKind::bye) break;
    if (f.kind != FrameKind::result || f.round_index != values.size()) {
      malformed("unexpected frame on the result stream");
    }
    values.push_back(decode_result(f.payload));
  }
  return values;
}

}  // namespace

SessionResult run_session(ByteStream& alice_end, ByteStream& bob_end,
                          const SessionConfig& alice_config, const SessionConfig& bob_config,
                          const UnitVector& a, const UnitVector& b) {
  auto [alice_results_out, alice_results_in] = make_pipe();
  auto [bob_results_out, bob_results_in] = make_pipe();

  EndpointResult alice, bob;
  std::exception_ptr alice_error, bob_error;
  std::thread alice_thread([&] {
    try {
      alice = run_alice(alice_end, alice_config, a, alice_results_out.get());
    } catch (...) {
      alice_error = std::current_exception();
    }
    alice_results_out->close();
  });
  std::thread bob_thread([&] {
    try {
      bob = run_bob(bob_end, bob_config, b, bob_results_out.get());
    } catch (...) {
      bob_error = std::current_exception();
    }
    bob_results_out->close();
  });
  alice_thread.join();
  bob_thread.join();

  // Report the root cause: a stream_closed error on one side is usually the
  // consequence of the other side aborting.
  const auto is_closed = [](const std::exception_ptr& e) {
    try {
      std::rethrow_exception(e);
    } catch (const TransportError& t) {
      return t.code() == TransportErrorCode::stream_closed;
    } catch (...) {
      return false;
    }
  };
  if (alice_error && bob_error && is_closed(alice_error) && !is_closed(bob_error)) {
    std::rethrow_exception(bob_error);
  }
  if (alice_error) std::rethrow_exception(alice_error);
  if (bob_error) std::rethrow_exception(bob_error);

  const auto alphas = collect_results(*alice_results_in, alice_config.rounds);
  const auto betas = collect_results(*bob_results_in, bob_config.rounds);
  if (alphas.size() != betas.size()) malformed("coordinator saw unequal result counts");

  SessionResult r;
  r.outputs.reserve(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) r.outputs.emplace_back(alphas[i], betas[i]);
  r.alice_ledger = alice.ledger;
  r.bob_ledger = bob.ledger;
  return r;
}

SessionResult run_session(ByteStream& alice_end, ByteStream& bob_end,
                          const SessionConfig& config, const UnitVector& a, const UnitVector& b) {
  return run_session(alice_end, bob_end, config, config, a, b);
}

}  // namespace spinsim
