#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace spinsim {

enum class TransportErrorCode : int {
  handshake_mismatch = 1,
  malformed_frame = 2,
  stream_closed = 3,
};

class TransportError : public std::runtime_error {
 public:
  TransportError(TransportErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  TransportErrorCode code() const { return code_; }

 private:
  TransportErrorCode code_;
};

/// Reliable, ordered, bidirectional byte stream. read_exact throws
/// TransportError(stream_closed) if the peer closes before enough bytes arrive.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write(std::span<const std::byte> data) = 0;
  virtual void read_exact(std::span<std::byte> out) = 0;
  /// Shuts down the sending direction; the peer's pending reads then fail.
  virtual void close() = 0;
};

/// Two connected in-memory endpoints; writes never block.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe();

/// Thrown for socket-level failures (resolve, bind, connect).
class ConnectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// host:port, e.g. "127.0.0.1:7400".
struct Address {
  std::string host;
  std::uint16_t port = 0;

  static Address parse(const std::string& text);
};

class TcpListener {
 public:
  /// Binds and listens. Port 0 picks an ephemeral port; see port().
  explicit TcpListener(const Address& address);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<ByteStream> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Connects, retrying until `timeout_ms` elapses.
std::unique_ptr<ByteStream> tcp_connect(const Address& address, int timeout_ms = 5000);

}  // namespace spinsim
