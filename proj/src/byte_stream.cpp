#include "spinsim/byte_stream.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

namespace spinsim {

namespace {

struct PipeState {
  std::mutex mutex;
  std::condition_variable ready;
  std::array<std::deque<std::byte>, 2> queues;  // queues[i]: bytes written by side i
  std::array<bool, 2> closed{false, false};
};

class PipeEnd final : public ByteStream {
 public:
  PipeEnd(std::shared_ptr<PipeState> state, int side) : state_(std::move(state)), side_(side) {}
  ~PipeEnd() override { close(); }

  void write(std::span<const std::byte> data) override {
    {
      std::lock_guard lock(state_->mutex);
      if (state_->closed[side_]) {
        throw TransportError(TransportErrorCode::stream_closed, "write on closed pipe");
      }
      auto& q = state_->queues[side_];
      q.insert(q.end(), data.begin(), data.end());
    }
    state_->ready.notify_all();
  }

  void read_exact(std::span<std::byte> out) override {
    const int peer = 1 - side_;
    std::unique_lock lock(state_->mutex);
    auto& q = state_->queues[peer];
    state_->ready.wait(lock, [&] { return q.size() >= out.size() || state_->closed[peer]; });
    if (q.size() < out.size()) {
      throw TransportError(TransportErrorCode::stream_closed, "peer closed the pipe");
    }
    std::copy_n(q.begin(), out.size(), out.begin());
    q.erase(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(out.size()));
  }

  void close() override {
    {
      std::lock_guard lock(state_->mutex);
      state_->closed[side_] = true;
    }
    state_->ready.notify_all();
  }

 private:
  std::shared_ptr<PipeState> state_;
  int side_;
};

class SocketStream final : public ByteStream {
 public:
  explicit SocketStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~SocketStream() override { ::close(fd_); }

  void write(std::span<const std::byte> data) override {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const auto r = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (r < 0 && errno == EINTR) continue;
      if (r <= 0) throw TransportError(TransportErrorCode::stream_closed, "socket send failed");
      sent += static_cast<std::size_t>(r);
    }
  }

  void read_exact(std::span<std::byte> out) override {
    std::size_t got = 0;
    while (got < out.size()) {
      const auto r = ::recv(fd_, out.data() + got, out.size() - got, 0);
      if (r < 0 && errno == EINTR) continue;
      if (r <= 0) throw TransportError(TransportErrorCode::stream_closed, "peer closed the socket");
      got += static_cast<std::size_t>(r);
    }
  }

  void close() override { ::shutdown(fd_, SHUT_WR); }

 private:
  int fd_;
};

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) ::freeaddrinfo(head);
  }
};

void resolve(const Address& address, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const auto port = std::to_string(address.port);
  const int rc = ::getaddrinfo(address.host.empty() ? nullptr : address.host.c_str(),
                               port.c_str(), &hints, &out.head);
  if (rc != 0 || out.head == nullptr) {
    throw ConnectionError("cannot resolve " + address.host + ": " + ::gai_strerror(rc));
  }
}

}  // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe() {
  auto state = std::make_shared<PipeState>();
  return {std::make_unique<PipeEnd>(state, 0), std::make_unique<PipeEnd>(state, 1)};
}

Address Address::parse(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 == text.size()) {
    throw std::invalid_argument("address must look like host:port, got '" + text + "'");
  }
  Address a;
  a.host = text.substr(0, colon);
  unsigned long port = 0;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  const auto [end, ec] = std::from_chars(first, last, port);
  if (ec != std::errc{} || end != last || port > 65535) {
    throw std::invalid_argument("bad port in '" + text + "'");
  }
  a.port = static_cast<std::uint16_t>(port);
  return a;
}

TcpListener::TcpListener(const Address& address) {
  AddrInfo info;
  resolve(address, true, info);
  fd_ = ::socket(info.head->ai_family, info.head->ai_socktype, info.head->ai_protocol);
  if (fd_ < 0) throw ConnectionError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd_, info.head->ai_addr, info.head->ai_addrlen) != 0 || ::listen(fd_, 4) != 0) {
    const std::string msg = std::strerror(errno);
    ::close(fd_);
    throw ConnectionError("cannot listen on " + address.host + ":" +
                          std::to_string(address.port) + ": " + msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<ByteStream> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<SocketStream>(fd);
    if (errno != EINTR) throw ConnectionError(std::string("accept: ") + std::strerror(errno));
  }
}

std::unique_ptr<ByteStream> tcp_connect(const Address& address, int timeout_ms) {
  AddrInfo info;
  resolve(address, false, info);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    const int fd = ::socket(info.head->ai_family, info.head->ai_socktype, info.head->ai_protocol);
    if (fd < 0) throw ConnectionError(std::string("socket: ") + std::strerror(errno));
    if (::connect(fd, info.head->ai_addr, info.head->ai_addrlen) == 0) {
      return std::make_unique<SocketStream>(fd);
    }
    const std::string msg = std::strerror(errno);
    ::close(fd);
    if (std::chrono::steady_clock::now() >= deadline) {
      throw ConnectionError("cannot connect to " + address.host + ":" +
                            std::to_string(address.port) + ": " + msg);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

}  // namespace spinsim
