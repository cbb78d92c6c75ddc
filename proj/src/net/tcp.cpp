// Copyright 2026 The Triad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "triad/net/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "triad/error.hpp"

namespace triad::net {

using Clock = std::chrono::steady_clock;

Endpoint parse_endpoint(std::string_view s) {
  Endpoint e;
  const auto colon = s.rfind(':');
  std::string_view port = s;
  if (colon != std::string_view::npos) {
    e.host = std::string(s.substr(0, colon));
    port = s.substr(colon + 1);
  }
  TRIAD_ENFORCE(!port.empty() && port.size() <= 5 && port.find_first_not_of("0123456789") == std::string_view::npos,
                FormatError, "bad endpoint '" + std::string(s) + "'");
  const unsigned long v = std::stoul(std::string(port));
  TRIAD_ENFORCE(v <= 65535, FormatError, "bad port in '" + std::string(s) + "'");
  e.port = static_cast<uint16_t>(v);
  if (e.host.empty() || e.host == "localhost") e.host = "127.0.0.1";
  return e;
}

namespace {

sockaddr_in resolve(const Endpoint& e) {
  sockaddr_in a{};
  a.sin_family = AF_INET;
  a.sin_port = htons(e.port);
  if (inet_pton(AF_INET, e.host.c_str(), &a.sin_addr) == 1) return a;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  addrinfo* res = nullptr;
  TRIAD_ENFORCE(getaddrinfo(e.host.c_str(), nullptr, &hints, &res) == 0 && res, TransportError,
                "cannot resolve " + e.host);
  a.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return a;
}

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left <= 0 ? 0 : static_cast<int>(std::min<int64_t>(left, INT32_MAX));
}

std::string sys_error(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

TcpChannel::TcpChannel(int fd) : fd_(fd) {
  int one = 1;
  setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpChannel::close() { ::shutdown(fd_, SHUT_RDWR); }

void TcpChannel::do_send(Frame f) {
  const std::vector<uint8_t> buf = encode_frame(f);
  size_t off = 0;
  while (off < buf.size()) {
    const ssize_t n = ::send(fd_, buf.data() + off, buf.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET || errno == ENOTCONN) throw PeerClosed("channel closed");
      throw TransportError(sys_error("send"));
    }
    off += static_cast<size_t>(n);
  }
}

void TcpChannel::read_exact(uint8_t* dst, size_t n, Clock::time_point deadline, bool frame_start) {
  size_t got = 0;
  while (got < n) {
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, remaining_ms(deadline));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw TransportError(sys_error("poll"));
    }
    if (r == 0) throw Timeout("no message within " + std::to_string(timeout().count()) + " ms");
    const ssize_t k = ::recv(fd_, dst + got, n - got, 0);
    if (k < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      if (errno == ECONNRESET) throw PeerClosed("peer reset the connection");
      throw TransportError(sys_error("recv"));
    }
    if (k == 0) {
      if (frame_start && got == 0) throw PeerClosed("peer closed the channel");
      throw FormatError("connection closed inside a frame");
    }
    got += static_cast<size_t>(k);
  }
}

Frame TcpChannel::do_recv() {
  const auto deadline = Clock::now() + timeout();
  uint8_t hdr[kFrameHeaderBytes];
  read_exact(hdr, sizeof(hdr), deadline, true);
  uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<uint32_t>(hdr[i]) << (8 * i);
  Frame f;
  f.tag = hdr[4];
  f.payload.resize(len);
  if (len > 0) read_exact(f.payload.data(), len, deadline, false);
  return f;
}

TcpListener::TcpListener(const Endpoint& at) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  TRIAD_ENFORCE(fd_ >= 0, TransportError, sys_error("socket"));
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in a = resolve(at);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&a), sizeof(a)) != 0 || ::listen(fd_, 4) != 0) {
    const std::string msg = sys_error("bind/listen");
    ::close(fd_);
    throw TransportError(msg + " on port " + std::to_string(at.port));
  }
  socklen_t len = sizeof(a);
  getsockname(fd_, reinterpret_cast<sockaddr*>(&a), &len);
  port_ = ntohs(a.sin_port);
}

TcpListener::~TcpListener() { ::close(fd_); }

std::unique_ptr<TcpChannel> TcpListener::accept(std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  for (;;) {
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, remaining_ms(deadline));
    if (r < 0 && errno == EINTR) continue;
    TRIAD_ENFORCE(r >= 0, TransportError, sys_error("poll"));
    if (r == 0) throw Timeout("no peer connected within " + std::to_string(timeout.count()) + " ms");
    const int c = ::accept(fd_, nullptr, nullptr);
    if (c < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      throw TransportError(sys_error("accept"));
    }
    return std::make_unique<TcpChannel>(c);
  }
}

std::unique_ptr<TcpChannel> tcp_connect(const Endpoint& to, std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  const sockaddr_in a = resolve(to);
  for (;;) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    TRIAD_ENFORCE(fd >= 0, TransportError, sys_error("socket"));
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&a), sizeof(a)) == 0) return std::make_unique<TcpChannel>(fd);
    ::close(fd);
    if (Clock::now() >= deadline) {
      throw Timeout("cannot reach " + to.host + ":" + std::to_string(to.port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

std::array<std::unique_ptr<Channel>, 3> tcp_mesh(size_t self, TcpListener* listener,
                                                 const std::array<Endpoint, 3>& peers,
                                                 std::chrono::milliseconds timeout) {
  TRIAD_ENFORCE(self < 3, Error, "party index out of range");
  std::array<std::unique_ptr<Channel>, 3> out;
  for (size_t p = 0; p < self; ++p) {
    auto c = tcp_connect(peers[p], timeout);
    const uint8_t hello = static_cast<uint8_t>(self);
    c->send(0, std::span<const uint8_t>(&hello, 1));
    out[p] = std::move(c);
  }
  for (size_t n = self + 1; n < 3; ++n) {
    TRIAD_ENFORCE(listener != nullptr, Error, "party needs a listener");
    auto c = listener->accept(timeout);
    c->set_timeout(timeout);
    net::Frame hello = c->recv();
    TRIAD_ENFORCE(hello.payload.size() == 1 && hello.payload[0] > self && hello.payload[0] < 3 &&
                      !out[hello.payload[0]],
                  FormatError, "bad hello from peer");
    out[hello.payload[0]] = std::move(c);
  }
  for (auto& c : out) {
    if (c) {
      c->set_timeout(timeout);
      c->reset_meter();
    }
  }
  return out;
}

}  // namespace triad::net
