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

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "triad/net/channel.hpp"

namespace triad::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  uint16_t port = 0;
};

// "host:port"; a bare port means localhost.
Endpoint parse_endpoint(std::string_view s);

// Socket carrying encoded frames.
class TcpChannel : public Channel {
 public:
  explicit TcpChannel(int fd);
  ~TcpChannel() override;
  void close() override;

 protected:
  void do_send(Frame f) override;
  Frame do_recv() override;

 private:
  void read_exact(uint8_t* dst, size_t n, std::chrono::steady_clock::time_point deadline, bool frame_start);

  int fd_;
};

class TcpListener {
 public:
  explicit TcpListener(const Endpoint& at);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  uint16_t port() const { return port_; }
  std::unique_ptr<TcpChannel> accept(std::chrono::milliseconds timeout);

 private:
  int fd_;
  uint16_t port_;
};

// Retries until the peer listens or the timeout passes.
std::unique_ptr<TcpChannel> tcp_connect(const Endpoint& to, std::chrono::milliseconds timeout);

// Full mesh among three parties. Party `self` accepts the higher indices on
// `listener` and connects to the lower ones, announcing itself with one
// byte. The own slot of the result is empty.
std::array<std::unique_ptr<Channel>, 3> tcp_mesh(size_t self, TcpListener* listener,
                                                 const std::array<Endpoint, 3>& peers,
                                                 std::chrono::milliseconds timeout);

}  // namespace triad::net
