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

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace triad::net {

// One message: u32 LE payload length, u8 tag, payload.
struct Frame {
  uint8_t tag = 0;
  std::vector<uint8_t> payload;

  bool operator==(const Frame&) const = default;
};

inline constexpr int64_t kFrameHeaderBytes = 5;

std::vector<uint8_t> encode_frame(const Frame& f);

struct Meter {
  int64_t payload_sent = 0;
  int64_t frames_sent = 0;
  int64_t payload_recv = 0;
  int64_t frames_recv = 0;

  int64_t header_sent() const { return frames_sent * kFrameHeaderBytes; }
};

// A reliable, ordered, bidirectional message pipe to one peer. Meters count
// payload bytes only; framing is reported through header_sent().
class Channel {
 public:
  virtual ~Channel() = default;

  void send(uint8_t tag, std::span<const uint8_t> payload);
  Frame recv();
  virtual void close() = 0;

  const Meter& meter() const { return meter_; }
  void reset_meter() { meter_ = {}; }

  std::chrono::milliseconds timeout() const { return timeout_; }
  virtual void set_timeout(std::chrono::milliseconds t) { timeout_ = t; }

 protected:
  virtual void do_send(Frame f) = 0;
  // Throws Timeout after timeout() without data, PeerClosed once the other
  // end is gone and everything it sent has been read.
  virtual Frame do_recv() = 0;

 private:
  Meter meter_;
  std::chrono::milliseconds timeout_{10000};
};

// Two connected in-process endpoints.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_pipe();

}  // namespace triad::net
