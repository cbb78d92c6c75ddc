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

#include "triad/net/channel.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>

#include "triad/error.hpp"

namespace triad::net {

std::vector<uint8_t> encode_frame(const Frame& f) {
  TRIAD_ENFORCE(f.payload.size() <= UINT32_MAX, FormatError, "frame payload too large");
  std::vector<uint8_t> out;
  out.reserve(f.payload.size() + kFrameHeaderBytes);
  const auto n = static_cast<uint32_t>(f.payload.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(n >> (8 * i)));
  out.push_back(f.tag);
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

void Channel::send(uint8_t tag, std::span<const uint8_t> payload) {
  meter_.payload_sent += static_cast<int64_t>(payload.size());
  meter_.frames_sent += 1;
  do_send(Frame{tag, std::vector<uint8_t>(payload.begin(), payload.end())});
}

Frame Channel::recv() {
  Frame f = do_recv();
  meter_.payload_recv += static_cast<int64_t>(f.payload.size());
  meter_.frames_recv += 1;
  return f;
}

namespace {

struct Queue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Frame> frames;
  bool closed = false;
};

class PipeEnd : public Channel {
 public:
  PipeEnd(std::shared_ptr<Queue> in, std::shared_ptr<Queue> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~PipeEnd() override { close(); }

  void close() override {
    for (auto* q : {in_.get(), out_.get()}) {
      std::lock_guard<std::mutex> lk(q->mu);
      q->closed = true;
      q->cv.notify_all();
    }
  }

 protected:
  void do_send(Frame f) override {
    std::lock_guard<std::mutex> lk(out_->mu);
    if (out_->closed) throw PeerClosed("channel closed");
    out_->frames.push_back(std::move(f));
    out_->cv.notify_all();
  }

  Frame do_recv() override {
    std::unique_lock<std::mutex> lk(in_->mu);
    const bool ready = in_->cv.wait_for(lk, timeout(), [&] { return !in_->frames.empty() || in_->closed; });
    if (!ready) throw Timeout("no message within " + std::to_string(timeout().count()) + " ms");
    if (in_->frames.empty()) throw PeerClosed("peer closed the channel");
    Frame f = std::move(in_->frames.front());
    in_->frames.pop_front();
    return f;
  }

 private:
  std::shared_ptr<Queue> in_, out_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_pipe() {
  auto a = std::make_shared<Queue>(), b = std::make_shared<Queue>();
  return {std::make_unique<PipeEnd>(a, b), std::make_unique<PipeEnd>(b, a)};
}

}  // namespace triad::net
