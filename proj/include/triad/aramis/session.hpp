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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "triad/aramis/channel.hpp"
#include "triad/ir/ir.hpp"
#include "triad/porthos/backend.hpp"

namespace triad::aramis {

using porthos::ProtocolContext;
using porthos::RingTensor;

enum class Strategy : uint8_t { None, BitFlip, Truncate, Replay, Reorder, Drop, ForgeSignature, WrongInput };

inline constexpr std::array<Strategy, 7> kAttacks = {Strategy::BitFlip, Strategy::Truncate,       Strategy::Replay,
                                                     Strategy::Reorder, Strategy::Drop,           Strategy::ForgeSignature,
                                                     Strategy::WrongInput};

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view s);

// Frame `point` on the adversary -> victim link is rewritten; frame 0 is the
// token, protocol messages start at 1.
struct TamperSpec {
  Strategy strategy = Strategy::None;
  Role adversary = Role::P2;
  Role victim = Role::P0;
  uint64_t point = 1;
  uint64_t seed = 0;
};

// Man-in-the-middle on one directed link, below the signature layer.
class TamperingChannel : public net::Channel {
 public:
  TamperingChannel(net::Channel& inner, TamperSpec spec, std::function<void()> on_wrong_input)
      : inner_(inner), spec_(spec), on_wrong_input_(std::move(on_wrong_input)), rng_(spec.seed) {
    set_timeout(inner.timeout());
  }
  void close() override { inner_.close(); }
  void set_timeout(std::chrono::milliseconds t) override {
    Channel::set_timeout(t);
    inner_.set_timeout(t);
  }
  bool fired() const { return fired_; }

 protected:
  void do_send(net::Frame f) override;
  net::Frame do_recv() override { return inner_.recv(); }

 private:
  uint64_t draw(uint64_t bound) { return bound == 0 ? 0 : (rng_ = rng_ * 6364136223846793005ULL + 1442695040888963407ULL) % bound; }

  net::Channel& inner_;
  TamperSpec spec_;
  std::function<void()> on_wrong_input_;
  uint64_t rng_;
  uint64_t index_ = 0;
  bool fired_ = false;
  std::vector<net::Frame> history_;
  std::optional<net::Frame> held_;
};

// SHA-256 of the running executable: the code identity put in tokens.
const Digest& code_identity();

struct PartyOutcome {
  bool ok = false;
  std::optional<AbortReport> abort;
  std::string error;
  bool timed_out = false;
};

struct SessionOptions {
  std::string seed = "aramis";
  std::chrono::milliseconds timeout{10000};
  bool attested = true;
  // Code hash each party commits to; defaults to code_identity().
  std::array<std::optional<Digest>, 3> code_hash;
  std::optional<TamperSpec> tamper;
};

// One party's view of an attested session over three raw channels (the own
// role's slot is unused). In attested mode setup() commits to the code,
// exchanges tokens and binds the input; otherwise channels only record the
// transcript.
class AttestedParty {
 public:
  AttestedParty(Role role, std::array<net::Channel*, 3> raw, const SessionOptions& opt);
  ~AttestedParty();

  void setup(const Bytes& input);
  // Runs setup (when attested) and fn, mapping failures to an outcome. On
  // failure the raw channels are closed.
  PartyOutcome run(const std::function<void(ProtocolContext&)>& fn, const Bytes& input);

  Role role() const { return role_; }
  ProtocolContext& ctx() { return *ctx_; }
  AttestFunctionality& functionality() { return *fa_; }
  const AttestState& initial_state() const { return state0_; }
  const AttestState& state() const { return state_; }
  const TranscriptChain& transcript() const { return chain_; }
  // Protocol payload bytes sent to `peer` above the signature layer.
  const net::Meter& meter(Role peer) const;
  void close();

 private:
  Role role_;
  std::array<net::Channel*, 3> raw_;
  bool attested_;
  Digest code_;
  RootAuthority root_;
  std::unique_ptr<AttestFunctionality> fa_;
  std::array<std::unique_ptr<net::Channel>, 3> outer_;
  AttestState state0_;
  AttestState state_;
  TranscriptChain chain_;
  std::unique_ptr<ProtocolContext> ctx_;
};

// Three in-process parties on threads.
class Session {
 public:
  explicit Session(SessionOptions opt);
  ~Session();

  std::array<PartyOutcome, 3> run(const std::function<void(ProtocolContext&)>& fn,
                                  const std::array<Bytes, 3>& inputs = {});

  AttestedParty& party(Role r) { return *party_[static_cast<size_t>(r)]; }
  ProtocolContext& ctx(Role r) { return party(r).ctx(); }
  const TranscriptChain& transcript(Role r) const { return party_[static_cast<size_t>(r)]->transcript(); }
  AttestFunctionality& functionality(Role r) { return party(r).functionality(); }
  const AttestState& state(Role r) const { return party_[static_cast<size_t>(r)]->state(); }
  // Protocol payload bytes (what the semi-honest run would send).
  int64_t payload_total() const;
  // Bytes on the pipes including counters, signatures and tokens.
  int64_t wire_total() const;
  // Frames sent on a directed link below the signature layer.
  int64_t wire_frames(Role from, Role to) const;
  const net::Meter& wire_meter(Role from, Role to) const;
  bool tamper_fired() const { return tamper_ && tamper_->fired(); }

 private:
  SessionOptions opt_;
  std::array<std::array<std::unique_ptr<net::Channel>, 3>, 3> pipes_;
  TamperingChannel* tamper_ = nullptr;
  std::unique_ptr<TamperingChannel> tamper_owned_;
  std::array<std::unique_ptr<AttestedParty>, 3> party_;
};

struct InferenceJob {
  const ir::LLILProgram* program = nullptr;
  const porthos::Weights* weights = nullptr;
  const RingTensor* input = nullptr;
};

Bytes commitment_bytes(const porthos::Weights* w, const RingTensor* input);

struct InferenceRun {
  std::array<PartyOutcome, 3> outcome;
  RingTensor output;  // P1's opened output when it finished
  Digest transcript_p1{};
  double seconds = 0;
};

InferenceRun run_inference(const InferenceJob& job, SessionOptions opt);

struct TamperCase {
  TamperSpec spec;
  bool fired = false;
  bool honest_abort = false;
  bool silent_corruption = false;
  std::optional<AbortReport> report;
};

// Every strategy at `points` injection points spread over the frames each
// adversary link carries in a clean run.
std::vector<TamperCase> tamper_campaign(const InferenceJob& job, int points, uint64_t seed,
                                        std::chrono::milliseconds timeout);

}  // namespace triad::aramis
