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

#include "triad/aramis/session.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <thread>

#include "triad/porthos/protocols.hpp"

namespace triad::aramis {

namespace {

constexpr uint8_t kTokenTag = 0x30;

const char* const kStrategyNames[] = {"none",    "bit-flip", "truncate",       "replay",
                                      "reorder", "drop",     "forge-signature", "wrong-input-reuse"};

Bytes echo(uint64_t, std::span<const uint8_t> w, std::span<const uint8_t>, const AttestState&) {
  return Bytes(w.begin(), w.end());
}

}  // namespace

std::string_view strategy_name(Strategy s) { return kStrategyNames[static_cast<size_t>(s)]; }

Strategy parse_strategy(std::string_view s) {
  for (size_t i = 0; i < std::size(kStrategyNames); ++i) {
    if (s == kStrategyNames[i]) return static_cast<Strategy>(i);
  }
  throw FormatError("unknown tamper strategy '" + std::string(s) + "'");
}

void TamperingChannel::do_send(net::Frame f) {
  const uint64_t idx = index_++;
  const bool hit = idx == spec_.point;
  if (spec_.strategy == Strategy::Replay && idx < spec_.point) history_.push_back(f);
  if (spec_.strategy == Strategy::Reorder && held_ && idx == spec_.point + 1) {
    inner_.send(f.tag, f.payload);
    inner_.send(held_->tag, held_->payload);
    held_.reset();
    return;
  }
  if (!hit) {
    inner_.send(f.tag, f.payload);
    return;
  }
  fired_ = true;
  auto& p = f.payload;
  const bool signed_frame = p.size() >= kTrailerBytes;
  const size_t body = signed_frame ? p.size() - kTrailerBytes : p.size();
  switch (spec_.strategy) {
    case Strategy::None:
      break;
    case Strategy::BitFlip:
      if (!p.empty()) {
        const uint64_t bit = draw(p.size() * 8);
        p[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
      }
      break;
    case Strategy::Truncate:
      p.resize(draw(p.size()));
      break;
    case Strategy::Replay:
      if (!history_.empty()) f = history_[draw(history_.size())];
      break;
    case Strategy::Reorder:
      held_ = std::move(f);
      return;
    case Strategy::Drop:
      return;
    case Strategy::ForgeSignature:
      if (signed_frame) {
        if (body > 0) p[draw(body)] ^= 0x5a;
        const uint64_t ctr = get_u64(p.data() + body);
        const SigningKey fresh = SigningKey::from_seed("forger/" + std::to_string(spec_.seed));
        const Signature sig = fresh.sign(signing_payload(
            f.tag, std::span<const uint8_t>(p.data(), body), ctr, direction_tag(spec_.adversary, spec_.victim)));
        std::copy(sig.begin(), sig.end(), p.begin() + static_cast<std::ptrdiff_t>(body + 8));
      }
      break;
    case Strategy::WrongInput:
      if (on_wrong_input_) on_wrong_input_();
      // The message recomputed on another input, carrying the stale signature.
      if (body > 0) p[draw(body)] += 1;
      break;
  }
  inner_.send(f.tag, f.payload);
}

const Digest& code_identity() {
  static const Digest d = [] {
    std::ifstream in("/proc/self/exe", std::ios::binary);
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.empty()) return sha256(std::string("triad"));
    return sha256(bytes);
  }();
  return d;
}

AttestedParty::AttestedParty(Role role, std::array<net::Channel*, 3> raw, const SessionOptions& opt)
    : role_(role),
      raw_(raw),
      attested_(opt.attested),
      code_(opt.code_hash[static_cast<size_t>(role)].value_or(code_identity())),
      root_(SigningKey::from_seed(opt.seed + "/root")) {
  const size_t r = static_cast<size_t>(role);
  const std::string name(porthos::role_name(role));
  fa_ = std::make_unique<AttestFunctionality>(SigningKey::from_seed(opt.seed + "/sign/" + name), root_,
                                              static_cast<uint32_t>(r),
                                              ring::key_from_seed(opt.seed + "/fa/" + name));
  for (size_t p = 0; p < 3; ++p) {
    if (p == r) continue;
    const auto peer = static_cast<Role>(p);
    if (attested_) {
      outer_[p] = std::make_unique<AttestedChannel>(*raw_[p], *fa_, role, peer, &chain_);
    } else {
      outer_[p] = std::make_unique<RecordingChannel>(*raw_[p], role, peer, &chain_);
    }
  }
  ctx_ = std::make_unique<ProtocolContext>(role, porthos::test_keys(role, opt.seed),
                                           std::array<net::Channel*, 3>{outer_[0].get(), outer_[1].get(),
                                                                        outer_[2].get()});
}

AttestedParty::~AttestedParty() = default;

void AttestedParty::setup(const Bytes& input) {
  const size_t r = static_cast<size_t>(role_);
  auto committed = fa_->commit(code_, echo);
  TRIAD_ENFORCE(committed.has_value(), Error, "functionality already committed");
  state0_ = committed->first;
  const Bytes token = committed->second.serialize();
  for (size_t p = 0; p < 3; ++p) {
    if (p == r) continue;
    try {
      raw_[p]->send(kTokenTag, token);
    } catch (const PeerClosed&) {
      throw ProtocolAbort({0, channel_name(role_, static_cast<Role>(p)), "peer-closed", ""});
    }
  }
  for (size_t p = 0; p < 3; ++p) {
    if (p == r) continue;
    const auto peer = static_cast<Role>(p);
    auto fail = [&](const std::string& check) { throw ProtocolAbort({0, channel_name(peer, role_), check, ""}); };
    net::Frame f;
    try {
      f = raw_[p]->recv();
    } catch (const Timeout&) {
      fail("timeout");
    } catch (const PeerClosed&) {
      fail("peer-closed");
    }
    if (f.tag != kTokenTag || f.payload.size() != AttestToken::kBytes) fail("token");
    AttestToken t;
    try {
      t = AttestToken::parse(f.payload);
    } catch (const FormatError&) {
      fail("token");
    }
    if (!verify_token(t, root_.verify_key()) || t.code_hash != code_) fail("token");
    static_cast<AttestedChannel&>(*outer_[p]).set_peer_key(t.vk);
  }
  state_ = fa_->compute(state0_, input).state;
}

PartyOutcome AttestedParty::run(const std::function<void(ProtocolContext&)>& fn, const Bytes& input) {
  PartyOutcome out;
  try {
    if (attested_) setup(input);
    fn(*ctx_);
    out.ok = true;
    return out;
  } catch (const ProtocolAbort& e) {
    out.abort = e.report();
    out.error = e.what();
    out.timed_out = out.abort->check == "timeout";
  } catch (const AttestHalted& e) {
    out.abort = AbortReport{fa_->ctr(), std::string(porthos::role_name(role_)), "halted", ""};
    out.error = e.what();
  } catch (const Timeout& e) {
    out.error = e.what();
    out.timed_out = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  close();
  return out;
}

const net::Meter& AttestedParty::meter(Role peer) const {
  const auto& c = outer_[static_cast<size_t>(peer)];
  TRIAD_ENFORCE(c != nullptr, Error, "no channel to own role");
  return c->meter();
}

void AttestedParty::close() {
  for (size_t p = 0; p < 3; ++p) {
    if (p != static_cast<size_t>(role_) && raw_[p]) raw_[p]->close();
  }
}

Session::Session(SessionOptions opt) : opt_(std::move(opt)) {
  for (size_t a = 0; a < 3; ++a) {
    for (size_t b = a + 1; b < 3; ++b) {
      auto [x, y] = net::make_pipe();
      x->set_timeout(opt_.timeout);
      y->set_timeout(opt_.timeout);
      pipes_[a][b] = std::move(x);
      pipes_[b][a] = std::move(y);
    }
  }
  if (opt_.tamper && opt_.tamper->strategy != Strategy::None) {
    const TamperSpec t = *opt_.tamper;
    const size_t adv = static_cast<size_t>(t.adversary);
    tamper_owned_ = std::make_unique<TamperingChannel>(
        *pipes_[adv][static_cast<size_t>(t.victim)], t, [this, adv] {
          try {
            party_[adv]->functionality().compute(party_[adv]->initial_state(), Bytes{'a', 'l', 't'});
          } catch (const AttestHalted&) {
          }
        });
    tamper_ = tamper_owned_.get();
  }
  for (size_t r = 0; r < 3; ++r) {
    const auto role = static_cast<Role>(r);
    std::array<net::Channel*, 3> raw{};
    for (size_t p = 0; p < 3; ++p) {
      if (p == r) continue;
      const bool tampered = tamper_ && role == opt_.tamper->adversary && static_cast<Role>(p) == opt_.tamper->victim;
      raw[p] = tampered ? static_cast<net::Channel*>(tamper_) : pipes_[r][p].get();
    }
    party_[r] = std::make_unique<AttestedParty>(role, raw, opt_);
  }
}

Session::~Session() = default;

std::array<PartyOutcome, 3> Session::run(const std::function<void(ProtocolContext&)>& fn,
                                         const std::array<Bytes, 3>& inputs) {
  std::array<PartyOutcome, 3> out;
  std::vector<std::thread> threads;
  for (size_t r = 0; r < 3; ++r) {
    threads.emplace_back([&, r] { out[r] = party_[r]->run(fn, inputs[r]); });
  }
  for (auto& t : threads) t.join();
  return out;
}

int64_t Session::payload_total() const {
  int64_t n = 0;
  for (size_t r = 0; r < 3; ++r) {
    for (size_t p = 0; p < 3; ++p) {
      if (p != r) n += party_[r]->meter(static_cast<Role>(p)).payload_sent;
    }
  }
  return n;
}

int64_t Session::wire_total() const {
  int64_t n = 0;
  for (const auto& row : pipes_) {
    for (const auto& c : row) {
      if (c) n += c->meter().payload_sent;
    }
  }
  return n;
}

int64_t Session::wire_frames(Role from, Role to) const {
  return pipes_[static_cast<size_t>(from)][static_cast<size_t>(to)]->meter().frames_sent;
}

const net::Meter& Session::wire_meter(Role from, Role to) const {
  return pipes_[static_cast<size_t>(from)][static_cast<size_t>(to)]->meter();
}

Bytes commitment_bytes(const porthos::Weights* w, const RingTensor* input) {
  Bytes b;
  if (w) {
    for (const auto& [name, t] : *w) {
      b.insert(b.end(), name.begin(), name.end());
      b.push_back(0);
      const Bytes e = ring::encode(t);
      b.insert(b.end(), e.begin(), e.end());
    }
  }
  if (input) {
    const Bytes e = ring::encode(*input);
    b.insert(b.end(), e.begin(), e.end());
  }
  const Digest d = sha256(b);
  return Bytes(d.begin(), d.end());
}

namespace {

std::function<void(ProtocolContext&)> inference_fn(const InferenceJob& job, RingTensor& p1_out) {
  return [&job, &p1_out](ProtocolContext& ctx) {
    const Role r = ctx.role();
    RingTensor out = porthos::run_inference(ctx, *job.program, r == Role::P0 ? job.weights : nullptr,
                                            r == Role::P1 ? job.input : nullptr);
    if (r == Role::P1) p1_out = std::move(out);
  };
}

std::array<Bytes, 3> job_inputs(const InferenceJob& job) {
  return {commitment_bytes(job.weights, nullptr), commitment_bytes(nullptr, job.input), Bytes{}};
}

}  // namespace

InferenceRun run_inference(const InferenceJob& job, SessionOptions opt) {
  Session s(std::move(opt));
  InferenceRun res;
  const auto t0 = std::chrono::steady_clock::now();
  res.outcome = s.run(inference_fn(job, res.output), job_inputs(job));
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.transcript_p1 = s.transcript(Role::P1).head();
  return res;
}

std::vector<TamperCase> tamper_campaign(const InferenceJob& job, int points, uint64_t seed,
                                        std::chrono::milliseconds timeout) {
  SessionOptions base;
  base.seed = "campaign/" + std::to_string(seed);
  base.timeout = timeout;
  RingTensor expected;
  std::array<std::array<int64_t, 3>, 3> frames{};
  {
    Session clean(base);
    auto oc = clean.run(inference_fn(job, expected), job_inputs(job));
    for (const auto& o : oc) TRIAD_ENFORCE(o.ok, Error, "clean run failed: " + o.error);
    for (size_t a = 0; a < 3; ++a)
      for (size_t b = 0; b < 3; ++b)
        if (a != b) frames[a][b] = clean.wire_frames(static_cast<Role>(a), static_cast<Role>(b));
  }
  std::vector<std::pair<Role, Role>> links;
  for (size_t a = 0; a < 3; ++a)
    for (size_t b = 0; b < 3; ++b)
      if (a != b && frames[a][b] >= 3) links.emplace_back(static_cast<Role>(a), static_cast<Role>(b));
  TRIAD_ENFORCE(!links.empty(), Error, "no link carries enough frames to tamper with");

  std::vector<TamperCase> cases;
  for (Strategy st : kAttacks) {
    for (int i = 0; i < points; ++i) {
      const auto [adv, vic] = links[static_cast<size_t>(i) % links.size()];
      // Protocol frames are 1..n-1; a reordered frame needs a successor.
      const int64_t span = frames[static_cast<size_t>(adv)][static_cast<size_t>(vic)] - 1 -
                           (st == Strategy::Reorder ? 1 : 0);
      TamperSpec spec{st, adv, vic, 1 + static_cast<uint64_t>((2 * i + 1) * span / (2 * points)),
                      seed * 7919 + static_cast<uint64_t>(i)};
      SessionOptions opt = base;
      opt.tamper = spec;
      Session s(opt);
      RingTensor out;
      auto oc = s.run(inference_fn(job, out), job_inputs(job));
      TamperCase c;
      c.spec = spec;
      c.fired = s.tamper_fired();
      for (size_t r = 0; r < 3; ++r) {
        if (static_cast<Role>(r) == adv || !oc[r].abort) continue;
        if (!c.honest_abort) {
          c.report = oc[r].abort;
          c.report->strategy = std::string(strategy_name(st));
        }
        c.honest_abort = true;
      }
      const bool p1_honest = adv != Role::P1;
      c.silent_corruption = !c.honest_abort && p1_honest && oc[1].ok && !(out == expected);
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

}  // namespace triad::aramis
