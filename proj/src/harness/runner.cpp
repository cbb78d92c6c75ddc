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

#include "triad/harness/runner.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include "triad/error.hpp"
#include "triad/harness/local.hpp"
#include "triad/ir/passes.hpp"
#include "triad/porthos/protocols.hpp"

namespace triad::harness {

using aramis::PartyOutcome;
using Clock = std::chrono::steady_clock;
using porthos::Role;
using ring::RingTensor;

Mode parse_mode(std::string_view s) {
  if (s == "plaintext") return Mode::Plaintext;
  if (s == "3pc") return Mode::Semihonest;
  if (s == "malicious") return Mode::Malicious;
  throw FormatError("unknown mode '" + std::string(s) + "'");
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Plaintext:
      return "plaintext";
    case Mode::Semihonest:
      return "3pc";
    case Mode::Malicious:
      return "malicious";
  }
  return "?";
}

int exit_code_for(const std::vector<PartyOutcome>& outcome) {
  bool timeout = false, abort = false, other = false, failed = false;
  for (const auto& o : outcome) {
    if (o.ok) continue;
    failed = true;
    if (o.timed_out) {
      timeout = true;
    } else if (o.abort && o.abort->check != "peer-closed") {
      abort = true;
    } else if (!o.abort) {
      other = true;
    }
  }
  if (!failed) return kExitOk;
  if (abort) return kExitAbort;
  if (timeout) return kExitTimeout;
  return other ? kExitError : kExitAbort;
}

namespace {

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

int64_t plain_comparisons(const ir::LLILProgram& p) {
  int64_t n = 0;
  for (const auto& c : p.calls) {
    if (c.op == ir::OpKind::MaxPool) {
      n += ring::numel(p.at(c.output).dims) * (c.attrs.pool.at(0) * c.attrs.pool.at(1) - 1);
    } else if (c.op == ir::OpKind::ArgMax) {
      n += ring::numel(p.at(c.inputs.at(0)).dims) - 1;
    }
  }
  return n;
}

aramis::Bytes batch_commitment(const std::vector<RingTensor>& inputs) {
  aramis::Bytes all;
  for (const auto& x : inputs) {
    const aramis::Bytes c = aramis::commitment_bytes(nullptr, &x);
    all.insert(all.end(), c.begin(), c.end());
  }
  const aramis::Digest d = aramis::sha256(all);
  return aramis::Bytes(d.begin(), d.end());
}

std::array<aramis::Bytes, 3> party_inputs(const fixedpoint::FixedModel& m, const std::vector<RingTensor>& inputs) {
  return {aramis::commitment_bytes(&m.weights, nullptr), batch_commitment(inputs), aramis::Bytes{}};
}

// Per-party body: batch size from P1, then one inference per input.
struct BatchBody {
  const fixedpoint::FixedModel& m;
  const std::vector<RingTensor>& inputs;
  std::vector<RingTensor>& outputs;
  std::array<Clock::time_point, 3>& online_start;

  void operator()(porthos::ProtocolContext& ctx) const {
    online_start[static_cast<size_t>(ctx.role())] = Clock::now();
    uint64_t n = 0;
    {
      porthos::ProtocolContext::Scope sc(ctx, "Batch");
      if (ctx.role() == Role::P1) {
        n = inputs.size();
        ctx.send(Role::P0, ring::RingId::ZL, std::span<const uint64_t>(&n, 1));
        ctx.send(Role::P2, ring::RingId::ZL, std::span<const uint64_t>(&n, 1));
      } else {
        n = ctx.recv(Role::P1, ring::RingId::ZL, 1).at(0);
        TRIAD_ENFORCE(n < (1u << 24), FormatError, "implausible batch size");
      }
    }
    for (uint64_t i = 0; i < n; ++i) {
      const Role r = ctx.role();
      RingTensor out = porthos::run_inference(ctx, m.graph, r == Role::P0 ? &m.weights : nullptr,
                                              r == Role::P1 ? &inputs[i] : nullptr);
      if (r == Role::P1) outputs.push_back(std::move(out));
    }
  }
};

void add_party(MetricsReport& rep, aramis::AttestedParty& party, const std::array<const net::Meter*, 3>& wire) {
  const Role r = party.role();
  for (size_t p = 0; p < 3; ++p) {
    const auto peer = static_cast<Role>(p);
    if (peer == r) continue;
    ChannelStats& c = rep.bytes[aramis::channel_name(r, peer)];
    c.payload = party.meter(peer).payload_sent;
    c.frames = party.meter(peer).frames_sent;
    if (wire[p]) c.wire = wire[p]->payload_sent + wire[p]->header_sent();
  }
  for (const auto& [k, v] : party.ctx().bytes_by_protocol()) rep.protocols[k] += v;
  if (r == Role::P1 || rep.ops.relu == 0) rep.ops = party.ctx().ops();
  rep.transcript[std::string(porthos::role_name(r))] = aramis::hex(party.transcript().head());
}

void finish(RunResult& res, const fixedpoint::FixedModel& m) {
  const ir::Liveness live = ir::liveness(m.graph);
  res.metrics.peak_bytes = live.peak_bytes;
  res.metrics.total_bytes = live.total_bytes;
  for (const auto& o : res.outputs) res.metrics.predictions.push_back(fixedpoint::predicted_class(o));
  for (const auto& o : res.outcome) {
    if (o.abort) res.metrics.aborts.push_back(nlohmann::json::parse(o.abort->to_json()));
  }
  if (!res.metrics.bytes.empty()) {
    res.metrics.residuals["conservation"] =
        static_cast<double>(res.metrics.protocol_total() - res.metrics.payload_total());
  }
  res.exit_code = exit_code_for(res.outcome);
}

aramis::SessionOptions session_options(const RunOptions& opt) {
  aramis::SessionOptions s;
  s.seed = opt.seed;
  s.timeout = opt.timeout;
  s.attested = opt.mode == Mode::Malicious;
  s.code_hash = opt.code_hash;
  s.tamper = opt.tamper;
  return s;
}

}  // namespace

RunResult run_local(const fixedpoint::FixedModel& m, const std::vector<RingTensor>& inputs, const RunOptions& opt) {
  RunResult res;
  res.metrics.mode = std::string(mode_name(opt.mode));
  const auto t0 = Clock::now();
  if (opt.mode == Mode::Plaintext) {
    for (const auto& x : inputs) res.outputs.push_back(fixedpoint::fixed_interpret(m, x));
    const int64_t n = static_cast<int64_t>(inputs.size());
    res.metrics.ops.relu = n * ir::count_relu(m.graph);
    res.metrics.ops.scaledown_elems = n * ir::count_scaledown(m.graph);
    res.metrics.ops.comparisons = n * plain_comparisons(m.graph);
    res.metrics.phase_ms["online"] = ms_since(t0);
    res.outcome.resize(1);
    res.outcome[0].ok = true;
    finish(res, m);
    return res;
  }
  aramis::Session session(session_options(opt));
  std::array<Clock::time_point, 3> online{};
  const BatchBody body{m, inputs, res.outputs, online};
  const auto out = session.run(body, party_inputs(m, inputs));
  res.outcome.assign(out.begin(), out.end());
  if (opt.tamper) {
    for (auto& o : res.outcome) {
      if (o.abort && o.abort->strategy.empty()) o.abort->strategy = std::string(aramis::strategy_name(opt.tamper->strategy));
    }
  }
  const double total = ms_since(t0);
  for (size_t r = 0; r < 3; ++r) {
    std::array<const net::Meter*, 3> wire{};
    for (size_t p = 0; p < 3; ++p) {
      if (p != r) wire[p] = &session.wire_meter(static_cast<Role>(r), static_cast<Role>(p));
    }
    add_party(res.metrics, session.party(static_cast<Role>(r)), wire);
  }
  const auto p1 = online[static_cast<size_t>(Role::P1)];
  const double setup = p1 == Clock::time_point{} ? total : std::chrono::duration<double, std::milli>(p1 - t0).count();
  res.metrics.phase_ms["setup"] = setup;
  res.metrics.phase_ms["online"] = total - setup;
  res.metrics.phase_ms["total"] = total;
  finish(res, m);
  return res;
}

RunResult run_tcp(Role role, const std::array<net::Endpoint, 3>& peers, const fixedpoint::FixedModel& m,
                  const std::vector<RingTensor>& inputs, const RunOptions& opt) {
  TRIAD_ENFORCE(opt.mode != Mode::Plaintext, Error, "plaintext mode runs without peers");
  TRIAD_ENFORCE(!opt.tamper, Error, "tampering is only available in-process");
  RunResult res;
  res.metrics.mode = std::string(mode_name(opt.mode));
  const auto t0 = Clock::now();
  const size_t r = static_cast<size_t>(role);
  std::unique_ptr<net::TcpListener> listener;
  if (role != Role::P2) listener = std::make_unique<net::TcpListener>(peers[r]);
  std::array<std::unique_ptr<net::Channel>, 3> links;
  res.outcome.resize(1);
  try {
    links = net::tcp_mesh(r, listener.get(), peers, opt.timeout);
  } catch (const Timeout& e) {
    res.outcome[0].error = e.what();
    res.outcome[0].timed_out = true;
    res.exit_code = kExitTimeout;
    return res;
  }
  std::array<net::Channel*, 3> raw{links[0].get(), links[1].get(), links[2].get()};
  const double connect = ms_since(t0);
  aramis::AttestedParty party(role, raw, session_options(opt));
  std::array<Clock::time_point, 3> online{};
  const BatchBody body{m, inputs, res.outputs, online};
  const auto commit = party_inputs(m, inputs);
  const auto t1 = Clock::now();
  res.outcome[0] = party.run(body, commit[r]);
  const double total = ms_since(t1);
  std::array<const net::Meter*, 3> wire{};
  for (size_t p = 0; p < 3; ++p) {
    if (raw[p]) wire[p] = &raw[p]->meter();
  }
  add_party(res.metrics, party, wire);
  const double setup = online[r] == Clock::time_point{} ? total
                                                         : std::chrono::duration<double, std::milli>(online[r] - t1).count();
  res.metrics.phase_ms["connect"] = connect;
  res.metrics.phase_ms["setup"] = setup;
  res.metrics.phase_ms["online"] = total - setup;
  res.metrics.phase_ms["total"] = connect + total;
  finish(res, m);
  return res;
}

int64_t conv_formula_bytes(const ring::Shape& x, const ring::Shape& f, const ring::Shape& out) {
  TRIAD_ENFORCE(x.size() == 3 && f.size() == 4 && out.size() == 3, ShapeError, "conv shapes must be HWC / HWIO");
  return (2 * x[0] * x[1] * x[2] + 2 * f[0] * f[1] * f[2] * f[3] + out[0] * out[1] * out[2]) * 8;
}

namespace {

RingTensor random_tensor(std::mt19937_64& g, ring::Shape s, int64_t bound) {
  std::vector<int64_t> v(static_cast<size_t>(ring::numel(s)));
  std::uniform_int_distribution<int64_t> d(-bound, bound);
  for (auto& e : v) e = d(g);
  return RingTensor::from_signed(std::move(s), v);
}

}  // namespace

MetricsReport bench(const fixedpoint::FixedModel* m, int trials, const std::string& seed) {
  TRIAD_ENFORCE(trials > 0, Error, "bench needs at least one trial");
  MetricsReport rep;
  rep.mode = "bench";
  std::mt19937_64 g(std::hash<std::string>{}(seed));
  LocalSession s(seed);
  auto measure = [&](const std::string& name, const std::function<void(porthos::ProtocolContext&)>& fn) {
    s.clear_stats();
    const auto t0 = Clock::now();
    s.run(fn);
    rep.phase_ms[name] = ms_since(t0);
    int64_t sum = 0;
    for (Role r : {Role::P0, Role::P1, Role::P2}) {
      for (const auto& [k, v] : s.ctx(r).bytes_by_protocol()) {
        rep.protocols[name + "/" + k] += v;
        sum += v;
      }
    }
    rep.residuals[name + "/conservation"] = static_cast<double>(sum - s.payload_total());
  };
  auto bytes_of = [&](Role r, const std::string& proto) {
    const auto& m = s.ctx(r).bytes_by_protocol();
    const auto it = m.find(proto);
    return it == m.end() ? int64_t{0} : it->second;
  };
  auto total_of = [&](const std::string& proto) {
    return bytes_of(Role::P0, proto) + bytes_of(Role::P1, proto) + bytes_of(Role::P2, proto);
  };

  // Conv2d against its communication formula.
  const std::array<std::array<int64_t, 4>, 3> convs = {{{5, 2, 1, 1}, {8, 3, 1, 1}, {8, 3, 2, 4}}};
  for (const auto& [mm, f, i, o] : convs) {
    const std::string name = "conv2d_m" + std::to_string(mm) + "_f" + std::to_string(f) + "_i" + std::to_string(i) +
                             "_o" + std::to_string(o);
    std::vector<RingTensor> xs, fs;
    for (int t = 0; t < trials; ++t) {
      xs.push_back(random_tensor(g, {mm, mm, i}, 1 << 12));
      fs.push_back(random_tensor(g, {f, f, i, o}, 1 << 12));
    }
    measure(name, [&](porthos::ProtocolContext& ctx) {
      for (int t = 0; t < trials; ++t) {
        const RingTensor x = porthos::share_private(ctx, Role::P1, xs[static_cast<size_t>(t)]);
        const RingTensor w = porthos::share_private(ctx, Role::P0, fs[static_cast<size_t>(t)]);
        porthos::conv2d(ctx, x, w, 1, 1);
      }
    });
    const int64_t q = mm - f + 1;
    const int64_t want = conv_formula_bytes({mm, mm, i}, {f, f, i, o}, {q, q, o}) * trials;
    rep.residuals[name] = static_cast<double>(total_of("Conv2d") - want);
  }

  // ReLU batch: payload per element and the fresh-share split.
  {
    const int64_t n = 1000;
    std::vector<RingTensor> as;
    for (int t = 0; t < trials; ++t) as.push_back(random_tensor(g, {n}, int64_t{1} << 40));
    measure("relu_1000", [&](porthos::ProtocolContext& ctx) {
      for (const auto& a : as) porthos::relu(ctx, porthos::share_private(ctx, Role::P1, a));
    });
    const double per = static_cast<double>(total_of("ReLU")) / static_cast<double>(n * trials);
    rep.residuals["relu_bytes_per_elem"] = per;
    rep.residuals["relu_vs_536"] = per - 536.0;
    int64_t imbalance = 0;
    for (const auto& rec : s.ctx(Role::P2).fresh_log()) {
      imbalance = std::max(imbalance, std::abs(rec.to_p0 - rec.to_p1) - (n % 2));
    }
    rep.residuals["relu_fresh_share_imbalance"] = static_cast<double>(imbalance);
    rep.ops.relu += s.ctx(Role::P1).ops().relu;
  }

  // MaxPool over one window of four: three comparison rounds.
  {
    std::vector<RingTensor> xs;
    for (int t = 0; t < trials; ++t) xs.push_back(random_tensor(g, {2, 2, 1}, 1 << 20));
    measure("maxpool_n4", [&](porthos::ProtocolContext& ctx) {
      for (const auto& x : xs) porthos::maxpool(ctx, porthos::share_private(ctx, Role::P1, x), 2, 2, 2, 2);
    });
    const int64_t cmp = s.ctx(Role::P1).ops().comparisons;
    rep.residuals["maxpool_n4_rounds"] = static_cast<double>(cmp) / trials;
    rep.residuals["maxpool_n4_rounds_vs_3"] = static_cast<double>(cmp) / trials - 3.0;
    rep.ops.comparisons += cmp;
  }

  if (m) {
    std::vector<RingTensor> in{random_tensor(g, m->graph.at(m->graph.input).dims, int64_t{1} << m->config.scale)};
    std::vector<RingTensor> out;
    measure("model", [&](porthos::ProtocolContext& ctx) {
      const Role r = ctx.role();
      porthos::run_inference(ctx, m->graph, r == Role::P0 ? &m->weights : nullptr, r == Role::P1 ? &in[0] : nullptr);
    });
    int64_t want = 0;
    for (const auto& c : m->graph.calls) {
      if (c.op == ir::OpKind::Conv) {
        want += conv_formula_bytes(m->graph.at(c.inputs[0]).dims, m->graph.at(c.inputs[1]).dims,
                                   m->graph.at(c.output).dims);
      }
    }
    rep.residuals["model_conv2d"] = static_cast<double>(total_of("Conv2d") - want);
    const porthos::OpCounters& ops = s.ctx(Role::P1).ops();
    rep.ops.relu += ops.relu;
    rep.ops.comparisons += ops.comparisons;
    rep.ops.scaledown_elems += ops.scaledown_elems;
    const ir::Liveness live = ir::liveness(m->graph);
    rep.peak_bytes = live.peak_bytes;
    rep.total_bytes = live.total_bytes;
    for (Role a : {Role::P0, Role::P1, Role::P2}) {
      for (Role b : {Role::P0, Role::P1, Role::P2}) {
        if (a == b) continue;
        const net::Meter& mt = s.channel(a, b).meter();
        rep.bytes[aramis::channel_name(a, b)] = {mt.payload_sent, mt.frames_sent, mt.payload_sent + mt.header_sent()};
      }
    }
  }
  return rep;
}

}  // namespace triad::harness
