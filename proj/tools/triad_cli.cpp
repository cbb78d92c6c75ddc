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

// triad_cli: compile models, run them in plaintext or under 3PC, benchmark
// the protocols and run tamper campaigns.
//
//   triad_cli compile --graph g.json --weights w.bin --scale 12 --out model.bundle
//   triad_cli run --bundle model.bundle --images x.f32 --mode 3pc
//   triad_cli run --bundle model.bundle --mode 3pc --role P0 --peers h0:7000,h1:7001,h2
//   triad_cli bench --bundle model.bundle --trials 10
//   triad_cli campaign --bundle model.bundle --images x.f32 --points 20

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "triad/error.hpp"
#include "triad/harness/bundle.hpp"
#include "triad/harness/dataset.hpp"
#include "triad/harness/runner.hpp"
#include "triad/ir/passes.hpp"

namespace {

using namespace triad;
using harness::Mode;
using porthos::Role;

void emit(const nlohmann::json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    ir::write_text_file(path, j.dump(2) + "\n");
  }
}

std::array<net::Endpoint, 3> parse_peers(const std::string& s) {
  std::array<net::Endpoint, 3> out;
  std::stringstream in(s);
  std::string item;
  size_t i = 0;
  while (std::getline(in, item, ',')) {
    TRIAD_ENFORCE(i < 3, FormatError, "--peers takes three endpoints");
    // P2 never listens; a bare host is fine there.
    if (i == 2 && item.find(':') == std::string::npos) {
      out[i++] = net::Endpoint{item, 0};
      continue;
    }
    out[i++] = net::parse_endpoint(item);
  }
  TRIAD_ENFORCE(i == 3, FormatError, "--peers takes three endpoints");
  return out;
}

struct CompileArgs {
  std::string graph, weights, val_images, val_labels, out;
  int scale = -1;
  bool sweep = false;
  bool no_switch = false;
};

int do_compile(const CompileArgs& a) {
  ir::FloatModel m = ir::load_model(a.graph, a.weights);
  std::vector<double> table;
  int scale = a.scale;
  if (a.sweep) {
    TRIAD_ENFORCE(!a.val_images.empty() && !a.val_labels.empty(), Error, "--sweep needs --val-images and --val-labels");
    const auto val = harness::read_labeled(a.val_images, a.val_labels, m.graph.at(m.graph.input).dims);
    const fixedpoint::SweepResult sw = fixedpoint::scale_sweep(m, val);
    table = sw.accuracy;
    scale = sw.best_scale;
    std::fprintf(stderr, "float accuracy %.4f; best scale %d (%.4f)\n", fixedpoint::float_accuracy(m, val), scale,
                 table[static_cast<size_t>(scale)]);
  }
  TRIAD_ENFORCE(scale >= 0 && scale < 64, Error, "pass --scale in [0, 63] or --sweep");
  const harness::Bundle b = harness::make_bundle(std::move(m), scale, table, !a.no_switch);
  std::cerr << ir::to_text(b.fixed.graph, scale);
  if (b.fixed.overflowed_weights > 0) {
    std::fprintf(stderr, "warning: %lld weights overflow at scale %d\n",
                 static_cast<long long>(b.fixed.overflowed_weights), scale);
  }
  harness::write_bundle(a.out, b);
  return harness::kExitOk;
}

struct RunArgs {
  std::string bundle, images, labels, mode = "3pc", role = "all", peers, seed = "triad", metrics, outputs;
  int timeout_ms = 10000;
  std::string tamper = "none", adversary = "P2", victim = "P0";
  uint64_t point = 1;
};

int do_run(const RunArgs& a) {
  const harness::Bundle b = harness::read_bundle(a.bundle);
  const Mode mode = harness::parse_mode(a.mode);
  const bool local = a.role == "all";
  const Role role = local ? Role::P1 : porthos::parse_role(a.role);
  std::vector<ring::RingTensor> inputs;
  std::vector<int64_t> labels;
  if (local || role == Role::P1) {
    TRIAD_ENFORCE(!a.images.empty(), Error, "--images is required for the input party");
    inputs = harness::quantize_all(harness::read_images(a.images, b.fixed.graph.at(b.fixed.graph.input).dims),
                                   b.scale);
    if (!a.labels.empty()) labels = harness::read_labels(a.labels);
  }
  harness::RunOptions opt;
  opt.mode = mode;
  opt.seed = a.seed;
  opt.timeout = std::chrono::milliseconds(a.timeout_ms);
  if (a.tamper != "none") {
    TRIAD_ENFORCE(local, Error, "--tamper needs an in-process run");
    opt.tamper = aramis::TamperSpec{aramis::parse_strategy(a.tamper), porthos::parse_role(a.adversary),
                                    porthos::parse_role(a.victim), a.point, 1};
  }
  harness::RunResult r;
  if (local) {
    r = harness::run_local(b.fixed, inputs, opt);
  } else {
    TRIAD_ENFORCE(!a.peers.empty(), Error, "--peers is required with --role");
    r = harness::run_tcp(role, parse_peers(a.peers), b.fixed, inputs, opt);
  }
  r.metrics.labels = labels;
  for (const auto& o : r.outcome) {
    if (o.abort) std::cerr << "abort " << o.abort->to_json() << "\n";
    else if (!o.ok) std::cerr << "error: " << o.error << "\n";
  }
  emit(r.metrics.to_json(), a.metrics);
  if (!a.outputs.empty() && !r.outputs.empty()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : r.outputs) {
      std::vector<int64_t> v(t.data().size());
      for (size_t i = 0; i < v.size(); ++i) v[i] = t.signed_at(i);
      out.push_back(v);
    }
    ir::write_text_file(a.outputs, out.dump() + "\n");
  }
  return r.exit_code;
}

int do_bench(const std::string& bundle, int trials, const std::string& seed, const std::string& metrics) {
  std::optional<harness::Bundle> b;
  if (!bundle.empty()) b = harness::read_bundle(bundle);
  const harness::MetricsReport rep = harness::bench(b ? &b->fixed : nullptr, trials, seed);
  emit(rep.to_json(), metrics);
  return harness::kExitOk;
}

int do_campaign(const std::string& bundle, const std::string& images, int points, int timeout_ms, uint64_t seed,
                const std::string& report) {
  const harness::Bundle b = harness::read_bundle(bundle);
  const auto inputs =
      harness::quantize_all(harness::read_images(images, b.fixed.graph.at(b.fixed.graph.input).dims), b.scale);
  TRIAD_ENFORCE(!inputs.empty(), Error, "campaign needs one image");
  const aramis::InferenceJob job{&b.fixed.graph, &b.fixed.weights, &inputs[0]};
  const auto cases = aramis::tamper_campaign(job, points, seed, std::chrono::milliseconds(timeout_ms));
  nlohmann::json j = nlohmann::json::array();
  int64_t aborted = 0, silent = 0;
  for (const auto& c : cases) {
    aborted += c.honest_abort;
    silent += c.silent_corruption;
    j.push_back({{"strategy", aramis::strategy_name(c.spec.strategy)},
                 {"adversary", porthos::role_name(c.spec.adversary)},
                 {"victim", porthos::role_name(c.spec.victim)},
                 {"point", c.spec.point},
                 {"fired", c.fired},
                 {"honest_abort", c.honest_abort},
                 {"silent_corruption", c.silent_corruption},
                 {"report", c.report ? nlohmann::json::parse(c.report->to_json()) : nlohmann::json()}});
  }
  emit({{"cases", j}, {"aborted", aborted}, {"silent", silent}, {"total", cases.size()}}, report);
  std::fprintf(stderr, "%lld/%zu aborted, %lld silent corruptions\n", static_cast<long long>(aborted), cases.size(),
               static_cast<long long>(silent));
  return aborted == static_cast<int64_t>(cases.size()) && silent == 0 ? harness::kExitOk : harness::kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-party secure inference"};
  app.require_subcommand(1);

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "Quantize and lower a model into a bundle");
  compile->add_option("--graph", ca.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  compile->add_option("--weights", ca.weights, "Weights file")->required()->check(CLI::ExistingFile);
  auto* scale_opt = compile->add_option("--scale", ca.scale, "Fixed-point scale")->check(CLI::Range(0, 63));
  auto* sweep_opt = compile->add_flag("--sweep", ca.sweep, "Choose the scale on validation data");
  scale_opt->excludes(sweep_opt);
  compile->add_option("--val-images", ca.val_images, "Validation images (float32)");
  compile->add_option("--val-labels", ca.val_labels, "Validation labels (u8)");
  compile->add_option("--out", ca.out, "Bundle path")->required();
  compile->add_flag("--no-switch", ca.no_switch, "Keep MaxPool(ReLU(x)) as written");

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Evaluate a bundle on a batch of images");
  run->add_option("--bundle", ra.bundle)->required()->check(CLI::ExistingFile);
  run->add_option("--images", ra.images, "Input images (float32, row-major)");
  run->add_option("--labels", ra.labels, "Labels (u8) for accuracy");
  run->add_option("--mode", ra.mode)->check(CLI::IsMember({"plaintext", "3pc", "malicious"}));
  run->add_option("--role", ra.role, "P0, P1, P2 over TCP, or all in-process")
      ->check(CLI::IsMember({"all", "P0", "P1", "P2"}));
  run->add_option("--peers", ra.peers, "host:port of P0,P1,P2");
  run->add_option("--seed", ra.seed, "Session seed (shared by all parties)");
  run->add_option("--timeout-ms", ra.timeout_ms);
  run->add_option("--metrics", ra.metrics, "Metrics JSON path (default stdout)");
  run->add_option("--outputs", ra.outputs, "Write opened outputs as JSON");
  run->add_option("--tamper", ra.tamper, "Tamper strategy (in-process malicious runs)");
  run->add_option("--adversary", ra.adversary);
  run->add_option("--victim", ra.victim);
  run->add_option("--point", ra.point, "Frame index on the adversary->victim link");

  std::string bench_bundle, bench_seed = "bench", bench_metrics;
  int trials = 10;
  auto* bench = app.add_subcommand("bench", "Protocol byte counts against their formulas");
  bench->add_option("--bundle", bench_bundle)->check(CLI::ExistingFile);
  bench->add_option("--trials", trials)->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed);
  bench->add_option("--metrics", bench_metrics);

  std::string cb, ci, creport;
  int points = 20, ctimeout = 2000;
  uint64_t cseed = 1;
  auto* campaign = app.add_subcommand("campaign", "Tamper with every link and check that runs abort");
  campaign->add_option("--bundle", cb)->required()->check(CLI::ExistingFile);
  campaign->add_option("--images", ci)->required()->check(CLI::ExistingFile);
  campaign->add_option("--points", points)->check(CLI::PositiveNumber);
  campaign->add_option("--timeout-ms", ctimeout);
  campaign->add_option("--seed", cseed);
  campaign->add_option("--report", creport);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? harness::kExitOk : harness::kExitError;
  }
  try {
    if (*compile) return do_compile(ca);
    if (*run) return do_run(ra);
    if (*bench) return do_bench(bench_bundle, trials, bench_seed, bench_metrics);
    if (*campaign) return do_campaign(cb, ci, points, ctimeout, cseed, creport);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return harness::kExitError;
  }
  return harness::kExitError;
}
