// Copyright 2026 The blindiqp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "blindiqp/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "blindiqp/hypothesis.hpp"
#include "blindiqp/protocol.hpp"
#include "blindiqp/security.hpp"
#include "blindiqp/xprog.hpp"

namespace blindiqp {

namespace {

using nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(fmt::format("{}:{}:{}: invalid JSON ({})", path, line, col, e.what()));
  }
}

std::uint64_t resolve_seed(const std::string& given) {
  if (!given.empty()) {
    try {
      std::size_t used = 0;
      const std::uint64_t s = std::stoull(given, &used, 0);
      if (used == given.size()) return s;
    } catch (const std::exception&) {
    }
    throw InputError(fmt::format("seed '{}' is not an unsigned integer", given));
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

std::string bits(std::uint64_t x, std::size_t n) { return BinVector::from_index(x, n).str(); }

json distribution_json(const OutcomeDistribution& d) {
  json j = json::object();
  for (std::size_t x = 0; x < d.probs.size(); ++x) j[bits(x, d.n_p)] = d.probs[x];
  return j;
}

// Every reduction of qt that is a valid X-program.
std::vector<XProgram> valid_reductions(const ExtendedIqpGraph& qt, double theta) {
  std::vector<XProgram> out;
  for (const auto& q : reductions(qt)) {
    try {
      out.emplace_back(q, theta);
    } catch (const XProgError&) {
    }
  }
  return out;
}

struct Options {
  std::string xprog_path, graph_path, instance_path, output;
  std::string seed, adversary = "honest", runner = "blind", phase = "after_state";
  std::string check = "blindness", direction;
  std::size_t samples = 0;
  bool exact = false, reveal = false, all_maps = false;
  int n_a = 7;
  double threshold = 0.80;
};

int cmd_distribution(const Options& o, std::ostream& out) {
  const XProgram xp = xprogram_from_json(load_json(o.xprog_path));
  out << to_csv(exact_distribution(xp));
  return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& out) {
  const XProgram xp = xprogram_from_json(load_json(o.xprog_path));
  const std::uint64_t seed = resolve_seed(o.seed);
  json s = json::array();
  for (const auto& x : sample(xp, seed, o.samples)) s.push_back(x.str());
  out << json{{"seed", seed}, {"samples", s}}.dump(2) << '\n';
  return kExitOk;
}

int cmd_bias(const Options& o, std::ostream& out) {
  const XProgram xp = xprogram_from_json(load_json(o.xprog_path));
  std::vector<int> d;
  for (char c : o.direction) {
    if (c != '0' && c != '1') throw InputError("direction must be a string of 0 and 1");
    d.push_back(c - '0');
  }
  if (d.size() != xp.n_p())
    throw InputError(fmt::format("direction has {} bits, program has {} qubits", d.size(), xp.n_p()));
  const BinVector s = BinVector::from_bits(d);
  const BiasReport r = bias_codeword_formula(xp, s);
  json j{{"direction", s.str()}, {"formula", r.value}, {"n_s", r.n_s}, {"empty", r.empty}};
  if (xp.n_p() <= kMaxExactPrimaries) j["direct"] = bias_direct(exact_distribution(xp), s);
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_protocol(const Options& o, std::ostream& out) {
  const XProgram xp = xprogram_from_json(load_json(o.xprog_path));
  const ExtendedIqpGraph qt = extended_graph_from_json(load_json(o.graph_path));
  const Runner runner = runner_from_name(o.runner);
  const auto server = make_server(o.adversary);
  json j{{"runner", runner_name(runner)}, {"adversary", server->name()}};
  if (o.exact) {
    const OutcomeDistribution d = exact_output_distribution(runner, xp, qt, *server);
    j["distribution"] = distribution_json(d);
    if (xp.n_p() <= kMaxExactPrimaries)
      j["tv_to_exact"] = total_variation(d, exact_distribution(xp));
  } else {
    if (o.samples == 0) throw InputError("give --exact or --samples N with N > 0");
    const std::uint64_t seed = resolve_seed(o.seed);
    std::mt19937_64 seeds(seed);
    std::map<std::string, std::size_t> counts;
    for (std::size_t n = 0; n < o.samples; ++n) {
      const std::uint64_t run_seed = seeds();
      SamplingChooser ch(run_seed);
      RunResult r = execute(runner, xp, qt, *server, ch);
      r.transcript.seed = run_seed;
      ++counts[r.x.str()];
      if (n == 0) j["transcript"] = r.transcript.to_json();
    }
    j["seed"] = seed;
    j["samples"] = o.samples;
    j["counts"] = counts;
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_security(const Options& o, std::ostream& out) {
  const json inst = load_json(o.instance_path);
  if (!inst.is_object() || !inst.contains("qt") || !inst.contains("theta"))
    throw InputError("security instance needs \"qt\" and \"theta\"");
  const ExtendedIqpGraph qt = extended_graph_from_json(inst);
  const double theta = inst["theta"].get<double>();
  const int total = qt.n_p() + qt.n_a() + qt.n_b();
  if (total > kMaxViewQubits)
    throw SecurityError(fmt::format(
        "instance has {} qubits; exhaustive view checks are limited to {} qubits", total,
        kMaxViewQubits));
  std::vector<SecurityCheck> checks;
  json j{{"check", o.check}, {"adversary", o.all_maps ? "all response maps" : o.adversary}};

  if (o.check == "blindness") {
    const Phase phase = phase_from_name(o.phase);
    j["phase"] = phase_name(phase);
    const auto progs = valid_reductions(qt, theta);
    if (progs.empty()) throw InputError("no reduction of qt is a valid X-program");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < progs.size(); ++a)
      for (std::size_t b = a + 1; b < progs.size(); ++b) pairs.emplace_back(a, b);
    if (pairs.empty()) pairs.emplace_back(0, 0);
    j["reductions"] = progs.size();
    const double tol = 1e-10;
    for (auto [a, b] : pairs) {
      SecurityCheck c;
      c.name = fmt::format("Q{} vs Q{}", a, b);
      c.tolerance = tol;
      ViewOptions vo;
      vo.include_output = false;
      if (o.all_maps && phase != Phase::AfterState) {
        const ForkingServer fork;
        c.distance = sweep_response_maps(server_view(Runner::Blind, progs[a], qt, phase, fork, vo),
                                         server_view(Runner::Blind, progs[b], qt, phase, fork, vo))
                         .worst;
      } else {
        c.distance = blindness_distance(progs[a], progs[b], qt, *make_server(o.adversary), phase, vo);
      }
      c.pass = c.distance.combined <= tol;
      c.ensemble_pass = std::max(c.distance.quantum, c.distance.classical) <= tol;
      checks.push_back(c);
    }
  } else if (o.check == "simulator") {
    XProgram xp = inst.contains("q") ? XProgram(bin_matrix_from_json(inst["q"]), theta)
                                     : valid_reductions(qt, theta).at(0);
    j["q"] = to_json(xp.q);
    j["phase"] = phase_name(Phase::Final);
    const double tol = 1e-9;
    SecurityCheck c;
    c.name = "real vs ideal with simulator";
    c.tolerance = tol;
    if (o.all_maps) {
      const ForkingServer fork;
      c.distance = sweep_response_maps(server_view(Runner::Blind, xp, qt, Phase::Final, fork),
                                       server_view(Runner::Simulator, xp, qt, Phase::Final, fork))
                       .worst;
    } else {
      c.distance = simulator_equivalence(xp, qt, *make_server(o.adversary));
    }
    c.pass = c.distance.combined <= tol;
    c.ensemble_pass = std::max(c.distance.quantum, c.distance.classical) <= tol;
    checks.push_back(c);
  } else {
    throw InputError(fmt::format("unknown check '{}'; available: blindness, simulator", o.check));
  }
  const json rep = security_report(checks);
  j["checks"] = rep["checks"];
  j["pass"] = rep["pass"];
  out << j.dump(2) << '\n';
  return rep["pass"].get<bool>() ? kExitOk : kExitCheckFailed;
}

int cmd_hypothesis(const Options& o, std::ostream& out) {
  const std::uint64_t seed = resolve_seed(o.seed);
  const auto server = make_server(o.adversary);
  const TestReport r = run_hypothesis_test(o.n_a, o.samples, o.threshold, seed, *server);
  out << to_json(r, o.reveal).dump(2) << '\n';
  return r.pass ? kExitOk : kExitCheckFailed;
}

int cmd_qr_matrix(const Options& o, std::ostream& out) {
  const BinMatrix m = qr_generator_matrix(o.n_a);
  out << json{{"n_a", o.n_a}, {"residues", quadratic_residues(o.n_a)}, {"qr", to_json(m)}}.dump(2)
      << '\n';
  return kExitOk;
}

void error_json(std::ostream& err, const std::string& kind, const std::string& msg) {
  err << json{{"error", kind}, {"message", msg}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blind delegated IQP workbench"};
  app.require_subcommand(1);
  Options o;

  auto* dist = app.add_subcommand("distribution", "Exact output distribution as CSV");
  dist->add_option("xprogram", o.xprog_path, "X-program JSON")->required();

  auto* smp = app.add_subcommand("sample", "Sample outputs of an X-program");
  smp->add_option("xprogram", o.xprog_path, "X-program JSON")->required();
  smp->add_option("--samples", o.samples, "Number of samples")->default_val(100);
  smp->add_option("--seed", o.seed, "Seed (printed when generated)");

  auto* bias = app.add_subcommand("bias", "Bias of the output towards a direction");
  bias->add_option("xprogram", o.xprog_path, "X-program JSON")->required();
  bias->add_option("--direction", o.direction, "Bit string s")->required();

  auto* proto = app.add_subcommand("protocol", "Run a protocol variant");
  proto->add_option("xprogram", o.xprog_path, "X-program JSON")->required();
  proto->add_option("graph", o.graph_path, "Extended graph JSON")->required();
  proto->add_option("--adversary", o.adversary, "Server strategy");
  proto->add_option("--runner", o.runner, "mbqc, distributed, blind, teleport, pre-randomness or simulator");
  proto->add_flag("--exact", o.exact, "Enumerate every branch");
  proto->add_option("--samples", o.samples, "Number of sampled runs");
  proto->add_option("--seed", o.seed, "Seed (printed when generated)");

  auto* sec = app.add_subcommand("security", "Exhaustive view checks");
  sec->add_option("instance", o.instance_path, "JSON with qt, theta and optionally q")->required();
  sec->add_option("--check", o.check, "blindness or simulator");
  sec->add_option("--phase", o.phase, "after_state, after_angles or final");
  sec->add_option("--adversary", o.adversary, "Server strategy");
  sec->add_flag("--all-maps", o.all_maps, "Quantify over every deterministic s_b response map");

  auto* hyp = app.add_subcommand("hypothesis", "Run the hypothesis test");
  hyp->add_option("--na", o.n_a, "Number of ancillas (prime, n_a + 1 divisible by 8)");
  hyp->add_option("--samples", o.samples, "Number of runs")->default_val(10000);
  hyp->add_option("--threshold", o.threshold, "Acceptance threshold");
  hyp->add_option("--adversary", o.adversary, "Server strategy");
  hyp->add_option("--seed", o.seed, "Seed (printed when generated)");
  hyp->add_flag("--reveal-secrets", o.reveal, "Include Q and s_hat in the report");

  auto* qr = app.add_subcommand("qr-matrix", "Quadratic residue generator matrix");
  qr->add_option("--na", o.n_a, "Number of ancillas");

  for (auto* sub : {dist, smp, bias, proto, sec, hyp, qr})
    sub->add_option("--output,-o", o.output, "Write to this file instead of stdout");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_json(err, "usage", e.what());
    return kExitBadInput;
  }

  std::ostringstream buf;
  int code = kExitOk;
  try {
    if (dist->parsed()) code = cmd_distribution(o, buf);
    else if (smp->parsed()) code = cmd_sample(o, buf);
    else if (bias->parsed()) code = cmd_bias(o, buf);
    else if (proto->parsed()) code = cmd_protocol(o, buf);
    else if (sec->parsed()) code = cmd_security(o, buf);
    else if (hyp->parsed()) code = cmd_hypothesis(o, buf);
    else code = cmd_qr_matrix(o, buf);
  } catch (const InputError& e) {
    error_json(err, "input", e.what());
    return kExitBadInput;
  } catch (const SecurityError& e) {
    error_json(err, "guard", e.what());
    return kExitBadInput;
  } catch (const std::exception& e) {
    error_json(err, "invalid", e.what());
    return kExitBadInput;
  }
  if (o.output.empty()) {
    out << buf.str();
  } else {
    std::ofstream f(o.output);
    if (!f) {
      error_json(err, "output", "cannot write " + o.output);
      return kExitBadInput;
    }
    f << buf.str();
  }
  return code;
}

}  // namespace blindiqp
