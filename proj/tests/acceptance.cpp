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


// One line per acceptance criterion. Exit status is non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <fmt/format.h>

#include "blindiqp/hypothesis.hpp"
#include "blindiqp/security.hpp"
#include "bridge_check.hpp"
#include "oracles.hpp"

using namespace blindiqp;

namespace {

const double kPi8 = std::numbers::pi / 8;
const double kCos2 = std::pow(std::cos(kPi8), 2);

struct Outcome {
  bool pass;
  std::string detail;
};

ExtendedIqpGraph graph(std::vector<std::vector<int>> rows) { return ExtendedIqpGraph(std::move(rows)); }

Outcome bias_target() {
  double worst_formula = 0.0, worst_direct = 0.0;
  for (std::uint64_t k = 0; k < 8; ++k) {
    const auto inst = build_test_instance(7, BinVector::from_index(k, 3));
    const double e = expected_bias(inst);
    worst_formula = std::max(worst_formula, std::abs(e - kCos2));
    const auto p = oracle::iqp_distribution(inst.q.to_rows(), inst.theta);
    const double direct = oracle::orthogonal_mass(p, inst.direction().to_bits());
    const double lib = bias_direct(exact_distribution(inst.program()), inst.direction());
    worst_direct = std::max({worst_direct, std::abs(e - direct), std::abs(e - lib)});
  }
  return {worst_formula <= 1e-9 && worst_direct <= 1e-9,
          fmt::format("8 s_hat, max |bias - cos^2(pi/8)| = {:.2e}, max |bias - direct| = {:.2e}",
                      worst_formula, worst_direct)};
}

Outcome distribution_chain() {
  struct Case {
    const char* name;
    std::vector<std::vector<int>> q;
    ExtendedIqpGraph qt;
  };
  const std::vector<Case> cases{{"minimal", {{1}}, graph({{-1}})},
                                {"two-bridge", {{1, 0, 1}, {0, 1, 0}}, graph({{-1, 0, 1}, {0, 1, -1}})}};
  double worst = 0.0;
  int runs = 0;
  for (const auto& c : cases) {
    const XProgram xp(BinMatrix::from_rows(c.q), kPi8);
    const auto want = oracle::iqp_distribution(c.q, kPi8);
    worst = std::max(worst, oracle::tv(exact_distribution(xp).probs, want));
    for (Runner r : {Runner::Mbqc, Runner::Distributed, Runner::Blind, Runner::Teleport,
                     Runner::PreRandomness, Runner::Simulator}) {
      const auto d = exact_output_distribution(r, xp, c.qt, HonestServer{});
      worst = std::max(worst, oracle::tv(d.probs, want));
      ++runs;
    }
  }
  return {worst <= 1e-9, fmt::format("{} runner/instance pairs, max TV = {:.2e}", runs, worst)};
}

Outcome bridge_round_trip() {
  std::mt19937_64 rng(2026);
  double worst = 1.0;
  int instances = 0;
  while (instances < 120) {
    const int n_p = 1 + static_cast<int>(rng() % 3), n_a = 1 + static_cast<int>(rng() % 3);
    BinMatrix q(n_a, n_p);
    std::vector<Position> pos;
    for (int i = 0; i < n_a; ++i)
      for (int j = 0; j < n_p; ++j) {
        q.set(i, j, static_cast<int>(rng() & 1));
        if (rng() % 3 == 0) pos.emplace_back(i, j);
      }
    if (pos.empty()) continue;
    const auto qt = extend(q, pos);
    const int nb = qt.n_b();
    BinVector d_b(nb);
    for (int k = 0; k < nb; ++k) d_b.set(k, static_cast<int>(rng() & 1));
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << nb); ++r)
      worst = std::min(worst, bridge_check::worst_fidelity(qt, d_b, BinVector::from_index(r, nb), rng));
    ++instances;
  }
  return {worst >= 1 - 1e-10,
          fmt::format("{} instances, every r_b and branch, min fidelity = 1 - {:.2e}", instances,
                      1 - worst)};
}

double mixed_distance(const Eigen::MatrixXcd& rho) {
  const auto n = rho.rows();
  return (rho - Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n)).cwiseAbs().maxCoeff();
}

Outcome blindness() {
  const std::vector<ExtendedIqpGraph> family{graph({{-1, 1}, {1, 1}}),
                                             graph({{-1, 0, 1}, {0, 1, -1}})};
  double classical = 0.0, ensemble = 0.0, sent = 0.0, conditional = 0.0;
  int pairs = 0;
  std::uint64_t maps = 0;
  ViewOptions vo;
  vo.include_output = false;
  for (const auto& qt : family) {
    std::vector<XProgram> progs;
    for (const auto& q : reductions(qt)) {
      try {
        progs.emplace_back(q, kPi8);
      } catch (const XProgError&) {
      }
    }
    std::vector<ServerView> state, angles;
    for (const auto& xp : progs) {
      state.push_back(server_view(Runner::Blind, xp, qt, Phase::AfterState, HonestServer{}, vo));
      angles.push_back(server_view(Runner::Blind, xp, qt, Phase::AfterAngles, ForkingServer{}, vo));
      sent = std::max(sent, mixed_distance(state.back().avg_state()));
    }
    for (std::size_t a = 0; a < progs.size(); ++a)
      for (std::size_t b = a + 1; b < progs.size(); ++b) {
        const auto s = view_distance(state[a], state[b]);
        const auto w = sweep_response_maps(angles[a], angles[b]);
        classical = std::max({classical, s.classical, w.worst.classical});
        ensemble = std::max({ensemble, s.quantum, s.joint, w.worst.quantum});
        conditional = std::max(conditional, w.worst.conditional);
        maps += w.maps;
        ++pairs;
      }
  }
  return {pairs > 0 && classical <= 1e-12 && ensemble <= 1e-10 && sent <= 1e-12,
          fmt::format("{} pairs, {} response maps, TV = {:.2e}, ensemble trace distance = {:.2e}, "
                      "sent register vs I/2^n = {:.2e}; note: per-record distance after the "
                      "angles = {:.3f}",
                      pairs, maps, classical, ensemble, sent, conditional)};
}

Outcome simulator() {
  const XProgram xp(BinMatrix{{1}}, kPi8);
  const auto qt = graph({{-1}});
  double worst = 0.0;
  for (const char* name : {"honest", "zeros"})
    worst = std::max(worst, simulator_equivalence(xp, qt, *make_server(name)).combined);
  const ForkingServer fork;
  const auto sweep = sweep_response_maps(server_view(Runner::Blind, xp, qt, Phase::Final, fork),
                                         server_view(Runner::Simulator, xp, qt, Phase::Final, fork));
  return {worst <= 1e-9 && sweep.worst.combined <= 1e-9,
          fmt::format("honest and zeros: {:.2e}; all {} response maps: {:.2e}", worst, sweep.maps,
                      sweep.worst.combined)};
}

Outcome hypothesis() {
  const auto h = run_hypothesis_test(7, 10000, 0.80, 42, HonestServer{});
  const auto u = run_hypothesis_test(7, 10000, 0.80, 42, *make_server("uniform"));
  const bool ok = h.pass && h.bias_estimate >= 0.8336 && h.bias_estimate <= 0.8736 && !u.pass &&
                  u.bias_estimate >= 0.48 && u.bias_estimate <= 0.52;
  return {ok, fmt::format("N = 10000, seed 42: honest {:.4f} ({}), uniform {:.4f} ({})",
                          h.bias_estimate, h.pass ? "accept" : "reject", u.bias_estimate,
                          u.pass ? "accept" : "reject")};
}

Eigen::MatrixXcd to_eigen(const Mat2& m) {
  Eigen::MatrixXcd e(2, 2);
  e << m[0], m[1], m[2], m[3];
  return e;
}

Outcome identities() {
  // CZ from the simulator, one column per basis state.
  Eigen::MatrixXcd cz(4, 4);
  for (int c = 0; c < 4; ++c) {
    PureState s;
    s.add(Label::primary(0), (c >> 1) ? Amp2{0, 1} : Amp2{1, 0});
    s.add(Label::ancilla(0), (c & 1) ? Amp2{0, 1} : Amp2{1, 0});
    s.apply_cz(Label::primary(0), Label::ancilla(0));
    for (int r = 0; r < 4; ++r) cz(r, c) = s.amps()[((r & 1) << 1) | (r >> 1)];
  }
  const Eigen::MatrixXcd s = to_eigen(gate_matrix(Gate::S)), z = to_eigen(gate_matrix(Gate::Z));
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(4, 4), zz = oracle::kron(z, z);
  const cd i(0, 1), ph = std::exp(cd(0, -kPi8 * 2));
  const Eigen::MatrixXcd plus = ph * oracle::kron(s, s) * (id + i * zz) / std::sqrt(2.0);
  const Eigen::MatrixXcd minus =
      std::conj(ph) * oracle::kron(s.adjoint(), s.adjoint()) * (id - i * zz) / std::sqrt(2.0);
  const double cz_err = std::max({(plus - cz).cwiseAbs().maxCoeff(),
                                  (minus - cz).cwiseAbs().maxCoeff(),
                                  (oracle::cz() - cz).cwiseAbs().maxCoeff()});

  int involutions = 0;
  bool inv_ok = true;
  for (int n = 2; n <= 6; ++n)
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << (n - 1)); ++k) {
      const auto a = transformation_matrix(BinVector::from_index(k, n - 1));
      inv_ok = inv_ok && a * a == BinMatrix::identity(n);
      ++involutions;
    }

  // Round trip over every s_b, r_b, d_b and client pad on three intermediaries.
  const auto qt = graph({{-1, -1}, {-1, 1}});
  bool trip_ok = true;
  std::uint64_t trips = 0;
  for (std::uint64_t bm = 0; bm < 512; ++bm) {
    const BinVector s_b = BinVector::from_index(bm & 7, 3), r_b = BinVector::from_index((bm >> 3) & 7, 3),
                    d_b = BinVector::from_index(bm >> 6, 3);
    for (std::uint64_t pm = 0; pm < 256; ++pm) {
      ClientSecrets sec{BinVector::from_index((pm >> 2) & 3, 2), BinVector::from_index(pm & 3, 2),
                        BinVector::from_index((pm >> 6) & 3, 2), BinVector::from_index((pm >> 4) & 3, 2),
                        r_b, d_b, {}, {}};
      const auto [A, Pi] = client_corrections(sec, s_b, qt);
      const auto [m_a, m_p] = measurement_terms(A, Pi, s_b, r_b, d_b, qt);
      for (int j = 0; j < 2; ++j) {
        trip_ok = trip_ok && (m_p[j] - sec.d_p[j] - 2 * sec.r_p[j]) % 4 == 0;
        trip_ok = trip_ok && (m_a[j] - sec.d_a[j] - 2 * sec.r_a[j]) % 4 == 0;
      }
      ++trips;
    }
  }
  return {cz_err <= 1e-12 && inv_ok && trip_ok,
          fmt::format("CZ decompositions max error {:.2e}; A*A = I for {} matrices ({}); "
                      "{} correction round trips ({})",
                      cz_err, involutions, inv_ok ? "ok" : "FAILED", trips,
                      trip_ok ? "ok" : "FAILED")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "bias target", 1, bias_target},
      {2, "distribution chain", 60, distribution_chain},
      {3, "bridge/break round trip", 60, bridge_round_trip},
      {4, "blindness", 120, blindness},
      {5, "simulator equivalence", 60, simulator},
      {6, "hypothesis test", 120, hypothesis},
      {7, "algebraic identities", 10, identities},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.budget;
    if (!pass) ++failed;
    std::printf("%s criterion %d (%s): %s [%.2f s, budget %.0f s]\n", pass ? "PASS" : "FAIL", c.id,
                c.name, o.detail.c_str(), secs, c.budget);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
