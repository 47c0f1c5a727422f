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


#include "blindiqp/hypothesis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <fmt/format.h>

namespace blindiqp {

BinVector TestInstance::direction() const { return mat_vec_mul(inverse(a), s); }

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<int> quadratic_residues(int p) {
  if (p < 3 || !is_prime(p)) throw HypothesisError(fmt::format("{} is not an odd prime", p));
  std::set<int> r;
  for (long long x = 1; x < p; ++x) r.insert(static_cast<int>(x * x % p));
  return {r.begin(), r.end()};
}

BinMatrix qr_generator_matrix(int n_a) {
  if (!is_prime(n_a) || (n_a + 1) % 8 != 0)
    throw HypothesisError(fmt::format("n_a = {} must be a prime with n_a + 1 divisible by 8", n_a));
  const int cols = (n_a + 1) / 2 - 1;
  BinMatrix m(n_a, cols);
  for (int r : quadratic_residues(n_a))
    for (int j = 0; j < cols; ++j) m.set((r + j) % n_a, j, 1);
  return m;
}

BinMatrix transformation_matrix(const BinVector& s_hat) {
  const std::size_t n = s_hat.size() + 1;
  BinMatrix a = BinMatrix::identity(n);
  for (std::size_t i = 0; i < s_hat.size(); ++i) a.set(i, n - 1, s_hat[i]);
  return a;
}

TestInstance build_test_instance(int n_a, const BinVector& s_hat) {
  TestInstance t;
  t.qr = qr_generator_matrix(n_a);
  t.n_a = n_a;
  t.n_p = (n_a + 1) / 2;
  if (static_cast<int>(s_hat.size()) != t.n_p - 1)
    throw HypothesisError(fmt::format("s_hat has length {}, expected {}", s_hat.size(), t.n_p - 1));
  BinVector ones(n_a);
  for (int i = 0; i < n_a; ++i) ones.set(i, 1);
  t.qs = t.qr.append_column(ones);
  t.s_hat = s_hat;
  t.a = transformation_matrix(s_hat);
  t.q = t.qs * t.a;
  auto rows = t.qr.to_rows();
  for (auto& r : rows) r.push_back(-1);
  t.qt = ExtendedIqpGraph(std::move(rows));
  t.s = BinVector(t.n_p);
  t.s.set(t.n_p - 1, 1);
  t.theta = std::numbers::pi / 8;
  return t;
}

double expected_bias(const TestInstance& inst) {
  return bias_codeword_formula(inst.program(), inst.direction()).value;
}

TestReport run_hypothesis_test(int n_a, std::size_t samples, double threshold, std::uint64_t seed,
                               const ServerStrategy& server) {
  if (samples == 0) throw HypothesisError("the test needs at least one sample");
  std::seed_seq seq{seed, std::uint64_t{0x68797074}};
  std::mt19937_64 rng(seq);
  const int n_p = (n_a + 1) / 2;
  if (n_p < 1) throw HypothesisError(fmt::format("invalid n_a = {}", n_a));
  BinVector s_hat(n_p - 1);
  for (int i = 0; i < n_p - 1; ++i) s_hat.set(i, static_cast<int>(rng() & 1));

  TestReport rep;
  rep.instance = build_test_instance(n_a, s_hat);
  rep.n_a = n_a;
  rep.samples = samples;
  rep.threshold = threshold;
  rep.seed = seed;
  rep.adversary = server.name();
  rep.expected_bias = expected_bias(rep.instance);
  const double gap = rep.expected_bias - threshold;
  rep.honest_pass_bound =
      gap > 0 ? 1.0 - std::exp(-2.0 * static_cast<double>(samples) * gap * gap) : 0.0;

  const XProgram xp = rep.instance.program();
  const BinVector dir = rep.instance.direction();
  rep.o.reserve(samples);
  for (std::size_t n = 0; n < samples; ++n) {
    const RunResult r = run_blind(xp, rep.instance.qt, rng(), server);
    const int o = r.x.dot(dir) == 0 ? 1 : 0;
    rep.o.push_back(o);
    rep.orthogonal_count += o;
  }
  rep.bias_estimate = static_cast<double>(rep.orthogonal_count) / static_cast<double>(samples);
  rep.pass = rep.bias_estimate >= threshold;
  return rep;
}

nlohmann::json to_json(const TestReport& r, bool reveal) {
  nlohmann::json j{{"n_a", r.n_a},
                   {"n_p", r.instance.n_p},
                   {"qt", r.instance.qt.entries()},
                   {"theta", r.instance.theta},
                   {"samples", r.samples},
                   {"orthogonal_count", r.orthogonal_count},
                   {"bias_estimate", r.bias_estimate},
                   {"threshold", r.threshold},
                   {"expected_bias", r.expected_bias},
                   {"honest_pass_bound", r.honest_pass_bound},
                   {"decision", r.pass ? "pass" : "fail"},
                   {"adversary", r.adversary},
                   {"seed", r.seed},
                   {"o", r.o}};
  if (reveal) {
    j["q"] = to_json(r.instance.q);
    j["s_hat"] = to_json(r.instance.s_hat);
    j["direction"] = to_json(r.instance.direction());
  }
  return j;
}

}  // namespace blindiqp
