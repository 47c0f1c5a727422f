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


#include <cmath>
#include <numbers>
#include <random>

#include <catch_amalgamated.hpp>

#include "blindiqp/xprog.hpp"
#include "oracles.hpp"

using namespace blindiqp;
using Catch::Approx;

namespace {

const double kPi8 = std::numbers::pi / 8;

std::vector<std::vector<int>> random_rows(std::mt19937_64& rng, int rows, int cols) {
  std::vector<std::vector<int>> q(rows, std::vector<int>(cols));
  for (auto& r : q) {
    do {
      for (auto& x : r) x = static_cast<int>(rng() & 1);
    } while (std::count(r.begin(), r.end(), 1) == 0);
  }
  return q;
}

}  // namespace

TEST_CASE("single element programs") {
  const auto d = exact_distribution(XProgram(BinMatrix{{1}}, std::numbers::pi / 2));
  CHECK(d.probs[1] == Approx(1.0).margin(1e-12));
  const auto e = exact_distribution(XProgram(BinMatrix{{1}}, kPi8));
  CHECK(e.probs[1] == Approx(std::pow(std::sin(kPi8), 2)).margin(1e-12));
}

TEST_CASE("2x3 distribution matches dense exponentiation") {
  const std::vector<std::vector<int>> rows{{1, 0, 1}, {0, 1, 0}};
  const auto d = exact_distribution(XProgram(BinMatrix::from_rows(rows), kPi8));
  REQUIRE(d.probs.size() == 8);
  CHECK(d.total() == Approx(1.0).margin(1e-12));
  CHECK(oracle::tv(d.probs, oracle::iqp_distribution(rows, kPi8)) < 1e-12);
}

TEST_CASE("random programs match dense exponentiation") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 25; ++t) {
    const int n_p = 1 + static_cast<int>(rng() % 5), n_a = 1 + static_cast<int>(rng() % 6);
    const double theta = std::uniform_real_distribution<double>(0, std::numbers::pi)(rng);
    const auto rows = random_rows(rng, n_a, n_p);
    const auto d = exact_distribution(XProgram(BinMatrix::from_rows(rows), theta));
    CHECK(oracle::tv(d.probs, oracle::iqp_distribution(rows, theta)) < 1e-10);
  }
}

TEST_CASE("codeword bias formula agrees with the exact distribution") {
  std::mt19937_64 rng(4);
  const XProgram small(BinMatrix{{1, 0, 1}, {0, 1, 0}}, kPi8);
  const BinVector s{1, 0, 0};
  CHECK(bias_codeword_formula(small, s).value ==
        Approx(bias_direct(exact_distribution(small), s)).margin(1e-9));
  for (int t = 0; t < 25; ++t) {
    const int n_p = 2 + static_cast<int>(rng() % 4), n_a = 1 + static_cast<int>(rng() % 7);
    const auto rows = random_rows(rng, n_a, n_p);
    const XProgram xp(BinMatrix::from_rows(rows), kPi8);
    std::vector<int> sb(n_p);
    for (auto& b : sb) b = static_cast<int>(rng() & 1);
    const double want = oracle::orthogonal_mass(oracle::iqp_distribution(rows, kPi8), sb);
    CHECK(bias_codeword_formula(xp, BinVector::from_bits(sb)).value == Approx(want).margin(1e-9));
  }
}

TEST_CASE("bias towards the zero direction is one") {
  const XProgram xp(BinMatrix{{1, 1}, {0, 1}}, kPi8);
  const auto r = bias_codeword_formula(xp, BinVector(2));
  CHECK(r.empty);
  CHECK(r.value == 1.0);
}

TEST_CASE("samples follow the distribution") {
  const XProgram xp(BinMatrix{{1, 0, 1}, {0, 1, 0}}, kPi8);
  const auto d = exact_distribution(xp);
  const std::size_t n = 20000;
  const auto xs = sample(xp, 99, n);
  std::vector<double> freq(8, 0.0);
  for (const auto& x : xs) freq[x.to_index()] += 1.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double p = d.probs[i];
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    CHECK(std::abs(freq[i] / n - p) <= 5 * sigma + 1e-12);
  }
  CHECK(sample(xp, 99, 50) == sample(xp, 99, 50));
}

TEST_CASE("total variation basics") {
  OutcomeDistribution a{1, {1.0, 0.0}}, b{1, {0.0, 1.0}};
  CHECK(total_variation(a, b) == Approx(1.0));
  CHECK(total_variation(a, a) == 0.0);
}

TEST_CASE("invalid programs are rejected") {
  CHECK_THROWS_AS(XProgram(BinMatrix{{0, 0}, {1, 0}}, kPi8), XProgError);
  CHECK_THROWS_AS(XProgram(BinMatrix{{1}}, -0.1), XProgError);
  CHECK_THROWS_AS(xprogram_from_json(nlohmann::json::parse(R"({"q": [[1]]})")), XProgError);
  CHECK_THROWS_AS(bias_codeword_formula(XProgram(BinMatrix{{1}}, kPi8), BinVector{1, 0}),
                  XProgError);
}

TEST_CASE("CSV lists bitstrings in order") {
  const auto csv = to_csv(exact_distribution(XProgram(BinMatrix{{1}}, std::numbers::pi / 2)));
  CHECK(csv.rfind("bitstring,probability\n0,", 0) == 0);
  CHECK(csv.find("\n1,1\n") != std::string::npos);
}
