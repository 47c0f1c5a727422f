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


#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blindiqp/gf2.hpp"
#include "blindiqp/graphs.hpp"
#include "blindiqp/protocol.hpp"
#include "blindiqp/xprog.hpp"

namespace blindiqp {

class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TestInstance {
  int n_a = 0, n_p = 0;
  BinMatrix qr = BinMatrix::identity(1), qs = BinMatrix::identity(1);
  BinVector s_hat;
  BinMatrix a = BinMatrix::identity(1), q = BinMatrix::identity(1);
  ExtendedIqpGraph qt{std::vector<std::vector<int>>{{0}}};
  // Unit vector on the last coordinate.
  BinVector s;
  double theta = 0.0;

  // A^{-1} s, the direction outputs are tested against.
  BinVector direction() const;
  XProgram program() const { return XProgram(q, theta); }
};

struct TestReport {
  int n_a = 0;
  std::size_t samples = 0;
  std::size_t orthogonal_count = 0;
  double bias_estimate = 0.0;
  double threshold = 0.0;
  double expected_bias = 0.0;
  bool pass = false;
  std::vector<int> o;
  std::uint64_t seed = 0;
  std::string adversary;
  // Hoeffding lower bound on an honest server passing at this N and threshold.
  double honest_pass_bound = 0.0;
  TestInstance instance;
};

bool is_prime(int n);
// Nonzero squares mod p, ascending.
std::vector<int> quadratic_residues(int p);
// n_a x (n_a+1)/2-1 matrix; column j is the residue indicator shifted cyclically by j.
BinMatrix qr_generator_matrix(int n_a);
// Identity with s_hat in the top entries of the last column.
BinMatrix transformation_matrix(const BinVector& s_hat);
TestInstance build_test_instance(int n_a, const BinVector& s_hat);
double expected_bias(const TestInstance& inst);

TestReport run_hypothesis_test(int n_a, std::size_t samples, double threshold, std::uint64_t seed,
                               const ServerStrategy& server);

// Q and s_hat are left out unless `reveal` is set.
nlohmann::json to_json(const TestReport& r, bool reveal = false);

}  // namespace blindiqp
