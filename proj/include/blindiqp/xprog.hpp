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

namespace blindiqp {

class XProgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// exp(i theta sum_i X^{q_i}) applied to |0...0>. Rows of q are the program
// elements, columns the input qubits.
struct XProgram {
  BinMatrix q;
  double theta;

  XProgram(BinMatrix q_, double theta_);
  std::size_t n_a() const { return q.rows(); }
  std::size_t n_p() const { return q.cols(); }
};

// probs[x] with x read as a bit string, first bit most significant.
struct OutcomeDistribution {
  std::size_t n_p = 0;
  std::vector<double> probs;

  double operator[](const BinVector& x) const { return probs.at(x.to_index()); }
  double total() const;
};

struct BiasReport {
  BinVector direction;
  std::size_t n_s = 0;
  double value = 1.0;
  // True when no row of Q is selected by the direction.
  bool empty = false;
};

inline constexpr std::size_t kMaxExactPrimaries = 14;
inline constexpr std::size_t kMaxSelectedRows = 24;

OutcomeDistribution exact_distribution(const XProgram& xp);

std::vector<BinVector> sample(const XProgram& xp, std::uint64_t seed, std::size_t n);

// Draws from an explicit distribution; shared by every sampler in the library.
std::vector<BinVector> sample_distribution(const OutcomeDistribution& dist, std::uint64_t seed,
                                           std::size_t n);

double bias_direct(const OutcomeDistribution& dist, const BinVector& s);

BiasReport bias_codeword_formula(const XProgram& xp, const BinVector& s);

double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b);

nlohmann::json to_json(const XProgram& xp);
XProgram xprogram_from_json(const nlohmann::json& j);
std::string to_csv(const OutcomeDistribution& dist);

}  // namespace blindiqp
