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

#include <array>
#include <complex>
#include <compare>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace blindiqp {

using cd = std::complex<double>;
using Amp2 = std::array<cd, 2>;
// Row-major 2x2 matrix.
using Mat2 = std::array<cd, 4>;

class QsimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Primary, Ancillary, Bridge };

// Qubits are addressed by role. A client-side EPR half shares kind and index
// with its server-side partner.
struct Label {
  Kind kind = Kind::Primary;
  int index = 0;
  bool client = false;

  static Label primary(int j) { return {Kind::Primary, j, false}; }
  static Label ancilla(int i) { return {Kind::Ancillary, i, false}; }
  static Label bridge(int k) { return {Kind::Bridge, k, false}; }
  Label half() const { return {kind, index, !client}; }

  auto operator<=>(const Label&) const = default;
  std::string str() const;
};

enum class Gate { Z, S, Sdag, Y, SqrtY, H, X };

Mat2 gate_matrix(Gate g);
Mat2 matmul(const Mat2& a, const Mat2& b);
Mat2 matpow(const Mat2& m, int k);
Amp2 apply(const Mat2& m, const Amp2& v);

struct MeasBasis {
  enum class Type { Computational, Hadamard, PauliY, Theta, SRotatedHadamard, SRotatedTheta };
  Type type = Type::Computational;
  // Power of S applied to the basis vectors, taken mod 4.
  int k = 0;
  double theta = 0.0;

  static MeasBasis computational() { return {Type::Computational}; }
  static MeasBasis hadamard() { return {Type::Hadamard}; }
  static MeasBasis pauli_y() { return {Type::PauliY}; }
  static MeasBasis theta_basis(double t) { return {Type::Theta, 0, t}; }
  static MeasBasis s_hadamard(int k) { return {Type::SRotatedHadamard, k, 0.0}; }
  static MeasBasis s_theta(int k, double t) { return {Type::SRotatedTheta, k, t}; }
  // Rotated computational basis U{|0>,|1>}.
  static std::array<Amp2, 2> rotated(const Mat2& u);

  std::array<Amp2, 2> vectors() const;
  std::string str() const;
};

// Single-qubit preparations the protocols send.
struct StateSpec {
  enum class Form { Zero, One, Plus, Minus, PlusY, MinusY, ZSPlus, YSqrtYZero };
  Form form = Form::Plus;
  int r = 0;
  int d = 0;

  static StateSpec zs_plus(int r, int d) { return {Form::ZSPlus, r, d}; }
  static StateSpec y_sqrty_zero(int r, int d) { return {Form::YSqrtYZero, r, d}; }

  Amp2 amplitudes() const;
  std::string str() const;
};

struct Branch;

// Dense state over labelled qubits; labels_[q] is bit q of the amplitude index.
class PureState {
 public:
  PureState() : amps_{cd{1.0, 0.0}} {}
  static PureState product(const std::vector<std::pair<Label, Amp2>>& qubits);

  std::size_t num_qubits() const { return labels_.size(); }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<cd>& amps() const { return amps_; }
  std::vector<cd>& amps() { return amps_; }
  bool contains(const Label& l) const;
  std::size_t position(const Label& l) const;

  void add(const Label& l, const Amp2& v);
  PureState tensor(const PureState& o) const;
  void apply_cz(const Label& a, const Label& b);
  void apply(const Label& l, const Mat2& m);
  void apply_gate(const Label& l, Gate g) { apply(l, gate_matrix(g)); }

  std::array<double, 2> outcome_probs(const Label& l, const MeasBasis& b) const;
  // Unnormalised projection onto the given basis vector, qubit removed.
  PureState project(const Label& l, const Amp2& v) const;
  std::vector<Branch> branches(const Label& l, const MeasBasis& b) const;

  // Distribution over the listed qubits measured in the listed bases; the
  // first label is the most significant bit. Other qubits are marginalised.
  std::vector<double> joint_probs(const std::vector<Label>& ls,
                                  const std::vector<MeasBasis>& bs) const;

  PureState reordered(const std::vector<Label>& order) const;
  double norm2() const;
  void normalize();
  nlohmann::json dump() const;

 private:
  std::vector<Label> labels_;
  std::vector<cd> amps_;
};

struct Branch {
  int outcome;
  double prob;
  PureState state;
};

inline constexpr double kPruneTol = 1e-14;

PureState prepare(const std::vector<std::pair<Label, StateSpec>>& specs);
PureState apply_cz(PureState s, const Label& a, const Label& b);
PureState apply_gate(PureState s, const Label& l, Gate g);
std::pair<int, PureState> measure(const PureState& s, const Label& l, const MeasBasis& b,
                                  std::mt19937_64& rng);
std::pair<int, PureState> measure(const PureState& s, const Label& l, const MeasBasis& b,
                                  std::uint64_t seed);
std::vector<Branch> measure_branches(const PureState& s, const Label& l, const MeasBasis& b);
double fidelity(const PureState& a, const PureState& b);

// Product of independent dense components. CZ merges components and
// measurement shrinks them, which keeps protocol registers small.
class Register {
 public:
  void add(const Label& l, const Amp2& v);
  void add(PureState s);
  bool contains(const Label& l) const;
  std::vector<Label> labels() const;
  std::size_t num_qubits() const;
  std::size_t largest_component() const;

  void apply_cz(const Label& a, const Label& b);
  void apply(const Label& l, const Mat2& m);
  void apply_gate(const Label& l, Gate g) { apply(l, gate_matrix(g)); }

  std::array<double, 2> outcome_probs(const Label& l, const MeasBasis& b) const;
  void collapse(const Label& l, const MeasBasis& b, int outcome);
  std::vector<double> joint_probs(const std::vector<Label>& ls,
                                  const std::vector<MeasBasis>& bs) const;
  PureState flatten() const;
  // Tensor product of the components that hold any of `ls`.
  PureState support(const std::vector<Label>& ls) const;

 private:
  std::size_t find(const Label& l) const;
  std::vector<PureState> comps_;
};

}  // namespace blindiqp
