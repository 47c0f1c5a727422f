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

#include "blindiqp/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace blindiqp {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr cd kI{0.0, 1.0};

int mod4(int k) { return ((k % 4) + 4) % 4; }

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Primary:
      return "p";
    case Kind::Ancillary:
      return "a";
    case Kind::Bridge:
      return "b";
  }
  return "?";
}

}  // namespace

std::string Label::str() const {
  return fmt::format("{}{}{}", client ? "c" : "", kind_name(kind), index);
}

Mat2 gate_matrix(Gate g) {
  switch (g) {
    case Gate::Z:
      return {1.0, 0.0, 0.0, -1.0};
    case Gate::S:
      return {1.0, 0.0, 0.0, kI};
    case Gate::Sdag:
      return {1.0, 0.0, 0.0, -kI};
    case Gate::Y:
      return {0.0, -kI, kI, 0.0};
    case Gate::SqrtY: {
      // Principal root ((1+i)I + (1-i)Y)/2.
      const cd h{0.5, 0.5};
      return {h, -h, h, h};
    }
    case Gate::H:
      return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
    case Gate::X:
      return {0.0, 1.0, 1.0, 0.0};
  }
  throw QsimError("unknown gate");
}

Mat2 matmul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

Mat2 matpow(const Mat2& m, int k) {
  if (k < 0) throw QsimError("negative matrix power");
  Mat2 out{1.0, 0.0, 0.0, 1.0};
  for (int i = 0; i < k; ++i) out = matmul(m, out);
  return out;
}

Amp2 apply(const Mat2& m, const Amp2& v) {
  return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

std::array<Amp2, 2> MeasBasis::rotated(const Mat2& u) {
  return {Amp2{u[0], u[2]}, Amp2{u[1], u[3]}};
}

std::array<Amp2, 2> MeasBasis::vectors() const {
  const Amp2 plus{kInvSqrt2, kInvSqrt2};
  const Amp2 minus{kInvSqrt2, -kInvSqrt2};
  const Amp2 th0{std::cos(theta), -kI * std::sin(theta)};
  const Amp2 th1{-kI * std::sin(theta), std::cos(theta)};
  const Mat2 sk = matpow(gate_matrix(Gate::S), mod4(k));
  switch (type) {
    case Type::Computational:
      return {Amp2{1.0, 0.0}, Amp2{0.0, 1.0}};
    case Type::Hadamard:
      return {plus, minus};
    case Type::PauliY:
      return {Amp2{kInvSqrt2, kI * kInvSqrt2}, Amp2{kInvSqrt2, -kI * kInvSqrt2}};
    case Type::Theta:
      return {th0, th1};
    case Type::SRotatedHadamard:
      return {blindiqp::apply(sk, plus), blindiqp::apply(sk, minus)};
    case Type::SRotatedTheta:
      return {blindiqp::apply(sk, th0), blindiqp::apply(sk, th1)};
  }
  throw QsimError("unknown basis");
}

std::string MeasBasis::str() const {
  switch (type) {
    case Type::Computational:
      return "Z";
    case Type::Hadamard:
      return "X";
    case Type::PauliY:
      return "Y";
    case Type::Theta:
      return fmt::format("theta({})", theta);
    case Type::SRotatedHadamard:
      return fmt::format("S^{}X", mod4(k));
    case Type::SRotatedTheta:
      return fmt::format("S^{}theta({})", mod4(k), theta);
  }
  return "?";
}

Amp2 StateSpec::amplitudes() const {
  const Amp2 plus{kInvSqrt2, kInvSqrt2};
  switch (form) {
    case Form::Zero:
      return {1.0, 0.0};
    case Form::One:
      return {0.0, 1.0};
    case Form::Plus:
      return plus;
    case Form::Minus:
      return {kInvSqrt2, -kInvSqrt2};
    case Form::PlusY:
      return {kInvSqrt2, kI * kInvSqrt2};
    case Form::MinusY:
      return {kInvSqrt2, -kI * kInvSqrt2};
    case Form::ZSPlus: {
      const Mat2 m = matmul(matpow(gate_matrix(Gate::Z), r & 1),
                            matpow(gate_matrix(Gate::S), mod4(d)));
      return blindiqp::apply(m, plus);
    }
    case Form::YSqrtYZero: {
      const Mat2 m = matmul(matpow(gate_matrix(Gate::Y), r & 1),
                            matpow(gate_matrix(Gate::SqrtY), mod4(d)));
      return blindiqp::apply(m, Amp2{1.0, 0.0});
    }
  }
  throw QsimError("unknown state descriptor");
}

std::string StateSpec::str() const {
  switch (form) {
    case Form::Zero:
      return "|0>";
    case Form::One:
      return "|1>";
    case Form::Plus:
      return "|+>";
    case Form::Minus:
      return "|->";
    case Form::PlusY:
      return "|+Y>";
    case Form::MinusY:
      return "|-Y>";
    case Form::ZSPlus:
      return fmt::format("Z^{} S^{}|+>", r & 1, mod4(d));
    case Form::YSqrtYZero:
      return fmt::format("Y^{} sqrtY^{}|0>", r & 1, mod4(d));
  }
  return "?";
}

PureState PureState::product(const std::vector<std::pair<Label, Amp2>>& qubits) {
  PureState s;
  for (const auto& [l, v] : qubits) s.add(l, v);
  return s;
}

bool PureState::contains(const Label& l) const {
  return std::find(labels_.begin(), labels_.end(), l) != labels_.end();
}

std::size_t PureState::position(const Label& l) const {
  auto it = std::find(labels_.begin(), labels_.end(), l);
  if (it == labels_.end()) throw QsimError("missing qubit label " + l.str());
  return static_cast<std::size_t>(it - labels_.begin());
}

void PureState::add(const Label& l, const Amp2& v) {
  if (contains(l)) throw QsimError("duplicate qubit label " + l.str());
  const std::size_t n = amps_.size();
  amps_.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    amps_[n + i] = amps_[i] * v[1];
    amps_[i] *= v[0];
  }
  labels_.push_back(l);
}

PureState PureState::tensor(const PureState& o) const {
  PureState out;
  out.labels_ = labels_;
  for (const auto& l : o.labels_) {
    if (contains(l)) throw QsimError("duplicate qubit label " + l.str());
    out.labels_.push_back(l);
  }
  out.amps_.resize(amps_.size() * o.amps_.size());
  for (std::size_t h = 0; h < o.amps_.size(); ++h)
    for (std::size_t i = 0; i < amps_.size(); ++i)
      out.amps_[h * amps_.size() + i] = amps_[i] * o.amps_[h];
  return out;
}

void PureState::apply_cz(const Label& a, const Label& b) {
  const std::size_t pa = position(a);
  const std::size_t pb = position(b);
  if (pa == pb) throw QsimError("CZ needs two distinct qubits");
  const std::size_t mask = (std::size_t{1} << pa) | (std::size_t{1} << pb);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if ((i & mask) == mask) amps_[i] = -amps_[i];
}

void PureState::apply(const Label& l, const Mat2& m) {
  const std::size_t bit = std::size_t{1} << position(l);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & bit) continue;
    const cd a0 = amps_[i];
    const cd a1 = amps_[i | bit];
    amps_[i] = m[0] * a0 + m[1] * a1;
    amps_[i | bit] = m[2] * a0 + m[3] * a1;
  }
}

PureState PureState::project(const Label& l, const Amp2& v) const {
  const std::size_t q = position(l);
  const std::size_t low = (std::size_t{1} << q) - 1;
  PureState out;
  out.labels_ = labels_;
  out.labels_.erase(out.labels_.begin() + static_cast<std::ptrdiff_t>(q));
  out.amps_.assign(amps_.size() / 2, cd{});
  const cd c0 = std::conj(v[0]);
  const cd c1 = std::conj(v[1]);
  for (std::size_t i = 0; i < out.amps_.size(); ++i) {
    const std::size_t base = (i & low) | ((i & ~low) << 1);
    out.amps_[i] = c0 * amps_[base] + c1 * amps_[base | (low + 1)];
  }
  return out;
}

std::array<double, 2> PureState::outcome_probs(const Label& l, const MeasBasis& b) const {
  const auto vs = b.vectors();
  const std::size_t q = position(l);
  const std::size_t bit = std::size_t{1} << q;
  const cd c00 = std::conj(vs[0][0]), c01 = std::conj(vs[0][1]);
  const cd c10 = std::conj(vs[1][0]), c11 = std::conj(vs[1][1]);
  double p0 = 0.0, p1 = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & bit) continue;
    const cd a0 = amps_[i];
    const cd a1 = amps_[i | bit];
    p0 += std::norm(c00 * a0 + c01 * a1);
    p1 += std::norm(c10 * a0 + c11 * a1);
  }
  const double t = p0 + p1;
  return {p0 / t, p1 / t};
}

std::vector<Branch> PureState::branches(const Label& l, const MeasBasis& b) const {
  const auto vs = b.vectors();
  const double total = norm2();
  std::vector<Branch> out;
  for (int o = 0; o < 2; ++o) {
    PureState s = project(l, vs[o]);
    const double p = s.norm2() / total;
    if (p <= kPruneTol) continue;
    s.normalize();
    out.push_back({o, p, std::move(s)});
  }
  return out;
}

std::vector<double> PureState::joint_probs(const std::vector<Label>& ls,
                                           const std::vector<MeasBasis>& bs) const {
  if (ls.size() != bs.size()) throw QsimError("labels and bases differ in length");
  PureState t = *this;
  std::vector<std::size_t> pos;
  for (std::size_t m = 0; m < ls.size(); ++m) {
    const auto vs = bs[m].vectors();
    // Rows are the conjugated basis vectors, mapping the basis to |0>,|1>.
    t.apply(ls[m], Mat2{std::conj(vs[0][0]), std::conj(vs[0][1]), std::conj(vs[1][0]),
                        std::conj(vs[1][1])});
    pos.push_back(position(ls[m]));
  }
  std::vector<double> out(std::size_t{1} << ls.size(), 0.0);
  for (std::size_t i = 0; i < t.amps_.size(); ++i) {
    std::size_t key = 0;
    for (std::size_t p : pos) key = (key << 1) | ((i >> p) & 1u);
    out[key] += std::norm(t.amps_[i]);
  }
  const double total = t.norm2();
  for (auto& p : out) p /= total;
  return out;
}

PureState PureState::reordered(const std::vector<Label>& order) const {
  if (order.size() != labels_.size()) throw QsimError("label sets differ");
  std::vector<std::size_t> src;
  for (const auto& l : order) src.push_back(position(l));
  PureState out;
  out.labels_ = order;
  out.amps_.assign(amps_.size(), cd{});
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    std::size_t j = 0;
    for (std::size_t q = 0; q < src.size(); ++q) j |= ((i >> q) & 1u) << src[q];
    out.amps_[i] = amps_[j];
  }
  return out;
}

double PureState::norm2() const {
  double t = 0.0;
  for (const auto& a : amps_) t += std::norm(a);
  return t;
}

void PureState::normalize() {
  const double n = std::sqrt(norm2());
  if (n == 0.0) throw QsimError("cannot normalise a zero vector");
  for (auto& a : amps_) a /= n;
}

nlohmann::json PureState::dump() const {
  nlohmann::json j;
  for (const auto& l : labels_) j["labels"].push_back(l.str());
  for (const auto& a : amps_) j["amps"].push_back({a.real(), a.imag()});
  return j;
}

PureState prepare(const std::vector<std::pair<Label, StateSpec>>& specs) {
  PureState s;
  for (const auto& [l, spec] : specs) s.add(l, spec.amplitudes());
  return s;
}

PureState apply_cz(PureState s, const Label& a, const Label& b) {
  s.apply_cz(a, b);
  return s;
}

PureState apply_gate(PureState s, const Label& l, Gate g) {
  s.apply_gate(l, g);
  return s;
}

std::pair<int, PureState> measure(const PureState& s, const Label& l, const MeasBasis& b,
                                  std::mt19937_64& rng) {
  const auto br = s.branches(l, b);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  const std::size_t pick = (br.size() == 2 && x >= br[0].prob) ? 1 : 0;
  return {br[pick].outcome, br[pick].state};
}

std::pair<int, PureState> measure(const PureState& s, const Label& l, const MeasBasis& b,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return measure(s, l, b, rng);
}

std::vector<Branch> measure_branches(const PureState& s, const Label& l, const MeasBasis& b) {
  return s.branches(l, b);
}

double fidelity(const PureState& a, const PureState& b) {
  if (a.num_qubits() != b.num_qubits()) throw QsimError("fidelity needs equal label sets");
  const PureState bb = b.reordered(a.labels());
  cd ip{};
  for (std::size_t i = 0; i < a.amps().size(); ++i) ip += std::conj(a.amps()[i]) * bb.amps()[i];
  return std::norm(ip) / (a.norm2() * bb.norm2());
}

void Register::add(const Label& l, const Amp2& v) {
  if (contains(l)) throw QsimError("duplicate qubit label " + l.str());
  PureState s;
  s.add(l, v);
  comps_.push_back(std::move(s));
}

void Register::add(PureState s) {
  for (const auto& l : s.labels())
    if (contains(l)) throw QsimError("duplicate qubit label " + l.str());
  comps_.push_back(std::move(s));
}

std::size_t Register::find(const Label& l) const {
  for (std::size_t c = 0; c < comps_.size(); ++c)
    if (comps_[c].contains(l)) return c;
  throw QsimError("missing qubit label " + l.str());
}

bool Register::contains(const Label& l) const {
  return std::any_of(comps_.begin(), comps_.end(), [&](const auto& c) { return c.contains(l); });
}

std::vector<Label> Register::labels() const {
  std::vector<Label> out;
  for (const auto& c : comps_) out.insert(out.end(), c.labels().begin(), c.labels().end());
  return out;
}

std::size_t Register::num_qubits() const {
  std::size_t n = 0;
  for (const auto& c : comps_) n += c.num_qubits();
  return n;
}

std::size_t Register::largest_component() const {
  std::size_t n = 0;
  for (const auto& c : comps_) n = std::max(n, c.num_qubits());
  return n;
}

void Register::apply_cz(const Label& a, const Label& b) {
  std::size_t ca = find(a);
  std::size_t cb = find(b);
  if (ca != cb) {
    comps_[ca] = comps_[ca].tensor(comps_[cb]);
    comps_.erase(comps_.begin() + static_cast<std::ptrdiff_t>(cb));
    if (cb < ca) --ca;
  }
  comps_[ca].apply_cz(a, b);
}

void Register::apply(const Label& l, const Mat2& m) { comps_[find(l)].apply(l, m); }

std::array<double, 2> Register::outcome_probs(const Label& l, const MeasBasis& b) const {
  return comps_[find(l)].outcome_probs(l, b);
}

void Register::collapse(const Label& l, const MeasBasis& b, int outcome) {
  const std::size_t c = find(l);
  PureState s = comps_[c].project(l, b.vectors()[outcome & 1]);
  if (s.norm2() <= kPruneTol * comps_[c].norm2())
    throw QsimError("collapse onto a zero-probability outcome");
  s.normalize();
  if (s.num_qubits() == 0)
    comps_.erase(comps_.begin() + static_cast<std::ptrdiff_t>(c));
  else
    comps_[c] = std::move(s);
}

std::vector<double> Register::joint_probs(const std::vector<Label>& ls,
                                          const std::vector<MeasBasis>& bs) const {
  if (ls.size() != bs.size()) throw QsimError("labels and bases differ in length");
  // Per-component distributions, combined as a product.
  std::vector<double> out(std::size_t{1} << ls.size(), 0.0);
  std::vector<std::vector<std::size_t>> members(comps_.size());
  for (std::size_t m = 0; m < ls.size(); ++m) members[find(ls[m])].push_back(m);
  std::vector<std::size_t> assigned;
  std::vector<double> acc{1.0};
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    if (members[c].empty()) continue;
    std::vector<Label> cl;
    std::vector<MeasBasis> cb;
    for (auto m : members[c]) {
      cl.push_back(ls[m]);
      cb.push_back(bs[m]);
    }
    const auto pc = comps_[c].joint_probs(cl, cb);
    std::vector<double> next(acc.size() * pc.size());
    for (std::size_t a = 0; a < acc.size(); ++a)
      for (std::size_t b = 0; b < pc.size(); ++b) next[a * pc.size() + b] = acc[a] * pc[b];
    acc = std::move(next);
    assigned.insert(assigned.end(), members[c].begin(), members[c].end());
  }
  // acc is indexed by `assigned` order, most significant first; remap.
  const std::size_t m = ls.size();
  for (std::size_t i = 0; i < acc.size(); ++i) {
    std::size_t key = 0;
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t bit = (i >> (m - 1 - t)) & 1u;
      key |= bit << (m - 1 - assigned[t]);
    }
    out[key] = acc[i];
  }
  return out;
}

PureState Register::flatten() const {
  PureState s;
  for (const auto& c : comps_) s = s.tensor(c);
  return s;
}

PureState Register::support(const std::vector<Label>& ls) const {
  std::vector<bool> used(comps_.size(), false);
  for (const auto& l : ls) used[find(l)] = true;
  PureState s;
  for (std::size_t c = 0; c < comps_.size(); ++c)
    if (used[c]) s = s.tensor(comps_[c]);
  return s;
}

}  // namespace blindiqp
