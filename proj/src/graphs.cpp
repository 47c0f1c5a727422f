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

#include "blindiqp/graphs.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

namespace blindiqp {

ExtendedIqpGraph::ExtendedIqpGraph(std::vector<std::vector<int>> entries)
    : qt_(std::move(entries)) {
  if (qt_.empty() || qt_[0].empty()) throw GraphError("extended graph must be non-empty");
  index_.assign(qt_.size(), std::vector<int>(qt_[0].size(), -1));
  for (std::size_t i = 0; i < qt_.size(); ++i) {
    if (qt_[i].size() != qt_[0].size()) throw GraphError("ragged extended graph rows");
    for (std::size_t j = 0; j < qt_[i].size(); ++j) {
      const int e = qt_[i][j];
      if (e < -1 || e > 1) throw GraphError("extended graph entries must be -1, 0 or 1");
      if (e == -1) {
        index_[i][j] = static_cast<int>(positions_.size());
        positions_.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
}

int ExtendedIqpGraph::g(int i, int j) const { return index_.at(i).at(j); }

BinMatrix ExtendedIqpGraph::skeleton() const {
  BinMatrix m(qt_.size(), qt_[0].size());
  for (int i = 0; i < n_a(); ++i)
    for (int j = 0; j < n_p(); ++j) m.set(i, j, entry(i, j) == 1);
  return m;
}

int ExtendedIqpGraph::cz_count() const {
  int n = 0;
  for (int i = 0; i < n_a(); ++i)
    for (int j = 0; j < n_p(); ++j) n += entry(i, j) == 1 ? 1 : entry(i, j) == -1 ? 2 : 0;
  return n;
}

ExtendedIqpGraph extend(const BinMatrix& q, const std::vector<Position>& positions) {
  std::vector<std::vector<int>> e = q.to_rows();
  for (auto [i, j] : positions) {
    if (i < 0 || j < 0 || i >= static_cast<int>(q.rows()) || j >= static_cast<int>(q.cols()))
      throw GraphError(fmt::format("position ({},{}) out of bounds", i, j));
    e[i][j] = -1;
  }
  return ExtendedIqpGraph(std::move(e));
}

BinMatrix reduce(const ExtendedIqpGraph& qt, const BreakBridgePlan& plan) {
  if (static_cast<int>(plan.d_b.size()) != qt.n_b())
    throw GraphError("plan length does not match the number of intermediaries");
  BinMatrix m = qt.skeleton();
  for (int k = 0; k < qt.n_b(); ++k) {
    auto [i, j] = qt.position(k);
    m.set(i, j, plan.d_b[k]);
  }
  return m;
}

BreakBridgePlan plan_for(const ExtendedIqpGraph& qt, const BinMatrix& q) {
  if (static_cast<int>(q.rows()) != qt.n_a() || static_cast<int>(q.cols()) != qt.n_p())
    throw GraphError("Q and the extended graph differ in shape");
  BreakBridgePlan plan{BinVector(qt.n_b())};
  for (int i = 0; i < qt.n_a(); ++i) {
    for (int j = 0; j < qt.n_p(); ++j) {
      const int e = qt.entry(i, j);
      if (e == -1)
        plan.d_b.set(qt.g(i, j), q(i, j));
      else if (e != q(i, j))
        throw GraphError(fmt::format("Q is not reducible from the extended graph at ({},{})", i, j));
    }
  }
  return plan;
}

void entangle(PureState& s, const IqpGraph& g) {
  for (std::size_t i = 0; i < g.q.rows(); ++i)
    for (std::size_t j = 0; j < g.q.cols(); ++j)
      if (g.q(i, j))
        s.apply_cz(Label::ancilla(static_cast<int>(i)), Label::primary(static_cast<int>(j)));
}

namespace {

template <class State>
void entangle_impl(State& s, const ExtendedIqpGraph& g) {
  for (int i = 0; i < g.n_a(); ++i) {
    for (int j = 0; j < g.n_p(); ++j) {
      if (g.entry(i, j) == 1) {
        s.apply_cz(Label::ancilla(i), Label::primary(j));
      } else if (g.entry(i, j) == -1) {
        const Label b = Label::bridge(g.g(i, j));
        s.apply_cz(b, Label::ancilla(i));
        s.apply_cz(b, Label::primary(j));
      }
    }
  }
}

}  // namespace

void entangle(PureState& s, const ExtendedIqpGraph& g) { entangle_impl(s, g); }
void entangle(Register& r, const ExtendedIqpGraph& g) { entangle_impl(r, g); }

std::vector<Correction> bridge_corrections(const ExtendedIqpGraph& qt, const BreakBridgePlan& plan,
                                           const BinVector& r_b, const BinVector& s_b) {
  std::vector<Correction> out;
  for (int k = 0; k < qt.n_b(); ++k) {
    auto [i, j] = qt.position(k);
    int power = 0;
    if (plan.d_b[k])
      power = ((s_b[k] + r_b[k]) & 1) ? 3 : 1;
    else if (r_b[k])
      power = 2;
    if (power == 0) continue;
    out.push_back({Label::primary(j), power});
    out.push_back({Label::ancilla(i), power});
  }
  return out;
}

namespace {

void check_inputs(const PureState& state, const ExtendedIqpGraph& qt, const BreakBridgePlan& plan,
                  const BinVector& r_b) {
  if (static_cast<int>(plan.d_b.size()) != qt.n_b() || static_cast<int>(r_b.size()) != qt.n_b())
    throw GraphError("plan or r_b length does not match the number of intermediaries");
  for (int k = 0; k < qt.n_b(); ++k)
    if (!state.contains(Label::bridge(k)))
      throw GraphError(fmt::format("register lacks intermediary b{}", k));
}

}  // namespace

BridgeBreakResult bridge_break_transform(const PureState& state, const ExtendedIqpGraph& qt,
                                         const BreakBridgePlan& plan, const BinVector& r_b,
                                         std::mt19937_64& rng) {
  check_inputs(state, qt, plan, r_b);
  BridgeBreakResult res{state, BinVector(qt.n_b()), {}, 1.0};
  for (int k = 0; k < qt.n_b(); ++k) {
    auto br = res.state.branches(Label::bridge(k), MeasBasis::pauli_y());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t pick = (br.size() == 2 && u(rng) >= br[0].prob) ? 1 : 0;
    res.s_b.set(k, br[pick].outcome);
    res.prob *= br[pick].prob;
    res.state = std::move(br[pick].state);
  }
  res.corrections = bridge_corrections(qt, plan, r_b, res.s_b);
  return res;
}

BridgeBreakResult bridge_break_transform(const PureState& state, const ExtendedIqpGraph& qt,
                                         const BreakBridgePlan& plan, const BinVector& r_b,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return bridge_break_transform(state, qt, plan, r_b, rng);
}

std::vector<BridgeBreakResult> bridge_break_branches(const PureState& state,
                                                     const ExtendedIqpGraph& qt,
                                                     const BreakBridgePlan& plan,
                                                     const BinVector& r_b) {
  check_inputs(state, qt, plan, r_b);
  std::vector<BridgeBreakResult> layer{{state, BinVector(qt.n_b()), {}, 1.0}};
  for (int k = 0; k < qt.n_b(); ++k) {
    std::vector<BridgeBreakResult> next;
    for (auto& r : layer) {
      for (auto& br : r.state.branches(Label::bridge(k), MeasBasis::pauli_y())) {
        BridgeBreakResult n{std::move(br.state), r.s_b, {}, r.prob * br.prob};
        n.s_b.set(k, br.outcome);
        next.push_back(std::move(n));
      }
    }
    layer = std::move(next);
  }
  for (auto& r : layer) r.corrections = bridge_corrections(qt, plan, r_b, r.s_b);
  return layer;
}

void undo_corrections(PureState& s, const std::vector<Correction>& corrections) {
  const Mat2 s_gate = gate_matrix(Gate::S);
  for (const auto& c : corrections) s.apply(c.target, matpow(s_gate, (4 - c.power) % 4));
}

nlohmann::json to_json(const ExtendedIqpGraph& g) { return nlohmann::json{{"qt", g.entries()}}; }

ExtendedIqpGraph extended_graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("qt") || !j["qt"].is_array())
    throw GraphError("extended graph JSON needs a \"qt\" array");
  std::vector<std::vector<int>> e;
  for (const auto& row : j["qt"]) {
    if (!row.is_array()) throw GraphError("\"qt\" must be an array of arrays");
    std::vector<int> r;
    for (const auto& x : row) {
      if (!x.is_number_integer()) throw GraphError("\"qt\" entries must be integers");
      r.push_back(x.get<int>());
    }
    e.push_back(r);
  }
  return ExtendedIqpGraph(std::move(e));
}

std::string to_dot(const ExtendedIqpGraph& g) {
  std::ostringstream os;
  os << "graph iqp {\n";
  for (int j = 0; j < g.n_p(); ++j) os << fmt::format("  p{} [shape=circle];\n", j);
  for (int i = 0; i < g.n_a(); ++i) os << fmt::format("  a{} [shape=box];\n", i);
  for (int k = 0; k < g.n_b(); ++k) os << fmt::format("  b{} [shape=diamond];\n", k);
  for (int i = 0; i < g.n_a(); ++i) {
    for (int j = 0; j < g.n_p(); ++j) {
      if (g.entry(i, j) == 1) {
        os << fmt::format("  a{} -- p{};\n", i, j);
      } else if (g.entry(i, j) == -1) {
        const int k = g.g(i, j);
        os << fmt::format("  a{} -- b{};\n  b{} -- p{};\n", i, k, k, j);
      }
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace blindiqp
