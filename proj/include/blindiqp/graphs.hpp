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

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "blindiqp/gf2.hpp"
#include "blindiqp/qsim.hpp"

namespace blindiqp {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Position = std::pair<int, int>;

// Bipartite graph: primary p_j and ancilla a_i joined when Q_ij = 1.
struct IqpGraph {
  BinMatrix q;
};

// Matrix over {-1,0,1}; each -1 is an intermediary vertex b_k, numbered in
// row-major order.
class ExtendedIqpGraph {
 public:
  explicit ExtendedIqpGraph(std::vector<std::vector<int>> entries);

  int n_a() const { return static_cast<int>(qt_.size()); }
  int n_p() const { return static_cast<int>(qt_[0].size()); }
  int n_b() const { return static_cast<int>(positions_.size()); }
  int entry(int i, int j) const { return qt_.at(i).at(j); }
  const std::vector<std::vector<int>>& entries() const { return qt_; }

  // Index k of the intermediary at (i,j), or -1.
  int g(int i, int j) const;
  Position position(int k) const { return positions_.at(k); }
  const std::vector<Position>& positions() const { return positions_; }

  // The graph with every -1 entry set to 0.
  BinMatrix skeleton() const;
  // Number of CZ gates E_Qt applies.
  int cz_count() const;

  bool operator==(const ExtendedIqpGraph& o) const { return qt_ == o.qt_; }

 private:
  std::vector<std::vector<int>> qt_;
  std::vector<Position> positions_;
  std::vector<std::vector<int>> index_;
};

// d_b[k] = 1 bridges b_k, 0 breaks it.
struct BreakBridgePlan {
  BinVector d_b;
};

ExtendedIqpGraph extend(const BinMatrix& q, const std::vector<Position>& positions);
BinMatrix reduce(const ExtendedIqpGraph& qt, const BreakBridgePlan& plan);
// Plan that reduces qt to q; throws when q disagrees with qt off the -1 entries.
BreakBridgePlan plan_for(const ExtendedIqpGraph& qt, const BinMatrix& q);

void entangle(PureState& s, const IqpGraph& g);
void entangle(PureState& s, const ExtendedIqpGraph& g);
void entangle(Register& r, const ExtendedIqpGraph& g);

// S^power on `target`; power is 1, 2 (Z) or 3 (S^-1).
struct Correction {
  Label target;
  int power;
};

struct BridgeBreakResult {
  PureState state;
  BinVector s_b;
  std::vector<Correction> corrections;
  double prob = 1.0;
};

// Corrections left on the primaries and ancillas after measuring every
// intermediary in the Y basis.
std::vector<Correction> bridge_corrections(const ExtendedIqpGraph& qt, const BreakBridgePlan& plan,
                                           const BinVector& r_b, const BinVector& s_b);

BridgeBreakResult bridge_break_transform(const PureState& state, const ExtendedIqpGraph& qt,
                                         const BreakBridgePlan& plan, const BinVector& r_b,
                                         std::mt19937_64& rng);
BridgeBreakResult bridge_break_transform(const PureState& state, const ExtendedIqpGraph& qt,
                                         const BreakBridgePlan& plan, const BinVector& r_b,
                                         std::uint64_t seed);
// Every measurement branch with its probability.
std::vector<BridgeBreakResult> bridge_break_branches(const PureState& state,
                                                     const ExtendedIqpGraph& qt,
                                                     const BreakBridgePlan& plan,
                                                     const BinVector& r_b);

void undo_corrections(PureState& s, const std::vector<Correction>& corrections);

nlohmann::json to_json(const ExtendedIqpGraph& g);
ExtendedIqpGraph extended_graph_from_json(const nlohmann::json& j);
std::string to_dot(const ExtendedIqpGraph& g);

}  // namespace blindiqp
