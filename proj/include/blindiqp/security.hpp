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
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blindiqp/protocol.hpp"

namespace blindiqp {

class SecurityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Density phases build 2^n x 2^n blocks, so n is capped.
inline constexpr int kMaxViewQubits = 7;

// Exact server view at one phase: for each classical record, the
// probability-weighted (unnormalised) state of the qubits the server holds.
// At Final the record ends with the response index and the client's output
// index.
struct ServerView {
  Phase phase = Phase::AfterState;
  // Basis order of every block; labels[0] is the least significant bit.
  std::vector<Label> labels;
  std::map<std::vector<int>, Eigen::MatrixXcd> blocks;
  // Leading record entries holding server memory (true s_b of a measuring server).
  std::size_t memory = 0;
  int n_b = 0;

  Eigen::MatrixXcd avg_state() const;
  std::map<std::vector<int>, double> classical() const;
  double total() const;
};

struct ViewDistance {
  // Trace distance between the ensemble averages avg_state().
  double quantum = 0.0;
  // Total variation between the classical tables.
  double classical = 0.0;
  // Largest trace distance between the states conditioned on one record.
  double conditional = 0.0;
  // Trace distance between the classical-quantum states.
  double joint = 0.0;
  // max over all of the above
  double combined = 0.0;
};

struct ViewOptions {
  RunOptions run;
  // Skip every density block; only the classical table is kept.
  bool classical_only = false;
  // At Final, append the client's output index to each record.
  bool include_output = true;
};

ServerView server_view(Runner runner, const XProgram& xp, const ExtendedIqpGraph& qt, Phase phase,
                       const ServerStrategy& adversary, const ViewOptions& opt = {});

ViewDistance view_distance(const ServerView& a, const ServerView& b);

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);
// Reduced state on `keep`, a subset of the view labels, in the given order.
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, const std::vector<Label>& labels,
                               const std::vector<Label>& keep);

// Marginal of record entries [first, first + count).
std::map<std::vector<int>, double> marginal(const ServerView& v, std::size_t first,
                                            std::size_t count);

ViewDistance blindness_distance(const XProgram& xp1, const XProgram& xp2,
                                const ExtendedIqpGraph& qt, const ServerStrategy& adversary,
                                Phase phase = Phase::AfterAngles, const ViewOptions& opt = {});

// Real protocol against the ideal resource with the simulator, on the joint
// (view, output) record at Final.
ViewDistance simulator_equivalence(const XProgram& xp, const ExtendedIqpGraph& qt,
                                   const ServerStrategy& server, const ViewOptions& opt = {});

// Views of a forking server hold every deterministic report map at once.
// Slicing records by (true s_b, reported s_b) gives the exact view of each
// map. Every field of `worst` is maximised over maps separately.
struct ResponseMapSweep {
  ViewDistance worst;
  std::uint64_t maps = 0;
  // Map attaining the worst joint distance, indexed by true s_b.
  std::vector<std::uint64_t> worst_table;
};

inline constexpr std::uint64_t kMaxResponseMaps = std::uint64_t{1} << 16;

ResponseMapSweep sweep_response_maps(const ServerView& a, const ServerView& b);
// View of the deterministic map `table` cut out of a forking view.
ServerView slice_response_map(const ServerView& forking, const std::vector<std::uint64_t>& table);

std::vector<BinMatrix> reductions(const ExtendedIqpGraph& qt);

struct SecurityCheck {
  std::string name;
  ViewDistance distance;
  double tolerance = 0.0;
  // combined within tolerance
  bool pass = false;
  // quantum and classical within tolerance
  bool ensemble_pass = false;
};

nlohmann::json to_json(const ViewDistance& d);
nlohmann::json to_json(const SecurityCheck& c);
nlohmann::json security_report(const std::vector<SecurityCheck>& checks);

std::string phase_name(Phase p);
Phase phase_from_name(const std::string& name);

}  // namespace blindiqp
