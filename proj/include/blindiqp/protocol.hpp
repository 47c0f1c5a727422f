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
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "blindiqp/gf2.hpp"
#include "blindiqp/graphs.hpp"
#include "blindiqp/qsim.hpp"
#include "blindiqp/xprog.hpp"

namespace blindiqp {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxProtocolQubits = 20;
inline constexpr std::uint64_t kMaxBranches = std::uint64_t{1} << 26;

struct ClientSecrets {
  BinVector r_p, d_p, r_a, d_a, r_b, d_b;
  // Mod-4 rotations of the client EPR halves (pre-randomness and simulator).
  std::vector<int> m_p, m_a;
};

// Public data shared with the server.
struct PublicInfo {
  ExtendedIqpGraph qt{std::vector<std::vector<int>>{{0}}};
  double theta = 0.0;
  // Description of the distribution the secret Q is drawn from.
  std::string family = "uniform over reductions of qt";
};

struct Transcript {
  std::vector<std::pair<Label, std::string>> sent;
  BinVector s_b, s_a, s_p;
  std::vector<int> A, Pi;
  PublicInfo pub;
  // Message kinds in the order they crossed the channel.
  std::vector<std::string> order;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

// Final server message as a distribution. Index bits: s_a (most significant
// first) followed by s_p.
struct ResponseDistribution {
  std::vector<std::pair<std::uint64_t, double>> entries;
};

enum class Phase { AfterState, AfterAngles, Final };
enum class Stream { Client, Server, Nature };

struct Observation {
  Phase phase;
  // Classical record: server memory followed by the messages seen so far.
  const std::vector<int>& key;
  const Register& reg;
  // Qubits in the server's hands at this point.
  const std::vector<Label>& server_labels;
};

struct FinalStage {
  const ResponseDistribution& responses;
  // Response index to output index.
  std::function<std::uint64_t(std::uint64_t)> output;
  std::vector<int> key;
  const Register& reg;
  std::vector<Label> retained;
  std::size_t n_a = 0, n_p = 0;
};

struct RunState;

// Source of every random choice in a run. Sampling draws from seeded
// streams; the exhaustive driver walks all branches.
class Chooser {
 public:
  virtual ~Chooser() = default;
  virtual std::size_t pick(const std::vector<double>& probs, Stream s) = 0;
  virtual void observe(const Observation&) {}
  // Returns the chosen response index.
  virtual std::uint64_t finish(const FinalStage& f) = 0;
  // Snapshots let the exhaustive driver resume a run instead of replaying it.
  virtual void checkpoint(const RunState&) {}
  virtual bool restore(RunState&) { return false; }

  int bit(Stream s);
  int uniform4(Stream s);
  // Born-rule measurement on the register.
  int measure(Register& reg, const Label& l, const MeasBasis& b);
};

class SamplingChooser : public Chooser {
 public:
  explicit SamplingChooser(std::uint64_t seed);
  std::size_t pick(const std::vector<double>& probs, Stream s) override;
  std::uint64_t finish(const FinalStage& f) override;

 private:
  std::mt19937_64& rng(Stream s);
  std::mt19937_64 client_, server_, nature_;
};

// Depth-first walk over every choice sequence. A run is re-entered from its
// deepest snapshot that is still valid for the next branch. Observations
// fire once per distinct history.
class ExhaustiveDriver {
 public:
  using ObserveFn = std::function<void(double, const Observation&)>;
  // weight, stage, response index, output index
  using LeafFn = std::function<void(double, const FinalStage&, std::uint64_t, std::uint64_t)>;

  explicit ExhaustiveDriver(std::uint64_t guard = kMaxBranches) : guard_(guard) {}
  void run(const std::function<void(Chooser&)>& body, const LeafFn& on_leaf,
           const ObserveFn& on_observe = nullptr);
  std::uint64_t executions() const { return executions_; }

 private:
  std::uint64_t guard_;
  std::uint64_t executions_ = 0;
};

// Four-phase server contract. The register holds every qubit of the run;
// a strategy may only touch the labels it was handed.
class ServerStrategy {
 public:
  virtual ~ServerStrategy() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<ServerStrategy> clone() const = 0;
  virtual void receive_state(const std::vector<Label>& held, const PublicInfo& pub) = 0;
  virtual BinVector emit_sb(Register& reg, Chooser& ch) = 0;
  virtual void receive_angles(const std::vector<int>& A, const std::vector<int>& Pi) = 0;
  virtual ResponseDistribution emit_final(Register& reg, Chooser& ch) = 0;
  // Classical memory the server keeps, e.g. its true measurement outcomes.
  virtual std::vector<int> memory() const { return {}; }
  // Qubits still unmeasured after the final message.
  virtual std::vector<Label> retained() const { return {}; }
};

// Prescribed behaviour. Each intermediary is measured right after its two
// CZ gates so the register stays small.
class HonestServer : public ServerStrategy {
 public:
  std::string name() const override { return "honest"; }
  std::unique_ptr<ServerStrategy> clone() const override {
    return std::make_unique<HonestServer>(*this);
  }
  void receive_state(const std::vector<Label>& held, const PublicInfo& pub) override;
  BinVector emit_sb(Register& reg, Chooser& ch) override;
  void receive_angles(const std::vector<int>& A, const std::vector<int>& Pi) override;
  ResponseDistribution emit_final(Register& reg, Chooser& ch) override;
  std::vector<int> memory() const override { return true_sb_; }

 protected:
  // Reported value for the measured s_b.
  virtual BinVector report(const BinVector& measured, Chooser& ch);
  PublicInfo pub_;
  std::vector<int> A_, Pi_, true_sb_;
};

// Measures honestly but reports table[s_b] (s_b read as an index).
class ResponseMapServer : public HonestServer {
 public:
  explicit ResponseMapServer(std::vector<std::uint64_t> table) : table_(std::move(table)) {}
  std::string name() const override { return "response-map"; }
  std::unique_ptr<ServerStrategy> clone() const override {
    return std::make_unique<ResponseMapServer>(*this);
  }

 protected:
  BinVector report(const BinVector& measured, Chooser& ch) override;

 private:
  std::vector<std::uint64_t> table_;
};

// Measures honestly and reports a uniformly chosen s_b. Views of every
// deterministic response map are slices of this one.
class ForkingServer : public HonestServer {
 public:
  std::string name() const override { return "forking"; }
  std::unique_ptr<ServerStrategy> clone() const override {
    return std::make_unique<ForkingServer>(*this);
  }

 protected:
  BinVector report(const BinVector& measured, Chooser& ch) override;
};

// Never measures; answers all-zero strings and keeps every qubit.
class ZerosServer : public ServerStrategy {
 public:
  std::string name() const override { return "zeros"; }
  std::unique_ptr<ServerStrategy> clone() const override {
    return std::make_unique<ZerosServer>(*this);
  }
  void receive_state(const std::vector<Label>& held, const PublicInfo& pub) override;
  BinVector emit_sb(Register& reg, Chooser& ch) override;
  void receive_angles(const std::vector<int>&, const std::vector<int>&) override {}
  ResponseDistribution emit_final(Register& reg, Chooser& ch) override;
  std::vector<Label> retained() const override { return held_; }

 private:
  std::vector<Label> held_;
  int n_b_ = 0;
};

// Answers uniformly random bits without touching the qubits.
class UniformServer : public ServerStrategy {
 public:
  std::string name() const override { return "uniform"; }
  std::unique_ptr<ServerStrategy> clone() const override {
    return std::make_unique<UniformServer>(*this);
  }
  void receive_state(const std::vector<Label>& held, const PublicInfo& pub) override;
  BinVector emit_sb(Register& reg, Chooser& ch) override;
  void receive_angles(const std::vector<int>&, const std::vector<int>&) override {}
  ResponseDistribution emit_final(Register& reg, Chooser& ch) override;
  std::vector<Label> retained() const override { return held_; }

 private:
  std::vector<Label> held_;
  int n_a_ = 0, n_p_ = 0, n_b_ = 0;
};

std::vector<std::string> server_names();
std::unique_ptr<ServerStrategy> make_server(const std::string& name);

enum class Runner { Mbqc, Distributed, Blind, Teleport, PreRandomness, Simulator };

std::string runner_name(Runner r);
Runner runner_from_name(const std::string& name);

// How the EPR outcomes r^p, r^a of the pre-randomness and simulator variants
// are compensated. Folded adds 2r to the angles before they are sent, which
// keeps both variants identical to the teleportation variant. OutputOnly adds
// r to the output bits only; it is exact for primaries but not for ancillas.
enum class PadMode { Folded, OutputOnly };

struct RunOptions {
  PadMode pad = PadMode::Folded;
};

struct RunResult {
  BinVector x;
  Transcript transcript;
  ClientSecrets secrets;
};

// Client-side correction angles, each reduced mod 4.
std::pair<std::vector<int>, std::vector<int>> client_corrections(const ClientSecrets& secrets,
                                                                 const BinVector& s_b,
                                                                 const ExtendedIqpGraph& qt);

// The rotation the client half must be measured with once (A, Pi) are fixed:
// d^p = bridge terms - Pi and d^a = bridge terms - A, mod 4.
std::pair<std::vector<int>, std::vector<int>> measurement_terms(
    const std::vector<int>& A, const std::vector<int>& Pi, const BinVector& s_b,
    const BinVector& r_b, const BinVector& d_b, const ExtendedIqpGraph& qt);

// x_j = s_p_j + sum over i with Q_ij = 1 of s_a_i, mod 2.
BinVector iqp_output(const BinMatrix& q, const BinVector& s_a, const BinVector& s_p);
// Same with the EPR outcomes added to every measured bit.
BinVector iqp_output_padded(const BinMatrix& q, const BinVector& s_a, const BinVector& s_p,
                            const BinVector& r_a, const BinVector& r_p);

// Recomputes the client output from a recorded run.
BinVector replay_output(Runner runner, const XProgram& xp, const RunResult& res,
                        const RunOptions& opt = {});

// Core entry point; every named runner below wraps it.
RunResult execute(Runner runner, const XProgram& xp, const ExtendedIqpGraph& qt,
                  const ServerStrategy& server, Chooser& ch, const RunOptions& opt = {});

BinVector run_mbqc_iqp(const XProgram& xp, std::uint64_t seed);
RunResult run_blind(const XProgram& xp, const ExtendedIqpGraph& qt, std::uint64_t seed,
                    const ServerStrategy& server);
BinVector run_distributed(const XProgram& xp, const ExtendedIqpGraph& qt, std::uint64_t seed);
RunResult run_teleport_variant(const XProgram& xp, const ExtendedIqpGraph& qt, std::uint64_t seed,
                               Runner variant, const RunOptions& opt = {});
RunResult run_ideal_with_simulator(const XProgram& xp, const ExtendedIqpGraph& qt,
                                   std::uint64_t seed, const ServerStrategy& server,
                                   const RunOptions& opt = {});

// Exact output distribution over all client randomness and all branches.
OutcomeDistribution exact_output_distribution(Runner runner, const XProgram& xp,
                                              const ExtendedIqpGraph& qt, const ServerStrategy& server,
                                              const RunOptions& opt = {});

// Extended graph with no intermediaries, for runners that ignore it.
ExtendedIqpGraph plain_graph(const BinMatrix& q);

}  // namespace blindiqp
