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

#include "blindiqp/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace blindiqp {

namespace {

int mod4(int v) { return ((v % 4) + 4) % 4; }

std::vector<Label> server_labels(int n_p, int n_a, int n_b) {
  std::vector<Label> out;
  for (int j = 0; j < n_p; ++j) out.push_back(Label::primary(j));
  for (int i = 0; i < n_a; ++i) out.push_back(Label::ancilla(i));
  for (int k = 0; k < n_b; ++k) out.push_back(Label::bridge(k));
  return out;
}

std::vector<Label> present(const Register& reg, const std::vector<Label>& ls) {
  std::vector<Label> out;
  for (const auto& l : ls)
    if (reg.contains(l)) out.push_back(l);
  return out;
}

void add_epr(Register& reg, const Label& server_half) {
  PureState s;
  s.add(server_half.half(), {cd{1.0}, cd{}});
  s.add(server_half, {cd{1.0}, cd{}});
  const double r = 1.0 / std::sqrt(2.0);
  s.amps() = {cd{r}, cd{}, cd{}, cd{r}};
  reg.add(std::move(s));
}

// sqrt(Y)^d {|0>,|1>} has no named kind; measuring in it equals applying
// sqrt(Y)^-d and then measuring computationally.
int measure_bridge_half(Chooser& ch, Register& reg, const Label& l, int d_b) {
  if (d_b) {
    const Mat2 sy = gate_matrix(Gate::SqrtY);
    const Mat2 inv = {std::conj(sy[0]), std::conj(sy[2]), std::conj(sy[1]), std::conj(sy[3])};
    reg.apply(l, inv);
  }
  return ch.measure(reg, l, MeasBasis::computational());
}

void append_bits(std::vector<int>& key, const BinVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) key.push_back(v[i]);
}

// Bridge terms (-1)^(s+r) d + 2 r (1-d), summed per primary and per ancilla.
std::pair<std::vector<int>, std::vector<int>> bridge_terms(const BinVector& s_b,
                                                           const BinVector& r_b,
                                                           const BinVector& d_b,
                                                           const ExtendedIqpGraph& qt) {
  std::vector<int> bp(qt.n_p(), 0), ba(qt.n_a(), 0);
  for (int k = 0; k < qt.n_b(); ++k) {
    auto [i, j] = qt.position(k);
    const int v = ((s_b[k] + r_b[k]) & 1 ? -1 : 1) * d_b[k] + 2 * r_b[k] * (1 - d_b[k]);
    bp[j] += v;
    ba[i] += v;
  }
  return {bp, ba};
}

void check_len(const BinVector& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n)
    throw ProtocolError(fmt::format("{} has length {}, expected {}", what, v.size(), n));
}

}  // namespace

nlohmann::json Transcript::to_json() const {
  nlohmann::json sent_j = nlohmann::json::array();
  for (const auto& [l, d] : sent) sent_j.push_back({{"qubit", l.str()}, {"state", d}});
  return {{"sent", sent_j},
          {"s_b", s_b.str()},
          {"A", A},
          {"Pi", Pi},
          {"s_a", s_a.str()},
          {"s_p", s_p.str()},
          {"public", {{"qt", pub.qt.entries()}, {"theta", pub.theta}, {"family", pub.family}}},
          {"order", order},
          {"seed", seed}};
}

int Chooser::bit(Stream s) { return static_cast<int>(pick({0.5, 0.5}, s)); }

int Chooser::uniform4(Stream s) { return static_cast<int>(pick({0.25, 0.25, 0.25, 0.25}, s)); }

int Chooser::measure(Register& reg, const Label& l, const MeasBasis& b) {
  const auto p = reg.outcome_probs(l, b);
  const int o = static_cast<int>(pick({p[0], p[1]}, Stream::Nature));
  reg.collapse(l, b, o);
  return o;
}

SamplingChooser::SamplingChooser(std::uint64_t seed) {
  std::seed_seq seq{seed, std::uint64_t{0x626c696e64697170}};
  std::array<std::uint32_t, 6> w{};
  seq.generate(w.begin(), w.end());
  client_.seed((std::uint64_t{w[0]} << 32) | w[1]);
  server_.seed((std::uint64_t{w[2]} << 32) | w[3]);
  nature_.seed((std::uint64_t{w[4]} << 32) | w[5]);
}

std::mt19937_64& SamplingChooser::rng(Stream s) {
  switch (s) {
    case Stream::Client: return client_;
    case Stream::Server: return server_;
    default: return nature_;
  }
}

std::size_t SamplingChooser::pick(const std::vector<double>& probs, Stream s) {
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  std::uniform_real_distribution<double> u(0.0, total);
  double x = u(rng(s));
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    if (x < probs[i]) return i;
    x -= probs[i];
  }
  return last;
}

std::uint64_t SamplingChooser::finish(const FinalStage& f) {
  std::vector<double> p;
  for (const auto& e : f.responses.entries) p.push_back(e.second);
  return f.responses.entries.at(pick(p, Stream::Nature)).first;
}

enum Stage { kPrepare, kHandoff, kSb, kDraw, kHalves, kSend, kFinal, kDone };

// Everything a run carries between stages. Copyable so that the exhaustive
// driver can snapshot it.
struct RunState {
  int stage = kPrepare;
  std::size_t loop = 0;
  Register reg;
  RunResult res;
  std::unique_ptr<ServerStrategy> server;
  std::vector<int> key, A, Pi;

  RunState() = default;
  RunState(const RunState& o)
      : stage(o.stage), loop(o.loop), reg(o.reg), res(o.res),
        server(o.server ? o.server->clone() : nullptr), key(o.key), A(o.A), Pi(o.Pi) {}
  RunState& operator=(const RunState& o) {
    if (this != &o) {
      RunState t(o);
      *this = std::move(t);
    }
    return *this;
  }
  RunState(RunState&&) = default;
  RunState& operator=(RunState&&) = default;
};

namespace {

struct TapeEntry {
  std::size_t choice;
  std::size_t count;
};

struct Snapshot {
  std::size_t pos;
  double weight;
  RunState state;
};

class ReplayChooser : public Chooser {
 public:
  ReplayChooser(std::vector<TapeEntry>& tape, std::vector<Snapshot>& snaps, std::size_t replay,
                const ExhaustiveDriver::LeafFn& leaf, const ExhaustiveDriver::ObserveFn& obs)
      : tape_(tape), snaps_(snaps), replay_(replay), leaf_(leaf), obs_(obs) {}

  std::size_t pick(const std::vector<double>& probs, Stream) override {
    std::vector<std::size_t> alive;
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      total += probs[i];
      if (probs[i] > kPruneTol) alive.push_back(i);
    }
    if (alive.empty()) throw ProtocolError("no outcome has positive probability");
    if (pos_ == tape_.size()) tape_.push_back({0, alive.size()});
    const TapeEntry& t = tape_[pos_];
    if (t.count != alive.size()) throw ProtocolError("nondeterministic run under replay");
    ++pos_;
    const std::size_t idx = alive[t.choice];
    weight_ *= probs[idx] / total;
    return idx;
  }

  void observe(const Observation& o) override {
    if (obs_ && pos_ >= replay_) obs_(weight_, o);
  }

  std::uint64_t finish(const FinalStage& f) override {
    if (f.responses.entries.empty()) throw ProtocolError("empty response distribution");
    for (const auto& [idx, p] : f.responses.entries)
      if (p > 0.0) leaf_(weight_ * p, f, idx, f.output(idx));
    return f.responses.entries.front().first;
  }

  void checkpoint(const RunState& st) override {
    if (pos_ >= replay_) snaps_.push_back({pos_, weight_, st});
  }

  bool restore(RunState& st) override {
    if (snaps_.empty()) return false;
    const Snapshot& s = snaps_.back();
    st = s.state;
    pos_ = s.pos;
    weight_ = s.weight;
    return true;
  }

 private:
  std::vector<TapeEntry>& tape_;
  std::vector<Snapshot>& snaps_;
  std::size_t replay_;
  const ExhaustiveDriver::LeafFn& leaf_;
  const ExhaustiveDriver::ObserveFn& obs_;
  std::size_t pos_ = 0;
  double weight_ = 1.0;
};

}  // namespace

void ExhaustiveDriver::run(const std::function<void(Chooser&)>& body, const LeafFn& on_leaf,
                           const ObserveFn& on_observe) {
  std::vector<TapeEntry> tape;
  std::vector<Snapshot> snaps;
  std::size_t replay = 0;
  executions_ = 0;
  while (true) {
    if (++executions_ > guard_)
      throw ProtocolError(fmt::format("exhaustive enumeration exceeds {} branches", guard_));
    ReplayChooser ch(tape, snaps, replay, on_leaf, on_observe);
    body(ch);
    while (!tape.empty() && tape.back().choice + 1 == tape.back().count) tape.pop_back();
    if (tape.empty()) break;
    ++tape.back().choice;
    replay = tape.size();
    // A snapshot taken after pick number pos depends on tape[0, pos) only.
    while (!snaps.empty() && snaps.back().pos >= replay) snaps.pop_back();
  }
}

// ---------------------------------------------------------------- servers

void HonestServer::receive_state(const std::vector<Label>&, const PublicInfo& pub) {
  pub_ = pub;
  true_sb_.clear();
}

BinVector HonestServer::emit_sb(Register& reg, Chooser& ch) {
  const auto& qt = pub_.qt;
  for (int i = 0; i < qt.n_a(); ++i)
    for (int j = 0; j < qt.n_p(); ++j)
      if (qt.entry(i, j) == 1) reg.apply_cz(Label::ancilla(i), Label::primary(j));
  BinVector measured(qt.n_b());
  for (int k = 0; k < qt.n_b(); ++k) {
    auto [i, j] = qt.position(k);
    const Label b = Label::bridge(k);
    reg.apply_cz(b, Label::ancilla(i));
    reg.apply_cz(b, Label::primary(j));
    measured.set(k, ch.measure(reg, b, MeasBasis::pauli_y()));
  }
  true_sb_ = measured.to_bits();
  return report(measured, ch);
}

BinVector HonestServer::report(const BinVector& measured, Chooser&) { return measured; }

void HonestServer::receive_angles(const std::vector<int>& A, const std::vector<int>& Pi) {
  A_ = A;
  Pi_ = Pi;
}

ResponseDistribution HonestServer::emit_final(Register& reg, Chooser&) {
  std::vector<Label> ls;
  std::vector<MeasBasis> bs;
  for (int i = 0; i < pub_.qt.n_a(); ++i) {
    ls.push_back(Label::ancilla(i));
    bs.push_back(MeasBasis::s_theta(A_.at(i), pub_.theta));
  }
  for (int j = 0; j < pub_.qt.n_p(); ++j) {
    ls.push_back(Label::primary(j));
    bs.push_back(MeasBasis::s_hadamard(Pi_.at(j)));
  }
  const auto probs = reg.joint_probs(ls, bs);
  ResponseDistribution out;
  for (std::size_t x = 0; x < probs.size(); ++x)
    if (probs[x] > kPruneTol) out.entries.emplace_back(x, probs[x]);
  return out;
}

BinVector ResponseMapServer::report(const BinVector& measured, Chooser&) {
  const std::uint64_t idx = measured.to_index();
  if (idx >= table_.size()) throw ProtocolError("response table too short");
  return BinVector::from_index(table_[idx], measured.size());
}

BinVector ForkingServer::report(const BinVector& measured, Chooser& ch) {
  BinVector out(measured.size());
  for (std::size_t k = 0; k < measured.size(); ++k) out.set(k, ch.bit(Stream::Server));
  return out;
}

void ZerosServer::receive_state(const std::vector<Label>& held, const PublicInfo& pub) {
  held_ = held;
  n_b_ = pub.qt.n_b();
}

BinVector ZerosServer::emit_sb(Register&, Chooser&) { return BinVector(n_b_); }

ResponseDistribution ZerosServer::emit_final(Register&, Chooser&) { return {{{0, 1.0}}}; }

void UniformServer::receive_state(const std::vector<Label>& held, const PublicInfo& pub) {
  held_ = held;
  n_a_ = pub.qt.n_a();
  n_p_ = pub.qt.n_p();
  n_b_ = pub.qt.n_b();
}

BinVector UniformServer::emit_sb(Register&, Chooser& ch) {
  BinVector out(n_b_);
  for (int k = 0; k < n_b_; ++k) out.set(k, ch.bit(Stream::Server));
  return out;
}

ResponseDistribution UniformServer::emit_final(Register&, Chooser&) {
  const std::uint64_t n = std::uint64_t{1} << (n_a_ + n_p_);
  ResponseDistribution out;
  out.entries.reserve(n);
  for (std::uint64_t x = 0; x < n; ++x) out.entries.emplace_back(x, 1.0 / static_cast<double>(n));
  return out;
}

std::vector<std::string> server_names() { return {"honest", "zeros", "uniform", "forking"}; }

std::unique_ptr<ServerStrategy> make_server(const std::string& name) {
  if (name == "honest") return std::make_unique<HonestServer>();
  if (name == "zeros") return std::make_unique<ZerosServer>();
  if (name == "uniform") return std::make_unique<UniformServer>();
  if (name == "forking") return std::make_unique<ForkingServer>();
  std::string known;
  for (const auto& n : server_names()) known += (known.empty() ? "" : ", ") + n;
  throw ProtocolError(fmt::format("unknown adversary '{}'; available: {}", name, known));
}

// ---------------------------------------------------------------- runners

std::string runner_name(Runner r) {
  switch (r) {
    case Runner::Mbqc: return "mbqc";
    case Runner::Distributed: return "distributed";
    case Runner::Blind: return "blind";
    case Runner::Teleport: return "teleport";
    case Runner::PreRandomness: return "pre-randomness";
    case Runner::Simulator: return "simulator";
  }
  return "?";
}

Runner runner_from_name(const std::string& name) {
  for (Runner r : {Runner::Mbqc, Runner::Distributed, Runner::Blind, Runner::Teleport,
                   Runner::PreRandomness, Runner::Simulator})
    if (runner_name(r) == name) return r;
  throw ProtocolError(fmt::format("unknown runner '{}'", name));
}

std::pair<std::vector<int>, std::vector<int>> client_corrections(const ClientSecrets& sec,
                                                                 const BinVector& s_b,
                                                                 const ExtendedIqpGraph& qt) {
  check_len(sec.r_p, qt.n_p(), "r_p");
  check_len(sec.d_p, qt.n_p(), "d_p");
  check_len(sec.r_a, qt.n_a(), "r_a");
  check_len(sec.d_a, qt.n_a(), "d_a");
  check_len(sec.r_b, qt.n_b(), "r_b");
  check_len(sec.d_b, qt.n_b(), "d_b");
  check_len(s_b, qt.n_b(), "s_b");
  std::vector<int> pz(qt.n_p(), 0), ps(qt.n_p(), 0), az(qt.n_a(), 0), as(qt.n_a(), 0);
  for (int k = 0; k < qt.n_b(); ++k) {
    auto [i, j] = qt.position(k);
    const int z = sec.r_b[k] * (1 - sec.d_b[k]);
    const int s = ((s_b[k] + sec.r_b[k]) & 1 ? -1 : 1) * sec.d_b[k];
    pz[j] += z;
    ps[j] += s;
    az[i] += z;
    as[i] += s;
  }
  std::vector<int> A(qt.n_a()), Pi(qt.n_p());
  for (int j = 0; j < qt.n_p(); ++j) Pi[j] = mod4(ps[j] - sec.d_p[j] + 2 * (pz[j] - sec.r_p[j]));
  for (int i = 0; i < qt.n_a(); ++i) A[i] = mod4(as[i] - sec.d_a[i] + 2 * (az[i] - sec.r_a[i]));
  return {A, Pi};
}

std::pair<std::vector<int>, std::vector<int>> measurement_terms(
    const std::vector<int>& A, const std::vector<int>& Pi, const BinVector& s_b,
    const BinVector& r_b, const BinVector& d_b, const ExtendedIqpGraph& qt) {
  if (static_cast<int>(A.size()) != qt.n_a() || static_cast<int>(Pi.size()) != qt.n_p())
    throw ProtocolError("angle vectors do not match the graph");
  check_len(s_b, qt.n_b(), "s_b");
  check_len(r_b, qt.n_b(), "r_b");
  check_len(d_b, qt.n_b(), "d_b");
  auto [bp, ba] = bridge_terms(s_b, r_b, d_b, qt);
  std::vector<int> dp(qt.n_p()), da(qt.n_a());
  for (int j = 0; j < qt.n_p(); ++j) dp[j] = mod4(bp[j] - Pi[j]);
  for (int i = 0; i < qt.n_a(); ++i) da[i] = mod4(ba[i] - A[i]);
  return {da, dp};
}

BinVector iqp_output(const BinMatrix& q, const BinVector& s_a, const BinVector& s_p) {
  BinVector x(q.cols());
  for (std::size_t j = 0; j < q.cols(); ++j) {
    int v = s_p[j];
    for (std::size_t i = 0; i < q.rows(); ++i)
      if (q(i, j)) v += s_a[i];
    x.set(j, v & 1);
  }
  return x;
}

BinVector iqp_output_padded(const BinMatrix& q, const BinVector& s_a, const BinVector& s_p,
                            const BinVector& r_a, const BinVector& r_p) {
  return iqp_output(q, s_a ^ r_a, s_p ^ r_p);
}

ExtendedIqpGraph plain_graph(const BinMatrix& q) { return ExtendedIqpGraph(q.to_rows()); }

namespace {

bool padded_output(Runner runner, const RunOptions& opt) {
  return opt.pad == PadMode::OutputOnly &&
         (runner == Runner::PreRandomness || runner == Runner::Simulator);
}

bool uses_epr(Runner r) {
  return r == Runner::Teleport || r == Runner::PreRandomness || r == Runner::Simulator;
}

// Generates EPR pairs and relays messages; sees only the public data.
class Simulator {
 public:
  explicit Simulator(const PublicInfo& pub) : pub_(pub) {}

  std::vector<Label> make_pairs(Register& reg) const {
    auto held = server_labels(pub_.qt.n_p(), pub_.qt.n_a(), pub_.qt.n_b());
    for (const auto& l : held) add_epr(reg, l);
    return held;
  }
  std::pair<std::vector<int>, std::vector<int>> draw_angles(Chooser& ch) const {
    std::vector<int> A(pub_.qt.n_a()), Pi(pub_.qt.n_p());
    for (auto& v : Pi) v = ch.uniform4(Stream::Client);
    for (auto& v : A) v = ch.uniform4(Stream::Client);
    return {A, Pi};
  }

 private:
  const PublicInfo& pub_;
};

// Holds Q and measures the resource-side EPR halves.
class IdealResource {
 public:
  IdealResource(const BinMatrix& q, const ExtendedIqpGraph& qt) : q_(q), qt_(qt) {}

  BinVector d_b() const { return plan_for(qt_, q_).d_b; }

  void measure_bridges(Chooser& ch, Register& reg, ClientSecrets& sec) const {
    for (int k = 0; k < qt_.n_b(); ++k)
      sec.r_b.set(k, measure_bridge_half(ch, reg, Label::bridge(k).half(), sec.d_b[k]));
  }

  // Draws angles itself under the folded pad; the simulator passes its own
  // otherwise.
  std::pair<std::vector<int>, std::vector<int>> draw_angles(Chooser& ch) const {
    std::vector<int> A(qt_.n_a()), Pi(qt_.n_p());
    for (auto& v : Pi) v = ch.uniform4(Stream::Client);
    for (auto& v : A) v = ch.uniform4(Stream::Client);
    return {A, Pi};
  }

 private:
  const BinMatrix& q_;
  const ExtendedIqpGraph& qt_;
};

// One client-half measurement: index < n_p is a primary, the rest ancillas.
void measure_half(Chooser& ch, Register& reg, ClientSecrets& sec, std::size_t idx, int n_p) {
  if (static_cast<int>(idx) < n_p) {
    const int j = static_cast<int>(idx);
    sec.r_p.set(j, ch.measure(reg, Label::primary(j).half(), MeasBasis::s_hadamard(sec.m_p[j])));
  } else {
    const int i = static_cast<int>(idx) - n_p;
    sec.r_a.set(i, ch.measure(reg, Label::ancilla(i).half(), MeasBasis::s_hadamard(sec.m_a[i])));
  }
}

void prepare(RunState& st, Runner runner, const ExtendedIqpGraph& qt, const BreakBridgePlan& plan,
             const PublicInfo& pub, Chooser& ch) {
  const int n_p = qt.n_p(), n_a = qt.n_a(), n_b = qt.n_b();
  ClientSecrets& sec = st.res.secrets;
  Transcript& tr = st.res.transcript;
  Register& reg = st.reg;
  tr.pub = pub;
  sec.d_b = plan.d_b;
  for (auto* v : {&sec.r_p, &sec.d_p}) *v = BinVector(n_p);
  for (auto* v : {&sec.r_a, &sec.d_a}) *v = BinVector(n_a);
  sec.r_b = BinVector(n_b);
  const auto held = server_labels(n_p, n_a, n_b);

  if (runner == Runner::Simulator) {
    Simulator(pub).make_pairs(reg);
  } else if (uses_epr(runner)) {
    for (const auto& l : held) add_epr(reg, l);
    if (runner == Runner::Teleport) {
      for (int j = 0; j < n_p; ++j) sec.d_p.set(j, ch.bit(Stream::Client));
      for (int i = 0; i < n_a; ++i) sec.d_a.set(i, ch.bit(Stream::Client));
      for (int j = 0; j < n_p; ++j)
        sec.r_p.set(j, ch.measure(reg, Label::primary(j).half(), MeasBasis::s_hadamard(sec.d_p[j])));
      for (int i = 0; i < n_a; ++i)
        sec.r_a.set(i, ch.measure(reg, Label::ancilla(i).half(), MeasBasis::s_hadamard(sec.d_a[i])));
    }
    for (int k = 0; k < n_b; ++k)
      sec.r_b.set(k, measure_bridge_half(ch, reg, Label::bridge(k).half(), sec.d_b[k]));
  } else {
    if (runner == Runner::Blind) {
      for (int j = 0; j < n_p; ++j) sec.r_p.set(j, ch.bit(Stream::Client));
      for (int j = 0; j < n_p; ++j) sec.d_p.set(j, ch.bit(Stream::Client));
      for (int i = 0; i < n_a; ++i) sec.r_a.set(i, ch.bit(Stream::Client));
      for (int i = 0; i < n_a; ++i) sec.d_a.set(i, ch.bit(Stream::Client));
    }
    for (int k = 0; k < n_b; ++k) sec.r_b.set(k, ch.bit(Stream::Client));
    for (int j = 0; j < n_p; ++j) {
      const auto spec = StateSpec::zs_plus(sec.r_p[j], mod4(-sec.d_p[j]));
      reg.add(Label::primary(j), spec.amplitudes());
      tr.sent.emplace_back(Label::primary(j), spec.str());
    }
    for (int i = 0; i < n_a; ++i) {
      const auto spec = StateSpec::zs_plus(sec.r_a[i], mod4(-sec.d_a[i]));
      reg.add(Label::ancilla(i), spec.amplitudes());
      tr.sent.emplace_back(Label::ancilla(i), spec.str());
    }
    for (int k = 0; k < n_b; ++k) {
      const auto spec = StateSpec::y_sqrty_zero(sec.r_b[k], sec.d_b[k]);
      reg.add(Label::bridge(k), spec.amplitudes());
      tr.sent.emplace_back(Label::bridge(k), spec.str());
    }
  }
  if (uses_epr(runner))
    for (const auto& l : held) tr.sent.emplace_back(l, "EPR half");
}

}  // namespace

RunResult execute(Runner runner, const XProgram& xp, const ExtendedIqpGraph& qt_in,
                  const ServerStrategy& server, Chooser& ch, const RunOptions& opt) {
  const ExtendedIqpGraph qt = runner == Runner::Mbqc ? plain_graph(xp.q) : qt_in;
  const int n_p = qt.n_p(), n_a = qt.n_a(), n_b = qt.n_b();
  if (n_p + n_a + n_b > kMaxProtocolQubits)
    throw ProtocolError(fmt::format("{} qubits exceed the limit of {}", n_p + n_a + n_b,
                                    kMaxProtocolQubits));
  const BreakBridgePlan plan = plan_for(qt, xp.q);
  const PublicInfo pub{qt, xp.theta, "uniform over reductions of qt"};
  const std::vector<Label> held = server_labels(n_p, n_a, n_b);
  const bool two_step = runner == Runner::PreRandomness || runner == Runner::Simulator;
  const bool padded = padded_output(runner, opt);
  const IdealResource ideal(xp.q, qt);

  RunState st;
  if (!ch.restore(st)) st.server = server.clone();
  ClientSecrets& sec = st.res.secrets;
  Transcript& tr = st.res.transcript;

  while (st.stage != kDone) {
    switch (st.stage) {
      case kPrepare:
        prepare(st, runner, qt, plan, pub, ch);
        if (runner == Runner::Simulator) {
          sec.d_b = ideal.d_b();
          ideal.measure_bridges(ch, st.reg, sec);
        }
        st.stage = kHandoff;
        break;

      case kHandoff:
        tr.order.push_back("state");
        st.server->receive_state(held, pub);
        ch.observe({Phase::AfterState, st.key, st.reg, held});
        st.stage = kSb;
        break;

      case kSb:
        tr.s_b = st.server->emit_sb(st.reg, ch);
        check_len(tr.s_b, n_b, "s_b");
        tr.order.push_back("s_b");
        st.stage = kDraw;
        break;

      case kDraw:
        if (!two_step) {
          std::tie(st.A, st.Pi) = client_corrections(sec, tr.s_b, qt);
          st.stage = kSend;
          break;
        }
        if (runner == Runner::Simulator && opt.pad == PadMode::OutputOnly)
          std::tie(st.A, st.Pi) = Simulator(pub).draw_angles(ch);
        else
          std::tie(st.A, st.Pi) = ideal.draw_angles(ch);
        std::tie(sec.m_a, sec.m_p) = measurement_terms(st.A, st.Pi, tr.s_b, sec.r_b, sec.d_b, qt);
        st.loop = 0;
        st.stage = kHalves;
        break;

      case kHalves:
        measure_half(ch, st.reg, sec, st.loop, n_p);
        if (++st.loop < static_cast<std::size_t>(n_p + n_a)) break;
        if (opt.pad == PadMode::Folded) {
          for (int j = 0; j < n_p; ++j) st.Pi[j] = mod4(st.Pi[j] + 2 * sec.r_p[j]);
          for (int i = 0; i < n_a; ++i) st.A[i] = mod4(st.A[i] + 2 * sec.r_a[i]);
        }
        st.stage = kSend;
        break;

      case kSend: {
        tr.A = st.A;
        tr.Pi = st.Pi;
        tr.order.push_back("angles");
        st.server->receive_angles(st.A, st.Pi);
        st.key = st.server->memory();
        append_bits(st.key, tr.s_b);
        st.key.insert(st.key.end(), st.A.begin(), st.A.end());
        st.key.insert(st.key.end(), st.Pi.begin(), st.Pi.end());
        const std::vector<Label> now_held = present(st.reg, held);
        ch.observe({Phase::AfterAngles, st.key, st.reg, now_held});
        st.stage = kFinal;
        break;
      }

      case kFinal: {
        const ResponseDistribution resp = st.server->emit_final(st.reg, ch);
        const std::uint64_t limit = std::uint64_t{1} << (n_a + n_p);
        for (const auto& [idx, p] : resp.entries)
          if (idx >= limit || p < 0.0) throw ProtocolError("server response out of range");
        // Response index: s_a in the high bits, s_p in the low bits.
        std::vector<std::uint64_t> amask(n_p, 0);
        for (int j = 0; j < n_p; ++j)
          for (int i = 0; i < n_a; ++i)
            if (xp.q(i, j)) amask[j] |= std::uint64_t{1} << (n_a - 1 - i);
        std::uint64_t pad = 0;
        if (padded) pad = (sec.r_a.to_index() << n_p) | sec.r_p.to_index();
        auto output_index = [&](std::uint64_t idx) {
          idx ^= pad;
          const std::uint64_t sa = idx >> n_p;
          std::uint64_t x = idx & ((std::uint64_t{1} << n_p) - 1);
          for (int j = 0; j < n_p; ++j)
            x ^= static_cast<std::uint64_t>(std::popcount(sa & amask[j]) & 1) << (n_p - 1 - j);
          return x;
        };
        const FinalStage stage{resp,
                               output_index,
                               st.key,
                               st.reg,
                               present(st.reg, st.server->retained()),
                               static_cast<std::size_t>(n_a),
                               static_cast<std::size_t>(n_p)};
        const std::uint64_t chosen = ch.finish(stage);
        const BinVector all = BinVector::from_index(chosen, n_a + n_p);
        tr.s_a = BinVector(n_a);
        tr.s_p = BinVector(n_p);
        for (int i = 0; i < n_a; ++i) tr.s_a.set(i, all[i]);
        for (int j = 0; j < n_p; ++j) tr.s_p.set(j, all[n_a + j]);
        tr.order.push_back("outcomes");
        st.res.x = BinVector::from_index(output_index(chosen), n_p);
        st.stage = kDone;
        break;
      }
    }
    if (st.stage != kDone) ch.checkpoint(st);
  }
  return std::move(st.res);
}

BinVector replay_output(Runner runner, const XProgram& xp, const RunResult& res,
                        const RunOptions& opt) {
  const auto& tr = res.transcript;
  if (padded_output(runner, opt))
    return iqp_output_padded(xp.q, tr.s_a, tr.s_p, res.secrets.r_a, res.secrets.r_p);
  return iqp_output(xp.q, tr.s_a, tr.s_p);
}

BinVector run_mbqc_iqp(const XProgram& xp, std::uint64_t seed) {
  if (xp.n_a() + xp.n_p() > static_cast<std::size_t>(kMaxProtocolQubits))
    throw ProtocolError("too many qubits for the MBQC runner");
  SamplingChooser ch(seed);
  return execute(Runner::Mbqc, xp, plain_graph(xp.q), HonestServer{}, ch).x;
}

RunResult run_blind(const XProgram& xp, const ExtendedIqpGraph& qt, std::uint64_t seed,
                    const ServerStrategy& server) {
  SamplingChooser ch(seed);
  RunResult r = execute(Runner::Blind, xp, qt, server, ch);
  r.transcript.seed = seed;
  return r;
}

BinVector run_distributed(const XProgram& xp, const ExtendedIqpGraph& qt, std::uint64_t seed) {
  SamplingChooser ch(seed);
  return execute(Runner::Distributed, xp, qt, HonestServer{}, ch).x;
}

RunResult run_teleport_variant(const XProgram& xp, const ExtendedIqpGraph& qt, std::uint64_t seed,
                               Runner variant, const RunOptions& opt) {
  if (variant != Runner::Teleport && variant != Runner::PreRandomness)
    throw ProtocolError("teleport variant must be teleport or pre-randomness");
  SamplingChooser ch(seed);
  RunResult r = execute(variant, xp, qt, HonestServer{}, ch, opt);
  r.transcript.seed = seed;
  return r;
}

RunResult run_ideal_with_simulator(const XProgram& xp, const ExtendedIqpGraph& qt,
                                   std::uint64_t seed, const ServerStrategy& server,
                                   const RunOptions& opt) {
  SamplingChooser ch(seed);
  RunResult r = execute(Runner::Simulator, xp, qt, server, ch, opt);
  r.transcript.seed = seed;
  return r;
}

OutcomeDistribution exact_output_distribution(Runner runner, const XProgram& xp,
                                              const ExtendedIqpGraph& qt,
                                              const ServerStrategy& server,
                                              const RunOptions& opt) {
  OutcomeDistribution out{xp.n_p(), std::vector<double>(std::size_t{1} << xp.n_p(), 0.0)};
  ExhaustiveDriver driver;
  driver.run([&](Chooser& ch) { execute(runner, xp, qt, server, ch, opt); },
             [&](double w, const FinalStage&, std::uint64_t, std::uint64_t x) { out.probs[x] += w; });
  return out;
}

}  // namespace blindiqp
