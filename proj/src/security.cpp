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


#include "blindiqp/security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace blindiqp {

namespace {

constexpr double kTiny = 1e-12;
// Complex entries a view may hold across all blocks.
constexpr std::uint64_t kMaxViewEntries = std::uint64_t{1} << 25;

Eigen::MatrixXcd reduced_state(const Register& reg, const std::vector<Label>& ls) {
  if (ls.empty()) return Eigen::MatrixXcd::Ones(1, 1);
  PureState s = reg.support(ls);
  std::vector<Label> order = ls;
  for (const auto& l : s.labels())
    if (std::find(ls.begin(), ls.end(), l) == ls.end()) order.push_back(l);
  s = s.reordered(order);
  const Eigen::Index dim = Eigen::Index{1} << ls.size();
  const Eigen::Index chunks = static_cast<Eigen::Index>(s.amps().size()) / dim;
  Eigen::Map<const Eigen::MatrixXcd> m(s.amps().data(), dim, chunks);
  return m * m.adjoint();
}

double trace_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 1) return std::abs(m(0, 0));
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Distances contributed by one record.
struct RecordTerm {
  double classical = 0.0, joint = 0.0, conditional = 0.0;
};

void finish(ViewDistance& d) {
  d.quantum = clamp01(d.quantum);
  d.classical = clamp01(d.classical);
  d.conditional = clamp01(d.conditional);
  d.joint = clamp01(d.joint);
  d.combined = std::max({d.quantum, d.classical, d.conditional, d.joint});
}

RecordTerm record_term(const Eigen::MatrixXcd* a, const Eigen::MatrixXcd* b, Eigen::Index dim) {
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(dim, dim);
  const Eigen::MatrixXcd& x = a ? *a : zero;
  const Eigen::MatrixXcd& y = b ? *b : zero;
  const double pa = x.trace().real(), pb = y.trace().real();
  RecordTerm t;
  t.classical = 0.5 * std::abs(pa - pb);
  t.joint = 0.5 * trace_norm(x - y);
  if (pa > kTiny && pb > kTiny)
    t.conditional = trace_distance(x / pa, y / pb);
  else if (std::max(pa, pb) > kTiny)
    t.conditional = 1.0;
  return t;
}

template <class F>
void for_each_record(const ServerView& a, const ServerView& b, F&& f) {
  if (a.phase != b.phase) throw SecurityError("views are taken at different phases");
  if (!a.blocks.empty() && !b.blocks.empty() && a.labels != b.labels)
    throw SecurityError("views hold different qubits");
  const Eigen::Index dim = Eigen::Index{1} << std::max(a.labels.size(), b.labels.size());
  auto ia = a.blocks.begin(), ib = b.blocks.begin();
  while (ia != a.blocks.end() || ib != b.blocks.end()) {
    if (ib == b.blocks.end() || (ia != a.blocks.end() && ia->first < ib->first)) {
      f(ia->first, record_term(&ia->second, nullptr, ia->second.rows()));
      ++ia;
    } else if (ia == a.blocks.end() || ib->first < ia->first) {
      f(ib->first, record_term(nullptr, &ib->second, ib->second.rows()));
      ++ib;
    } else {
      f(ia->first, record_term(&ia->second, &ib->second, dim));
      ++ia;
      ++ib;
    }
  }
}

std::uint64_t bits_index(const std::vector<int>& key, std::size_t first, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v = (v << 1) | static_cast<std::uint64_t>(key.at(first + i) & 1);
  return v;
}

// avg_state(), or the 1x1 total of a classical-only view.
Eigen::MatrixXcd averaged(const ServerView& v) {
  if (v.blocks.empty() || v.blocks.begin()->second.rows() == 1)
    return Eigen::MatrixXcd::Constant(1, 1, v.total());
  return v.avg_state();
}

void check_forking(const ServerView& v) {
  if (v.phase == Phase::AfterState || v.memory != static_cast<std::size_t>(v.n_b))
    throw SecurityError("response maps need a forking view after s_b is reported");
}

}  // namespace

Eigen::MatrixXcd ServerView::avg_state() const {
  const Eigen::Index dim = Eigen::Index{1} << labels.size();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [k, b] : blocks) {
    if (b.rows() != dim) throw SecurityError("view holds no density blocks");
    rho += b;
  }
  return rho;
}

std::map<std::vector<int>, double> ServerView::classical() const {
  std::map<std::vector<int>, double> out;
  for (const auto& [k, b] : blocks) out.emplace(k, b.trace().real());
  return out;
}

double ServerView::total() const {
  double t = 0.0;
  for (const auto& [k, b] : blocks) t += b.trace().real();
  return t;
}

ServerView server_view(Runner runner, const XProgram& xp, const ExtendedIqpGraph& qt, Phase phase,
                       const ServerStrategy& adversary, const ViewOptions& opt) {
  ServerView v;
  v.phase = phase;
  v.n_b = qt.n_b();
  bool seen = false;
  auto add = [&](double w, const std::vector<int>& key, const Register& reg,
                 const std::vector<Label>& ls) {
    if (w <= 0.0) return;
    if (!seen) {
      if (!opt.classical_only && static_cast<int>(ls.size()) > kMaxViewQubits)
        throw SecurityError(fmt::format(
            "server holds {} qubits; density views are limited to {} (use classical-only mode)",
            ls.size(), kMaxViewQubits));
      v.labels = ls;
      seen = true;
    } else if (ls != v.labels) {
      throw SecurityError("held qubits differ between branches");
    }
    Eigen::MatrixXcd blk =
        opt.classical_only ? Eigen::MatrixXcd::Constant(1, 1, w) : (w * reduced_state(reg, ls)).eval();
    auto it = v.blocks.find(key);
    if (it != v.blocks.end()) {
      it->second += blk;
      return;
    }
    if ((v.blocks.size() + 1) * static_cast<std::uint64_t>(blk.size()) > kMaxViewEntries)
      throw SecurityError("view exceeds the memory guard");
    v.blocks.emplace(key, std::move(blk));
  };

  const std::size_t messages = phase == Phase::AfterState ? 0 : qt.n_b() + qt.n_a() + qt.n_p();
  ExhaustiveDriver driver;
  try {
    driver.run(
        [&](Chooser& ch) { execute(runner, xp, qt, adversary, ch, opt.run); },
        [&](double w, const FinalStage& st, std::uint64_t resp, std::uint64_t x) {
          if (phase != Phase::Final) return;
          std::vector<int> key = st.key;
          key.push_back(static_cast<int>(resp));
          if (opt.include_output) key.push_back(static_cast<int>(x));
          v.memory = st.key.size() - messages;
          add(w, key, st.reg, st.retained);
        },
        [&](double w, const Observation& o) {
          if (o.phase != phase) return;
          v.memory = o.key.size() - messages;
          add(w, o.key, o.reg, o.server_labels);
        });
  } catch (const ProtocolError& e) {
    throw SecurityError(e.what());
  } catch (const GraphError& e) {
    throw SecurityError(e.what());
  }
  if (opt.classical_only) v.labels.clear();
  return v;
}

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  return clamp01(0.5 * trace_norm(rho - sigma));
}

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, const std::vector<Label>& labels,
                               const std::vector<Label>& keep) {
  std::vector<int> pos;
  for (const auto& l : keep) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) throw SecurityError("label " + l.str() + " is not in the view");
    pos.push_back(static_cast<int>(it - labels.begin()));
  }
  std::uint64_t kept = 0;
  for (int p : pos) kept |= std::uint64_t{1} << p;
  auto sub = [&](std::uint64_t i) {
    std::uint64_t r = 0;
    for (std::size_t q = 0; q < pos.size(); ++q) r |= ((i >> pos[q]) & 1u) << q;
    return static_cast<Eigen::Index>(r);
  };
  const Eigen::Index dim = Eigen::Index{1} << keep.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  const auto n = static_cast<std::uint64_t>(rho.rows());
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j)
      if ((i & ~kept) == (j & ~kept)) out(sub(i), sub(j)) += rho(i, j);
  return out;
}

ViewDistance view_distance(const ServerView& a, const ServerView& b) {
  ViewDistance d;
  for_each_record(a, b, [&](const std::vector<int>&, const RecordTerm& t) {
    d.classical += t.classical;
    d.joint += t.joint;
    d.conditional = std::max(d.conditional, t.conditional);
  });
  d.quantum = trace_distance(averaged(a), averaged(b));
  finish(d);
  return d;
}

std::map<std::vector<int>, double> marginal(const ServerView& v, std::size_t first,
                                            std::size_t count) {
  std::map<std::vector<int>, double> out;
  for (const auto& [k, b] : v.blocks) {
    if (first + count > k.size()) throw SecurityError("marginal range exceeds the record");
    out[std::vector<int>(k.begin() + first, k.begin() + first + count)] += b.trace().real();
  }
  return out;
}

std::vector<BinMatrix> reductions(const ExtendedIqpGraph& qt) {
  if (qt.n_b() > 20) throw SecurityError("too many intermediaries to enumerate reductions");
  std::vector<BinMatrix> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << qt.n_b()); ++m)
    out.push_back(reduce(qt, {BinVector::from_index(m, qt.n_b())}));
  return out;
}

ViewDistance blindness_distance(const XProgram& xp1, const XProgram& xp2,
                                const ExtendedIqpGraph& qt, const ServerStrategy& adversary,
                                Phase phase, const ViewOptions& opt) {
  if (xp1.theta != xp2.theta) throw SecurityError("programs use different angles");
  try {
    plan_for(qt, xp1.q);
    plan_for(qt, xp2.q);
  } catch (const GraphError& e) {
    throw SecurityError(std::string("incompatible instances: ") + e.what());
  }
  ViewOptions o = opt;
  o.include_output = false;
  return view_distance(server_view(Runner::Blind, xp1, qt, phase, adversary, o),
                       server_view(Runner::Blind, xp2, qt, phase, adversary, o));
}

ViewDistance simulator_equivalence(const XProgram& xp, const ExtendedIqpGraph& qt,
                                   const ServerStrategy& server, const ViewOptions& opt) {
  return view_distance(server_view(Runner::Blind, xp, qt, Phase::Final, server, opt),
                       server_view(Runner::Simulator, xp, qt, Phase::Final, server, opt));
}

ResponseMapSweep sweep_response_maps(const ServerView& a, const ServerView& b) {
  check_forking(a);
  check_forking(b);
  if (a.n_b != b.n_b) throw SecurityError("views come from different graphs");
  const int nb = a.n_b;
  const std::size_t m = std::size_t{1} << nb;
  const std::uint64_t bits = static_cast<std::uint64_t>(nb) * m;
  if (bits >= 64 || (std::uint64_t{1} << bits) > kMaxResponseMaps)
    throw SecurityError(fmt::format("{} intermediaries give too many response maps", nb));
  ResponseMapSweep s;
  s.maps = std::uint64_t{1} << bits;

  // piece[t][r]: records with true s_b = t and reported s_b = r.
  std::vector<std::vector<RecordTerm>> piece(m, std::vector<RecordTerm>(m));
  for_each_record(a, b, [&](const std::vector<int>& key, const RecordTerm& t) {
    RecordTerm& p = piece[bits_index(key, 0, nb)][bits_index(key, nb, nb)];
    p.classical += t.classical;
    p.joint += t.joint;
    p.conditional = std::max(p.conditional, t.conditional);
  });
  // Difference of the averaged states, per piece.
  const Eigen::Index dim = averaged(a).rows();
  std::vector<std::vector<Eigen::MatrixXcd>> diff(
      m, std::vector<Eigen::MatrixXcd>(m, Eigen::MatrixXcd::Zero(dim, dim)));
  auto accumulate = [&](const ServerView& v, double sign) {
    for (const auto& [k, blk] : v.blocks) {
      auto& d = diff[bits_index(k, 0, nb)][bits_index(k, nb, nb)];
      if (blk.rows() == dim)
        d += sign * blk;
      else
        d(0, 0) += sign * blk.trace();
    }
  };
  accumulate(a, 1.0);
  accumulate(b, -1.0);

  const double scale = static_cast<double>(m);
  s.worst_table.assign(m, 0);
  for (std::size_t t = 0; t < m; ++t) {
    double best_joint = -1.0, best_tv = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const RecordTerm& p = piece[t][r];
      if (p.joint > best_joint) {
        best_joint = p.joint;
        s.worst_table[t] = r;
      }
      best_tv = std::max(best_tv, p.classical);
      s.worst.conditional = std::max(s.worst.conditional, p.conditional);
    }
    s.worst.joint += scale * best_joint;
    s.worst.classical += scale * best_tv;
  }
  // The averaged state does not split over t, so every map is tried.
  for (std::uint64_t f = 0; f < s.maps; ++f) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t t = 0; t < m; ++t) d += diff[t][(f >> (nb * t)) & (m - 1)];
    s.worst.quantum = std::max(s.worst.quantum, 0.5 * scale * trace_norm(d));
  }
  finish(s.worst);
  return s;
}

ServerView slice_response_map(const ServerView& forking, const std::vector<std::uint64_t>& table) {
  check_forking(forking);
  const int nb = forking.n_b;
  if (table.size() != (std::size_t{1} << nb)) throw SecurityError("response table has wrong size");
  ServerView out;
  out.phase = forking.phase;
  out.labels = forking.labels;
  out.memory = forking.memory;
  out.n_b = nb;
  const double scale = static_cast<double>(table.size());
  for (const auto& [k, b] : forking.blocks)
    if (table[bits_index(k, 0, nb)] == bits_index(k, nb, nb)) out.blocks.emplace(k, scale * b);
  return out;
}

nlohmann::json to_json(const ViewDistance& d) {
  return {{"quantum", d.quantum},     {"classical", d.classical}, {"conditional", d.conditional},
          {"joint", d.joint},         {"combined", d.combined}};
}

nlohmann::json to_json(const SecurityCheck& c) {
  return {{"check", c.name}, {"distance", to_json(c.distance)}, {"tolerance", c.tolerance},
          {"pass", c.pass}, {"ensemble_pass", c.ensemble_pass}};
}

nlohmann::json security_report(const std::vector<SecurityCheck>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  bool ok = true;
  for (const auto& c : checks) {
    arr.push_back(to_json(c));
    ok = ok && c.pass;
  }
  return {{"checks", arr}, {"pass", ok}};
}

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::AfterState: return "after_state";
    case Phase::AfterAngles: return "after_angles";
    case Phase::Final: return "final";
  }
  return "?";
}

Phase phase_from_name(const std::string& name) {
  if (name == "after_state") return Phase::AfterState;
  if (name == "after_angles" || name == "after_APi") return Phase::AfterAngles;
  if (name == "final") return Phase::Final;
  throw SecurityError(
      fmt::format("unknown phase '{}'; available: after_state, after_angles, final", name));
}

}  // namespace blindiqp
