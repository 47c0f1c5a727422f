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

#include "blindiqp/xprog.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace blindiqp {

namespace {

using cd = std::complex<double>;

// Index mask of a row, first column in the most significant bit.
std::uint64_t row_mask(const BinVector& row) { return row.to_index(); }

void walsh_hadamard(std::vector<cd>& a) {
  for (std::size_t h = 1; h < a.size(); h <<= 1) {
    for (std::size_t i = 0; i < a.size(); i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const cd x = a[j];
        const cd y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
    }
  }
}

}  // namespace

XProgram::XProgram(BinMatrix q_, double theta_) : q(std::move(q_)), theta(theta_) {
  for (std::size_t i = 0; i < q.rows(); ++i)
    if (q.row(i).is_zero()) throw XProgError(fmt::format("program element {} is all zero", i));
  if (!(theta >= 0.0 && theta <= 2.0 * std::numbers::pi))
    throw XProgError("theta must lie in [0, 2pi]");
}

double OutcomeDistribution::total() const {
  double t = 0.0;
  for (double p : probs) t += p;
  return t;
}

OutcomeDistribution exact_distribution(const XProgram& xp) {
  const std::size_t n = xp.n_p();
  if (n > kMaxExactPrimaries)
    throw XProgError(fmt::format("exact distribution limited to {} primaries, got {}",
                                 kMaxExactPrimaries, n));
  std::vector<std::uint64_t> masks;
  for (std::size_t i = 0; i < xp.n_a(); ++i) masks.push_back(row_mask(xp.q.row(i)));

  // Diagonal frame: f(p) = exp(i theta s(p)), amplitudes are its Walsh transform.
  const std::size_t dim = std::size_t{1} << n;
  std::vector<cd> f(dim);
  for (std::uint64_t p = 0; p < dim; ++p) {
    int s = 0;
    for (auto m : masks) s += (std::popcount(m & p) & 1) ? -1 : 1;
    f[p] = std::polar(1.0, xp.theta * s);
  }
  walsh_hadamard(f);
  OutcomeDistribution out{n, std::vector<double>(dim)};
  const double norm = std::ldexp(1.0, -2 * static_cast<int>(n));
  for (std::size_t x = 0; x < dim; ++x) out.probs[x] = std::norm(f[x]) * norm;
  return out;
}

std::vector<BinVector> sample_distribution(const OutcomeDistribution& dist, std::uint64_t seed,
                                           std::size_t n) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(dist.probs.begin(), dist.probs.end());
  std::vector<BinVector> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(BinVector::from_index(pick(rng), dist.n_p));
  return out;
}

std::vector<BinVector> sample(const XProgram& xp, std::uint64_t seed, std::size_t n) {
  return sample_distribution(exact_distribution(xp), seed, n);
}

double bias_direct(const OutcomeDistribution& dist, const BinVector& s) {
  if (s.size() != dist.n_p) throw XProgError("direction length does not match n_p");
  const std::uint64_t mask = s.to_index();
  double b = 0.0;
  for (std::uint64_t x = 0; x < dist.probs.size(); ++x)
    if ((std::popcount(x & mask) & 1) == 0) b += dist.probs[x];
  return b;
}

BiasReport bias_codeword_formula(const XProgram& xp, const BinVector& s) {
  if (s.size() != xp.n_p()) throw XProgError("direction length does not match n_p");
  std::vector<std::vector<int>> selected;
  for (std::size_t i = 0; i < xp.n_a(); ++i)
    if (xp.q.row(i).dot(s)) selected.push_back(xp.q.row(i).to_bits());

  BiasReport rep;
  rep.direction = s;
  rep.n_s = selected.size();
  if (selected.empty()) {
    rep.empty = true;
    rep.value = 1.0;
    return rep;
  }
  if (rep.n_s > kMaxSelectedRows)
    throw XProgError(fmt::format("codeword formula limited to {} selected rows, got {}",
                                 kMaxSelectedRows, rep.n_s));
  // Codewords have length n_s: the span of the columns of Q_s.
  const auto code = enumerate_code(BinMatrix::from_rows(selected), Span::Cols);
  double acc = 0.0;
  const double ns = static_cast<double>(rep.n_s);
  for (const auto& c : code) {
    const double v = std::cos(xp.theta * (ns - 2.0 * static_cast<double>(c.weight())));
    acc += v * v;
  }
  rep.value = acc / static_cast<double>(code.size());
  return rep;
}

double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  if (a.probs.size() != b.probs.size()) throw XProgError("distribution sizes differ");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) tv += std::abs(a.probs[i] - b.probs[i]);
  return 0.5 * tv;
}

nlohmann::json to_json(const XProgram& xp) {
  return nlohmann::json{{"theta", xp.theta}, {"q", to_json(xp.q)}};
}

XProgram xprogram_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("theta") || !j.contains("q"))
    throw XProgError("X-program JSON needs \"theta\" and \"q\"");
  if (!j["theta"].is_number()) throw XProgError("\"theta\" must be a number");
  return XProgram(bin_matrix_from_json(j["q"]), j["theta"].get<double>());
}

std::string to_csv(const OutcomeDistribution& dist) {
  std::ostringstream os;
  os << "bitstring,probability\n";
  for (std::size_t x = 0; x < dist.probs.size(); ++x)
    os << BinVector::from_index(x, dist.n_p).str() << ',' << fmt::format("{:.17g}", dist.probs[x])
       << '\n';
  return os.str();
}

}  // namespace blindiqp
