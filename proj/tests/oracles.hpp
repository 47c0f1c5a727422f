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


// Test-only reference computations. None of these call into the code under
// test beyond plain data types.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Eigen::MatrixXcd pauli_x() {
  Eigen::MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

inline Eigen::MatrixXcd s_gate() {
  Eigen::MatrixXcd s(2, 2);
  s << 1, 0, 0, cd(0, 1);
  return s;
}

inline Eigen::MatrixXcd cz() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
  m(3, 3) = -1;
  return m;
}

// exp(i theta sum_rows X^{q_i}) |0..0>, measured in the computational basis.
// Qubit 0 is the most significant bit.
inline std::vector<double> iqp_distribution(const std::vector<std::vector<int>>& q, double theta) {
  const int n = static_cast<int>(q[0].size());
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& row : q) {
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(1, 1);
    for (int j = 0; j < n; ++j)
      term = kron(term, row[j] ? pauli_x() : Eigen::MatrixXcd::Identity(2, 2));
    h += term;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(dim);
  for (Eigen::Index i = 0; i < dim; ++i) phases(i) = std::exp(cd(0, theta * es.eigenvalues()(i)));
  const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  std::vector<double> p(dim);
  for (Eigen::Index x = 0; x < dim; ++x) p[x] = std::norm(u(x, 0));
  return p;
}

inline double tv(const std::vector<double>& a, const std::vector<double>& b) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) t += std::abs(a[i] - b[i]);
  return 0.5 * t;
}

// Probability that x . s = 0 under p.
inline double orthogonal_mass(const std::vector<double>& p, const std::vector<int>& s) {
  const int n = static_cast<int>(s.size());
  double t = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    int par = 0;
    for (int j = 0; j < n; ++j) par ^= static_cast<int>((x >> (n - 1 - j)) & 1u) & s[j];
    if (par == 0) t += p[x];
  }
  return t;
}

}  // namespace oracle
