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

#include "blindiqp/gf2.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

namespace blindiqp {

namespace {

std::size_t word_count(std::size_t len) { return (len + 63) / 64; }

}  // namespace

BinVector::BinVector(std::size_t len) : len_(len), words_(word_count(len), 0) {}

BinVector::BinVector(std::initializer_list<int> bits) : BinVector(bits.size()) {
  std::size_t i = 0;
  for (int b : bits) set(i++, b);
}

BinVector BinVector::from_bits(const std::vector<int>& bits) {
  BinVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i]);
  return v;
}

BinVector BinVector::from_index(std::uint64_t index, std::size_t len) {
  BinVector v(len);
  for (std::size_t j = 0; j < len; ++j) v.set(j, (index >> (len - 1 - j)) & 1u);
  return v;
}

void BinVector::set(std::size_t i, int b) {
  if (b != 0 && b != 1) throw Gf2Error("bit value must be 0 or 1");
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (b)
    words_[i >> 6] |= mask;
  else
    words_[i >> 6] &= ~mask;
}

BinVector& BinVector::operator^=(const BinVector& o) {
  if (o.len_ != len_) throw Gf2Error("vector length mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
  return *this;
}

bool BinVector::operator<(const BinVector& o) const {
  if (len_ != o.len_) return len_ < o.len_;
  for (std::size_t i = 0; i < len_; ++i) {
    if ((*this)[i] != o[i]) return (*this)[i] < o[i];
  }
  return false;
}

int BinVector::dot(const BinVector& o) const {
  if (o.len_ != len_) throw Gf2Error("vector length mismatch");
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & o.words_[w];
  return std::popcount(acc) & 1;
}

std::size_t BinVector::weight() const {
  std::size_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

bool BinVector::is_zero() const {
  return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
}

std::uint64_t BinVector::to_index() const {
  if (len_ > 64) throw Gf2Error("vector too long for an index");
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < len_; ++j) idx = (idx << 1) | (*this)[j];
  return idx;
}

std::vector<int> BinVector::to_bits() const {
  std::vector<int> out(len_);
  for (std::size_t i = 0; i < len_; ++i) out[i] = (*this)[i];
  return out;
}

std::string BinVector::str() const {
  std::string s(len_, '0');
  for (std::size_t i = 0; i < len_; ++i) s[i] = (*this)[i] ? '1' : '0';
  return s;
}

BinMatrix::BinMatrix(std::size_t rows, std::size_t cols)
    : cols_(cols), rows_(rows, BinVector(cols)) {
  if (rows == 0 || cols == 0) throw Gf2Error("matrix must have at least one row and column");
}

BinMatrix::BinMatrix(std::initializer_list<std::initializer_list<int>> rows) {
  std::vector<std::vector<int>> r;
  for (auto& row : rows) r.emplace_back(row);
  *this = from_rows(r);
}

BinMatrix BinMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty() || rows[0].empty())
    throw Gf2Error("matrix must have at least one row and column");
  BinMatrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) throw Gf2Error("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols_; ++c) m.set(r, c, rows[r][c]);
  }
  return m;
}

BinMatrix BinMatrix::identity(std::size_t n) {
  BinMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

BinMatrix BinMatrix::zeros(std::size_t rows, std::size_t cols) { return BinMatrix(rows, cols); }

void BinMatrix::set_row(std::size_t r, const BinVector& v) {
  if (v.size() != cols_) throw Gf2Error("row length mismatch");
  rows_[r] = v;
}

BinVector BinMatrix::col(std::size_t c) const {
  BinVector v(rows());
  for (std::size_t r = 0; r < rows(); ++r) v.set(r, (*this)(r, c));
  return v;
}

BinMatrix BinMatrix::transpose() const {
  BinMatrix t(cols_, rows());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if ((*this)(r, c)) t.set(c, r, 1);
  return t;
}

BinMatrix BinMatrix::operator*(const BinMatrix& o) const {
  if (cols_ != o.rows()) throw Gf2Error("dimension mismatch in matrix product");
  BinMatrix out(rows(), o.cols_);
  for (std::size_t r = 0; r < rows(); ++r) {
    BinVector acc(o.cols_);
    for (std::size_t k = 0; k < cols_; ++k)
      if ((*this)(r, k)) acc ^= o.rows_[k];
    out.rows_[r] = acc;
  }
  return out;
}

std::size_t BinMatrix::rank() const {
  const BinMatrix e = row_echelon(*this);
  std::size_t n = 0;
  for (const auto& r : e.rows_) n += !r.is_zero();
  return n;
}

BinMatrix BinMatrix::delete_zero_columns() const {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < cols_; ++c)
    if (!col(c).is_zero()) keep.push_back(c);
  // An all-zero matrix keeps a single zero column so shapes stay valid.
  if (keep.empty()) return BinMatrix(rows(), 1);
  BinMatrix out(rows(), keep.size());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t k = 0; k < keep.size(); ++k) out.set(r, k, (*this)(r, keep[k]));
  return out;
}

BinMatrix BinMatrix::permute_rows(const std::vector<std::size_t>& perm) const {
  if (perm.size() != rows()) throw Gf2Error("permutation size mismatch");
  BinMatrix out(rows(), cols_);
  for (std::size_t r = 0; r < rows(); ++r) out.rows_[r] = rows_.at(perm[r]);
  return out;
}

BinMatrix BinMatrix::append_column(const BinVector& c) const {
  if (c.size() != rows()) throw Gf2Error("column length mismatch");
  BinMatrix out(rows(), cols_ + 1);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t k = 0; k < cols_; ++k) out.set(r, k, (*this)(r, k));
    out.set(r, cols_, c[r]);
  }
  return out;
}

std::vector<std::vector<int>> BinMatrix::to_rows() const {
  std::vector<std::vector<int>> out;
  for (const auto& r : rows_) out.push_back(r.to_bits());
  return out;
}

std::string BinMatrix::str() const {
  std::string s;
  for (const auto& r : rows_) s += r.str() + "\n";
  return s;
}

BinVector mat_vec_mul(const BinMatrix& m, const BinVector& v) {
  if (m.cols() != v.size()) throw Gf2Error("dimension mismatch in mat_vec_mul");
  BinVector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out.set(r, m.row(r).dot(v));
  return out;
}

BinMatrix row_echelon(const BinMatrix& m) {
  BinMatrix e = m;
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < e.cols() && pivot_row < e.rows(); ++c) {
    std::size_t p = pivot_row;
    while (p < e.rows() && !e(p, c)) ++p;
    if (p == e.rows()) continue;
    if (p != pivot_row) {
      BinVector tmp = e.row(p);
      e.set_row(p, e.row(pivot_row));
      e.set_row(pivot_row, tmp);
    }
    for (std::size_t r = 0; r < e.rows(); ++r) {
      if (r != pivot_row && e(r, c)) e.set_row(r, e.row(r) ^ e.row(pivot_row));
    }
    ++pivot_row;
  }
  return e;
}

BinMatrix column_echelon(const BinMatrix& m) { return row_echelon(m.transpose()).transpose(); }

BinMatrix inverse(const BinMatrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw Gf2Error("inverse needs a square matrix");
  BinMatrix a = m;
  BinMatrix inv = BinMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && !a(p, c)) ++p;
    if (p == n) throw Gf2Error("matrix is singular over GF(2)");
    if (p != c) {
      BinVector t = a.row(p);
      a.set_row(p, a.row(c));
      a.set_row(c, t);
      t = inv.row(p);
      inv.set_row(p, inv.row(c));
      inv.set_row(c, t);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r != c && a(r, c)) {
        a.set_row(r, a.row(r) ^ a.row(c));
        inv.set_row(r, inv.row(r) ^ inv.row(c));
      }
    }
  }
  return inv;
}

namespace {

BinMatrix canonical(const BinMatrix& m) { return column_echelon(m).delete_zero_columns(); }

}  // namespace

bool matroid_equivalent(const BinMatrix& m1, const BinMatrix& m2) {
  if (m1.rows() != m2.rows()) throw Gf2Error("matroid_equivalent needs equal row counts");
  if (m1.rows() > kMaxMatroidRows) throw Gf2Error("matroid_equivalent is limited to 8 rows");
  const BinMatrix target = canonical(m1);
  std::vector<std::size_t> perm(m2.rows());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (canonical(m2.permute_rows(perm)) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

std::vector<BinVector> enumerate_code(const BinMatrix& g, Span span) {
  const BinMatrix gens = span == Span::Rows ? g : g.transpose();
  const BinMatrix e = row_echelon(gens);
  std::vector<BinVector> basis;
  for (std::size_t r = 0; r < e.rows(); ++r)
    if (!e.row(r).is_zero()) basis.push_back(e.row(r));
  if (basis.size() > kMaxCodeRank) throw Gf2Error("code rank exceeds the enumeration guard");
  // Gray-code walk: one XOR per codeword.
  std::vector<BinVector> out;
  out.reserve(std::size_t{1} << basis.size());
  BinVector cur(gens.cols());
  out.push_back(cur);
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << basis.size()); ++i) {
    cur ^= basis[std::countr_zero(i)];
    out.push_back(cur);
  }
  return out;
}

nlohmann::json to_json(const BinMatrix& m) { return m.to_rows(); }

BinMatrix bin_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Gf2Error("matrix JSON must be an array of arrays");
  std::vector<std::vector<int>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw Gf2Error("matrix JSON must be an array of arrays");
    std::vector<int> row;
    for (const auto& x : r) {
      if (!x.is_number_integer()) throw Gf2Error("matrix entries must be integers 0 or 1");
      row.push_back(x.get<int>());
    }
    rows.push_back(row);
  }
  return BinMatrix::from_rows(rows);
}

nlohmann::json to_json(const BinVector& v) { return v.to_bits(); }

BinVector bin_vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Gf2Error("vector JSON must be an array");
  return BinVector::from_bits(j.get<std::vector<int>>());
}

}  // namespace blindiqp
