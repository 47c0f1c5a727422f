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
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace blindiqp {

class Gf2Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Packed bit string over GF(2).
class BinVector {
 public:
  BinVector() = default;
  explicit BinVector(std::size_t len);
  BinVector(std::initializer_list<int> bits);
  static BinVector from_bits(const std::vector<int>& bits);
  // Bit j of the result is bit (len-1-j) of `index`, so index 0b100 with
  // len 3 is (1,0,0).
  static BinVector from_index(std::uint64_t index, std::size_t len);

  std::size_t size() const { return len_; }
  int operator[](std::size_t i) const {
    return static_cast<int>((words_[i >> 6] >> (i & 63)) & 1u);
  }
  void set(std::size_t i, int b);
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  BinVector& operator^=(const BinVector& o);
  friend BinVector operator^(BinVector a, const BinVector& b) { return a ^= b; }
  bool operator==(const BinVector& o) const = default;
  bool operator<(const BinVector& o) const;

  int dot(const BinVector& o) const;
  std::size_t weight() const;
  bool is_zero() const;
  std::uint64_t to_index() const;
  std::vector<int> to_bits() const;
  std::string str() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t len_ = 0;
  std::vector<std::uint64_t> words_;
};

// Row-major packed matrix over GF(2).
class BinMatrix {
 public:
  BinMatrix(std::size_t rows, std::size_t cols);
  BinMatrix(std::initializer_list<std::initializer_list<int>> rows);
  static BinMatrix from_rows(const std::vector<std::vector<int>>& rows);
  static BinMatrix identity(std::size_t n);
  static BinMatrix zeros(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  int operator()(std::size_t r, std::size_t c) const { return rows_[r][c]; }
  void set(std::size_t r, std::size_t c, int b) { rows_[r].set(c, b); }

  const BinVector& row(std::size_t r) const { return rows_[r]; }
  void set_row(std::size_t r, const BinVector& v);
  BinVector col(std::size_t c) const;

  BinMatrix transpose() const;
  BinMatrix operator*(const BinMatrix& o) const;
  bool operator==(const BinMatrix& o) const = default;

  std::size_t rank() const;
  BinMatrix delete_zero_columns() const;
  BinMatrix permute_rows(const std::vector<std::size_t>& perm) const;
  BinMatrix append_column(const BinVector& c) const;

  std::vector<std::vector<int>> to_rows() const;
  std::string str() const;

 private:
  BinMatrix() = default;
  std::size_t cols_ = 0;
  std::vector<BinVector> rows_;
};

BinVector mat_vec_mul(const BinMatrix& m, const BinVector& v);

// Unique reduced column echelon form; column space is preserved.
BinMatrix column_echelon(const BinMatrix& m);

// Reduced row echelon form, zero rows kept at the bottom.
BinMatrix row_echelon(const BinMatrix& m);

// Throws Gf2Error when `m` is singular or not square.
BinMatrix inverse(const BinMatrix& m);

// Row permutations are searched exhaustively, so rows must not exceed 8.
bool matroid_equivalent(const BinMatrix& m1, const BinMatrix& m2);

enum class Span { Rows, Cols };

// All distinct codewords spanned by the rows or the columns of `g`.
std::vector<BinVector> enumerate_code(const BinMatrix& g, Span span);

inline constexpr std::size_t kMaxMatroidRows = 8;
inline constexpr std::size_t kMaxCodeRank = 24;

nlohmann::json to_json(const BinMatrix& m);
BinMatrix bin_matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BinVector& v);
BinVector bin_vector_from_json(const nlohmann::json& j);

}  // namespace blindiqp
