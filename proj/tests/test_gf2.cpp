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


#include <random>
#include <set>

#include <catch_amalgamated.hpp>

#include "blindiqp/gf2.hpp"

using namespace blindiqp;

namespace {

BinMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  BinMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, static_cast<int>(rng() & 1));
  return m;
}

// Rank by brute force: log2 of the number of distinct row combinations.
std::size_t brute_rank(const BinMatrix& m) {
  std::set<std::vector<int>> seen;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << m.rows()); ++c) {
    std::vector<int> v(m.cols(), 0);
    for (std::size_t i = 0; i < m.rows(); ++i)
      if ((c >> i) & 1)
        for (std::size_t j = 0; j < m.cols(); ++j) v[j] ^= m(i, j);
    seen.insert(v);
  }
  std::size_t r = 0;
  while ((std::size_t{1} << r) < seen.size()) ++r;
  return r;
}

}  // namespace

TEST_CASE("index conversion puts the first bit first") {
  const BinVector v = BinVector::from_index(4, 3);
  CHECK(v.to_bits() == std::vector<int>{1, 0, 0});
  CHECK(v.to_index() == 4);
  CHECK(v.str() == "100");
  for (std::uint64_t i = 0; i < 64; ++i) CHECK(BinVector::from_index(i, 6).to_index() == i);
}

TEST_CASE("vectors longer than one word") {
  BinVector a(130), b(130);
  a.set(0, 1);
  a.set(129, 1);
  b.set(129, 1);
  CHECK(a.dot(b) == 1);
  CHECK((a ^ b).weight() == 1);
  CHECK_FALSE((a ^ a).weight());
  CHECK((a ^ a).is_zero());
}

TEST_CASE("matrix-vector product on a 2x3 matrix") {
  const BinMatrix q{{1, 0, 1}, {0, 1, 0}};
  CHECK(mat_vec_mul(q, BinVector{1, 0, 0}).to_bits() == std::vector<int>{1, 0});
  CHECK(mat_vec_mul(q, BinVector{1, 0, 1}).to_bits() == std::vector<int>{0, 0});
}

TEST_CASE("matrix product agrees with an entrywise sum") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const BinMatrix a = random_matrix(rng, 4, 5), b = random_matrix(rng, 5, 3);
    const BinMatrix c = a * b;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) {
        int s = 0;
        for (int k = 0; k < 5; ++k) s ^= a(i, k) & b(k, j);
        CHECK(c(i, j) == s);
      }
  }
}

TEST_CASE("rank matches brute force") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const BinMatrix m = random_matrix(rng, 1 + rng() % 6, 1 + rng() % 6);
    CHECK(m.rank() == brute_rank(m));
  }
}

TEST_CASE("inverse of random invertible matrices") {
  std::mt19937_64 rng(3);
  int found = 0;
  while (found < 20) {
    const BinMatrix m = random_matrix(rng, 5, 5);
    if (m.rank() < 5) {
      CHECK_THROWS_AS(inverse(m), Gf2Error);
      continue;
    }
    ++found;
    CHECK(m * inverse(m) == BinMatrix::identity(5));
    CHECK(inverse(m) * m == BinMatrix::identity(5));
  }
  CHECK_THROWS_AS(inverse(BinMatrix(2, 3)), Gf2Error);
}

TEST_CASE("column echelon form is unique per column space") {
  const BinMatrix a{{1, 1}, {0, 1}, {1, 0}};
  const BinMatrix b{{0, 1}, {1, 0}, {1, 1}};  // columns (a0+a1, a0)
  CHECK(column_echelon(a) == column_echelon(b));
  const BinMatrix c{{1, 0}, {0, 0}, {0, 1}};
  CHECK_FALSE(column_echelon(a) == column_echelon(c));
}

TEST_CASE("row echelon keeps the row space") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const BinMatrix m = random_matrix(rng, 4, 6);
    const BinMatrix e = row_echelon(m);
    CHECK(e.rank() == m.rank());
    CHECK(enumerate_code(e, Span::Rows) == enumerate_code(m, Span::Rows));
  }
}

TEST_CASE("code enumeration has 2^rank words") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const BinMatrix m = random_matrix(rng, 5, 4);
    CHECK(enumerate_code(m, Span::Cols).size() == (std::size_t{1} << m.rank()));
    CHECK(enumerate_code(m, Span::Rows).size() == (std::size_t{1} << m.rank()));
  }
}

TEST_CASE("matroid equivalence under row permutation and column operations") {
  const BinMatrix q{{1, 0, 1}, {0, 1, 1}, {1, 1, 0}};
  const BinMatrix permuted = q.permute_rows({2, 0, 1});
  CHECK(matroid_equivalent(q, permuted));
  BinMatrix mixed = permuted;
  for (std::size_t i = 0; i < 3; ++i) mixed.set(i, 2, permuted(i, 2) ^ permuted(i, 0));
  CHECK(matroid_equivalent(q, mixed));
  // Same rank, but this column space has words of odd weight.
  CHECK_FALSE(matroid_equivalent(q, BinMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}));
}

TEST_CASE("transformation matrices are involutions") {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << (n - 1)); ++s) {
      BinMatrix a = BinMatrix::identity(n);
      for (std::size_t i = 0; i + 1 < n; ++i) a.set(i, n - 1, static_cast<int>((s >> i) & 1));
      CHECK(a * a == BinMatrix::identity(n));
    }
  }
}

TEST_CASE("JSON round trip and validation") {
  const BinMatrix q{{1, 0, 1}, {0, 1, 0}};
  CHECK(bin_matrix_from_json(to_json(q)) == q);
  const BinVector v{1, 0, 1, 1};
  CHECK(bin_vector_from_json(to_json(v)) == v);
  CHECK_THROWS_AS(bin_matrix_from_json(nlohmann::json::parse("[[1,2]]")), Gf2Error);
  CHECK_THROWS_AS(bin_matrix_from_json(nlohmann::json::parse("[[1,0],[1]]")), Gf2Error);
  CHECK_THROWS_AS(bin_matrix_from_json(nlohmann::json::parse("{}")), Gf2Error);
}
