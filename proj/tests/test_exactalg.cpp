#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "atlas/field.hpp"
#include "atlas/mat.hpp"
#include "atlas/rng.hpp"

using namespace atlas;

namespace {

// Cofactor expansion along the first row.
template <class F>
typename F::value_type cofactor_det(const Mat<F>& m) {
  const F& f = m.field();
  const std::size_t n = m.rows();
  if (n == 0) return f.one();
  auto acc = f.zero();
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 1; i < n; ++i) rows.push_back(i);
    for (std::size_t c = 0; c < n; ++c)
      if (c != j) cols.push_back(c);
    auto term = f.mul(m(0, j), cofactor_det(submatrix(m, rows, cols)));
    acc = (j % 2 == 0) ? f.add(acc, term) : f.sub(acc, term);
  }
  return acc;
}

}  // namespace

TEST(PrimeField, RejectsCharacteristicTwoAndComposites) {
  EXPECT_THROW(PrimeField(2), InvalidField);
  EXPECT_THROW(PrimeField(9), InvalidField);
  EXPECT_THROW(PrimeField(1ULL << 31), InvalidField);
  EXPECT_NO_THROW(PrimeField(2147483647ULL));
}

TEST(PrimeField, LargePrimeProductsDoNotOverflow) {
  PrimeField f(2147483647ULL);
  const auto a = f.from_int(-1);
  EXPECT_EQ(f.mul(a, a), 1u);
  EXPECT_EQ(f.mul(a, f.inv(a)), 1u);
}

TEST(SquareClass, SquaresModSeven) {
  PrimeField f(7);
  std::set<std::uint32_t> squares;
  for (std::uint32_t x = 1; x < 7; ++x) squares.insert(f.mul(x, x));
  EXPECT_EQ(squares, (std::set<std::uint32_t>{1, 2, 4}));
  EXPECT_EQ(square_class(f, 2u), SquareClass::Square);
  EXPECT_EQ(square_class(f, 3u), SquareClass::NonSquare);
  EXPECT_EQ(square_class(f, 0u), SquareClass::Zero);
  for (std::uint32_t x = 1; x < 7; ++x)
    EXPECT_EQ(square_class(f, x) == SquareClass::Square, squares.count(x) == 1);
}

TEST(SquareClass, InvariantUnderSquareFactorsExhaustive) {
  for (auto q : std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {3, 2}, {7, 3}, {31, 2}}) {
    ExtField f(q.first, q.second);
    for (std::uint64_t x = 1; x < f.size(); ++x)
      for (std::uint64_t y = 1; y < f.size(); ++y) {
        auto xe = f.element(x), ye = f.element(y);
        ASSERT_EQ(square_class(f, f.mul(xe, f.mul(ye, ye))), square_class(f, xe));
      }
  }
}

TEST(SquareClass, Rationals) {
  RationalField q;
  EXPECT_EQ(square_class(q, mpq_class(4, 9)), SquareClass::Square);
  EXPECT_EQ(square_class(q, mpq_class(-4)), SquareClass::NonSquare);
  EXPECT_EQ(square_class(q, mpq_class(8)), SquareClass::NonSquare);
  EXPECT_EQ(square_class(q, mpq_class(0)), SquareClass::Zero);
  EXPECT_EQ(*sqrt_of(q, mpq_class(49, 4)), mpq_class(7, 2));
}

TEST(SquareRoot, TonelliShanksExhaustive) {
  for (auto q : std::vector<std::pair<int, int>>{{3, 1}, {13, 1}, {17, 1}, {41, 1}, {3, 3}, {5, 2}}) {
    ExtField f(q.first, q.second);
    for (std::uint64_t x = 0; x < f.size(); ++x) {
      auto r = sqrt_of(f, f.element(x));
      if (square_class(f, f.element(x)) == SquareClass::NonSquare) {
        EXPECT_FALSE(r.has_value());
      } else {
        ASSERT_TRUE(r.has_value());
        EXPECT_EQ(f.mul(*r, *r), f.element(x));
      }
    }
  }
}

TEST(ExtField, DegreeOneIsPrimeField) {
  ExtField f(3, 1);
  PrimeField g(3);
  EXPECT_EQ(f.size(), 3u);
  for (std::uint32_t a = 0; a < 3; ++a)
    for (std::uint32_t b = 0; b < 3; ++b) {
      EXPECT_EQ(f.add(a, b), g.add(a, b));
      EXPECT_EQ(f.mul(a, b), g.mul(a, b));
    }
}

TEST(ExtField, NineElementsMultiplicativeGroupOrderEight) {
  ExtField f = ext_field_make(3, 2);
  EXPECT_EQ(f.size(), 9u);
  // x^2 + 1 is the lowest monic irreducible quadratic over F_3
  EXPECT_EQ(f.modulus(), (std::vector<std::uint32_t>{1, 0, 1}));
  std::size_t max_order = 0;
  for (std::uint64_t i = 1; i < 9; ++i) {
    auto x = f.element(i);
    std::size_t order = 1;
    auto y = x;
    while (y != f.one()) {
      y = f.mul(y, x);
      ++order;
    }
    EXPECT_EQ(8 % order, 0u);
    max_order = std::max(max_order, order);
  }
  EXPECT_EQ(max_order, 8u);
}

TEST(ExtField, FrobeniusFixedFieldOf125HasFiveElements) {
  ExtField f = ext_field_make(5, 3);
  EXPECT_EQ(f.size(), 125u);
  std::size_t fixed = 0;
  for (std::uint64_t i = 0; i < f.size(); ++i) {
    auto x = f.element(i);
    auto y = f.one();
    for (int k = 0; k < 5; ++k) y = f.mul(y, x);
    if (y == x) ++fixed;
  }
  EXPECT_EQ(fixed, 5u);
}

TEST(ExtField, EveryElementSatisfiesXToTheQ) {
  for (auto q : std::vector<std::pair<int, int>>{{3, 2}, {3, 4}, {5, 3}, {7, 4}, {11, 3}, {97, 2}}) {
    ExtField f(q.first, q.second);
    ASSERT_LE(f.size(), 10000u);
    for (std::uint64_t i = 0; i < f.size(); ++i) {
      auto x = f.element(i);
      // compute x^q by repeated multiplication in chunks, independent of pow()
      auto y = f.one();
      auto b = x;
      for (std::uint64_t e = f.size(); e; e >>= 1) {
        if (e & 1) y = f.mul(y, b);
        b = f.mul(b, b);
      }
      ASSERT_EQ(y, x) << f.name() << " element " << i;
    }
  }
}

TEST(ExtField, AxiomsOnSampledTriples) {
  ExtField f(7, 3);
  Rng rng(11);
  for (int t = 0; t < 2000; ++t) {
    auto a = random_element(f, rng), b = random_element(f, rng), c = random_element(f, rng);
    EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
    EXPECT_EQ(f.add(a, f.neg(a)), f.zero());
    EXPECT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
    if (a != 0) {
      EXPECT_EQ(f.mul(a, f.inv(a)), f.one());
    }
  }
}

TEST(ExtField, SizeBudget) {
  EXPECT_THROW(ExtField(101, 4), SizeError);
  EXPECT_THROW(ExtField(2, 3), InvalidField);
}

TEST(Mat, RankKernelIdentityAndZero) {
  PrimeField f(5);
  auto rk = rank_kernel(Mat<PrimeField>::identity(f, 3));
  EXPECT_EQ(rk.rank, 3u);
  EXPECT_EQ(rk.kernel.cols(), 0u);
  auto z = rank_kernel(Mat<PrimeField>(f, 2, 4));
  EXPECT_EQ(z.rank, 0u);
  EXPECT_EQ(z.kernel.cols(), 4u);
}

TEST(Mat, KernelOfRankOneMatrixOverF7) {
  PrimeField f(7);
  auto m = Mat<PrimeField>::from_ints(f, {{1, 2}, {2, 4}});
  auto rk = rank_kernel(m);
  EXPECT_EQ(rk.rank, 1u);
  ASSERT_EQ(rk.kernel.cols(), 1u);
  EXPECT_EQ(rk.kernel(0, 0), 5u);
  EXPECT_EQ(rk.kernel(1, 0), 1u);
  // brute force: the nonzero kernel vectors are exactly the multiples of (5,1)
  int count = 0;
  for (std::uint32_t x = 0; x < 7; ++x)
    for (std::uint32_t y = 0; y < 7; ++y) {
      if (x == 0 && y == 0) continue;
      if (f.add(x, f.mul(2, y)) == 0 && f.add(f.mul(2, x), f.mul(4, y)) == 0) {
        ++count;
        EXPECT_EQ(x, f.mul(5, y));
      }
    }
  EXPECT_EQ(count, 6);
}

TEST(Mat, RankKernelRandomizedInvariants) {
  PrimeField f(7);
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t r = 1 + rng.below(6), c = 1 + rng.below(6);
    // low-rank product to exercise nontrivial kernels
    const std::size_t inner = 1 + rng.below(4);
    auto m = random_mat(f, r, inner, rng) * random_mat(f, inner, c, rng);
    auto rk = rank_kernel(m);
    ASSERT_EQ(rk.rank + rk.kernel.cols(), c);
    EXPECT_TRUE((m * rk.kernel).is_zero());
    EXPECT_EQ(rank(rk.kernel), rk.kernel.cols());
    EXPECT_EQ(rank(m), rk.rank);
    // row/column permutations and row scaling
    std::vector<std::size_t> rp(r), cp(c);
    for (std::size_t i = 0; i < r; ++i) rp[i] = r - 1 - i;
    for (std::size_t j = 0; j < c; ++j) cp[j] = (j + 1) % c;
    auto pm = submatrix(m, rp, cp);
    for (std::size_t j = 0; j < c; ++j) pm(0, j) = f.mul(pm(0, j), 3);
    EXPECT_EQ(rank_kernel(pm).rank, rk.rank);
  }
}

TEST(Mat, DeterminantExamples) {
  PrimeField f(7);
  EXPECT_EQ(det(Mat<PrimeField>::identity(f, 4)), 1u);
  EXPECT_EQ(det(Mat<PrimeField>::diagonal(f, {2, 3})), 6u);
  EXPECT_THROW(det(Mat<PrimeField>(f, 2, 3)), ShapeError);
}

TEST(Mat, DeterminantMatchesCofactorExpansion) {
  PrimeField f(5);
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    auto m = random_mat(f, 4, 4, rng);
    EXPECT_EQ(det(m), cofactor_det(m));
  }
  RationalField q;
  for (int t = 0; t < 20; ++t) {
    auto m = random_mat(q, 4, 4, rng);
    EXPECT_EQ(det(m), cofactor_det(m));
  }
}

TEST(Mat, DeterminantMultiplicative) {
  ExtField f(3, 2);
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(6);
    auto a = random_mat(f, n, n, rng), b = random_mat(f, n, n, rng);
    EXPECT_EQ(det(a * b), f.mul(det(a), det(b)));
  }
}

TEST(Mat, DeterminantBlockTriangular) {
  PrimeField f(11);
  Rng rng(9);
  auto a = random_mat(f, 3, 3, rng), c = random_mat(f, 2, 2, rng), b = random_mat(f, 3, 2, rng);
  auto m = vcat(hcat(a, b), hcat(Mat<PrimeField>(f, 2, 3), c));
  EXPECT_EQ(det(m), f.mul(det(a), det(c)));
}

TEST(Mat, ZeroDeterminantIffRankDeficient) {
  PrimeField f(3);
  Rng rng(10);
  for (int t = 0; t < 300; ++t) {
    auto m = random_mat(f, 3, 3, rng);
    EXPECT_EQ(det(m) == 0, rank(m) < 3);
  }
}

TEST(Mat, FieldMismatchIsRejected) {
  auto a = Mat<PrimeField>::identity(PrimeField(5), 2);
  auto b = Mat<PrimeField>::identity(PrimeField(7), 2);
  EXPECT_THROW(a * b, FieldMismatch);
  EXPECT_THROW(hcat(a, b), FieldMismatch);
}

TEST(Mat, InverseSolveIntersect) {
  PrimeField f(13);
  Rng rng(12);
  auto a = random_invertible(f, 5, rng);
  EXPECT_EQ(a * inverse(a), (Mat<PrimeField>::identity(f, 5)));
  auto b = random_mat(f, 5, 2, rng);
  auto x = solve(a, b);
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ(a * *x, b);
  EXPECT_THROW(inverse(Mat<PrimeField>(f, 2, 2)), DivisionByZero);

  // two 3-dim subspaces of a 4-space meet in dimension 2
  auto u = random_mat(f, 4, 3, rng), v = random_mat(f, 4, 3, rng);
  auto w = intersect_columns(u, v);
  EXPECT_EQ(w.cols(), 2u);
  EXPECT_EQ(rank(hcat(u, w)), rank(u));
  EXPECT_EQ(rank(hcat(v, w)), rank(v));
}

TEST(Mat, ComplementIndicesCompleteTheSpan) {
  PrimeField f(5);
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    auto m = random_mat(f, 6, 2, rng);
    auto idx = complement_indices(m);
    EXPECT_EQ(rank(hcat(m, unit_columns(f, 6, idx))), 6u);
  }
}
