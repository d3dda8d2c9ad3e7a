#pragma once

// Random test families: Lagrangian pairs over the standard symplectic form,
// symmetric matrices of linear forms, and reduction data.

#include <optional>
#include <utility>
#include <vector>

#include "atlas/lagloci.hpp"

namespace atlas {

// [I; s] over the standard form.
template <FieldType F>
PolyMatrix<F> graph_frame(const PolyMatrix<F>& s) {
  const F& f = s.field();
  const std::size_t n = s.rows();
  PolyMatrix<F> g(f, 2 * n, n, s.nvars());
  for (std::size_t i = 0; i < n; ++i) {
    g(i, i) = MultiPoly<F>::constant(f, s.nvars(), f.one());
    for (std::size_t j = 0; j < n; ++j) g(n + i, j) = s(i, j);
  }
  return g;
}

template <FieldType F>
PolyMatrix<F> coordinate_frame(const F& f, std::size_t n, std::size_t nvars) {
  Mat<F> c(f, 2 * n, n);
  for (std::size_t i = 0; i < n; ++i) c(i, i) = f.one();
  return PolyMatrix<F>::constant(c, nvars);
}

// Symmetric matrix of random affine-linear entries.
template <FieldType F>
PolyMatrix<F> random_linear_symmetric(const F& f, std::size_t n, std::size_t nvars, Rng& rng) {
  using P = MultiPoly<F>;
  PolyMatrix<F> s(f, n, n, nvars);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      P e = P::constant(f, nvars, random_element(f, rng));
      for (std::size_t v = 0; v < nvars; ++v) e = e + P::variable(f, nvars, v).scaled(random_element(f, rng));
      s(i, j) = e;
      s(j, i) = e;
    }
  return s;
}

// Extends an isotropic frame to a Lagrangian one by random vectors.
template <FieldType F>
Mat<F> extend_lagrangian(const SymplecticSpace<F>& sp, Mat<F> l, Rng& rng) {
  const F& f = sp.field();
  while (l.cols() < sp.n()) {
    const Mat<F> perp = kernel(l.transpose() * sp.omega);
    const Mat<F> t = hcat(l, perp * random_mat(f, perp.cols(), 1, rng));
    if (rank(t) == t.cols()) l = t;
  }
  return l;
}

// Two Lagrangians meeting in (at least) a random k-dimensional subspace, with random frames.
template <FieldType F>
std::pair<Mat<F>, Mat<F>> random_pair_with_corank(const SymplecticSpace<F>& sp, std::size_t k, Rng& rng) {
  const F& f = sp.field();
  const Mat<F> full = random_lagrangian(sp, rng);
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  const Mat<F> kap = select_columns(full, idx);
  return {extend_lagrangian(sp, kap, rng) * random_invertible(f, sp.n(), rng),
          extend_lagrangian(sp, kap, rng) * random_invertible(f, sp.n(), rng)};
}

// Product of random symplectic shears and a block-diagonal factor.
template <FieldType F>
Mat<F> random_symplectic(const F& f, std::size_t n, Rng& rng) {
  auto sym = [&] {
    Mat<F> b(f, n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) b(i, j) = b(j, i) = random_element(f, rng);
    return b;
  };
  const Mat<F> id = Mat<F>::identity(f, n), zero(f, n, n);
  const Mat<F> a = random_invertible(f, n, rng);
  const Mat<F> upper = vcat(hcat(id, sym()), hcat(zero, id));
  const Mat<F> lower = vcat(hcat(id, zero), hcat(sym(), id));
  const Mat<F> diag = vcat(hcat(a, zero), hcat(zero, inverse(a).transpose()));
  return upper * lower * diag;
}

// A pair of graphs of symmetric matrices of linear forms, moved by a random
// symplectic transformation.
template <FieldType F>
LagPair<F> random_linear_pair(const F& f, std::size_t n, std::size_t nvars, Rng& rng) {
  const auto sp = SymplecticSpace<F>::standard(f, n);
  const auto g = PolyMatrix<F>::constant(random_symplectic(f, n, rng), nvars);
  return LagPair<F>(sp, g * graph_frame(random_linear_symmetric(f, n, nvars, rng)),
                    g * graph_frame(random_linear_symmetric(f, n, nvars, rng)));
}

template <FieldType F>
std::size_t point_corank(const PointPair<F>& pp) {
  return pp.n() - rank(pp.gram());
}

template <FieldType F>
struct ReductionData {
  Mat<F> i1, i2;
};

// I2 inside A2, I1 inside A1 ∩ I2^⊥; empty when the draw is unusable.
template <FieldType F>
std::optional<ReductionData<F>> random_reduction(const PointPair<F>& pp, std::size_t r1, std::size_t r2, Rng& rng) {
  const F& f = pp.omega.field();
  const std::size_t n = pp.n();
  const Mat<F> i2 = pp.f2 * random_mat(f, n, r2, rng);
  const Mat<F> y = kernel(i2.transpose() * pp.omega * pp.f1);
  if (y.cols() == 0 && r1 > 0) return std::nullopt;
  const Mat<F> i1 = pp.f1 * y * random_mat(f, y.cols(), r1, rng);
  return ReductionData<F>{i1, i2};
}

}  // namespace atlas
