#pragma once

// Intersection loci of two families of Lagrangian subspaces.
//
// A pair (A1, A2) of Lagrangian frames in a symplectic space (V, omega) of
// dimension 2n degenerates where dim(A1 ∩ A2) jumps. At a point with
// κ = A1 ∩ A2 of dimension k, omega induces a perfect pairing
//
//   omega_k : A1/κ × A2/κ -> F,
//
// whose determinant, made a scalar by the frame volumes of A1 and A2 (the two
// det κ factors combine into a square), gives the class D of the cover. The
// signature convention matches quadloci: Split iff (-1)^{(n-k)/2} D is a
// square when n - k is even, iff D is a square otherwise.
//
// Isotropic reduction replaces V by I^⊥/I and A_i by (A_i ∩ I^⊥)/I_i; it is
// applied pointwise and records how the frame volumes transform.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/field.hpp"
#include "atlas/mat.hpp"
#include "atlas/poly.hpp"
#include "atlas/quadloci.hpp"
#include "atlas/rng.hpp"

namespace atlas {

template <FieldType F>
struct SymplecticSpace {
  Mat<F> omega;

  explicit SymplecticSpace(Mat<F> w) : omega(std::move(w)) {
    if (!omega.square() || omega.rows() % 2 != 0) throw ShapeError("symplectic form must be square of even size");
    const F& f = omega.field();
    for (std::size_t i = 0; i < omega.rows(); ++i)
      for (std::size_t j = 0; j < omega.cols(); ++j)
        if (!f.equal(omega(i, j), f.neg(omega(j, i)))) throw ShapeError("symplectic form must be antisymmetric");
    if (rank(omega) < omega.rows()) throw Degenerate("symplectic form is degenerate");
  }

  // [[0, I], [-I, 0]]
  static SymplecticSpace standard(const F& f, std::size_t n) {
    Mat<F> w(f, 2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      w(i, n + i) = f.one();
      w(n + i, i) = f.neg(f.one());
    }
    return SymplecticSpace(std::move(w));
  }

  std::size_t dim() const { return omega.rows(); }
  std::size_t n() const { return omega.rows() / 2; }
  const F& field() const { return omega.field(); }
};

// Columns of a 2n x n polynomial matrix.
template <FieldType F>
using LagrangianFrame = PolyMatrix<F>;

template <FieldType F>
bool check_lagrangian(const SymplecticSpace<F>& space, const LagrangianFrame<F>& frame, Rng& rng,
                      std::size_t samples = 100) {
  if (frame.rows() != space.dim() || frame.cols() != space.n()) return false;
  const auto w = PolyMatrix<F>::constant(space.omega, frame.nvars());
  if (!(frame.transpose() * w * frame).is_zero()) return false;
  std::vector<typename F::value_type> x(frame.nvars());
  for (std::size_t t = 0; t < samples; ++t) {
    for (auto& xi : x) xi = random_element(space.field(), rng);
    if (rank(frame.eval(x)) != space.n()) return false;
  }
  return true;
}

// Evaluated pair at a point: frames as columns and the frame volume weights.
template <FieldType F>
struct PointPair {
  using V = typename F::value_type;
  Mat<F> omega;
  Mat<F> f1, f2;
  V w1, w2;

  std::size_t n() const { return f1.cols(); }
  Mat<F> gram() const { return f1.transpose() * omega * f2; }
};

// Class D of omega_k and the corank k.
template <FieldType F>
struct LagrangianClass {
  std::size_t corank = 0;
  typename F::value_type d;
};

template <FieldType F>
LagrangianClass<F> lagrangian_class(const PointPair<F>& pp) {
  const F& f = pp.omega.field();
  const std::size_t n = pp.n();
  const Mat<F> g = pp.gram();
  const auto rk = rank_kernel(g);
  const std::size_t k = n - rk.rank;
  const Mat<F>& n2 = rk.kernel;                       // κ in A2 coordinates
  const auto x1 = solve(pp.f1, pp.f2 * n2);           // κ in A1 coordinates
  if (!x1) throw NotLagrangian("frames do not intersect in the kernel of their pairing");
  const auto j2 = rref(g).pivots;
  const auto j1 = rref(g.transpose()).pivots;
  const Mat<F> t1 = hcat(*x1, unit_columns(f, n, j1));
  const Mat<F> t2 = hcat(n2, unit_columns(f, n, j2));
  auto d = det(submatrix(g, j1, j2));
  d = f.mul(d, f.mul(det(t1), det(t2)));
  d = f.mul(d, f.mul(pp.w1, pp.w2));
  return {k, d};
}

template <FieldType F>
typename F::value_type signed_class_value(const F& f, std::size_t size, typename F::value_type d) {
  if (size % 2 == 0 && (size / 2) % 2 == 1) d = f.neg(d);
  return d;
}

template <FieldType F>
Signature lag_signature_at(const PointPair<F>& pp, std::size_t k, const std::string& where = "") {
  const F& f = pp.omega.field();
  const auto c = lagrangian_class(pp);
  if (c.corank < k)
    throw NotOnStratum("corank " + std::to_string(c.corank) + " < " + std::to_string(k) +
                       (where.empty() ? std::string() : " at " + where));
  if (c.corank > k) return Signature::Ramified;
  return signature_from_class<F>(square_class(f, signed_class_value(f, pp.n() - k, c.d)));
}

// ---------------------------------------------------------------------------
// Pointwise isotropic reduction

template <FieldType F>
struct ReducedPoint {
  PointPair<F> pair;
  Mat<F> projection;  // V -> V-bar coordinates, meaningful on I^⊥
};

// Sign by which the raw class D changes under reduction by r1 + r2 vectors in
// half-dimension n; independent of the point and the frames.
inline bool raw_reduction_sign_negative(std::size_t n, std::size_t r1, std::size_t r2) {
  return (r2 + r1 * r2 + n * (r1 + r2)) % 2 == 1;
}

// Sign that keeps the signed class at corank k when the size drops by r.
inline bool reduction_sign_negative(std::size_t n, std::size_t k, std::size_t r1, std::size_t r2) {
  auto odd_half = [](std::size_t m) { return m % 2 == 0 && (m / 2) % 2 == 1; };
  const std::size_t m = n - k;
  return raw_reduction_sign_negative(n, r1, r2) != (odd_half(m) != odd_half(m - r1 - r2));
}

// iota1 (2n x r1) inside A1 and iota2 (2n x r2) inside A2 span I. The reduced
// weights are oriented so that the signed class at the current corank is kept.
template <FieldType F>
ReducedPoint<F> reduce_point(const PointPair<F>& pp, const Mat<F>& iota1, const Mat<F>& iota2,
                             const std::string& where) {
  const F& f = pp.omega.field();
  const std::size_t n = pp.n(), dim = pp.omega.rows();
  const std::size_t r1 = iota1.cols(), r2 = iota2.cols(), r = r1 + r2;
  const Mat<F>& w = pp.omega;
  auto fail = [&](const std::string& why) { return HypothesisViolated(why, where); };

  if (rank(hcat(pp.f1, iota1)) != n) throw fail("I1 is not contained in A1");
  if (rank(hcat(pp.f2, iota2)) != n) throw fail("I2 is not contained in A2");
  if (rank(hcat(iota1, pp.f2)) != r1 + n) throw fail("I1 + A2 -> V is not injective");
  if (rank(hcat(pp.f1, iota2)) != n + r2) throw fail("A1 + I2 -> V is not injective");
  const Mat<F> iso = hcat(iota1, iota2);
  if (!(iso.transpose() * w * iso).is_zero()) throw fail("I is not isotropic");

  // I^⊥ = [I | W]
  const Mat<F> perp = kernel(iso.transpose() * w);
  Mat<F> basis = iso;
  std::vector<std::size_t> wcols;
  for (std::size_t j = 0; j < perp.cols(); ++j) {
    Mat<F> trial = hcat(basis, select_columns(perp, {j}));
    if (rank(trial) == trial.cols()) {
      basis = std::move(trial);
      wcols.push_back(j);
    }
  }
  const Mat<F> wbar = select_columns(perp, wcols);
  const std::size_t m = wbar.cols();  // 2(n - r)
  const Mat<F> full = hcat(basis, unit_columns(f, dim, complement_indices(basis)));
  const Mat<F> inv = inverse(full);
  std::vector<std::size_t> prow(m);
  for (std::size_t i = 0; i < m; ++i) prow[i] = r + i;
  Mat<F> proj = select_rows(inv, prow);

  PointPair<F> out{wbar.transpose() * w * wbar, Mat<F>(f, m, m / 2), Mat<F>(f, m, m / 2), pp.w1, pp.w2};

  // A_i ∩ I^⊥ in frame coordinates, its image, and the frame volume factor
  auto side = [&](const Mat<F>& fi, const Mat<F>& own, const Mat<F>& other, typename F::value_type& weight) {
    const Mat<F> y = kernel(iso.transpose() * w * fi);  // n x (n - r_other)
    const Mat<F> img = proj * fi * y;
    const auto piv = rref(img).pivots;
    if (piv.size() != n - r) throw fail("reduced frame has wrong rank");
    const Mat<F> c_own = *solve(fi, own);
    const Mat<F> lifts = hcat(c_own, select_columns(y, piv));
    const Mat<F> t = hcat(lifts, unit_columns(f, n, complement_indices(lifts)));
    const Mat<F> x = select_columns(t, [&] {
      std::vector<std::size_t> idx;
      for (std::size_t j = lifts.cols(); j < n; ++j) idx.push_back(j);
      return idx;
    }());
    const Mat<F> pairing = (fi * x).transpose() * w * other;
    const auto dt = det(t), dp = det(pairing);
    if (f.is_zero(dt) || f.is_zero(dp)) throw fail("adapted basis is degenerate");
    weight = f.mul(weight, f.mul(dp, f.inv(dt)));
    return select_columns(img, piv);
  };
  out.f1 = side(pp.f1, iota1, iota2, out.w1);
  out.f2 = side(pp.f2, iota2, iota1, out.w2);
  const std::size_t k = n - rank(pp.gram());
  if (k + r > n) throw fail("corank exceeds the reduced dimension");
  if (reduction_sign_negative(n, k, r1, r2)) out.w1 = f.neg(out.w1);
  return {std::move(out), std::move(proj)};
}

// ---------------------------------------------------------------------------

template <FieldType F>
struct ReductionStep {
  PolyMatrix<F> c1;  // n0 x r1 coefficients on the original A1 frame
  PolyMatrix<F> c2;  // n0 x r2 coefficients on the original A2 frame
};

template <FieldType F>
class LagPair {
 public:
  using V = typename F::value_type;

  LagPair(SymplecticSpace<F> space, LagrangianFrame<F> a1, LagrangianFrame<F> a2)
      : space_(std::move(space)), a1_(std::move(a1)), a2_(std::move(a2)) {
    if (a1_.rows() != space_.dim() || a2_.rows() != space_.dim() || a1_.cols() != space_.n() ||
        a2_.cols() != space_.n())
      throw ShapeError("Lagrangian frames must be 2n x n");
    if (a1_.nvars() != a2_.nvars()) throw ShapeError("frames live on different charts");
  }

  const SymplecticSpace<F>& space() const { return space_; }
  const LagrangianFrame<F>& a1() const { return a1_; }
  const LagrangianFrame<F>& a2() const { return a2_; }
  const std::vector<ReductionStep<F>>& steps() const { return steps_; }
  std::size_t nvars() const { return a1_.nvars(); }
  const F& field() const { return space_.field(); }
  std::size_t n() const { return space_.n() - reduced_rank_; }

  PolyMatrix<F> gram() const {
    return a1_.transpose() * PolyMatrix<F>::constant(space_.omega, nvars()) * a2_;
  }

  LagPair swapped() const {
    if (!steps_.empty()) throw Unsupported("swap of a reduced pair");
    return LagPair(space_, a2_, a1_);
  }

  LagPair with_step(ReductionStep<F> step) const {
    if (step.c1.rows() != space_.n() || step.c2.rows() != space_.n()) throw ShapeError("reduction coefficients");
    LagPair p = *this;
    p.reduced_rank_ += step.c1.cols() + step.c2.cols();
    if (p.reduced_rank_ > space_.n()) throw ShapeError("isotropic subspace too large");
    p.steps_.push_back(std::move(step));
    return p;
  }

  PointPair<F> at(const std::vector<V>& s) const {
    const F& f = field();
    const std::string where = point_to_string(f, s);
    const Mat<F> f1 = a1_.eval(s), f2 = a2_.eval(s);
    if (rank(f1) < space_.n()) throw FrameDegenerate("A1 frame drops rank", where);
    if (rank(f2) < space_.n()) throw FrameDegenerate("A2 frame drops rank", where);
    PointPair<F> pp{space_.omega, f1, f2, f.one(), f.one()};
    Mat<F> proj = Mat<F>::identity(f, space_.dim());
    for (const auto& st : steps_) {
      const Mat<F> i1 = proj * f1 * st.c1.eval(s);
      const Mat<F> i2 = proj * f2 * st.c2.eval(s);
      auto red = reduce_point(pp, i1, i2, where);
      proj = red.projection * proj;
      pp = std::move(red.pair);
    }
    return pp;
  }

 private:
  SymplecticSpace<F> space_;
  LagrangianFrame<F> a1_, a2_;
  std::vector<ReductionStep<F>> steps_;
  std::size_t reduced_rank_ = 0;
};

template <FieldType F>
std::size_t lag_corank_at(const LagPair<F>& pair, const std::vector<typename F::value_type>& s) {
  const auto pp = pair.at(s);
  return pp.n() - rank(pp.gram());
}

template <FieldType F>
Signature lag_fiber_signature(const LagPair<F>& pair, std::size_t k, const std::vector<typename F::value_type>& s) {
  return lag_signature_at(pair.at(s), k, point_to_string(pair.field(), s));
}

// Sample points of a chart: all of them when there are at most `samples`,
// otherwise `samples` random ones.
template <FieldType F>
std::vector<std::vector<typename F::value_type>> chart_sample(const F& f, std::size_t nvars, std::size_t samples,
                                                              Rng& rng) {
  std::vector<std::vector<typename F::value_type>> pts;
  if constexpr (FiniteFieldType<F>) {
    std::uint64_t total = 1;
    bool small = true;
    for (std::size_t i = 0; i < nvars && small; ++i) {
      total *= f.size();
      if (total > samples) small = false;
    }
    if (small) {
      for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::vector<typename F::value_type> x(nvars);
        std::uint64_t t = idx;
        for (std::size_t i = 0; i < nvars; ++i) {
          x[i] = f.element(t % f.size());
          t /= f.size();
        }
        pts.push_back(std::move(x));
      }
      return pts;
    }
  }
  for (std::size_t t = 0; t < samples; ++t) {
    std::vector<typename F::value_type> x(nvars);
    for (auto& xi : x) xi = random_element(f, rng);
    pts.push_back(std::move(x));
  }
  return pts;
}

// Reduce by I = A1 c1 + A2 c2, checking the hypotheses at the sample points.
template <FieldType F>
LagPair<F> isotropic_reduce(const LagPair<F>& pair, const PolyMatrix<F>& c1, const PolyMatrix<F>& c2, Rng& rng,
                            std::size_t samples = 1000) {
  LagPair<F> out = pair.with_step({c1, c2});
  for (const auto& s : chart_sample(pair.field(), pair.nvars(), samples, rng)) {
    try {
      (void)out.at(s);
    } catch (const FrameDegenerate&) {
      // frames outside their domain say nothing about the hypotheses
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lagrangian to quadratic

template <FieldType F>
struct LagQuad {
  QuadraticFamily<F> family;    // gram multiplied by (det G13 det G32)^2
  MultiPoly<F> det13, det32;    // the two auxiliary determinants
};

// q = (G32^T)^{-1} G12^T (G13^T)^{-1}, Gij = Ai^T omega Aj, cleared of
// denominators by the square (det G13 det G32)^2.
template <FieldType F>
LagQuad<F> lag_to_quad(const LagPair<F>& pair, const LagrangianFrame<F>& a3, Rng& rng, std::size_t samples = 1000) {
  if (!pair.steps().empty()) throw Unsupported("convert the pair before reducing it");
  const auto w = PolyMatrix<F>::constant(pair.space().omega, pair.nvars());
  const auto g12 = pair.a1().transpose() * w * pair.a2();
  const auto g13 = pair.a1().transpose() * w * a3;
  const auto g32 = a3.transpose() * w * pair.a2();
  const F& f = pair.field();
  for (const auto& s : chart_sample(f, pair.nvars(), samples, rng)) {
    if (f.is_zero(det(g13.eval(s))) || f.is_zero(det(g32.eval(s))))
      throw NotTransverse("auxiliary Lagrangian is not transverse", point_to_string(f, s));
  }
  auto d13 = poly_det(g13), d32 = poly_det(g32);
  auto q = poly_adjugate(g32.transpose()) * g12.transpose() * poly_adjugate(g13.transpose());
  q = q.scaled(d13 * d32);
  return {QuadraticFamily<F>(std::move(q), "cleared by (det G13 det G32)^2"), std::move(d13), std::move(d32)};
}

template <FieldType F>
struct PointQuad {
  Mat<F> q;
  typename F::value_type det13, det32;
  typename F::value_type weight;  // w1 w2 of the pair
};

template <FieldType F>
PointQuad<F> lag_to_quad_at(const PointPair<F>& pp, const Mat<F>& f3, const std::string& where = "") {
  const Mat<F> g12 = pp.gram();
  const Mat<F> g13 = pp.f1.transpose() * pp.omega * f3;
  const Mat<F> g32 = f3.transpose() * pp.omega * pp.f2;
  const F& f = pp.omega.field();
  const auto d13 = det(g13), d32 = det(g32);
  if (f.is_zero(d13) || f.is_zero(d32)) throw NotTransverse("auxiliary Lagrangian is not transverse", where);
  return {inverse(g32.transpose()) * g12.transpose() * inverse(g13.transpose()), d13, d32, f.mul(pp.w1, pp.w2)};
}

// Class relating det q_k to D: the two identifications of ker q with A1 ∩ A2
// differ by -1, so det q_k = (-1)^k det13^{-1} det32^{-1} D up to squares.
// D carries the frame weights, which q does not see.
template <FieldType F>
SquareClass lag_quad_correction(const F& f, std::size_t k, typename F::value_type det13,
                                typename F::value_type det32, typename F::value_type weight) {
  auto c = f.mul(f.mul(det13, det32), weight);
  if (k % 2 == 1) c = f.neg(c);
  return square_class(f, c);
}

// Signature of the converted form at corank k, corrected back to the pair.
template <FieldType F>
Signature corrected_quad_signature(const PointQuad<F>& pq, std::size_t k) {
  const F& f = pq.q.field();
  const auto a = assess_form(pq.q, k);
  if (a.signature == Signature::Ramified) return a.signature;
  return signature_from_class<F>(
      multiply_classes(a.signed_disc_class, lag_quad_correction(f, k, pq.det13, pq.det32, pq.weight)));
}

// A random constant Lagrangian, built one isotropic vector at a time.
template <FieldType F>
Mat<F> random_lagrangian(const SymplecticSpace<F>& space, Rng& rng) {
  const F& f = space.field();
  const std::size_t dim = space.dim();
  Mat<F> l(f, dim, 0);
  while (l.cols() < space.n()) {
    const Mat<F> perp = kernel(l.transpose() * space.omega);
    const Mat<F> v = perp * random_mat(f, perp.cols(), 1, rng);
    const Mat<F> trial = hcat(l, v);
    if (rank(trial) == trial.cols()) l = trial;
  }
  return l;
}

// Retries until the Lagrangian is transverse to both frames at the base point.
template <FieldType F>
Mat<F> random_transverse_lagrangian(const LagPair<F>& pair, const std::vector<typename F::value_type>& base, Rng& rng,
                                    std::size_t attempts = 100) {
  const auto pp = pair.at(base);
  const F& f = pair.field();
  for (std::size_t a = 0; a < attempts; ++a) {
    Mat<F> l = random_lagrangian(SymplecticSpace<F>(pp.omega), rng);
    if (!f.is_zero(det(pp.f1.transpose() * pp.omega * l)) && !f.is_zero(det(l.transpose() * pp.omega * pp.f2)))
      return l;
  }
  throw NotTransverse("no transverse Lagrangian found in " + std::to_string(attempts) + " attempts",
                      point_to_string(f, base));
}

}  // namespace atlas
