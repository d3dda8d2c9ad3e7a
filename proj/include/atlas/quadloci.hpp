#pragma once

// Degeneracy loci of families of quadratic forms and their double covers,
// evaluated pointwise on a chart.
//
// A family is an m x m symmetric matrix of polynomials in the chart
// variables. At a point s of corank k the form induces a nondegenerate form
// q_k on a complement of the kernel; the fiber of the canonical double cover
// over s is read off from the square class of its signed discriminant:
//
//   Split     (-1)^r det q_k is a nonzero square   (rank 2r; odd rank: det q_k)
//   Inert     it is a non-square
//   Ramified  the corank at s exceeds the queried k

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/field.hpp"
#include "atlas/mat.hpp"
#include "atlas/poly.hpp"
#include "atlas/rng.hpp"
#include "atlas/subspace.hpp"

namespace atlas {

enum class Signature { Split, Inert, Ramified };

inline const char* to_string(Signature s) {
  switch (s) {
    case Signature::Split: return "Split";
    case Signature::Inert: return "Inert";
    case Signature::Ramified: return "Ramified";
  }
  return "?";
}

template <FieldType F>
std::string point_to_string(const F& f, const std::vector<typename F::value_type>& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + f.to_string(x[i]);
  return s + ")";
}

template <FieldType F>
struct QuadraticFamily {
  std::size_t m = 0;
  std::size_t nvars = 0;
  PolyMatrix<F> gram;
  std::string twist_note;
  std::vector<PolyMatrix<F>> derivatives;  // d gram / d x_i

  QuadraticFamily(PolyMatrix<F> g, std::string note = "") : m(g.rows()), nvars(g.nvars()), gram(std::move(g)),
                                                             twist_note(std::move(note)) {
    if (m == 0) throw ShapeError("empty quadratic family");
    if (!gram.is_symmetric()) throw ShapeError("gram matrix of a quadratic family must be symmetric");
    for (std::size_t v = 0; v < nvars; ++v) {
      PolyMatrix<F> d(gram.field(), m, m, nvars);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) d(i, j) = gram(i, j).derivative(v);
      derivatives.push_back(std::move(d));
    }
  }

  const F& field() const { return gram.field(); }
  Mat<F> at(const std::vector<typename F::value_type>& s) const { return gram.eval(s); }
};

// The generic symmetric matrix: entry (i, j), i <= j, is its own variable, so
// the differential is an isomorphism onto Sym^2 at every point.
template <FieldType F>
QuadraticFamily<F> universal_family(const F& f, std::size_t m) {
  const std::size_t n = m * (m + 1) / 2;
  PolyMatrix<F> g(f, m, m, n);
  std::size_t v = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      g(i, j) = g(j, i) = MultiPoly<F>::variable(f, n, v++);
    }
  return QuadraticFamily<F>(std::move(g), "universal family");
}

template <FieldType F>
struct PointAssessment {
  using V = typename F::value_type;
  std::vector<V> point;
  std::size_t queried_k = 0;
  std::size_t corank = 0;
  Mat<F> kernel;      // m x corank
  Mat<F> complement;  // m x (m - corank), pivot unit vectors
  Mat<F> qk;          // restriction of the form to the complement
  SquareClass det_class = SquareClass::Zero;
  SquareClass signed_disc_class = SquareClass::Zero;
  Signature signature = Signature::Ramified;
};

// (-1)^r det for even size 2r, det for odd size.
template <FieldType F>
typename F::value_type signed_discriminant(const Mat<F>& q) {
  const F& f = q.field();
  auto d = det(q);
  if (q.rows() % 2 == 0 && (q.rows() / 2) % 2 == 1) d = f.neg(d);
  return d;
}

template <FieldType F>
Signature signature_from_class(SquareClass c) {
  return c == SquareClass::Square ? Signature::Split : Signature::Inert;
}

// Assess a single symmetric matrix as the value of a family at a point.
template <FieldType F>
PointAssessment<F> assess_form(const Mat<F>& q, std::size_t k, std::vector<typename F::value_type> point = {}) {
  if (!q.is_symmetric()) throw ShapeError("form must be symmetric");
  const F& f = q.field();
  const std::size_t m = q.rows();
  auto e = rref(q);
  const std::size_t rk = e.pivots.size();
  const std::size_t corank = m - rk;
  if (corank < k)
    throw NotOnStratum("corank " + std::to_string(corank) + " < " + std::to_string(k) +
                       (point.empty() ? std::string() : " at " + point_to_string(f, point)));
  PointAssessment<F> a{std::move(point), k, corank, rank_kernel(q).kernel, unit_columns(f, m, e.pivots),
                       submatrix(q, e.pivots, e.pivots)};
  a.det_class = square_class(f, det(a.qk));
  a.signed_disc_class = square_class(f, signed_discriminant(a.qk));
  a.signature = corank > k ? Signature::Ramified : signature_from_class<F>(a.signed_disc_class);
  return a;
}

template <FieldType F>
PointAssessment<F> assess_point(const QuadraticFamily<F>& qf, std::size_t k,
                                const std::vector<typename F::value_type>& s) {
  return assess_form(qf.at(s), k, s);
}

// Square class of det(W^T q W) for an arbitrary complement W of the kernel.
template <FieldType F>
SquareClass complement_det_class(const Mat<F>& q, const Mat<F>& w) {
  return square_class(q.field(), det(w.transpose() * q * w));
}

// ---------------------------------------------------------------------------
// Regularity

enum class RegularityPath { Auto, Shortcut, Enumerate };

namespace detail {

// Rank test for dq: T_s -> Sym^2(K^v); rows are directions, columns the pairs
// a <= b of kernel basis vectors.
template <FieldType F>
bool dq_surjective(const std::vector<Mat<F>>& dmats, const Mat<F>& kb) {
  const F& f = kb.field();
  const std::size_t d = kb.cols();
  const std::size_t target = d * (d + 1) / 2;
  if (target == 0) return true;
  if (dmats.size() < target) return false;
  Mat<F> dq(f, dmats.size(), target);
  const Mat<F> kt = kb.transpose();
  for (std::size_t i = 0; i < dmats.size(); ++i) {
    const Mat<F> r = kt * dmats[i] * kb;
    std::size_t c = 0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) dq(i, c++) = r(a, b);
  }
  return rank(dq) == target;
}

template <FieldType F>
std::vector<Mat<F>> eval_derivatives(const QuadraticFamily<F>& qf, const std::vector<typename F::value_type>& s) {
  std::vector<Mat<F>> out;
  for (const auto& d : qf.derivatives) out.push_back(d.eval(s));
  return out;
}

}  // namespace detail

template <FieldType F>
bool p_regular_at(const QuadraticFamily<F>& qf, std::size_t p, const std::vector<typename F::value_type>& s,
                  RegularityPath path = RegularityPath::Auto) {
  const Mat<F> q = qf.at(s);
  const auto rk = rank_kernel(q);
  const Mat<F>& ker = rk.kernel;
  const std::size_t corank = ker.cols();
  const auto dmats = detail::eval_derivatives(qf, s);
  if (path == RegularityPath::Auto) path = corank <= p ? RegularityPath::Shortcut : RegularityPath::Enumerate;
  if (path == RegularityPath::Shortcut) {
    if (corank > p) throw Unsupported("shortcut needs corank <= p");
    return detail::dq_surjective(dmats, ker);
  }
  if constexpr (FiniteFieldType<F>) {
    const F& f = qf.field();
    for (std::size_t d = 1; d <= std::min(p, corank); ++d) {
      SubspaceIndex index(f.size(), static_cast<unsigned>(corank), static_cast<unsigned>(d));
      for (std::uint64_t i = 0; i < index.size(); ++i) {
        const Mat<F> u = index.at(f, i);  // d x corank
        if (!detail::dq_surjective(dmats, ker * u.transpose())) return false;
      }
    }
    return true;
  } else {
    throw Unsupported("subspace enumeration over " + qf.field().name() + " (corank " + std::to_string(corank) +
                      " > p = " + std::to_string(p) + ")");
  }
}

template <FieldType F>
bool expected_smoothness_at(const QuadraticFamily<F>& qf, std::size_t k,
                            const std::vector<typename F::value_type>& s) {
  const auto rk = rank_kernel(qf.at(s));
  if (rk.kernel.cols() != k)
    throw NotOnOpenStratum("corank " + std::to_string(rk.kernel.cols()) + " != " + std::to_string(k) + " at " +
                           point_to_string(qf.field(), s));
  return detail::dq_surjective(detail::eval_derivatives(qf, s), rk.kernel);
}

// ---------------------------------------------------------------------------
// Veronese model: a rank-one form is the square of a linear form exactly when
// its nonzero diagonal values are squares.

template <FieldType F>
struct VeroneseRoot {
  std::optional<std::vector<typename F::value_type>> form;  // l with l l^T = q
  bool ramification = false;                                 // q = 0
};

template <FieldType F>
VeroneseRoot<F> veronese_square_root(const Mat<F>& q) {
  const F& f = q.field();
  if (!q.is_symmetric()) throw ShapeError("form must be symmetric");
  const std::size_t r = rank(q);
  if (r >= 2) throw NotRankOne("form has rank " + std::to_string(r));
  const std::size_t m = q.rows();
  if (r == 0) return {std::vector<typename F::value_type>(m, f.zero()), true};
  std::size_t j = 0;
  while (f.is_zero(q(j, j))) ++j;  // a rank-one symmetric form has a nonzero diagonal entry
  auto root = sqrt_of(f, q(j, j));
  if (!root) return {std::nullopt, false};
  const auto inv = f.inv(*root);
  std::vector<typename F::value_type> l(m);
  for (std::size_t i = 0; i < m; ++i) l[i] = f.mul(q(i, j), inv);
  return {std::move(l), false};
}

// ---------------------------------------------------------------------------
// Maximal isotropic subspaces and their two families

struct RulingReport {
  std::size_t r = 0;
  std::uint64_t total = 0;
  std::uint64_t family_sizes[2] = {0, 0};
  std::size_t families = 0;  // nonempty classes
  bool rational = false;     // both families have rational members
  std::uint64_t split_count = 0;  // prod_{i<r} (q^i + 1), the total when the form is hyperbolic
  std::uint64_t nodes = 0;
};

namespace detail {

template <FiniteFieldType F>
typename F::value_type bilinear(const F& f, const std::vector<typename F::value_type>& gx,
                                const typename F::value_type* y, std::size_t n) {
  auto acc = f.zero();
  for (std::size_t i = 0; i < n; ++i)
    if (!f.is_zero(y[i])) acc = f.add(acc, f.mul(gx[i], y[i]));
  return acc;
}

}  // namespace detail

// Visits every r-dimensional totally isotropic subspace of the form q (as an
// r x n RREF matrix). Rows are filled one at a time, pruning as soon as a row
// fails to be isotropic or orthogonal to the previous rows.
template <FiniteFieldType F, class Visit>
std::uint64_t for_each_isotropic(const Mat<F>& q, std::size_t r, std::uint64_t node_budget, Visit&& visit) {
  using V = typename F::value_type;
  const F& f = q.field();
  const std::size_t n = q.rows();
  std::uint64_t nodes = 0;
  std::vector<V> rows(r * n, f.zero());
  std::vector<std::vector<V>> grow(r, std::vector<V>(n));  // q * row_i
  std::vector<std::size_t> piv(r);
  for (std::size_t i = 0; i < r; ++i) piv[i] = i;

  for (;;) {
    std::vector<bool> is_piv(n, false);
    for (auto p : piv) is_piv[p] = true;
    std::vector<std::vector<std::size_t>> free(r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = piv[i] + 1; j < n; ++j)
        if (!is_piv[j]) free[i].push_back(j);

    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == r) {
        visit(Mat<F>(f, r, n, rows));
        return;
      }
      V* row = &rows[i * n];
      std::fill(row, row + n, f.zero());
      row[piv[i]] = f.one();
      const std::size_t nf = free[i].size();
      const std::uint64_t count = checked_pow(f.size(), static_cast<unsigned>(nf));
      for (std::uint64_t c = 0; c < count; ++c) {
        if (++nodes > node_budget) throw SizeError("isotropic enumeration exceeded node budget");
        std::uint64_t t = c;
        for (std::size_t a = nf; a-- > 0;) {
          row[free[i][a]] = f.element(t % f.size());
          t /= f.size();
        }
        for (std::size_t a = 0; a < n; ++a) {
          auto acc = f.zero();
          for (std::size_t b = 0; b < n; ++b)
            if (!f.is_zero(row[b])) acc = f.add(acc, f.mul(q(a, b), row[b]));
          grow[i][a] = acc;
        }
        if (!f.is_zero(detail::bilinear(f, grow[i], row, n))) continue;
        bool ok = true;
        for (std::size_t j = 0; j < i && ok; ++j)
          if (!f.is_zero(detail::bilinear(f, grow[j], row, n))) ok = false;
        if (ok) self(self, i + 1);
      }
      std::fill(row, row + n, f.zero());
    };
    rec(rec, 0);

    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(r) - 1;
    while (i >= 0 && piv[i] == n - r + static_cast<std::size_t>(i)) --i;
    if (i < 0) break;
    ++piv[i];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < r; ++j) piv[j] = piv[j - 1] + 1;
  }
  return nodes;
}

template <FiniteFieldType F>
RulingReport enumerate_isotropic_rulings(const Mat<F>& q, std::uint64_t node_budget = 50'000'000) {
  const F& f = q.field();
  if (!q.is_symmetric()) throw ShapeError("form must be symmetric");
  if (q.rows() % 2 != 0) throw ShapeError("ruling enumeration needs an even-size form");
  if (q.rows() > 8 || f.size() > 11)
    throw SizeError("ruling enumeration limited to size <= 8 over fields with <= 11 elements");
  if (rank(q) < q.rows()) throw Degenerate("form is degenerate");
  const std::size_t r = q.rows() / 2;
  RulingReport rep;
  rep.r = r;
  rep.split_count = 1;
  for (std::size_t i = 0; i < r; ++i) rep.split_count *= checked_pow(f.size(), static_cast<unsigned>(i)) + 1;
  std::optional<Mat<F>> l0;
  rep.nodes = for_each_isotropic(q, r, node_budget, [&](const Mat<F>& l) {
    ++rep.total;
    if (!l0) {
      l0 = l;
      ++rep.family_sizes[0];
      return;
    }
    const std::size_t meet = 2 * r - rank(vcat(*l0, l));
    ++rep.family_sizes[(meet % 2 == r % 2) ? 0 : 1];
  });
  rep.families = (rep.family_sizes[0] > 0) + (rep.family_sizes[1] > 0);
  rep.rational = rep.families == 2;
  return rep;
}

// ---------------------------------------------------------------------------
// Witt decomposition: split off hyperbolic planes until at most two
// dimensions remain. A nondegenerate even-size form is hyperbolic (both
// rulings rational) iff the remainder is zero or itself a hyperbolic plane.

template <FiniteFieldType F>
struct WittResult {
  std::size_t hyperbolic_planes = 0;
  Mat<F> anisotropic_part;  // the remainder, size <= 2
};

template <FiniteFieldType F>
WittResult<F> witt_reduce(Mat<F> q, Rng& rng) {
  const F& f = q.field();
  if (!q.is_symmetric()) throw ShapeError("form must be symmetric");
  if (rank(q) < q.rows()) throw Degenerate("form is degenerate");
  WittResult<F> out{0, q};
  while (q.rows() > 2) {
    const std::size_t n = q.rows();
    // a random vector is isotropic with probability about 1/|F|
    Mat<F> v(f, n, 1);
    bool found = false;
    for (std::uint64_t tries = 0; tries < 100 * f.size() + 10000 && !found; ++tries) {
      v = random_mat(f, n, 1, rng);
      if (v.is_zero()) continue;
      found = f.is_zero((v.transpose() * q * v)(0, 0));
    }
    if (!found) throw Degenerate("no isotropic vector found for a form of size " + std::to_string(n));
    const Mat<F> qv = q * v;
    std::size_t j = 0;
    while (f.is_zero(qv(j, 0))) ++j;
    Mat<F> h = hcat(v, unit_columns(f, n, {j}));
    Mat<F> perp = kernel(h.transpose() * q);  // n x (n - 2)
    q = perp.transpose() * q * perp;
    ++out.hyperbolic_planes;
  }
  out.anisotropic_part = q;
  return out;
}

template <FiniteFieldType F>
Signature witt_signature(const Mat<F>& q, Rng& rng) {
  if (q.rows() % 2 != 0) throw ShapeError("Witt signature needs an even-size form");
  const auto w = witt_reduce(q, rng);
  const Mat<F>& a = w.anisotropic_part;
  if (a.rows() == 0) return Signature::Split;
  // scan the q + 1 points of the projective line for an isotropic one
  const F& f = a.field();
  if (f.is_zero(a(1, 1))) return Signature::Split;
  for (std::uint64_t i = 0; i < f.size(); ++i) {
    const auto t = f.element(i);
    const auto val = f.add(a(0, 0), f.add(f.mul(f.from_int(2), f.mul(a(0, 1), t)), f.mul(a(1, 1), f.mul(t, t))));
    if (f.is_zero(val)) return Signature::Split;
  }
  return Signature::Inert;
}

// Odd-size forms (size 2r + 1) are compared through q + <(-1)^{r+1}>, whose
// signed discriminant equals det q.
template <FieldType F>
Mat<F> augment_to_even(const Mat<F>& q) {
  const F& f = q.field();
  if (q.rows() % 2 == 0) throw ShapeError("form already has even size");
  Mat<F> out(f, q.rows() + 1, q.cols() + 1);
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) out(i, j) = q(i, j);
  const std::size_t r = q.rows() / 2;
  out(q.rows(), q.cols()) = r % 2 == 0 ? f.neg(f.one()) : f.one();
  return out;
}

// ---------------------------------------------------------------------------

inline long long hilbert_dim_formula(long long dim_s, long long m, long long d) {
  if (d < 1 || d > m) throw ShapeError("need 1 <= d <= m");
  return dim_s + d * (m - d) - d * (d + 1) / 2;
}

// The family t_0 M_0 + ... + t_w M_w on the chart t_0 = 1, in the variables
// t_1..t_w.
template <FieldType F>
QuadraticFamily<F> symmetroid_family(const std::vector<Mat<F>>& mats) {
  if (mats.size() < 2) throw ShapeError("a symmetroid needs at least two matrices");
  const std::size_t m = mats[0].rows();
  if (m % 2 == 0) throw EvenSizeNotSupported("symmetroid matrices must have odd size, got " + std::to_string(m));
  const F& f = mats[0].field();
  const std::size_t nv = mats.size() - 1;
  PolyMatrix<F> g = PolyMatrix<F>::constant(mats[0], nv);
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (mats[i].rows() != m || mats[i].cols() != m) throw ShapeError("symmetroid matrices differ in size");
    if (!mats[i].is_symmetric()) throw ShapeError("symmetroid matrices must be symmetric");
    if (i == 0) continue;
    g = g + PolyMatrix<F>::constant(mats[i], nv).scaled(MultiPoly<F>::variable(f, nv, i - 1));
  }
  return QuadraticFamily<F>(std::move(g), "symmetroid chart t0 = 1");
}

}  // namespace atlas
