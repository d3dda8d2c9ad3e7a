#pragma once

// Lagrangian subspaces A ⊂ ∧^3 V6 and their three degeneracy families.
//
//   Y      v in P(V6):       dim A ∩ (v ∧ ∧^2 V6)
//   Ydual  f in P(V6^∨):     dim A ∩ ∧^3 ker f
//   Z      U in Gr(3, V6):   dim A ∩ (V6 ∧ ∧^2 U)
//
// Each fiber space is a Lagrangian of ∧^3 V6, so the corank at a datum is
// 10 - rank(A^T B F) for a frame F of the fiber space.
//
// Chart frames:
//   Y at v, chart c (v_c != 0):   v ∧ e_j ∧ e_k, j < k, j, k != c
//   Ydual at f, chart c:          u_i ∧ u_j ∧ u_k, u_i = e_i - (f_i / f_c) e_c
//   Z at rows u1, u2, u3:         u1 ∧ u2 ∧ u3, then e_b ∧ u_i ∧ u_j for the
//                                 non-pivot b in increasing order and
//                                 (i, j) = (1, 2), (1, 3), (2, 3)
// The Z frame carries the weight det [u1; u2; u3; e_b...], which makes its
// class independent of the rows and the complement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/exterior.hpp"
#include "atlas/field.hpp"
#include "atlas/groebner.hpp"
#include "atlas/interpolate.hpp"
#include "atlas/lagloci.hpp"
#include "atlas/mat.hpp"
#include "atlas/poly.hpp"
#include "atlas/quadloci.hpp"
#include "atlas/rng.hpp"
#include "atlas/subspace.hpp"

namespace atlas {

enum class Flavor { Y, Ydual, Z };

inline const char* to_string(Flavor fl) {
  switch (fl) {
    case Flavor::Y: return "Y";
    case Flavor::Ydual: return "Ydual";
    case Flavor::Z: return "Z";
  }
  return "?";
}

inline const char* space_name(Flavor fl) {
  switch (fl) {
    case Flavor::Y: return "P5";
    case Flavor::Ydual: return "P5dual";
    case Flavor::Z: return "Gr36";
  }
  return "?";
}

inline Flavor parse_flavor(const std::string& s) {
  if (s == "y" || s == "Y") return Flavor::Y;
  if (s == "ydual" || s == "Ydual" || s == "y-dual") return Flavor::Ydual;
  if (s == "z" || s == "Z") return Flavor::Z;
  throw ShapeError("unknown flavor '" + s + "'");
}

inline unsigned datum_rows(Flavor fl) { return fl == Flavor::Z ? 3 : 1; }

// ---------------------------------------------------------------------------
// Lagrangians

template <FieldType F>
struct EpwLagrangian {
  Mat<F> basis;  // 20 x 10
  std::string provenance;
};

// Indices of e_S with 0 in S, in lexicographic order.
inline std::vector<std::size_t> coordinate_lagrangian_indices() {
  std::vector<std::size_t> out;
  const auto& b = wedge3_basis();
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.mask(i) & 1u) out.push_back(i);
  return out;
}

template <FieldType F>
bool is_epw_lagrangian(const Mat<F>& basis) {
  if (basis.rows() != 20 || basis.cols() != 10) return false;
  if (rank(basis) != 10) return false;
  return (basis.transpose() * wedge3_form(basis.field()) * basis).is_zero();
}

template <FieldType F>
EpwLagrangian<F> explicit_lagrangian(Mat<F> basis) {
  if (!is_epw_lagrangian(basis)) throw NotLagrangian("explicit subspace is not a Lagrangian of the wedge pairing");
  return {std::move(basis), "explicit"};
}

// A = {x + M x}: column j is λ_j + sum_i sign_i M_ij μ_i with λ_j = e_{S_j},
// μ_i = e_{S_i^c}, sign_i = B(λ_i, μ_i).
template <FieldType F>
EpwLagrangian<F> graph_of_symmetric(const Mat<F>& m, std::string provenance = "graph") {
  if (m.rows() != 10 || m.cols() != 10 || !m.is_symmetric()) throw ShapeError("graph needs a symmetric 10 x 10 matrix");
  const F& f = m.field();
  const auto& b = wedge3_basis();
  const auto lam = coordinate_lagrangian_indices();
  Mat<F> basis(f, 20, 10);
  for (std::size_t i = 0; i < 10; ++i) {
    const unsigned s = b.mask(lam[i]), t = 0x3Fu & ~s;
    const auto mu = static_cast<std::size_t>(b.index(t));
    const bool neg = shuffle_sign(s, t) < 0;
    basis(lam[i], i) = f.one();
    for (std::size_t j = 0; j < 10; ++j) basis(mu, j) = neg ? f.neg(m(i, j)) : m(i, j);
  }
  return {std::move(basis), std::move(provenance)};
}

template <FieldType F, class R>
EpwLagrangian<F> random_graph_lagrangian(const F& f, R& rng, std::uint64_t seed) {
  return graph_of_symmetric(random_symmetric(f, 10, rng), "graph(seed=" + std::to_string(seed) + ")");
}

template <FieldType F>
EpwLagrangian<F> random_graph_lagrangian(const F& f, std::uint64_t seed) {
  Rng rng(seed);
  return random_graph_lagrangian(f, rng, seed);
}

// Annihilator of A in ∧^3 V6^∨, written in the dual basis e^S.
template <FieldType F>
EpwLagrangian<F> perp(const EpwLagrangian<F>& a) {
  return {wedge3_form(a.basis.field()) * a.basis, "perp(" + a.provenance + ")"};
}

template <FieldType F>
bool same_subspace(const Mat<F>& a, const Mat<F>& b) {
  const std::size_t ra = rank(a);
  return ra == rank(b) && rank(hcat(a, b)) == ra;
}

// ---------------------------------------------------------------------------
// Fiber spaces

template <FieldType F>
struct FiberFrame {
  Mat<F> frame;  // 20 x 10
  typename F::value_type weight;
  std::vector<std::size_t> chart;
};

namespace detail {

template <FieldType F>
std::vector<typename F::value_type> row_of(const Mat<F>& m, std::size_t i) {
  std::vector<typename F::value_type> r(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) r[j] = m(i, j);
  return r;
}

template <FieldType F>
void set_column(Mat<F>& m, std::size_t j, const std::vector<typename F::value_type>& col) {
  for (std::size_t i = 0; i < col.size(); ++i) m(i, j) = col[i];
}

template <FieldType F>
std::size_t choose_chart(const std::vector<typename F::value_type>& v, const F& f, std::optional<std::size_t> chart) {
  if (chart) {
    if (*chart >= kSixDim || f.is_zero(v[*chart])) throw Degenerate("datum vanishes on the requested chart");
    return *chart;
  }
  for (std::size_t i = 0; i < kSixDim; ++i)
    if (!f.is_zero(v[i])) return i;
  throw Degenerate("datum is zero");
}

}  // namespace detail

template <FieldType F>
std::string datum_to_string(const Mat<F>& datum) {
  if (datum.rows() == 1) return point_to_string(datum.field(), detail::row_of(datum, 0));
  std::string out = "[";
  for (std::size_t i = 0; i < datum.rows(); ++i) {
    if (i) out += ",";
    out += point_to_string(datum.field(), detail::row_of(datum, i));
  }
  return out + "]";
}

// datum: 1 x 6 (Y, Ydual) or 3 x 6 (Z). For Z the chart is a pivot triple.
template <FieldType F>
FiberFrame<F> fiber_space(Flavor fl, const Mat<F>& datum, std::optional<std::vector<std::size_t>> chart = {}) {
  const F& f = datum.field();
  if (datum.rows() != datum_rows(fl) || datum.cols() != kSixDim)
    throw ShapeError(std::string("datum for ") + to_string(fl) + " must be " + std::to_string(datum_rows(fl)) +
                     " x 6");
  Mat<F> frame(f, 20, 10);
  std::size_t col = 0;
  if (fl == Flavor::Y) {
    const auto v = detail::row_of(datum, 0);
    const auto c = detail::choose_chart(v, f, chart ? std::optional<std::size_t>(chart->at(0)) : std::nullopt);
    for (unsigned j = 0; j < kSixDim; ++j)
      for (unsigned k = j + 1; k < kSixDim; ++k)
        if (j != c && k != c) detail::set_column(frame, col++, wedge3(f, v, unit6(f, j), unit6(f, k)));
    return {std::move(frame), f.one(), {c}};
  }
  if (fl == Flavor::Ydual) {
    const auto fv = detail::row_of(datum, 0);
    const auto c = detail::choose_chart(fv, f, chart ? std::optional<std::size_t>(chart->at(0)) : std::nullopt);
    const auto inv = f.inv(fv[c]);
    std::vector<std::vector<typename F::value_type>> u;
    for (unsigned i = 0; i < kSixDim; ++i) {
      if (i == c) continue;
      auto e = unit6(f, i);
      e[c] = f.neg(f.mul(fv[i], inv));
      u.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j)
        for (std::size_t k = j + 1; k < 5; ++k) detail::set_column(frame, col++, wedge3(f, u[i], u[j], u[k]));
    return {std::move(frame), f.one(), {c}};
  }
  // Z
  std::vector<std::size_t> piv;
  if (chart) {
    piv = *chart;
    if (piv.size() != 3 || f.is_zero(det(select_columns(datum, piv))))
      throw Degenerate("datum is not a graph over the requested chart");
  } else {
    piv = rref(datum).pivots;
    if (piv.size() != 3) throw Degenerate("datum does not span a 3-space");
  }
  std::vector<std::vector<typename F::value_type>> u{detail::row_of(datum, 0), detail::row_of(datum, 1),
                                                     detail::row_of(datum, 2)};
  detail::set_column(frame, col++, wedge3(f, u[0], u[1], u[2]));
  Mat<F> full(f, kSixDim, kSixDim);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < kSixDim; ++j) full(i, j) = datum(i, j);
  std::size_t extra = 3;
  for (unsigned b = 0; b < kSixDim; ++b) {
    if (std::find(piv.begin(), piv.end(), b) != piv.end()) continue;
    const auto e = unit6(f, b);
    full(extra++, b) = f.one();
    detail::set_column(frame, col++, wedge3(f, e, u[0], u[1]));
    detail::set_column(frame, col++, wedge3(f, e, u[0], u[2]));
    detail::set_column(frame, col++, wedge3(f, e, u[1], u[2]));
  }
  return {std::move(frame), det(full), piv};
}

// ---------------------------------------------------------------------------
// Corank

template <FieldType F>
class EpwContext {
 public:
  using V = typename F::value_type;

  explicit EpwContext(EpwLagrangian<F> a)
      : a_(std::move(a)), b_(wedge3_form(a_.basis.field())), ab_(a_.basis.transpose() * b_) {}

  const F& field() const { return a_.basis.field(); }
  const EpwLagrangian<F>& lagrangian() const { return a_; }
  const Mat<F>& form() const { return b_; }

  // 10 x 10 pairing of A against a frame.
  Mat<F> pairing(const Mat<F>& frame) const { return ab_ * frame; }

  std::size_t corank(Flavor fl, const Mat<F>& datum) const { return 10 - rank(pairing(fiber_space(fl, datum).frame)); }

  PointPair<F> point_pair(const FiberFrame<F>& ff) const {
    return PointPair<F>{b_, a_.basis, ff.frame, field().one(), ff.weight};
  }

 private:
  EpwLagrangian<F> a_;
  Mat<F> b_;
  Mat<F> ab_;
};

template <FieldType F>
std::size_t epw_corank_at(const EpwLagrangian<F>& a, Flavor fl, const Mat<F>& datum) {
  return EpwContext<F>(a).corank(fl, datum);
}

template <FieldType F>
Mat<F> point_datum(const F& f, const std::vector<typename F::value_type>& v) {
  if (v.size() != kSixDim) throw ShapeError("points of P5 have 6 coordinates");
  return Mat<F>(f, 1, kSixDim, v);
}

// ---------------------------------------------------------------------------
// Decomposable vectors

template <FieldType F>
struct ScreenReport {
  std::uint64_t points = 0;
  std::uint64_t flagged = 0;
  std::vector<std::vector<typename F::value_type>> witnesses;  // coefficients on the A basis, first few
};

inline unsigned thread_count() {
  if (const char* env = std::getenv("DEGENERACY_ATLAS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(begin, end, slot) over `chunks` contiguous ranges of [0, total).
inline void parallel_chunks(std::uint64_t total, unsigned threads, std::size_t chunks,
                            const std::function<void(std::uint64_t, std::uint64_t, std::size_t)>& body) {
  if (chunks == 0) return;
  auto range = [&](std::size_t c) {
    return std::pair<std::uint64_t, std::uint64_t>{total * c / chunks, total * (c + 1) / chunks};
  };
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(range(c).first, range(c).second, c);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t c = t; c < chunks; c += threads) body(range(c).first, range(c).second, c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

template <FiniteFieldType F>
ScreenReport<F> decomposable_screen(const EpwLagrangian<F>& a, std::uint64_t budget, unsigned threads = thread_count(),
                                    std::size_t max_witnesses = 10) {
  const F& f = a.basis.field();
  const SubspaceIndex index(f.size(), 10, 1);
  if (index.size() > budget)
    throw SizeError("screen needs " + std::to_string(index.size()) + " points, budget " + std::to_string(budget));
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::uint64_t>(index.size(), 64));
  std::vector<ScreenReport<F>> parts(chunks);
  parallel_chunks(index.size(), threads, chunks, [&](std::uint64_t lo, std::uint64_t hi, std::size_t slot) {
    auto& part = parts[slot];
    std::vector<typename F::value_type> x;
    std::vector<typename F::value_type> omega(20);
    for (std::uint64_t i = lo; i < hi; ++i) {
      index.decode(f, i, x);
      for (std::size_t r = 0; r < 20; ++r) {
        auto acc = f.zero();
        for (std::size_t c = 0; c < 10; ++c) acc = f.add(acc, f.mul(a.basis(r, c), x[c]));
        omega[r] = acc;
      }
      ++part.points;
      if (is_decomposable(f, omega)) {
        ++part.flagged;
        if (part.witnesses.size() < max_witnesses) part.witnesses.push_back(x);
      }
    }
  });
  ScreenReport<F> out;
  for (auto& p : parts) {
    out.points += p.points;
    out.flagged += p.flagged;
    for (auto& w : p.witnesses)
      if (out.witnesses.size() < max_witnesses) out.witnesses.push_back(std::move(w));
  }
  return out;
}

// P(A) over F_{p^r}: A is lifted along the prime subfield.
inline ScreenReport<ExtField> decomposable_screen_over(const EpwLagrangian<PrimeField>& a, unsigned r, std::uint64_t budget,
                                                       unsigned threads = thread_count(), std::size_t max_witnesses = 10) {
  const ExtField e(a.basis.field().size(), r);
  Mat<ExtField> lifted(e, 20, 10);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 10; ++j) lifted(i, j) = e.from_int(static_cast<long long>(a.basis(i, j)));
  return decomposable_screen(EpwLagrangian<ExtField>{std::move(lifted), a.provenance}, budget, threads, max_witnesses);
}

// Quadratic Pluecker relations of Gr(3,6) in the ∧³ basis, as
// sum_t (-1)^t p(I ∪ j_t) p(J \ j_t) over |I| = 2, |J| = 4.
struct PlueckerTerm {
  std::size_t a, b;
  int sign;
};

inline const std::vector<std::vector<PlueckerTerm>>& pluecker_relations() {
  static const std::vector<std::vector<PlueckerTerm>> rel = [] {
    std::vector<std::vector<PlueckerTerm>> out;
    const auto& w2 = wedge2_basis();
    const auto& w3 = wedge3_basis();
    const auto& w4 = wedge4_basis();
    for (std::size_t i = 0; i < w2.size(); ++i)
      for (std::size_t j = 0; j < w4.size(); ++j) {
        const unsigned im = w2.mask(i), jm = w4.mask(j);
        std::vector<PlueckerTerm> terms;
        int t = 0;
        for (unsigned x : mask_elements(jm)) {
          ++t;
          const unsigned bit = 1u << x;
          if (im & bit) continue;
          const int sign = (t % 2 ? -1 : 1) * shuffle_sign(im, bit);
          terms.push_back({static_cast<std::size_t>(w3.index(im | bit)), static_cast<std::size_t>(w3.index(jm & ~bit)), sign});
        }
        if (!terms.empty()) out.push_back(std::move(terms));
      }
    return out;
  }();
  return rel;
}

struct GeometricScreen {
  bool empty = false;                    // P(A) ∩ Gr(3,6) = ∅ over the algebraic closure
  std::optional<std::size_t> chart;      // first chart y_c = 1 carrying a solution
  std::size_t reductions = 0;
};

// Pluecker quadrics restricted to P(A), one Groebner basis per standard chart
// {y_c = 1, y_j = 0 for j < c}.
template <FieldType F>
GeometricScreen geometric_decomposable_screen(const EpwLagrangian<F>& a, std::size_t budget) {
  using P = MultiPoly<F>;
  const F& f = a.basis.field();
  GeometricScreen out;
  for (std::size_t c = 0; c < 10; ++c) {
    const std::size_t nv = 9 - c;
    std::vector<P> coord;
    for (std::size_t r = 0; r < 20; ++r) {
      P acc = P::constant(f, nv, a.basis(r, c));
      for (std::size_t j = c + 1; j < 10; ++j) acc = acc + P::variable(f, nv, j - c - 1).scaled(a.basis(r, j));
      coord.push_back(std::move(acc));
    }
    std::vector<P> gens;
    for (const auto& rel : pluecker_relations()) {
      P q = P::constant(f, nv, f.zero());
      for (const auto& t : rel) {
        const P m = coord[t.a] * coord[t.b];
        q = t.sign > 0 ? q + m : q - m;
      }
      if (!q.is_zero()) gens.push_back(std::move(q));
    }
    bool found;
    if (gens.empty()) {
      found = true;
    } else if (nv == 0) {
      found = false;  // a nonzero constant
    } else {
      try {
        const auto res = groebner_zero_dim_degree(gens, budget);
        out.reductions += res.reductions;
        found = res.degree > 0;
      } catch (const NotZeroDimensional&) {
        found = true;
      }
    }
    if (found) {
      out.chart = c;
      return out;
    }
  }
  out.empty = true;
  return out;
}

// ---------------------------------------------------------------------------
// Slices of the Y strata

// Calls visit with every increasing k-subset of {0, ..., n - 1}.
template <class Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    visit(static_cast<const std::vector<std::size_t>&>(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::size_t y_stratum_dimension(std::size_t k) {
  if (k < 1 || k > 3) throw ShapeError("Y strata are indexed by corank 1, 2 or 3");
  return 4 - 2 * (k - 1);
}

// The (11 - k)-minors of the Y pairing on a random affine slice of the chart
// v0 = 1 of complementary dimension, so that Y^{>=k} meets it in finitely many
// points.
template <FieldType F, class R>
std::vector<MultiPoly<F>> y_stratum_slice(const EpwLagrangian<F>& a, std::size_t k, R& rng) {
  using P = MultiPoly<F>;
  const F& f = a.basis.field();
  const std::size_t nv = 5 - y_stratum_dimension(k);
  std::vector<P> v(kSixDim, P::constant(f, nv, f.zero()));
  v[0] = P::constant(f, nv, f.one());
  for (std::size_t i = 1; i < kSixDim; ++i) {
    v[i] = P::constant(f, nv, random_element(f, rng));
    for (std::size_t j = 0; j < nv; ++j) v[i] = v[i] + P::variable(f, nv, j).scaled(random_element(f, rng));
  }
  // v ∧ e_i ∧ e_j, 1 <= i < j, frames v ∧ ∧^2 V6 while v0 = 1
  PolyMatrix<F> frame(f, 20, 10, nv);
  std::size_t col = 0;
  for (unsigned i = 1; i < kSixDim; ++i)
    for (unsigned j = i + 1; j < kSixDim; ++j, ++col)
      for (unsigned l = 0; l < kSixDim; ++l) {
        const auto w = wedge3(f, unit6(f, l), unit6(f, i), unit6(f, j));
        for (std::size_t r = 0; r < 20; ++r)
          if (!f.is_zero(w[r])) frame(r, col) = frame(r, col) + v[l].scaled(w[r]);
      }
  const PolyMatrix<F> m = PolyMatrix<F>::constant(a.basis.transpose() * wedge3_form(f), nv) * frame;
  const std::size_t size = 11 - k;
  std::vector<P> out;
  for_each_subset(10, size, [&](const std::vector<std::size_t>& rows) {
    for_each_subset(10, size, [&](const std::vector<std::size_t>& cols) {
      PolyMatrix<F> sub(f, size, size, nv);
      for (std::size_t r = 0; r < size; ++r)
        for (std::size_t c = 0; c < size; ++c) sub(r, c) = m(rows[r], cols[c]);
      auto d = poly_det(sub);
      if (!d.is_zero()) out.push_back(std::move(d));
    });
  });
  return out;
}

struct StratumDegree {
  std::size_t corank = 0, slice_dimension = 0, generators = 0;
  std::optional<GroebnerResult> groebner;  // empty when the budget ran out
};

template <FieldType F, class R>
StratumDegree y_stratum_degree(const EpwLagrangian<F>& a, std::size_t k, R& rng, std::size_t budget) {
  const auto gens = y_stratum_slice(a, k, rng);
  StratumDegree out{k, 5 - y_stratum_dimension(k), gens.size(), std::nullopt};
  try {
    out.groebner = groebner_zero_dim_degree(gens, budget);
  } catch (const BudgetExceeded&) {
  }
  return out;
}

// ---------------------------------------------------------------------------
// Census

template <FieldType F>
struct CensusReport {
  Flavor flavor = Flavor::Y;
  std::uint64_t q = 0;
  std::vector<std::uint64_t> histogram = std::vector<std::uint64_t>(11, 0);
  std::uint64_t total = 0;
  std::size_t max_corank = 0;
  // lowest-index datum attaining each corank
  std::vector<std::optional<std::pair<std::uint64_t, Mat<F>>>> witnesses =
      std::vector<std::optional<std::pair<std::uint64_t, Mat<F>>>>(11);

  std::uint64_t at_least(std::size_t k) const {
    std::uint64_t s = 0;
    for (std::size_t i = k; i < histogram.size(); ++i) s += histogram[i];
    return s;
  }
};

inline std::uint64_t census_space_size(Flavor fl, std::uint64_t q) {
  return gaussian_binomial(q, kSixDim, datum_rows(fl));
}

template <FiniteFieldType F>
CensusReport<F> census(const EpwLagrangian<F>& a, Flavor fl, std::uint64_t budget, unsigned threads = thread_count()) {
  const F& f = a.basis.field();
  const SubspaceIndex index(f.size(), kSixDim, datum_rows(fl));
  if (index.size() > budget)
    throw SizeError("census needs " + std::to_string(index.size()) + " points, budget " + std::to_string(budget));
  const EpwContext<F> ctx(a);
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::uint64_t>(index.size(), 256));
  std::vector<CensusReport<F>> parts(chunks);
  parallel_chunks(index.size(), threads, chunks, [&](std::uint64_t lo, std::uint64_t hi, std::size_t slot) {
    auto& part = parts[slot];
    for (std::uint64_t i = lo; i < hi; ++i) {
      const Mat<F> datum = index.at(f, i);
      const std::size_t k = ctx.corank(fl, datum);
      ++part.histogram[k];
      if (!part.witnesses[k]) part.witnesses[k] = std::pair<std::uint64_t, Mat<F>>{i, datum};
    }
  });
  CensusReport<F> out;
  out.flavor = fl;
  out.q = f.size();
  for (auto& p : parts) {
    for (std::size_t k = 0; k < 11; ++k) {
      out.histogram[k] += p.histogram[k];
      if (p.witnesses[k] && (!out.witnesses[k] || p.witnesses[k]->first < out.witnesses[k]->first))
        out.witnesses[k] = std::move(p.witnesses[k]);
    }
  }
  for (std::size_t k = 0; k < 11; ++k) {
    out.total += out.histogram[k];
    if (out.histogram[k] > 0) out.max_corank = k;
  }
  return out;
}

// Least-squares slope of log(count) against log(q).
inline double loglog_slope(const std::vector<std::pair<double, double>>& q_count) {
  if (q_count.size() < 2) throw ShapeError("slope needs at least two fields");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [q, c] : q_count) {
    if (c <= 0) throw ShapeError("slope needs positive counts");
    const double x = std::log(q), y = std::log(c);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(q_count.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Chart determinants

// Y chart v = (1, x1, ..., x5); Z chart U = rowspace [I3 | X], X row-major.
template <FieldType F>
Mat<F> chart_datum(Flavor fl, const std::vector<typename F::value_type>& x, const F& f) {
  if (fl == Flavor::Y || fl == Flavor::Ydual) {
    if (x.size() != 5) throw ShapeError("the P5 chart has 5 coordinates");
    Mat<F> d(f, 1, kSixDim);
    d(0, 0) = f.one();
    for (std::size_t i = 0; i < 5; ++i) d(0, i + 1) = x[i];
    return d;
  }
  if (x.size() != 9) throw ShapeError("the Gr(3,6) chart has 9 coordinates");
  Mat<F> d(f, 3, kSixDim);
  for (std::size_t i = 0; i < 3; ++i) {
    d(i, i) = f.one();
    for (std::size_t j = 0; j < 3; ++j) d(i, 3 + j) = x[3 * i + j];
  }
  return d;
}

inline std::size_t chart_nvars(Flavor fl) { return fl == Flavor::Z ? 9 : 5; }

inline unsigned claimed_degree(Flavor fl) { return fl == Flavor::Z ? 4 : 6; }

template <FieldType F>
typename F::value_type chart_value(const EpwContext<F>& ctx, Flavor fl, const std::vector<typename F::value_type>& x) {
  const F& f = ctx.field();
  const std::vector<std::size_t> chart = fl == Flavor::Z ? std::vector<std::size_t>{0, 1, 2} : std::vector<std::size_t>{0};
  const auto ff = fiber_space(fl, chart_datum(fl, x, f), chart);
  return det(ctx.pairing(ff.frame));
}

template <FieldType F>
struct ChartDeterminant {
  MultiPoly<F> poly;
  std::size_t degree = 0;
  std::size_t grid_points = 0;
  std::size_t verified_points = 0;
};

template <FieldType F, class R>
ChartDeterminant<F> chart_determinant(const EpwLagrangian<F>& a, Flavor fl, R& rng, unsigned bound = 0,
                                      std::size_t fresh_checks = 1000) {
  if (fl == Flavor::Ydual) throw Unsupported("chart determinants are built for Y and Z");
  if (bound == 0) bound = claimed_degree(fl);
  const EpwContext<F> ctx(a);
  auto res = interpolate<F>(ctx.field(), chart_nvars(fl), bound,
                            [&](const std::vector<typename F::value_type>& x) { return chart_value(ctx, fl, x); },
                            rng, fresh_checks);
  ChartDeterminant<F> out{res.poly, 0, res.grid_points, res.verified_points};
  out.degree = res.poly.is_zero() ? 0 : res.poly.degree();
  return out;
}

// Degree of the chart determinant along lines x0 + t d of the chart.
// Schubert lines move one row of X only, so the Plücker coordinates are
// affine in t and the degree is that of the hypersurface in the Plücker
// embedding; general lines give the total degree of the chart polynomial.
template <FieldType F, class R>
std::size_t chart_line_degree(const EpwContext<F>& ctx, Flavor fl, bool schubert, R& rng) {
  const F& f = ctx.field();
  const std::size_t nv = chart_nvars(fl);
  std::vector<typename F::value_type> x0(nv), d(nv, f.zero());
  for (auto& xi : x0) xi = random_element(f, rng);
  if (schubert && fl == Flavor::Z) {
    const std::size_t row = rng.below(3);
    for (std::size_t j = 0; j < 3; ++j) d[3 * row + j] = random_element(f, rng);
  } else {
    for (auto& di : d) di = random_element(f, rng);
  }
  const unsigned bound = fl == Flavor::Z ? 21 : 10;  // naive bounds from the frame degrees
  auto res = interpolate<F>(
      f, 1, bound,
      [&](const std::vector<typename F::value_type>& t) {
        std::vector<typename F::value_type> x(nv);
        for (std::size_t i = 0; i < nv; ++i) x[i] = f.add(x0[i], f.mul(t[0], d[i]));
        return chart_value(ctx, fl, x);
      },
      rng, 20);
  return res.poly.is_zero() ? 0 : res.poly.degree();
}

// ---------------------------------------------------------------------------
// Cover signatures

template <FieldType F>
Signature epw_fiber_signature(const EpwLagrangian<F>& a, Flavor fl, const Mat<F>& datum, std::size_t k,
                              std::optional<std::vector<std::size_t>> chart = {}) {
  const EpwContext<F> ctx(a);
  const auto ff = fiber_space(fl, datum, std::move(chart));
  return lag_signature_at(ctx.point_pair(ff), k, datum_to_string(datum));
}

// ---------------------------------------------------------------------------
// First quadratic fibration

template <FieldType F>
struct FibrationPoint {
  PointAssessment<F> assessment;  // the reduced form of size 4 - l
  std::size_t ell = 0;            // dim A ∩ ∧^3 V5
  SquareClass correction = SquareClass::Zero;
  Signature signature = Signature::Ramified;  // corrected back to the pair (A, Y fiber)
};

// A ∩ ∧^3 V5 for V5 = ker f.
template <FieldType F>
Mat<F> hyperplane_intersection(const EpwLagrangian<F>& a, const Mat<F>& f5) {
  return intersect_columns(a.basis, fiber_space(Flavor::Ydual, f5).frame);
}

template <FieldType F>
FibrationPoint<F> first_quadratic_fibration_at(const EpwLagrangian<F>& a, const Mat<F>& f5, const Mat<F>& v) {
  const F& f = a.basis.field();
  const std::string where = datum_to_string(v);
  if (v.rows() != 1 || v.cols() != kSixDim || f5.rows() != 1 || f5.cols() != kSixDim)
    throw ShapeError("v and the hyperplane functional are 1 x 6");
  auto fv = f.zero();
  for (std::size_t i = 0; i < kSixDim; ++i) fv = f.add(fv, f.mul(f5(0, i), v(0, i)));
  if (!f.is_zero(fv)) throw ShapeError("v does not lie in the hyperplane");

  const EpwContext<F> ctx(a);
  const auto a3 = fiber_space(Flavor::Ydual, f5);
  const Mat<F> i1 = intersect_columns(a.basis, a3.frame);
  const std::size_t ell = i1.cols();
  if (ell > 2) throw NotGMRange("dim A ∩ ∧^3 V5 = " + std::to_string(ell) + " > 2");

  // v ∧ ∧^2 V5 inside the Y fiber frame
  const auto a2 = fiber_space(Flavor::Y, v);
  const Mat<F> i2 = column_basis(intersect_columns(a2.frame, a3.frame));
  if (i2.cols() != 6) throw SigmaOne("v ∧ ∧^2 V5 has dimension " + std::to_string(i2.cols()), where);

  ReducedPoint<F> red{ctx.point_pair(a2), Mat<F>(f, 0, 0)};
  try {
    red = reduce_point(ctx.point_pair(a2), i1, i2, where);
  } catch (const HypothesisViolated& e) {
    throw SigmaOne(e.reason(), where);
  }
  const Mat<F> a3bar = column_basis(red.projection * a3.frame);
  if (a3bar.cols() != red.pair.n()) throw SigmaOne("reduced auxiliary Lagrangian has wrong rank", where);
  PointQuad<F> pq{Mat<F>(f, 0, 0), f.one(), f.one(), f.one()};
  try {
    pq = lag_to_quad_at(red.pair, a3bar, where);
  } catch (const NotTransverse& e) {
    throw SigmaOne(e.reason(), where);
  }
  const std::size_t k = red.pair.n() - rank(red.pair.gram());
  FibrationPoint<F> out{assess_form(pq.q, k), ell, lag_quad_correction(f, k, pq.det13, pq.det32, pq.weight),
                        Signature::Ramified};
  out.signature = corrected_quad_signature(pq, k);
  return out;
}

}  // namespace atlas
