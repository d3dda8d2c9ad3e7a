#pragma once

// Sparse multivariate polynomials and matrices of them.
//
// Terms are kept sorted in descending graded reverse lexicographic order with
// no zero coefficients, so equal polynomials have identical term lists and a
// unique text form:
//
//   3*x0^2*x2 + 5*x1 + 1
//
// Every term prints its coefficient; exponents of one are omitted.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/field.hpp"
#include "atlas/mat.hpp"

namespace atlas {

using Exponent = std::vector<std::uint16_t>;

inline unsigned total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

// a > b in grevlex: higher total degree first, then the smaller exponent in
// the last differing variable wins.
inline bool grevlex_greater(const Exponent& a, const Exponent& b) {
  const unsigned da = total_degree(a), db = total_degree(b);
  if (da != db) return da > db;
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

inline bool divides(const Exponent& a, const Exponent& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline Exponent exponent_lcm(const Exponent& a, const Exponent& b) {
  Exponent c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = std::max(a[i], b[i]);
  return c;
}

inline Exponent exponent_sum(const Exponent& a, const Exponent& b) {
  Exponent c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = static_cast<std::uint16_t>(a[i] + b[i]);
  return c;
}

inline Exponent exponent_diff(const Exponent& a, const Exponent& b) {
  Exponent c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = static_cast<std::uint16_t>(a[i] - b[i]);
  return c;
}

// All exponent vectors of total degree <= d in n variables, grevlex descending.
inline std::vector<Exponent> monomials_up_to(std::size_t n, unsigned d) {
  std::vector<Exponent> out;
  Exponent e(n, 0);
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i == n) {
      out.push_back(e);
      return;
    }
    for (unsigned a = 0; a <= left; ++a) {
      e[i] = static_cast<std::uint16_t>(a);
      self(self, i + 1, left - a);
    }
    e[i] = 0;
  };
  rec(rec, 0, d);
  std::sort(out.begin(), out.end(), grevlex_greater);
  return out;
}

// ---------------------------------------------------------------------------
// Element text parsing, the inverse of Field::to_string.

inline PrimeField::value_type parse_element(const PrimeField& f, const std::string& s) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw ParseError("bad element '" + s + "'");
    return f.from_int(v);
  } catch (const std::logic_error&) {
    throw ParseError("bad element '" + s + "'");
  }
}

inline ExtField::value_type parse_element(const ExtField& f, const std::string& s) {
  try {
    if (!s.empty() && s[0] == '#') {
      std::size_t used = 0;
      unsigned long long v = std::stoull(s.substr(1), &used);
      if (used + 1 != s.size() || v >= f.size()) throw ParseError("bad element '" + s + "'");
      return f.element(v);
    }
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw ParseError("bad element '" + s + "'");
    return f.from_int(v);
  } catch (const std::logic_error&) {
    throw ParseError("bad element '" + s + "'");
  }
}

inline mpq_class parse_element(const RationalField&, const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0) throw ParseError("bad rational '" + s + "'");
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------------------

template <FieldType F>
class MultiPoly {
 public:
  using value_type = typename F::value_type;
  struct Term {
    Exponent exp;
    value_type coeff;
  };

  MultiPoly(F f, std::size_t nvars) : f_(std::move(f)), n_(nvars) {}

  static MultiPoly constant(const F& f, std::size_t nvars, const value_type& c) {
    MultiPoly p(f, nvars);
    if (!f.is_zero(c)) p.terms_.push_back({Exponent(nvars, 0), c});
    return p;
  }
  static MultiPoly variable(const F& f, std::size_t nvars, std::size_t i) {
    if (i >= nvars) throw ShapeError("variable index out of range");
    MultiPoly p(f, nvars);
    Exponent e(nvars, 0);
    e[i] = 1;
    p.terms_.push_back({std::move(e), f.one()});
    return p;
  }
  static MultiPoly monomial(const F& f, const Exponent& e, const value_type& c) {
    MultiPoly p(f, e.size());
    if (!f.is_zero(c)) p.terms_.push_back({e, c});
    return p;
  }
  // From unsorted (exponent, coefficient) pairs; duplicates are summed.
  static MultiPoly from_terms(const F& f, std::size_t nvars, std::vector<Term> terms) {
    MultiPoly p(f, nvars);
    for (const auto& t : terms)
      if (t.exp.size() != nvars) throw ShapeError("exponent length differs from nvars");
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return grevlex_greater(a.exp, b.exp); });
    for (auto& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().exp == t.exp) {
        p.terms_.back().coeff = f.add(p.terms_.back().coeff, t.coeff);
        if (f.is_zero(p.terms_.back().coeff)) p.terms_.pop_back();
      } else if (!f.is_zero(t.coeff)) {
        p.terms_.push_back(std::move(t));
      }
    }
    return p;
  }

  const F& field() const { return f_; }
  std::size_t nvars() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Term& leading() const { return terms_.front(); }

  int degree() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, static_cast<int>(total_degree(t.exp)));
    return d;
  }

  bool is_homogeneous() const {
    for (const auto& t : terms_)
      if (total_degree(t.exp) != total_degree(terms_.front().exp)) return false;
    return true;
  }

  value_type coefficient(const Exponent& e) const {
    for (const auto& t : terms_)
      if (t.exp == e) return t.coeff;
    return f_.zero();
  }

  value_type eval(const std::vector<value_type>& x) const {
    if (x.size() != n_) throw ShapeError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                                         std::to_string(n_));
    // power tables per variable
    std::vector<std::vector<value_type>> pw(n_);
    for (std::size_t i = 0; i < n_; ++i) pw[i].push_back(f_.one());
    value_type acc = f_.zero();
    for (const auto& t : terms_) {
      value_type m = t.coeff;
      for (std::size_t i = 0; i < n_; ++i) {
        const auto a = t.exp[i];
        if (a == 0) continue;
        while (pw[i].size() <= a) pw[i].push_back(f_.mul(pw[i].back(), x[i]));
        m = f_.mul(m, pw[i][a]);
      }
      acc = f_.add(acc, m);
    }
    return acc;
  }

  MultiPoly operator-() const {
    MultiPoly p = *this;
    for (auto& t : p.terms_) t.coeff = f_.neg(t.coeff);
    return p;
  }

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) { return combine(a, b, false); }
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return combine(a, b, true); }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    check_compatible(a, b);
    std::vector<Term> prod;
    prod.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_) prod.push_back({exponent_sum(s.exp, t.exp), a.f_.mul(s.coeff, t.coeff)});
    return from_terms(a.f_, a.n_, std::move(prod));
  }

  MultiPoly scaled(const value_type& c) const {
    MultiPoly p(f_, n_);
    if (f_.is_zero(c)) return p;
    p.terms_ = terms_;
    for (auto& t : p.terms_) t.coeff = f_.mul(t.coeff, c);
    return p;
  }

  // c * x^e * this
  MultiPoly shifted(const Exponent& e, const value_type& c) const {
    MultiPoly p(f_, n_);
    if (f_.is_zero(c)) return p;
    p.terms_.reserve(terms_.size());
    for (const auto& t : terms_) p.terms_.push_back({exponent_sum(t.exp, e), f_.mul(t.coeff, c)});
    return p;  // multiplication by a monomial preserves the order
  }

  MultiPoly derivative(std::size_t i) const {
    if (i >= n_) throw ShapeError("variable index out of range");
    std::vector<Term> out;
    for (const auto& t : terms_) {
      if (t.exp[i] == 0) continue;
      Term d{t.exp, f_.mul(t.coeff, f_.from_int(t.exp[i]))};
      d.exp[i] -= 1;
      out.push_back(std::move(d));
    }
    return from_terms(f_, n_, std::move(out));
  }

  // Substitute x_i := g[i]; all g share the same target variable count.
  MultiPoly compose(const std::vector<MultiPoly>& g) const {
    if (g.size() != n_) throw ShapeError("substitution length differs from nvars");
    const std::size_t m = g.empty() ? 0 : g[0].nvars();
    for (const auto& h : g)
      if (h.nvars() != m) throw ShapeError("substitution polynomials disagree on nvars");
    std::vector<std::vector<MultiPoly>> pw(n_);
    for (std::size_t i = 0; i < n_; ++i) pw[i].push_back(constant(f_, m, f_.one()));
    std::vector<Term> acc;
    for (const auto& t : terms_) {
      MultiPoly mono = constant(f_, m, t.coeff);
      for (std::size_t i = 0; i < n_; ++i) {
        const auto a = t.exp[i];
        if (a == 0) continue;
        while (pw[i].size() <= a) pw[i].push_back(pw[i].back() * g[i]);
        mono = mono * pw[i][a];
      }
      acc.insert(acc.end(), mono.terms_.begin(), mono.terms_.end());
    }
    return from_terms(f_, m, std::move(acc));
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      if (k) os << " + ";
      const auto& t = terms_[k];
      os << f_.to_string(t.coeff);
      for (std::size_t i = 0; i < n_; ++i) {
        if (t.exp[i] == 0) continue;
        os << "*x" << i;
        if (t.exp[i] > 1) os << '^' << t.exp[i];
      }
    }
    return os.str();
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    if (!(a.f_ == b.f_) || a.n_ != b.n_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (a.terms_[i].exp != b.terms_[i].exp || !a.f_.equal(a.terms_[i].coeff, b.terms_[i].coeff)) return false;
    return true;
  }

 private:
  static void check_compatible(const MultiPoly& a, const MultiPoly& b) {
    if (!(a.f_ == b.f_)) throw FieldMismatch(a.f_.name() + " vs " + b.f_.name());
    if (a.n_ != b.n_) throw ShapeError("polynomials in different numbers of variables");
  }

  static MultiPoly combine(const MultiPoly& a, const MultiPoly& b, bool subtract) {
    check_compatible(a, b);
    const F& f = a.f_;
    MultiPoly p(f, a.n_);
    p.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && grevlex_greater(a.terms_[i].exp, b.terms_[j].exp))) {
        p.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || grevlex_greater(b.terms_[j].exp, a.terms_[i].exp)) {
        p.terms_.push_back({b.terms_[j].exp, subtract ? f.neg(b.terms_[j].coeff) : b.terms_[j].coeff});
        ++j;
      } else {
        auto c = subtract ? f.sub(a.terms_[i].coeff, b.terms_[j].coeff) : f.add(a.terms_[i].coeff, b.terms_[j].coeff);
        if (!f.is_zero(c)) p.terms_.push_back({a.terms_[i].exp, c});
        ++i;
        ++j;
      }
    }
    return p;
  }

  F f_;
  std::size_t n_;
  std::vector<Term> terms_;
};

template <FieldType F>
std::vector<MultiPoly<F>> partial_derivatives(const MultiPoly<F>& p) {
  std::vector<MultiPoly<F>> out;
  for (std::size_t i = 0; i < p.nvars(); ++i) out.push_back(p.derivative(i));
  return out;
}

// Parse the canonical text form. Coefficient-free monomials ("x0*x1") and a
// leading '-' on rational coefficients are accepted.
template <FieldType F>
MultiPoly<F> parse_poly(const F& f, std::size_t nvars, const std::string& text) {
  using Term = typename MultiPoly<F>::Term;
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s == "0") return MultiPoly<F>(f, nvars);
  if (s.empty()) throw ParseError("empty polynomial");
  std::vector<Term> terms;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find('+', pos);
    if (next == std::string::npos) next = s.size();
    const std::string term = s.substr(pos, next - pos);
    if (term.empty()) throw ParseError("empty term in '" + text + "'");
    Term t{Exponent(nvars, 0), f.one()};
    std::size_t fpos = 0;
    bool first = true;
    while (fpos <= term.size()) {
      std::size_t fe = term.find('*', fpos);
      if (fe == std::string::npos) fe = term.size();
      const std::string factor = term.substr(fpos, fe - fpos);
      if (factor.empty()) throw ParseError("empty factor in '" + term + "'");
      if (factor[0] == 'x') {
        const std::size_t caret = factor.find('^');
        std::size_t var = 0;
        unsigned long e = 1;
        try {
          std::size_t used = 0;
          var = std::stoul(factor.substr(1, caret == std::string::npos ? std::string::npos : caret - 1), &used);
          if (used + 1 != (caret == std::string::npos ? factor.size() : caret)) throw ParseError("bad variable");
          if (caret != std::string::npos) e = std::stoul(factor.substr(caret + 1));
        } catch (const std::logic_error&) {
          throw ParseError("bad monomial factor '" + factor + "'");
        }
        if (var >= nvars) throw ParseError("variable x" + std::to_string(var) + " out of range");
        t.exp[var] = static_cast<std::uint16_t>(t.exp[var] + e);
      } else {
        if (!first) throw ParseError("coefficient must come first in '" + term + "'");
        t.coeff = parse_element(f, factor);
      }
      first = false;
      fpos = fe + 1;
    }
    terms.push_back(std::move(t));
    pos = next + 1;
  }
  return MultiPoly<F>::from_terms(f, nvars, std::move(terms));
}

// ---------------------------------------------------------------------------

// x = offset + linear * t, from t-coordinates (linear.cols()) to
// x-coordinates (linear.rows()).
template <FieldType F>
struct AffineMap {
  std::vector<typename F::value_type> offset;
  Mat<F> linear;

  std::size_t source_vars() const { return linear.cols(); }
  std::size_t target_vars() const { return linear.rows(); }

  std::vector<typename F::value_type> apply(const std::vector<typename F::value_type>& t) const {
    if (t.size() != linear.cols()) throw ShapeError("affine map source length");
    const F& f = linear.field();
    std::vector<typename F::value_type> x = offset;
    for (std::size_t i = 0; i < linear.rows(); ++i)
      for (std::size_t j = 0; j < linear.cols(); ++j) x[i] = f.add(x[i], f.mul(linear(i, j), t[j]));
    return x;
  }

  std::vector<MultiPoly<F>> as_polys() const {
    const F& f = linear.field();
    std::vector<MultiPoly<F>> g;
    for (std::size_t i = 0; i < linear.rows(); ++i) {
      auto p = MultiPoly<F>::constant(f, linear.cols(), offset[i]);
      for (std::size_t j = 0; j < linear.cols(); ++j)
        p = p + MultiPoly<F>::variable(f, linear.cols(), j).scaled(linear(i, j));
      g.push_back(std::move(p));
    }
    return g;
  }
};

template <FieldType F>
class PolyMatrix {
 public:
  using value_type = typename F::value_type;
  using Poly = MultiPoly<F>;

  PolyMatrix(F f, std::size_t rows, std::size_t cols, std::size_t nvars)
      : f_(f), rows_(rows), cols_(cols), n_(nvars), e_(rows * cols, Poly(f, nvars)) {}

  static PolyMatrix constant(const Mat<F>& m, std::size_t nvars) {
    PolyMatrix p(m.field(), m.rows(), m.cols(), nvars);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) p(i, j) = Poly::constant(m.field(), nvars, m(i, j));
    return p;
  }

  const F& field() const { return f_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nvars() const { return n_; }

  Poly& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const Poly& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  Mat<F> eval(const std::vector<value_type>& x) const {
    if (x.size() != n_) throw ShapeError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                                         std::to_string(n_));
    Mat<F> m(f_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) m.data()[i] = e_[i].eval(x);
    return m;
  }

  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (!((*this)(i, j) == (*this)(j, i))) return false;
    return true;
  }

  bool is_zero() const {
    for (const auto& p : e_)
      if (!p.is_zero()) return false;
    return true;
  }

  int degree() const {
    int d = -1;
    for (const auto& p : e_) d = std::max(d, p.degree());
    return d;
  }

  PolyMatrix transpose() const {
    PolyMatrix t(f_, cols_, rows_, n_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  PolyMatrix compose(const std::vector<Poly>& g) const {
    const std::size_t m = g.empty() ? 0 : g[0].nvars();
    PolyMatrix out(f_, rows_, cols_, m);
    for (std::size_t i = 0; i < e_.size(); ++i) out.e_[i] = e_[i].compose(g);
    return out;
  }

  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.cols_ != b.rows_ || a.n_ != b.n_) throw ShapeError("polynomial matrix product shape");
    PolyMatrix c(a.f_, a.rows_, b.cols_, a.n_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) {
        Poly s(a.f_, a.n_);
        for (std::size_t k = 0; k < a.cols_; ++k)
          if (!a(i, k).is_zero() && !b(k, j).is_zero()) s = s + a(i, k) * b(k, j);
        c(i, j) = std::move(s);
      }
    return c;
  }

  friend PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.n_ != b.n_) throw ShapeError("polynomial matrix sum shape");
    PolyMatrix c = a;
    for (std::size_t i = 0; i < c.e_.size(); ++i) c.e_[i] = a.e_[i] + b.e_[i];
    return c;
  }

  PolyMatrix scaled(const Poly& s) const {
    PolyMatrix c = *this;
    for (auto& p : c.e_) p = p * s;
    return c;
  }

  std::vector<std::vector<std::string>> to_strings() const {
    std::vector<std::vector<std::string>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i].push_back((*this)(i, j).to_string());
    return out;
  }

 private:
  F f_;
  std::size_t rows_, cols_, n_;
  std::vector<Poly> e_;
};

template <FieldType F>
Mat<F> eval_poly_matrix(const PolyMatrix<F>& pm, const std::vector<typename F::value_type>& x) {
  return pm.eval(x);
}

template <FieldType F>
PolyMatrix<F> restrict_linear(const PolyMatrix<F>& pm, const AffineMap<F>& map) {
  if (map.target_vars() != pm.nvars() || map.offset.size() != pm.nvars())
    throw ShapeError("parametrization targets " + std::to_string(map.target_vars()) + " variables, matrix has " +
                     std::to_string(pm.nvars()));
  return pm.compose(map.as_polys());
}

// Determinant by Laplace expansion along the first row with memoized minors
// indexed by column subsets. Suitable for n <= 8.
template <FieldType F>
MultiPoly<F> poly_det(const PolyMatrix<F>& m) {
  if (m.rows() != m.cols()) throw ShapeError("determinant of a non-square polynomial matrix");
  const std::size_t n = m.rows();
  if (n > 12) throw SizeError("symbolic determinant too large");
  using Poly = MultiPoly<F>;
  const F& f = m.field();
  // minors[mask] = det of rows (n - popcount(mask) .. n-1) x columns in mask
  std::vector<Poly> minors(std::size_t{1} << n, Poly(f, m.nvars()));
  minors[0] = Poly::constant(f, m.nvars(), f.one());
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    const std::size_t k = static_cast<std::size_t>(__builtin_popcountll(mask));
    const std::size_t row = n - k;
    Poly acc(f, m.nvars());
    std::size_t sign_pos = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(mask >> c & 1)) continue;
      if (!m(row, c).is_zero()) {
        const Poly& sub = minors[mask & ~(std::size_t{1} << c)];
        if (!sub.is_zero()) {
          Poly term = m(row, c) * sub;
          acc = (sign_pos % 2 == 0) ? acc + term : acc - term;
        }
      }
      ++sign_pos;
    }
    minors[mask] = std::move(acc);
  }
  return minors[(std::size_t{1} << n) - 1];
}

// Classical adjugate: adj(m) m = m adj(m) = det(m) I.
template <FieldType F>
PolyMatrix<F> poly_adjugate(const PolyMatrix<F>& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw ShapeError("adjugate of a non-square polynomial matrix");
  PolyMatrix<F> adj(m.field(), n, n, m.nvars());
  if (n == 1) {
    adj(0, 0) = MultiPoly<F>::constant(m.field(), m.nvars(), m.field().one());
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      PolyMatrix<F> minor(m.field(), n - 1, n - 1, m.nvars());
      for (std::size_t r = 0, rr = 0; r < n; ++r) {
        if (r == j) continue;
        for (std::size_t c = 0, cc = 0; c < n; ++c) {
          if (c == i) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      auto d = poly_det(minor);
      adj(i, j) = ((i + j) % 2 == 0) ? d : -d;
    }
  return adj;
}

}  // namespace atlas
