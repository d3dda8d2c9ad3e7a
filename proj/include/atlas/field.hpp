#pragma once

// Exact fields of characteristic other than two.
//
//   PrimeField     F_p for an odd prime p < 2^31 (products fit in 64 bits)
//   ExtField       F_{p^r} with table-driven multiplication
//   RationalField  Q over GMP rationals (canonicalized after every operation)
//
// Field objects are cheap to copy and immutable. Elements are plain values
// whose meaning is only defined relative to their field object.

#include <gmpxx.h>

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "atlas/error.hpp"

namespace atlas {

enum class SquareClass { Zero, Square, NonSquare };

inline const char* to_string(SquareClass c) {
  switch (c) {
    case SquareClass::Zero: return "Zero";
    case SquareClass::Square: return "Square";
    case SquareClass::NonSquare: return "NonSquare";
  }
  return "?";
}

template <class F>
concept FieldType = std::copy_constructible<F> &&
    requires(const F& f, const typename F::value_type& a, long long n) {
      typename F::value_type;
      { f.zero() } -> std::convertible_to<typename F::value_type>;
      { f.one() } -> std::convertible_to<typename F::value_type>;
      { f.add(a, a) } -> std::convertible_to<typename F::value_type>;
      { f.sub(a, a) } -> std::convertible_to<typename F::value_type>;
      { f.mul(a, a) } -> std::convertible_to<typename F::value_type>;
      { f.neg(a) } -> std::convertible_to<typename F::value_type>;
      { f.inv(a) } -> std::convertible_to<typename F::value_type>;
      { f.is_zero(a) } -> std::convertible_to<bool>;
      { f.equal(a, a) } -> std::convertible_to<bool>;
      { f.from_int(n) } -> std::convertible_to<typename F::value_type>;
      { f.to_string(a) } -> std::convertible_to<std::string>;
      { f.name() } -> std::convertible_to<std::string>;
      { f == f } -> std::convertible_to<bool>;
    };

template <class F>
concept FiniteFieldType = FieldType<F> &&
    requires(const F& f, std::uint64_t i, const typename F::value_type& a) {
      { f.size() } -> std::convertible_to<std::uint64_t>;
      { f.characteristic() } -> std::convertible_to<std::uint64_t>;
      { f.element(i) } -> std::convertible_to<typename F::value_type>;
      { f.index(a) } -> std::convertible_to<std::uint64_t>;
    };

namespace detail {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

class PrimeField {
 public:
  using value_type = std::uint32_t;
  static constexpr std::uint64_t kMaxPrime = (1ULL << 31) - 1;

  explicit PrimeField(std::uint64_t p) : p_(static_cast<std::uint32_t>(p)) {
    if (p == 2) throw InvalidField("characteristic 2 is not supported");
    if (p > kMaxPrime) throw InvalidField("prime exceeds 2^31 - 1: " + std::to_string(p));
    if (!detail::is_prime(p)) throw InvalidField(std::to_string(p) + " is not prime");
  }

  std::uint32_t p() const { return p_; }
  std::uint64_t size() const { return p_; }
  std::uint64_t characteristic() const { return p_; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type add(value_type a, value_type b) const {
    std::uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  value_type sub(value_type a, value_type b) const { return a >= b ? a - b : a + p_ - b; }
  value_type neg(value_type a) const { return a == 0 ? 0 : p_ - a; }
  value_type mul(value_type a, value_type b) const {
    return static_cast<value_type>(static_cast<std::uint64_t>(a) * b % p_);
  }
  value_type pow(value_type a, std::uint64_t e) const {
    std::uint64_t r = 1, b = a;
    while (e) {
      if (e & 1) r = r * b % p_;
      b = b * b % p_;
      e >>= 1;
    }
    return static_cast<value_type>(r);
  }
  value_type inv(value_type a) const {
    if (a == 0) throw DivisionByZero("inverse of zero in " + name());
    // extended Euclid
    std::int64_t t = 0, nt = 1, r = p_, nr = a;
    while (nr != 0) {
      std::int64_t q = r / nr;
      std::int64_t tmp = t - q * nt;
      t = nt;
      nt = tmp;
      tmp = r - q * nr;
      r = nr;
      nr = tmp;
    }
    if (t < 0) t += p_;
    return static_cast<value_type>(t);
  }
  bool is_zero(value_type a) const { return a == 0; }
  bool equal(value_type a, value_type b) const { return a == b; }
  value_type from_int(long long n) const {
    long long m = n % static_cast<long long>(p_);
    if (m < 0) m += p_;
    return static_cast<value_type>(m);
  }
  value_type element(std::uint64_t i) const { return static_cast<value_type>(i % p_); }
  std::uint64_t index(value_type a) const { return a; }
  std::string to_string(value_type a) const { return std::to_string(a); }
  std::string name() const { return "GF(" + std::to_string(p_) + ")"; }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

 private:
  std::uint32_t p_;
};

// ---------------------------------------------------------------------------

// F_{p^r} = F_p[x]/(f). Elements are indices sum c_i p^i, c_i the coefficient
// of x^i. The modulus is the monic irreducible of degree r whose lower
// coefficients (c_{r-1}, ..., c_0) are smallest in lexicographic order, i.e.
// whose index sum c_i p^i is minimal.
class ExtField {
 public:
  using value_type = std::uint32_t;
  static constexpr std::uint64_t kMaxSize = 1ULL << 22;

  ExtField(std::uint64_t p, unsigned r);

  std::uint64_t p() const { return t_->p; }
  unsigned degree() const { return t_->r; }
  std::uint64_t size() const { return t_->q; }
  std::uint64_t characteristic() const { return t_->p; }
  const std::vector<std::uint32_t>& modulus() const { return t_->modulus; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type add(value_type a, value_type b) const {
    if (t_->r == 1) return static_cast<value_type>((a + b) % t_->p);
    std::uint64_t out = 0, scale = 1;
    for (unsigned i = 0; i < t_->r; ++i) {
      const std::uint32_t ca = a % t_->p, cb = b % t_->p;
      a /= t_->p;
      b /= t_->p;
      out += scale * ((ca + cb) % t_->p);
      scale *= t_->p;
    }
    return static_cast<value_type>(out);
  }
  value_type neg(value_type a) const {
    std::uint64_t out = 0, scale = 1;
    for (unsigned i = 0; i < t_->r; ++i) {
      const std::uint32_t c = a % t_->p;
      a /= t_->p;
      out += scale * ((t_->p - c) % t_->p);
      scale *= t_->p;
    }
    return static_cast<value_type>(out);
  }
  value_type sub(value_type a, value_type b) const { return add(a, neg(b)); }
  value_type mul(value_type a, value_type b) const {
    if (a == 0 || b == 0) return 0;
    return t_->exp[t_->log[a] + t_->log[b]];
  }
  value_type inv(value_type a) const {
    if (a == 0) throw DivisionByZero("inverse of zero in " + name());
    const std::uint64_t n = t_->q - 1;
    return t_->exp[(n - t_->log[a]) % n];
  }
  value_type pow(value_type a, std::uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    const std::uint64_t n = t_->q - 1;
    return t_->exp[static_cast<std::uint64_t>(t_->log[a]) * (e % n) % n];
  }
  bool is_zero(value_type a) const { return a == 0; }
  bool equal(value_type a, value_type b) const { return a == b; }
  value_type from_int(long long n) const {
    long long m = n % static_cast<long long>(t_->p);
    if (m < 0) m += t_->p;
    return static_cast<value_type>(m);
  }
  value_type element(std::uint64_t i) const { return static_cast<value_type>(i % t_->q); }
  std::uint64_t index(value_type a) const { return a; }
  // Degree-one extensions print as residues; proper extensions print the
  // element index with a '#' prefix.
  std::string to_string(value_type a) const {
    return t_->r == 1 ? std::to_string(a) : "#" + std::to_string(a);
  }
  std::string name() const {
    return "GF(" + std::to_string(t_->p) + "^" + std::to_string(t_->r) + ")";
  }
  // Discrete logarithm with respect to the table generator.
  std::uint32_t log(value_type a) const { return t_->log[a]; }

  friend bool operator==(const ExtField& a, const ExtField& b) {
    return a.t_ == b.t_ || (a.t_->p == b.t_->p && a.t_->r == b.t_->r && a.t_->modulus == b.t_->modulus);
  }

 private:
  struct Tables {
    std::uint32_t p;
    unsigned r;
    std::uint64_t q;
    std::vector<std::uint32_t> modulus;  // r + 1 coefficients, monic
    std::vector<std::uint32_t> exp;      // 2(q-1) entries
    std::vector<std::uint32_t> log;      // q entries, log[0] unused
  };
  std::shared_ptr<const Tables> t_;
};

namespace detail {

// Dense polynomials over F_p, coefficient i = x^i, used to build ExtField.
using SmallPoly = std::vector<std::uint32_t>;

inline void trim(SmallPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline SmallPoly poly_mod(SmallPoly a, const SmallPoly& m, std::uint32_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint64_t inv_lead = PrimeField(p).inv(m.back());
  while (a.size() > dm) {
    const std::uint64_t c = a.back() * inv_lead % p;
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i)
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + (p - c) * m[i]) % p);
    trim(a);
  }
  return a;
}

inline SmallPoly poly_mulmod(const SmallPoly& a, const SmallPoly& b, const SmallPoly& m, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  SmallPoly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] = static_cast<std::uint32_t>((out[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
  return poly_mod(std::move(out), m, p);
}

inline SmallPoly poly_powmod(SmallPoly base, std::uint64_t e, const SmallPoly& m, std::uint32_t p) {
  SmallPoly r{1};
  base = poly_mod(std::move(base), m, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

inline SmallPoly poly_gcd(SmallPoly a, SmallPoly b, std::uint32_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    SmallPoly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// f monic of degree r is irreducible iff gcd(x^{p^i} - x, f) = 1 for i <= r/2.
inline bool is_irreducible(const SmallPoly& f, std::uint32_t p) {
  const std::size_t r = f.size() - 1;
  if (r == 1) return true;
  SmallPoly xp{0, 1};
  for (std::size_t i = 1; i <= r / 2; ++i) {
    xp = poly_powmod(xp, p, f, p);
    SmallPoly d = xp;
    d.resize(std::max<std::size_t>(d.size(), 2), 0);
    d[1] = static_cast<std::uint32_t>((d[1] + p - 1) % p);
    if (poly_gcd(d, f, p).size() > 1) return false;
  }
  return true;
}

inline SmallPoly poly_from_index(std::uint64_t idx, std::uint32_t p, unsigned r) {
  SmallPoly a(r, 0);
  for (unsigned i = 0; i < r; ++i) {
    a[i] = static_cast<std::uint32_t>(idx % p);
    idx /= p;
  }
  trim(a);
  return a;
}

inline std::uint64_t poly_to_index(const SmallPoly& a, std::uint32_t p) {
  std::uint64_t idx = 0, scale = 1;
  for (auto c : a) {
    idx += c * scale;
    scale *= p;
  }
  return idx;
}

}  // namespace detail

inline ExtField::ExtField(std::uint64_t p, unsigned r) {
  PrimeField base(p);  // validates p
  if (r == 0) throw InvalidField("extension degree must be at least 1");
  std::uint64_t q = 1;
  for (unsigned i = 0; i < r; ++i) {
    q *= p;
    if (q > kMaxSize)
      throw SizeError("field of size " + std::to_string(p) + "^" + std::to_string(r) + " exceeds budget");
  }
  auto t = std::make_shared<Tables>();
  t->p = static_cast<std::uint32_t>(p);
  t->r = r;
  t->q = q;
  const auto pp = t->p;

  // lowest monic irreducible
  const std::uint64_t lower = q;  // p^r choices of lower coefficients
  for (std::uint64_t idx = 0; idx < lower; ++idx) {
    detail::SmallPoly f(r + 1, 0);
    std::uint64_t v = idx;
    for (unsigned i = 0; i < r; ++i) {
      f[i] = static_cast<std::uint32_t>(v % p);
      v /= p;
    }
    f[r] = 1;
    if (detail::is_irreducible(f, pp)) {
      t->modulus = f;
      break;
    }
  }

  // primitive element
  const std::uint64_t n = q - 1;
  const auto factors = detail::prime_factors(n);
  detail::SmallPoly gen;
  for (std::uint64_t idx = 1; idx < q; ++idx) {
    detail::SmallPoly g = detail::poly_from_index(idx, pp, r);
    bool primitive = true;
    for (auto l : factors) {
      if (detail::poly_powmod(g, n / l, t->modulus, pp) == detail::SmallPoly{1}) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      gen = g;
      break;
    }
  }

  t->exp.assign(2 * n, 0);
  t->log.assign(q, 0);
  detail::SmallPoly cur{1};
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto idx = detail::poly_to_index(cur, pp);
    t->exp[i] = static_cast<std::uint32_t>(idx);
    t->log[idx] = static_cast<std::uint32_t>(i);
    cur = detail::poly_mulmod(cur, gen, t->modulus, pp);
  }
  for (std::uint64_t i = n; i < 2 * n; ++i) t->exp[i] = t->exp[i - n];
  t_ = std::move(t);
}

inline ExtField ext_field_make(std::uint64_t p, unsigned r) { return ExtField(p, r); }

// ---------------------------------------------------------------------------

class RationalField {
 public:
  using value_type = mpq_class;

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type add(const value_type& a, const value_type& b) const { return a + b; }
  value_type sub(const value_type& a, const value_type& b) const { return a - b; }
  value_type mul(const value_type& a, const value_type& b) const { return a * b; }
  value_type neg(const value_type& a) const { return -a; }
  value_type inv(const value_type& a) const {
    if (sgn(a) == 0) throw DivisionByZero("inverse of zero in QQ");
    return 1 / a;
  }
  bool is_zero(const value_type& a) const { return sgn(a) == 0; }
  bool equal(const value_type& a, const value_type& b) const { return a == b; }
  value_type from_int(long long n) const { return value_type(static_cast<long>(n)); }
  std::string to_string(const value_type& a) const { return a.get_str(); }
  std::string name() const { return "QQ"; }
  friend bool operator==(const RationalField&, const RationalField&) { return true; }
};

// ---------------------------------------------------------------------------
// Generic helpers

template <FieldType F>
typename F::value_type power(const F& f, typename F::value_type a, std::uint64_t e) {
  if constexpr (requires { f.pow(a, e); }) {
    return f.pow(a, e);
  } else {
    typename F::value_type r = f.one();
    while (e) {
      if (e & 1) r = f.mul(r, a);
      a = f.mul(a, a);
      e >>= 1;
    }
    return r;
  }
}

template <FiniteFieldType F>
SquareClass square_class(const F& f, const typename F::value_type& a) {
  if (f.is_zero(a)) return SquareClass::Zero;
  const auto e = power(f, a, (f.size() - 1) / 2);
  return f.equal(e, f.one()) ? SquareClass::Square : SquareClass::NonSquare;
}

// Over Q: a nonzero rational is a square iff it is positive and both its
// reduced numerator and denominator are perfect squares.
inline SquareClass square_class(const RationalField&, const mpq_class& a) {
  if (sgn(a) == 0) return SquareClass::Zero;
  if (sgn(a) < 0) return SquareClass::NonSquare;
  return mpz_perfect_square_p(a.get_num_mpz_t()) && mpz_perfect_square_p(a.get_den_mpz_t())
             ? SquareClass::Square
             : SquareClass::NonSquare;
}

inline SquareClass multiply_classes(SquareClass a, SquareClass b) {
  if (a == SquareClass::Zero || b == SquareClass::Zero) return SquareClass::Zero;
  return a == b ? SquareClass::Square : SquareClass::NonSquare;
}

// Square root by Tonelli-Shanks; nullopt for non-squares.
template <FiniteFieldType F>
std::optional<typename F::value_type> sqrt_of(const F& f, const typename F::value_type& a) {
  using V = typename F::value_type;
  if (f.is_zero(a)) return f.zero();
  if (square_class(f, a) != SquareClass::Square) return std::nullopt;
  std::uint64_t q1 = f.size() - 1;
  unsigned s = 0;
  while ((q1 & 1) == 0) {
    q1 >>= 1;
    ++s;
  }
  V z = f.zero();
  for (std::uint64_t i = 2; i < f.size() + 2; ++i) {
    z = f.element(i % f.size());
    if (square_class(f, z) == SquareClass::NonSquare) break;
  }
  V c = power(f, z, q1);
  V x = power(f, a, (q1 + 1) / 2);
  V t = power(f, a, q1);
  unsigned m = s;
  while (!f.equal(t, f.one())) {
    unsigned i = 0;
    V tt = t;
    while (!f.equal(tt, f.one())) {
      tt = f.mul(tt, tt);
      ++i;
    }
    V b = c;
    for (unsigned j = 0; j + i + 1 < m; ++j) b = f.mul(b, b);
    x = f.mul(x, b);
    c = f.mul(b, b);
    t = f.mul(t, c);
    m = i;
  }
  return x;
}

inline std::optional<mpq_class> sqrt_of(const RationalField& f, const mpq_class& a) {
  if (square_class(f, a) == SquareClass::NonSquare) return std::nullopt;
  if (sgn(a) == 0) return mpq_class(0);
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), a.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), a.get_den_mpz_t());
  return mpq_class(n, d);
}

template <FieldType F>
SquareClass square_class_of(const F& f, const typename F::value_type& a) {
  return square_class(f, a);
}

// Deterministic uniform sampling of an element.
template <FieldType F, class R>
typename F::value_type random_element(const F& f, R& rng) {
  if constexpr (FiniteFieldType<F>) {
    return f.element(rng.below(f.size()));
  } else {
    // rationals: small integers in [-50, 50]
    return f.from_int(static_cast<long long>(rng.below(101)) - 50);
  }
}

template <FieldType F, class R>
typename F::value_type random_nonzero(const F& f, R& rng) {
  for (;;) {
    auto v = random_element(f, rng);
    if (!f.is_zero(v)) return v;
  }
}

}  // namespace atlas
