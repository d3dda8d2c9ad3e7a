#pragma once

// Bounded-degree interpolation from a black-box sampler.
//
// The grid is the principal lattice {a in N^n : |a| <= d}, with coordinate a_i
// mapped to the field node element(a_i). In the Newton basis
//
//   N_a(x) = prod_i prod_{j < a_i} (x_i - node_j)
//
// the interpolation matrix is triangular for the componentwise order on the
// lattice, so the coefficients come out by forward substitution. The result is
// then expanded to monomials and checked against the sampler on fresh random
// points; a mismatch means the true function has degree above the bound.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/field.hpp"
#include "atlas/poly.hpp"

namespace atlas {

template <FieldType F>
struct Interpolation {
  MultiPoly<F> poly;
  std::size_t grid_points = 0;
  std::size_t verified_points = 0;
};

template <FieldType F>
std::vector<typename F::value_type> interpolation_nodes(const F& f, unsigned d) {
  if constexpr (FiniteFieldType<F>) {
    if (f.size() <= d)
      throw DegenerateSampler("field " + f.name() + " has too few elements for degree " + std::to_string(d));
    std::vector<typename F::value_type> nodes;
    for (unsigned i = 0; i <= d; ++i) nodes.push_back(f.element(i));
    return nodes;
  } else {
    std::vector<typename F::value_type> nodes;
    for (unsigned i = 0; i <= d; ++i) nodes.push_back(f.from_int(i));
    return nodes;
  }
}

// Grid points in the order used by interpolate (grevlex descending of a).
template <FieldType F>
std::vector<std::vector<typename F::value_type>> interpolation_grid(const F& f, std::size_t nvars, unsigned d) {
  const auto nodes = interpolation_nodes(f, d);
  std::vector<std::vector<typename F::value_type>> pts;
  for (const auto& a : monomials_up_to(nvars, d)) {
    std::vector<typename F::value_type> x(nvars);
    for (std::size_t i = 0; i < nvars; ++i) x[i] = nodes[a[i]];
    pts.push_back(std::move(x));
  }
  return pts;
}

template <FieldType F, class Rng>
Interpolation<F> interpolate(const F& f, std::size_t nvars, unsigned d,
                             const std::function<typename F::value_type(const std::vector<typename F::value_type>&)>& sampler,
                             Rng& rng, std::size_t fresh_checks = 1000) {
  using V = typename F::value_type;
  const auto nodes = interpolation_nodes(f, d);
  auto lattice = monomials_up_to(nvars, d);
  // increasing total degree so every a' <= a is handled before a
  std::reverse(lattice.begin(), lattice.end());
  const std::size_t n = lattice.size();

  // w[i][a][b] = prod_{j < a} (node_b - node_j), the univariate Newton factor
  std::vector<std::vector<V>> w(d + 1, std::vector<V>(d + 1, f.one()));
  for (unsigned a = 1; a <= d; ++a)
    for (unsigned b = 0; b <= d; ++b) w[a][b] = f.mul(w[a - 1][b], f.sub(nodes[b], nodes[a - 1]));

  std::vector<V> values(n), coeff(n, f.zero());
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<V> x(nvars);
    for (std::size_t i = 0; i < nvars; ++i) x[i] = nodes[lattice[k][i]];
    values[k] = sampler(x);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto& b = lattice[k];
    V acc = values[k];
    for (std::size_t l = 0; l < k; ++l) {
      const auto& a = lattice[l];
      if (f.is_zero(coeff[l]) || !divides(a, b)) continue;
      V basis = f.one();
      for (std::size_t i = 0; i < nvars; ++i) basis = f.mul(basis, w[a[i]][b[i]]);
      acc = f.sub(acc, f.mul(coeff[l], basis));
    }
    V diag = f.one();
    for (std::size_t i = 0; i < nvars; ++i) diag = f.mul(diag, w[b[i]][b[i]]);
    if (f.is_zero(diag)) throw DegenerateSampler("repeated interpolation node");
    coeff[k] = f.mul(acc, f.inv(diag));
  }

  // expand the Newton form into monomials
  using Poly = MultiPoly<F>;
  std::vector<std::vector<Poly>> factor(nvars);
  for (std::size_t i = 0; i < nvars; ++i) {
    factor[i].push_back(Poly::constant(f, nvars, f.one()));
    for (unsigned a = 1; a <= d; ++a)
      factor[i].push_back(factor[i].back() *
                          (Poly::variable(f, nvars, i) - Poly::constant(f, nvars, nodes[a - 1])));
  }
  std::vector<typename Poly::Term> terms;
  for (std::size_t k = 0; k < n; ++k) {
    if (f.is_zero(coeff[k])) continue;
    Poly b = Poly::constant(f, nvars, coeff[k]);
    for (std::size_t i = 0; i < nvars; ++i)
      if (lattice[k][i]) b = b * factor[i][lattice[k][i]];
    terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  }
  Interpolation<F> out{Poly::from_terms(f, nvars, std::move(terms)), n, 0};

  for (std::size_t t = 0; t < fresh_checks; ++t) {
    std::vector<V> x(nvars);
    for (auto& xi : x) xi = random_element(f, rng);
    const V expect = sampler(x);
    const V got = out.poly.eval(x);
    if (!f.equal(expect, got)) {
      std::string pt = "(";
      for (std::size_t i = 0; i < nvars; ++i) pt += (i ? "," : "") + f.to_string(x[i]);
      pt += ")";
      throw DegreeBoundViolated("sampler disagrees with the degree " + std::to_string(d) + " interpolant at " + pt +
                                " after " + std::to_string(t) + " agreeing checks");
    }
    ++out.verified_points;
  }
  return out;
}

}  // namespace atlas
