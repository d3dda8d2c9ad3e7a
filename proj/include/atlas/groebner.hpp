#pragma once

// Minimal Buchberger algorithm in grevlex for zero-dimensional degree counts.
//
// Pairs are selected by smallest lcm (normal strategy) and discarded by the
// chain criterion only. The budget caps the number of S-polynomial
// reductions; exhausting it raises BudgetExceeded, which callers report as a
// skipped computation rather than a failure.

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/field.hpp"
#include "atlas/poly.hpp"

namespace atlas {

struct GroebnerResult {
  std::size_t degree = 0;       // dimension of the quotient ring
  std::size_t basis_size = 0;   // size of the (non-reduced) basis
  std::size_t reductions = 0;   // S-polynomial reductions performed
};

namespace detail {

template <FieldType F>
MultiPoly<F> make_monic(const MultiPoly<F>& p) {
  if (p.is_zero()) return p;
  return p.scaled(p.field().inv(p.leading().coeff));
}

// Full reduction of p modulo g (every term, not only the head).
template <FieldType F>
MultiPoly<F> reduce_full(MultiPoly<F> p, const std::vector<MultiPoly<F>>& g) {
  const F& f = p.field();
  using Term = typename MultiPoly<F>::Term;
  std::vector<Term> rem;
  while (!p.is_zero()) {
    const Term lt = p.leading();
    bool reduced = false;
    for (const auto& h : g) {
      if (divides(h.leading().exp, lt.exp)) {
        // h is monic
        p = p - h.shifted(exponent_diff(lt.exp, h.leading().exp), lt.coeff);
        reduced = true;
        break;
      }
    }
    if (!reduced) {
      rem.push_back(lt);
      p = p - MultiPoly<F>::monomial(f, lt.exp, lt.coeff);
    }
  }
  return MultiPoly<F>::from_terms(f, p.nvars(), std::move(rem));
}

// Standard monomials of the monomial ideal generated by lead, which must
// contain a pure power of every variable.
inline std::size_t count_standard_monomials(const std::vector<Exponent>& lead, std::size_t nvars) {
  std::vector<unsigned> bound(nvars, 0);
  for (std::size_t i = 0; i < nvars; ++i) {
    unsigned best = 0;
    for (const auto& e : lead) {
      bool pure = e[i] > 0;
      for (std::size_t j = 0; j < nvars && pure; ++j)
        if (j != i && e[j] != 0) pure = false;
      if (pure && (best == 0 || e[i] < best)) best = e[i];
    }
    if (best == 0) throw NotZeroDimensional("no leading monomial is a pure power of x" + std::to_string(i));
    bound[i] = best;
  }
  std::size_t count = 0;
  Exponent e(nvars, 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == nvars) {
      for (const auto& l : lead)
        if (divides(l, e)) return;
      ++count;
      return;
    }
    for (unsigned a = 0; a < bound[i]; ++a) {
      e[i] = static_cast<std::uint16_t>(a);
      self(self, i + 1);
    }
    e[i] = 0;
  };
  rec(rec, 0);
  return count;
}

}  // namespace detail

template <FieldType F>
GroebnerResult groebner_zero_dim_degree(const std::vector<MultiPoly<F>>& gens, std::size_t budget) {
  if (gens.empty()) throw NotZeroDimensional("no generators");
  const std::size_t nvars = gens[0].nvars();
  std::vector<MultiPoly<F>> g;
  for (const auto& p : gens) {
    if (p.nvars() != nvars) throw ShapeError("generators in different numbers of variables");
    auto r = detail::reduce_full(detail::make_monic(p), g);
    if (!r.is_zero()) g.push_back(detail::make_monic(r));
  }
  GroebnerResult res;
  if (g.empty()) throw NotZeroDimensional("zero ideal");

  std::set<std::pair<std::size_t, std::size_t>> pending;
  for (std::size_t j = 0; j < g.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) pending.insert({i, j});

  auto is_pending = [&](std::size_t a, std::size_t b) { return pending.count({std::min(a, b), std::max(a, b)}) > 0; };

  while (!pending.empty()) {
    // normal selection
    auto best = pending.begin();
    Exponent best_lcm = exponent_lcm(g[best->first].leading().exp, g[best->second].leading().exp);
    for (auto it = std::next(pending.begin()); it != pending.end(); ++it) {
      Exponent l = exponent_lcm(g[it->first].leading().exp, g[it->second].leading().exp);
      if (grevlex_greater(best_lcm, l)) {
        best = it;
        best_lcm = std::move(l);
      }
    }
    const auto [i, j] = *best;
    pending.erase(best);

    // chain criterion: some k with lm(k) | lcm(i,j) whose pairs with i and j
    // have already been treated
    bool skip = false;
    for (std::size_t k = 0; k < g.size() && !skip; ++k) {
      if (k == i || k == j) continue;
      if (divides(g[k].leading().exp, best_lcm) && !is_pending(i, k) && !is_pending(j, k)) skip = true;
    }
    if (skip) continue;

    if (res.reductions >= budget)
      throw BudgetExceeded("Buchberger budget of " + std::to_string(budget) + " reductions exhausted with basis size " +
                           std::to_string(g.size()));
    ++res.reductions;
    const auto& gi = g[i];
    const auto& gj = g[j];
    auto s = gi.shifted(exponent_diff(best_lcm, gi.leading().exp), gi.field().one()) -
             gj.shifted(exponent_diff(best_lcm, gj.leading().exp), gj.field().one());
    auto r = detail::reduce_full(s, g);
    if (r.is_zero()) continue;
    r = detail::make_monic(r);
    const std::size_t k = g.size();
    g.push_back(std::move(r));
    if (total_degree(g[k].leading().exp) == 0) {
      res.degree = 0;
      res.basis_size = g.size();
      return res;  // the ideal is the whole ring
    }
    for (std::size_t m = 0; m < k; ++m) pending.insert({m, k});
  }

  std::vector<Exponent> lead;
  for (const auto& p : g) {
    if (total_degree(p.leading().exp) == 0) {
      res.degree = 0;
      res.basis_size = g.size();
      return res;
    }
    lead.push_back(p.leading().exp);
  }
  res.basis_size = g.size();
  res.degree = detail::count_standard_monomials(lead, nvars);
  return res;
}

}  // namespace atlas
