#pragma once

// Enumeration of linear subspaces of F_q^n by reduced row echelon form.
//
// A k-dimensional subspace has a unique k x n RREF representative. Pivot sets
// are visited in lexicographic order; within a pivot set (a Schubert cell)
// the free entries are the digits of a base-q counter, entry (i, j) for
// j > pivot_i, j not a pivot, in row-major order. This numbering gives every
// subspace a stable index, so ranges of indices can be handed to threads.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/field.hpp"
#include "atlas/mat.hpp"

namespace atlas {

inline std::uint64_t checked_pow(std::uint64_t q, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (r > UINT64_MAX / q) throw SizeError("enumeration size overflows 64 bits");
    r *= q;
  }
  return r;
}

// Number of k-dimensional subspaces of F_q^n.
inline std::uint64_t gaussian_binomial(std::uint64_t q, unsigned n, unsigned k) {
  if (k > n) return 0;
  // prod_{i<k} (q^{n-i} - 1) / (q^{i+1} - 1), exact at every step
  unsigned __int128 num = 1, den = 1;
  for (unsigned i = 0; i < k; ++i) {
    num *= checked_pow(q, n - i) - 1;
    den *= checked_pow(q, i + 1) - 1;
  }
  return static_cast<std::uint64_t>(num / den);
}

inline std::uint64_t projective_count(std::uint64_t q, unsigned n) { return gaussian_binomial(q, n, 1); }

class SubspaceIndex {
 public:
  SubspaceIndex(std::uint64_t q, unsigned n, unsigned k) : q_(q), n_(n), k_(k) {
    if (k > n) throw ShapeError("subspace dimension exceeds ambient dimension");
    std::vector<unsigned> piv(k);
    for (unsigned i = 0; i < k; ++i) piv[i] = i;
    std::uint64_t offset = 0;
    for (;;) {
      Cell c;
      c.pivots = piv;
      std::vector<bool> is_piv(n, false);
      for (auto p : piv) is_piv[p] = true;
      for (unsigned i = 0; i < k; ++i)
        for (unsigned j = piv[i] + 1; j < n; ++j)
          if (!is_piv[j]) c.free.push_back({i, j});
      c.offset = offset;
      c.size = checked_pow(q, static_cast<unsigned>(c.free.size()));
      offset += c.size;
      cells_.push_back(std::move(c));
      // next combination
      int i = static_cast<int>(k) - 1;
      while (i >= 0 && piv[i] == n - k + static_cast<unsigned>(i)) --i;
      if (i < 0) break;
      ++piv[i];
      for (unsigned j = static_cast<unsigned>(i) + 1; j < k; ++j) piv[j] = piv[j - 1] + 1;
    }
    total_ = offset;
  }

  std::uint64_t size() const { return total_; }
  unsigned ambient() const { return n_; }
  unsigned dim() const { return k_; }

  // Row-major k x n RREF entries of subspace number idx.
  template <FiniteFieldType F>
  void decode(const F& f, std::uint64_t idx, std::vector<typename F::value_type>& out) const {
    std::size_t lo = 0, hi = cells_.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (cells_[mid].offset <= idx) lo = mid;
      else hi = mid;
    }
    const Cell& c = cells_[lo];
    out.assign(static_cast<std::size_t>(k_) * n_, f.zero());
    for (unsigned i = 0; i < k_; ++i) out[i * n_ + c.pivots[i]] = f.one();
    std::uint64_t r = idx - c.offset;
    for (auto it = c.free.rbegin(); it != c.free.rend(); ++it) {
      out[it->first * n_ + it->second] = f.element(r % q_);
      r /= q_;
    }
  }

  template <FiniteFieldType F>
  Mat<F> at(const F& f, std::uint64_t idx) const {
    std::vector<typename F::value_type> v;
    decode(f, idx, v);
    return Mat<F>(f, k_, n_, std::move(v));
  }

 private:
  struct Cell {
    std::vector<unsigned> pivots;
    std::vector<std::pair<unsigned, unsigned>> free;
    std::uint64_t offset = 0, size = 0;
  };
  std::uint64_t q_;
  unsigned n_, k_;
  std::vector<Cell> cells_;
  std::uint64_t total_ = 0;
};

// Calls visit(const Mat<F>&) for every k-dimensional subspace of F^n.
template <FiniteFieldType F, class Visit>
void for_each_subspace(const F& f, unsigned n, unsigned k, Visit&& visit) {
  SubspaceIndex index(f.size(), n, k);
  for (std::uint64_t i = 0; i < index.size(); ++i) visit(index.at(f, i));
}

}  // namespace atlas
