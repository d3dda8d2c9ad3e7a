#pragma once

// Exterior powers of a 6-space with basis e0..e5.
//
// A basis vector e_S of ∧^k is indexed by a sorted k-subset S; subsets are
// numbered in lexicographic order. The volume form is vol(e0 ∧ ... ∧ e5) = 1,
// so the wedge pairing on ∧^3 is
//
//   B(e_S, e_T) = sign(S, T) if T is the complement of S, else 0,
//
// where sign(S, T) is the sign of the permutation listing S then T.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/field.hpp"
#include "atlas/mat.hpp"

namespace atlas {

inline constexpr unsigned kSixDim = 6;

// Sorted k-subsets of {0..5} in lexicographic order, as bit masks.
inline std::vector<unsigned> wedge_subsets(unsigned k) {
  std::vector<unsigned> out;
  std::vector<unsigned> s(k);
  for (unsigned i = 0; i < k; ++i) s[i] = i;
  for (;;) {
    unsigned mask = 0;
    for (auto i : s) mask |= 1u << i;
    out.push_back(mask);
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && s[i] == kSixDim - k + static_cast<unsigned>(i)) --i;
    if (i < 0) break;
    ++s[i];
    for (unsigned j = static_cast<unsigned>(i) + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

inline std::vector<unsigned> mask_elements(unsigned mask) {
  std::vector<unsigned> out;
  for (unsigned i = 0; i < kSixDim; ++i)
    if (mask & (1u << i)) out.push_back(i);
  return out;
}

// Sign of the permutation sorting the concatenation of two disjoint sorted sets.
inline int shuffle_sign(unsigned s, unsigned t) {
  int inversions = 0;
  for (unsigned i = 0; i < kSixDim; ++i)
    if (s & (1u << i))
      for (unsigned j = 0; j < i; ++j)
        if (t & (1u << j)) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

class WedgeBasis {
 public:
  explicit WedgeBasis(unsigned k) : k_(k), masks_(wedge_subsets(k)) {
    index_.fill(-1);
    for (std::size_t i = 0; i < masks_.size(); ++i) index_[masks_[i]] = static_cast<int>(i);
  }
  unsigned degree() const { return k_; }
  std::size_t size() const { return masks_.size(); }
  unsigned mask(std::size_t i) const { return masks_[i]; }
  int index(unsigned mask) const { return index_[mask]; }

 private:
  unsigned k_;
  std::vector<unsigned> masks_;
  std::array<int, 64> index_;
};

inline const WedgeBasis& wedge2_basis() {
  static const WedgeBasis b(2);
  return b;
}
inline const WedgeBasis& wedge3_basis() {
  static const WedgeBasis b(3);
  return b;
}
inline const WedgeBasis& wedge4_basis() {
  static const WedgeBasis b(4);
  return b;
}

// The 20 x 20 matrix of the wedge pairing on ∧^3.
template <FieldType F>
Mat<F> wedge3_form(const F& f) {
  const auto& b = wedge3_basis();
  Mat<F> m(f, b.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const unsigned s = b.mask(i), t = 0x3Fu & ~s;
    const auto j = static_cast<std::size_t>(b.index(t));
    m(i, j) = shuffle_sign(s, t) > 0 ? f.one() : f.neg(f.one());
  }
  return m;
}

template <FieldType F>
typename F::value_type wedge3_pairing(const F& f, const std::vector<typename F::value_type>& xi,
                                      const std::vector<typename F::value_type>& eta) {
  const auto& b = wedge3_basis();
  if (xi.size() != b.size() || eta.size() != b.size()) throw ShapeError("3-vectors have 20 coordinates");
  auto acc = f.zero();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const unsigned s = b.mask(i), t = 0x3Fu & ~s;
    const auto term = f.mul(xi[i], eta[static_cast<std::size_t>(b.index(t))]);
    acc = shuffle_sign(s, t) > 0 ? f.add(acc, term) : f.sub(acc, term);
  }
  return acc;
}

// Coordinates of u ∧ v ∧ w: the 3 x 3 minors of [u v w].
template <FieldType F>
std::vector<typename F::value_type> wedge3(const F& f, const std::vector<typename F::value_type>& u,
                                           const std::vector<typename F::value_type>& v,
                                           const std::vector<typename F::value_type>& w) {
  const auto& b = wedge3_basis();
  std::vector<typename F::value_type> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto e = mask_elements(b.mask(i));
    const auto a = e[0], c = e[1], d = e[2];
    auto t1 = f.mul(u[a], f.sub(f.mul(v[c], w[d]), f.mul(v[d], w[c])));
    auto t2 = f.mul(u[c], f.sub(f.mul(v[a], w[d]), f.mul(v[d], w[a])));
    auto t3 = f.mul(u[d], f.sub(f.mul(v[a], w[c]), f.mul(v[c], w[a])));
    out[i] = f.add(f.sub(t1, t2), t3);
  }
  return out;
}

template <FieldType F>
std::vector<typename F::value_type> unit6(const F& f, unsigned i) {
  std::vector<typename F::value_type> e(kSixDim, f.zero());
  e[i] = f.one();
  return e;
}

// Matrix of ∧^3 g in the e_S basis: entry (T, S) = det g[T, S].
template <FieldType F>
Mat<F> exterior3(const Mat<F>& g) {
  if (g.rows() != kSixDim || g.cols() != kSixDim) throw ShapeError("exterior cube needs a 6 x 6 matrix");
  const auto& b = wedge3_basis();
  Mat<F> out(g.field(), b.size(), b.size());
  for (std::size_t t = 0; t < b.size(); ++t) {
    const auto rows = mask_elements(b.mask(t));
    for (std::size_t s = 0; s < b.size(); ++s) {
      const auto cols = mask_elements(b.mask(s));
      out(t, s) = det(submatrix(g, {rows[0], rows[1], rows[2]}, {cols[0], cols[1], cols[2]}));
    }
  }
  return out;
}

// 15 x 6 matrix of v -> v ∧ omega, with ∧^4 in the e_Q basis.
template <FieldType F>
Mat<F> wedge_multiplication(const F& f, const std::vector<typename F::value_type>& omega) {
  const auto& b3 = wedge3_basis();
  const auto& b4 = wedge4_basis();
  if (omega.size() != b3.size()) throw ShapeError("3-vectors have 20 coordinates");
  Mat<F> m(f, b4.size(), kSixDim);
  for (std::size_t q = 0; q < b4.size(); ++q) {
    const unsigned qm = b4.mask(q);
    for (unsigned i = 0; i < kSixDim; ++i) {
      if (!(qm & (1u << i))) continue;
      const unsigned s = qm & ~(1u << i);
      const auto c = omega[static_cast<std::size_t>(b3.index(s))];
      m(q, i) = shuffle_sign(1u << i, s) > 0 ? c : f.neg(c);
    }
  }
  return m;
}

// A nonzero 3-vector is decomposable iff its annihilator in V has dimension 3.
template <FieldType F>
bool is_decomposable(const F& f, const std::vector<typename F::value_type>& omega) {
  return kSixDim - rank(wedge_multiplication(f, omega)) == 3;
}

}  // namespace atlas
