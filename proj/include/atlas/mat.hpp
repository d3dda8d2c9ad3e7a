#pragma once

// Dense matrices over an exact field, with echelon-form kernels.
//
// All matrices here are small (at most a few dozen rows), so everything is
// plain row-major storage and Gaussian elimination pivoting on the first
// nonzero entry of each column.

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/field.hpp"

namespace atlas {

template <FieldType F>
class Mat {
 public:
  using field_type = F;
  using value_type = typename F::value_type;

  Mat(F f, std::size_t rows, std::size_t cols)
      : f_(std::move(f)), rows_(rows), cols_(cols), a_(rows * cols, f_.zero()) {}

  Mat(F f, std::size_t rows, std::size_t cols, std::vector<value_type> entries)
      : f_(std::move(f)), rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows * cols) throw ShapeError("entry count does not match shape");
  }

  static Mat identity(const F& f, std::size_t n) {
    Mat m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = f.one();
    return m;
  }

  // Rows of integers, reduced into the field.
  static Mat from_ints(const F& f, const std::vector<std::vector<long long>>& rows) {
    const std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
    Mat m(f, r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw ShapeError("ragged rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = f.from_int(rows[i][j]);
    }
    return m;
  }

  static Mat diagonal(const F& f, const std::vector<value_type>& d) {
    Mat m(f, d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static Mat column_vector(const F& f, const std::vector<value_type>& v) {
    return Mat(f, v.size(), 1, v);
  }

  const F& field() const { return f_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  value_type& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const value_type& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  const std::vector<value_type>& data() const { return a_; }
  std::vector<value_type>& data() { return a_; }

  std::vector<value_type> column(std::size_t j) const {
    std::vector<value_type> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  std::vector<value_type> row(std::size_t i) const {
    return std::vector<value_type>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
  }

  bool is_zero() const {
    for (const auto& x : a_)
      if (!f_.is_zero(x)) return false;
    return true;
  }

  bool is_symmetric() const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (!f_.equal((*this)(i, j), (*this)(j, i))) return false;
    return true;
  }

  Mat transpose() const {
    Mat t(f_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Mat& a, const Mat& b) {
    if (!(a.f_ == b.f_) || a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t i = 0; i < a.a_.size(); ++i)
      if (!a.f_.equal(a.a_[i], b.a_[i])) return false;
    return true;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
      os << (i ? ",[" : "[");
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << f_.to_string((*this)(i, j));
      os << ']';
    }
    os << ']';
    return os.str();
  }

 private:
  F f_;
  std::size_t rows_, cols_;
  std::vector<value_type> a_;
};

namespace detail {

template <FieldType F>
void require_same_field(const Mat<F>& a, const Mat<F>& b) {
  if (!(a.field() == b.field()))
    throw FieldMismatch(a.field().name() + " vs " + b.field().name());
}

}  // namespace detail

template <FieldType F>
Mat<F> operator+(const Mat<F>& a, const Mat<F>& b) {
  detail::require_same_field(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("sum of differently shaped matrices");
  Mat<F> c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] = a.field().add(a.data()[i], b.data()[i]);
  return c;
}

template <FieldType F>
Mat<F> operator-(const Mat<F>& a, const Mat<F>& b) {
  detail::require_same_field(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("difference of differently shaped matrices");
  Mat<F> c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] = a.field().sub(a.data()[i], b.data()[i]);
  return c;
}

template <FieldType F>
Mat<F> operator*(const Mat<F>& a, const Mat<F>& b) {
  detail::require_same_field(a, b);
  if (a.cols() != b.rows())
    throw ShapeError("product of " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  const F& f = a.field();
  Mat<F> c(f, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const auto& x = a(i, k);
      if (f.is_zero(x)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = f.add(c(i, j), f.mul(x, b(k, j)));
    }
  return c;
}

template <FieldType F>
Mat<F> scale(const Mat<F>& a, const typename F::value_type& s) {
  Mat<F> c = a;
  for (auto& x : c.data()) x = a.field().mul(x, s);
  return c;
}

template <FieldType F>
Mat<F> hcat(const Mat<F>& a, const Mat<F>& b) {
  detail::require_same_field(a, b);
  if (a.rows() != b.rows()) throw ShapeError("hcat row mismatch");
  Mat<F> c(a.field(), a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
  }
  return c;
}

template <FieldType F>
Mat<F> vcat(const Mat<F>& a, const Mat<F>& b) {
  detail::require_same_field(a, b);
  if (a.cols() != b.cols()) throw ShapeError("vcat column mismatch");
  Mat<F> c(a.field(), a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(a.rows() + i, j) = b(i, j);
  return c;
}

template <FieldType F>
Mat<F> submatrix(const Mat<F>& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  Mat<F> c(a.field(), rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (rows[i] >= a.rows() || cols[j] >= a.cols()) throw ShapeError("submatrix index out of range");
      c(i, j) = a(rows[i], cols[j]);
    }
  return c;
}

template <FieldType F>
Mat<F> select_columns(const Mat<F>& a, const std::vector<std::size_t>& cols) {
  std::vector<std::size_t> rows(a.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return submatrix(a, rows, cols);
}

template <FieldType F>
Mat<F> select_rows(const Mat<F>& a, const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> cols(a.cols());
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  return submatrix(a, rows, cols);
}

// Unit vectors e_i (i in idx) of length n, as columns.
template <FieldType F>
Mat<F> unit_columns(const F& f, std::size_t n, const std::vector<std::size_t>& idx) {
  Mat<F> c(f, n, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) c(idx[j], j) = f.one();
  return c;
}

template <FieldType F>
struct Echelon {
  Mat<F> reduced;                    // reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

template <FieldType F>
Echelon<F> rref(Mat<F> m) {
  const F& f = m.field();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && f.is_zero(m(piv, c))) ++piv;
    if (piv == m.rows()) continue;
    if (piv != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(r, j));
    const auto inv = f.inv(m(r, c));
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) = f.mul(m(r, j), inv);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || f.is_zero(m(i, c))) continue;
      const auto factor = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) = f.sub(m(i, j), f.mul(factor, m(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

template <FieldType F>
struct RankKernel {
  std::size_t rank;
  Mat<F> kernel;  // cols x (cols - rank), columns span the right kernel
};

// Right kernel from the free columns of the reduced echelon form: the free
// variable is set to one and pivot variables are solved for.
template <FieldType F>
RankKernel<F> rank_kernel(const Mat<F>& m) {
  const F& f = m.field();
  auto e = rref(m);
  const std::size_t n = m.cols(), rk = e.pivots.size();
  std::vector<bool> is_pivot(n, false);
  for (auto c : e.pivots) is_pivot[c] = true;
  Mat<F> ker(f, n, n - rk);
  std::size_t col = 0;
  for (std::size_t fc = 0; fc < n; ++fc) {
    if (is_pivot[fc]) continue;
    ker(fc, col) = f.one();
    for (std::size_t i = 0; i < rk; ++i) ker(e.pivots[i], col) = f.neg(e.reduced(i, fc));
    ++col;
  }
  return {rk, std::move(ker)};
}

template <FieldType F>
Mat<F> kernel(const Mat<F>& m) {
  return rank_kernel(m).kernel;
}

// Rank by in-place elimination on a scratch copy.
template <FieldType F>
std::size_t rank(const Mat<F>& m) {
  Mat<F> a = m;
  const F& f = a.field();
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t piv = r;
    while (piv < a.rows() && f.is_zero(a(piv, c))) ++piv;
    if (piv == a.rows()) continue;
    if (piv != r)
      for (std::size_t j = c; j < a.cols(); ++j) std::swap(a(piv, j), a(r, j));
    const auto inv = f.inv(a(r, c));
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      if (f.is_zero(a(i, c))) continue;
      const auto factor = f.mul(a(i, c), inv);
      for (std::size_t j = c; j < a.cols(); ++j) a(i, j) = f.sub(a(i, j), f.mul(factor, a(r, j)));
    }
    ++r;
  }
  return r;
}

template <FieldType F>
typename F::value_type det(const Mat<F>& m) {
  if (!m.square()) throw ShapeError("determinant of a non-square matrix");
  Mat<F> a = m;
  const F& f = a.field();
  const std::size_t n = a.rows();
  auto d = f.one();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && f.is_zero(a(piv, c))) ++piv;
    if (piv == n) return f.zero();
    if (piv != c) {
      for (std::size_t j = c; j < n; ++j) std::swap(a(piv, j), a(c, j));
      d = f.neg(d);
    }
    d = f.mul(d, a(c, c));
    const auto inv = f.inv(a(c, c));
    for (std::size_t i = c + 1; i < n; ++i) {
      if (f.is_zero(a(i, c))) continue;
      const auto factor = f.mul(a(i, c), inv);
      for (std::size_t j = c; j < n; ++j) a(i, j) = f.sub(a(i, j), f.mul(factor, a(c, j)));
    }
  }
  return d;
}

template <FieldType F>
Mat<F> inverse(const Mat<F>& m) {
  if (!m.square()) throw ShapeError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  auto e = rref(hcat(m, Mat<F>::identity(m.field(), n)));
  if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1)) throw DivisionByZero("singular matrix");
  std::vector<std::size_t> rows(n), cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = i;
    cols[i] = n + i;
  }
  return submatrix(e.reduced, rows, cols);
}

// Some X with A X = B, or nullopt if the system is inconsistent.
template <FieldType F>
std::optional<Mat<F>> solve(const Mat<F>& a, const Mat<F>& b) {
  detail::require_same_field(a, b);
  if (a.rows() != b.rows()) throw ShapeError("solve row mismatch");
  const F& f = a.field();
  auto e = rref(hcat(a, b));
  const std::size_t n = a.cols();
  Mat<F> x(f, n, b.cols());
  for (std::size_t i = 0; i < e.pivots.size(); ++i) {
    const std::size_t pc = e.pivots[i];
    if (pc >= n) return std::nullopt;
    for (std::size_t j = 0; j < b.cols(); ++j) x(pc, j) = e.reduced(i, n + j);
  }
  return x;
}

// Columns of m forming a basis of its column space (pivot columns).
template <FieldType F>
Mat<F> column_basis(const Mat<F>& m) {
  return select_columns(m, rref(m).pivots);
}

// Basis of colspace(A) ∩ colspace(B), assuming both inputs have independent columns.
template <FieldType F>
Mat<F> intersect_columns(const Mat<F>& a, const Mat<F>& b) {
  detail::require_same_field(a, b);
  const F& f = a.field();
  Mat<F> nb = scale(b, f.neg(f.one()));
  Mat<F> k = kernel(hcat(a, nb));
  std::vector<std::size_t> top(a.cols());
  for (std::size_t i = 0; i < top.size(); ++i) top[i] = i;
  Mat<F> coeff = select_rows(k, top);
  Mat<F> v = a * coeff;
  return column_basis(v);
}

// Pivot unit columns completing the column span of m to the whole space:
// the non-pivot rows of the echelon form of m^T.
template <FieldType F>
std::vector<std::size_t> complement_indices(const Mat<F>& m) {
  auto e = rref(m.transpose());
  std::vector<bool> used(m.rows(), false);
  for (auto c : e.pivots) used[c] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (!used[i]) out.push_back(i);
  return out;
}

template <FieldType F, class R>
Mat<F> random_mat(const F& f, std::size_t rows, std::size_t cols, R& rng) {
  Mat<F> m(f, rows, cols);
  for (auto& x : m.data()) x = random_element(f, rng);
  return m;
}

template <FieldType F, class R>
Mat<F> random_invertible(const F& f, std::size_t n, R& rng) {
  for (;;) {
    Mat<F> m = random_mat(f, n, n, rng);
    if (rank(m) == n) return m;
  }
}

template <FieldType F, class R>
Mat<F> random_symmetric(const F& f, std::size_t n, R& rng) {
  Mat<F> m(f, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = random_element(f, rng);
  return m;
}

}  // namespace atlas
