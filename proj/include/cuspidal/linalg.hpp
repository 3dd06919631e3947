#pragma once

// Exact integer and rational linear algebra on small dense matrices.
// Entries are GMP integers/rationals; nothing here touches floating point
// except the candidate-range estimates in callers, which are always
// re-checked exactly.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "cuspidal/errors.hpp"

namespace cuspidal {

using Int = mpz_class;
using Rat = mpq_class;
using IntVector = std::vector<Int>;
using RatVector = std::vector<Rat>;

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::initializer_list<std::initializer_list<long>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) fail(ErrorKind::BadParameter, "ragged matrix literal");
      for (long v : row) data_.emplace_back(v);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_columns(const std::vector<std::vector<T>>& columns, std::size_t rows) {
    Matrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != rows) fail(ErrorKind::BadParameter, "column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  std::vector<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_column(std::size_t j, const std::vector<T>& c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_symmetric() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) fail(ErrorKind::BadParameter, "matrix shape mismatch in product");
    Matrix p(rows_, o.cols_);
    T acc;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < o.cols_; ++j) {
        acc = 0;
        for (std::size_t l = 0; l < cols_; ++l) {
          const T& a = (*this)(i, l);
          if (a != 0) acc += a * o(l, j);
        }
        p(i, j) = acc;
      }
    return p;
  }

  std::vector<T> operator*(const std::vector<T>& v) const {
    if (cols_ != v.size()) fail(ErrorKind::BadParameter, "matrix/vector shape mismatch");
    std::vector<T> r(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      T acc = 0;
      for (std::size_t l = 0; l < cols_; ++l) acc += (*this)(i, l) * v[l];
      r[i] = acc;
    }
    return r;
  }

  Matrix operator*(const T& s) const {
    Matrix p = *this;
    for (auto& e : p.data_) e *= s;
    return p;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  const std::vector<T>& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

template <class T>
std::ostream& operator<<(std::ostream& os, const Matrix<T>& m) {
  os << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << ']';
  }
  return os << ']';
}

inline RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

inline RatVector to_rational(const IntVector& v) {
  RatVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rat(v[i]);
  return r;
}

inline std::optional<IntMatrix> to_integral(const RatMatrix& m) {
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j).get_den() != 1) return std::nullopt;
      r(i, j) = m(i, j).get_num();
    }
  return r;
}

inline std::optional<IntVector> to_integral(const RatVector& v) {
  IntVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].get_den() != 1) return std::nullopt;
    r[i] = v[i].get_num();
  }
  return r;
}

inline RatVector mul(const IntMatrix& m, const RatVector& v) { return to_rational(m) * v; }

inline Rat dot(const RatVector& a, const RatVector& b) {
  Rat acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// x^T G y for a rational Gram matrix given as integers.
inline Rat bilinear(const IntMatrix& gram, const RatVector& x, const RatVector& y) {
  Rat acc = 0, row;
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    if (x[i] == 0) continue;
    row = 0;
    for (std::size_t j = 0; j < gram.cols(); ++j)
      if (gram(i, j) != 0 && y[j] != 0) row += gram(i, j) * y[j];
    acc += x[i] * row;
  }
  return acc;
}

inline Int bilinear(const IntMatrix& gram, const IntVector& x, const IntVector& y) {
  Int acc = 0, row;
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    if (x[i] == 0) continue;
    row = 0;
    for (std::size_t j = 0; j < gram.cols(); ++j)
      if (gram(i, j) != 0 && y[j] != 0) row += gram(i, j) * y[j];
    acc += x[i] * row;
  }
  return acc;
}

/// Nearest integer, halves rounded up.
inline Int round_nearest(const Rat& x) {
  Int twice_num = 2 * x.get_num() + x.get_den();
  Int den = 2 * x.get_den();
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), twice_num.get_mpz_t(), den.get_mpz_t());
  return q;
}

inline Int floor_of(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

inline Int ceil_of(const Rat& x) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

/// Fraction-free (Bareiss) determinant.
inline Int determinant(const IntMatrix& a) {
  if (!a.is_square()) fail(ErrorKind::BadParameter, "determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), m(i, j).get_mpz_t(), prev.get_mpz_t());
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

struct SmithDecomposition {
  IntMatrix left;   // unimodular, rows x rows
  IntVector diag;   // min(rows, cols) entries, d1 | d2 | ... then zeros
  IntMatrix right;  // unimodular, cols x cols

  std::size_t rank() const {
    std::size_t r = 0;
    for (const auto& d : diag) r += (d != 0);
    return r;
  }
};

/// left * a * right == diag(d1, d2, ...), with transforms always computed.
inline SmithDecomposition smith_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  IntMatrix d = a;
  IntMatrix u = IntMatrix::identity(m);
  IntMatrix v = IntMatrix::identity(n);
  Int q, tmp;

  auto row_sub = [&](std::size_t dst, std::size_t src, const Int& f) {
    for (std::size_t j = 0; j < n; ++j)
      if (d(src, j) != 0) d(dst, j) -= f * d(src, j);
    for (std::size_t j = 0; j < m; ++j)
      if (u(src, j) != 0) u(dst, j) -= f * u(src, j);
  };
  auto col_sub = [&](std::size_t dst, std::size_t src, const Int& f) {
    for (std::size_t i = 0; i < m; ++i)
      if (d(i, src) != 0) d(i, dst) -= f * d(i, src);
    for (std::size_t i = 0; i < n; ++i)
      if (v(i, src) != 0) v(i, dst) -= f * v(i, src);
  };
  auto swap_r = [&](std::size_t x, std::size_t y) { d.swap_rows(x, y); u.swap_rows(x, y); };
  auto swap_c = [&](std::size_t x, std::size_t y) { d.swap_cols(x, y); v.swap_cols(x, y); };

  const std::size_t lim = std::min(m, n);
  for (std::size_t t = 0; t < lim; ++t) {
    // Smallest nonzero entry of the trailing block becomes the pivot.
    bool found = false;
    std::size_t pi = t, pj = t;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (d(i, j) != 0 && (!found || abs(d(i, j)) < abs(d(pi, pj)))) {
          found = true;
          pi = i;
          pj = j;
        }
    if (!found) break;
    swap_r(t, pi);
    swap_c(t, pj);

    while (true) {
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (d(i, t) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), d(i, t).get_mpz_t(), d(t, t).get_mpz_t());
        if (q != 0) row_sub(i, t, q);
        if (d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), d(t, j).get_mpz_t(), d(t, t).get_mpz_t());
        if (q != 0) col_sub(j, t, q);
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) {
        std::size_t bi = t, bj = t;
        for (std::size_t i = t + 1; i < m; ++i)
          if (d(i, t) != 0 && abs(d(i, t)) < abs(d(bi, bj))) { bi = i; bj = t; }
        for (std::size_t j = t + 1; j < n; ++j)
          if (d(t, j) != 0 && abs(d(t, j)) < abs(d(bi, bj))) { bi = t; bj = j; }
        if (bi != t) swap_r(t, bi);
        if (bj != t) swap_c(t, bj);
        continue;
      }
      bool divisible = true;
      for (std::size_t i = t + 1; i < m && divisible; ++i)
        for (std::size_t j = t + 1; j < n; ++j) {
          mpz_tdiv_r(tmp.get_mpz_t(), d(i, j).get_mpz_t(), d(t, t).get_mpz_t());
          if (tmp != 0) {
            row_sub(t, i, Int(-1));
            divisible = false;
            break;
          }
        }
      if (divisible) break;
    }
    if (d(t, t) < 0) {
      for (std::size_t j = 0; j < n; ++j) d(t, j) = -d(t, j);
      for (std::size_t j = 0; j < m; ++j) u(t, j) = -u(t, j);
    }
  }

  SmithDecomposition out{std::move(u), IntVector(lim), std::move(v)};
  for (std::size_t i = 0; i < lim; ++i) out.diag[i] = d(i, i);
  return out;
}

inline std::size_t rank_of(const IntMatrix& a) { return smith_normal_form(a).rank(); }

/// Gauss-Jordan inverse over Q; nullopt when singular.
inline std::optional<RatMatrix> inverse(const RatMatrix& a) {
  if (!a.is_square()) fail(ErrorKind::BadParameter, "inverse of non-square matrix");
  const std::size_t n = a.rows();
  RatMatrix m = a;
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, k) == 0) ++p;
    if (p == n) return std::nullopt;
    m.swap_rows(k, p);
    inv.swap_rows(k, p);
    Rat piv = m(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) /= piv;
      inv(k, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k) == 0) continue;
      Rat f = m(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

inline std::optional<RatMatrix> inverse(const IntMatrix& a) { return inverse(to_rational(a)); }

/// Some x with a*x == b exactly, or nullopt when the system is inconsistent.
inline std::optional<RatVector> solve_rational(const RatMatrix& a, const RatVector& b) {
  const std::size_t m = a.rows(), n = a.cols();
  if (b.size() != m) fail(ErrorKind::BadParameter, "right-hand side length mismatch");
  RatMatrix aug(m, n + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t p = r;
    while (p < m && aug(p, c) == 0) ++p;
    if (p == m) continue;
    aug.swap_rows(r, p);
    Rat piv = aug(r, c);
    for (std::size_t j = c; j <= n; ++j) aug(r, j) /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || aug(i, c) == 0) continue;
      Rat f = aug(i, c);
      for (std::size_t j = c; j <= n; ++j) aug(i, j) -= f * aug(r, j);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < m; ++i)
    if (aug(i, n) != 0) return std::nullopt;
  RatVector x(n, Rat(0));
  for (std::size_t i = 0; i < r; ++i) x[pivot_cols[i]] = aug(i, n);
  return x;
}

inline std::optional<RatVector> solve_rational(const IntMatrix& a, const RatVector& b) {
  return solve_rational(to_rational(a), b);
}

/// Basis (as columns) of the integer kernel {x in Z^n : a x = 0}; always saturated.
inline IntMatrix integer_kernel(const IntMatrix& a) {
  auto snf = smith_normal_form(a);
  const std::size_t r = snf.rank(), n = a.cols();
  IntMatrix k(n, n - r);
  for (std::size_t j = r; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) k(i, j - r) = snf.right(i, j);
  return k;
}

/// Basis (as columns) of the Z-span of the columns of a.
inline IntMatrix column_span_basis(const IntMatrix& a) {
  auto snf = smith_normal_form(a);
  const std::size_t r = snf.rank();
  auto left_inv = to_integral(*inverse(snf.left));
  IntMatrix b(a.rows(), r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) b(i, j) = (*left_inv)(i, j) * snf.diag[j];
  return b;
}

struct Signature {
  std::size_t positive = 0;
  std::size_t negative = 0;
  bool operator==(const Signature&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Signature& s) {
  return os << '(' << s.positive << ',' << s.negative << ')';
}

/// Sylvester inertia by exact symmetric elimination over Q.
inline Signature signature_of_symmetric(const IntMatrix& a) {
  if (!a.is_symmetric()) fail(ErrorKind::BadParameter, "signature needs a symmetric matrix");
  if (determinant(a) == 0) fail(ErrorKind::SingularMatrix, "signature of a singular matrix");
  const std::size_t n = a.rows();
  RatMatrix m = to_rational(a);
  Signature sig;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = n;
    for (std::size_t i = k; i < n; ++i)
      if (m(i, i) != 0) { p = i; break; }
    if (p == n) {
      // All remaining diagonal entries vanish: x_i += x_j makes m(i,i) = 2 m(i,j).
      std::size_t bi = n, bj = n;
      for (std::size_t i = k; i < n && bi == n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (m(i, j) != 0) { bi = i; bj = j; break; }
      if (bi == n) fail(ErrorKind::SingularMatrix, "signature of a singular matrix");
      for (std::size_t c = 0; c < n; ++c) m(bi, c) += m(bj, c);
      for (std::size_t r = 0; r < n; ++r) m(r, bi) += m(r, bj);
      p = bi;
    }
    m.swap_rows(k, p);
    m.swap_cols(k, p);
    const Rat piv = m(k, k);
    (piv > 0 ? sig.positive : sig.negative) += 1;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rat f = m(i, k) / piv;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
      m(i, k) = 0;
    }
    for (std::size_t j = k + 1; j < n; ++j) m(k, j) = 0;
  }
  return sig;
}

struct LllResult {
  IntMatrix gram;       // transform^T * input * transform
  IntMatrix transform;  // unimodular, columns are the new basis
};

/// Gram-Schmidt data of a positive definite Gram matrix: squared norms r_i and
/// coefficients mu(i, j), j < i.
struct GramSchmidt {
  RatVector r;
  RatMatrix mu;
};

inline GramSchmidt gram_schmidt(const IntMatrix& g) {
  const std::size_t n = g.rows();
  GramSchmidt gs{RatVector(n), RatMatrix(n, n)};
  Rat acc;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      acc = g(i, j);
      for (std::size_t l = 0; l < j; ++l) acc -= gs.mu(j, l) * gs.mu(i, l) * gs.r[l];
      gs.mu(i, j) = acc / gs.r[j];
    }
    acc = g(i, i);
    for (std::size_t l = 0; l < i; ++l) acc -= gs.mu(i, l) * gs.mu(i, l) * gs.r[l];
    gs.r[i] = acc;
    gs.mu(i, i) = 1;
  }
  return gs;
}

/// LLL on a definite Gram matrix with exact rational Gram-Schmidt.  Negative
/// definite input is reduced as its negative; the returned Gram keeps the sign
/// of the input.
inline LllResult lll_reduce(const IntMatrix& a, const Rat& delta = Rat(99, 100)) {
  if (!a.is_symmetric()) fail(ErrorKind::BadParameter, "LLL needs a symmetric matrix");
  const std::size_t n = a.rows();
  Signature sig;
  try {
    sig = signature_of_symmetric(a);
  } catch (const Error&) {
    fail(ErrorKind::NotDefinite, "LLL input is singular");
  }
  if (sig.positive != 0 && sig.negative != 0) fail(ErrorKind::NotDefinite, "LLL input is indefinite");
  const Int sign = sig.positive == n ? 1 : -1;

  IntMatrix g = a * sign;
  IntMatrix t = IntMatrix::identity(n);
  GramSchmidt gs = gram_schmidt(g);
  Int q;
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t j = k; j-- > 0;) {
      q = round_nearest(gs.mu(k, j));
      if (q == 0) continue;
      // b_k <- b_k - q b_j
      Int gkk = g(k, k) - 2 * q * g(j, k) + q * q * g(j, j);
      for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        g(k, i) -= q * g(j, i);
        g(i, k) = g(k, i);
      }
      g(k, k) = gkk;
      for (std::size_t i = 0; i < n; ++i) t(i, k) -= q * t(i, j);
      for (std::size_t l = 0; l < j; ++l) gs.mu(k, l) -= q * gs.mu(j, l);
      gs.mu(k, j) -= q;
    }
    if (gs.r[k] >= (delta - gs.mu(k, k - 1) * gs.mu(k, k - 1)) * gs.r[k - 1]) {
      ++k;
    } else {
      g.swap_rows(k, k - 1);
      g.swap_cols(k, k - 1);
      t.swap_cols(k, k - 1);
      gs = gram_schmidt(g);
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  IntMatrix reduced = t.transpose() * a * t;
  if (reduced != g * sign) fail(ErrorKind::BadParameter, "LLL bookkeeping mismatch");
  return {std::move(reduced), std::move(t)};
}

}  // namespace cuspidal
