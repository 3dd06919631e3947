#pragma once

// Reference computations used only by the tests.  Each one avoids the library
// routine it checks: plain Gaussian elimination, determinantal divisors,
// closed-form counts and direct residue loops.

#include <gmpxx.h>

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<long>>;

/// Determinant by rational Gaussian elimination with row pivoting.
inline mpz_class det(const Grid& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i][j];
  mpq_class d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      mpq_class f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return d.get_num();
}

/// k-th determinantal divisor: gcd of all k x k minors (small matrices only).
inline mpz_class determinantal_divisor(const Grid& a, std::size_t k) {
  const std::size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
  mpz_class g = 0;
  std::vector<std::size_t> ri(k), ci(k);
  std::function<void(std::size_t, std::size_t)> pick_cols;
  std::function<void(std::size_t, std::size_t)> pick_rows = [&](std::size_t pos, std::size_t start) {
    if (pos == k) {
      pick_cols(0, 0);
      return;
    }
    for (std::size_t r = start; r < rows; ++r) {
      ri[pos] = r;
      pick_rows(pos + 1, r + 1);
    }
  };
  pick_cols = [&](std::size_t pos, std::size_t start) {
    if (pos == k) {
      Grid sub(k, std::vector<long>(k));
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) sub[i][j] = a[ri[i]][ci[j]];
      mpz_class m = det(sub);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m.get_mpz_t());
      return;
    }
    for (std::size_t c = start; c < cols; ++c) {
      ci[pos] = c;
      pick_cols(pos + 1, c + 1);
    }
  };
  pick_rows(0, 0);
  return g;
}

/// Invariant factors from determinantal divisors.
inline std::vector<mpz_class> invariant_factors(const Grid& a) {
  const std::size_t n = std::min(a.size(), a.empty() ? 0 : a[0].size());
  std::vector<mpz_class> out;
  mpz_class prev = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    mpz_class dk = determinantal_divisor(a, k);
    if (dk == 0) {
      out.push_back(0);
      continue;
    }
    out.push_back(dk / prev);
    prev = dk;
  }
  return out;
}

/// Signature from the signs of leading principal minors (all must be nonzero).
inline std::pair<int, int> signature_by_minors(const Grid& a) {
  int pos = 0, neg = 0;
  mpz_class prev = 1;
  for (std::size_t k = 1; k <= a.size(); ++k) {
    Grid sub(k, std::vector<long>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub[i][j] = a[i][j];
    mpz_class m = det(sub);
    if (m == 0) return {-1, -1};
    if ((m > 0) == (prev > 0))
      ++pos;
    else
      ++neg;
    prev = m;
  }
  return {pos, neg};
}

/// Root counts of irreducible ADE systems.
inline long ade_roots(char type, long n) {
  if (type == 'A') return n * (n + 1);
  if (type == 'D') return 2 * n * (n - 1);
  return n == 6 ? 72 : n == 7 ? 126 : 240;
}

/// Split case: pairs (alpha mod 2d, beta mod 2) with alpha^2 + beta^2 d = 0 mod 4d.
inline std::vector<std::pair<long, long>> split_isotropic(long d) {
  std::vector<std::pair<long, long>> out;
  for (long a = 0; a < 2 * d; ++a)
    for (long b = 0; b < 2; ++b)
      if ((a * a + b * b * d) % (4 * d) == 0) out.emplace_back(a, b);
  return out;
}

inline long split_orbits(long d) {
  std::set<std::pair<long, long>> reps;
  for (auto [a, b] : split_isotropic(d)) reps.insert(std::min(std::make_pair(a, b), std::make_pair((2 * d - a) % (2 * d), b)));
  return static_cast<long>(reps.size());
}

/// Nonsplit case: alpha mod d with 2 alpha^2 / d even, i.e. alpha^2 = 0 mod d.
inline std::vector<long> nonsplit_isotropic(long d) {
  std::vector<long> out;
  for (long a = 0; a < d; ++a)
    if ((a * a) % d == 0) out.push_back(a);
  return out;
}

inline long nonsplit_orbits(long d) {
  std::set<long> reps;
  for (long a : nonsplit_isotropic(d)) reps.insert(std::min(a, (d - a) % d));
  return static_cast<long>(reps.size());
}

/// Square-free part and k with d = d' k^2, by trial over k.
inline std::pair<long, long> squarefree_split(long d) {
  long best = 1;
  for (long k = 1; k * k <= d; ++k)
    if (d % (k * k) == 0) best = k;
  return {d / (best * best), best};
}

/// Inverse of a nonsingular integer matrix over Q (Gauss-Jordan).
inline std::vector<std::vector<mpq_class>> inverse(const Grid& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i][j];
    m[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (m[p][c] == 0) ++p;
    std::swap(m[p], m[c]);
    mpq_class piv = m[c][c];
    for (auto& x : m[c]) x /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      mpq_class f = m[r][c];
      for (std::size_t k = 0; k < 2 * n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  std::vector<std::vector<mpq_class>> inv(n, std::vector<mpq_class>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = m[i][n + j];
  return inv;
}

/// Multiset of q values (in [0,2)) over L*/L, built from the columns of G^-1
/// reduced mod Z^n.  Cost |det|^rank: small lattices only.
inline std::multiset<mpq_class> discriminant_q_histogram(const Grid& g) {
  const std::size_t n = g.size();
  const auto inv = inverse(g);
  const long det_abs = std::abs(det(g).get_si());
  std::set<std::vector<mpq_class>> cosets;
  std::vector<long> y(n, 0);
  while (true) {
    std::vector<mpq_class> x(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) x[i] += inv[i][j] * y[j];
    for (auto& xi : x) {
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), xi.get_num_mpz_t(), xi.get_den_mpz_t());
      xi -= f;
      xi.canonicalize();
    }
    cosets.insert(x);
    std::size_t k = 0;
    while (k < n && ++y[k] == det_abs) y[k++] = 0;
    if (k == n) break;
  }
  std::multiset<mpq_class> out;
  for (const auto& x : cosets) {
    mpq_class q = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q += x[i] * g[i][j] * x[j];
    mpz_class f;
    mpq_class half = q / 2;
    mpz_fdiv_q(f.get_mpz_t(), half.get_num_mpz_t(), half.get_den_mpz_t());
    q -= 2 * f;
    q.canonicalize();
    out.insert(q);
  }
  return out;
}

using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

/// Random unimodular integer matrix as a product of elementary operations.
inline Grid random_unimodular(Rng& rng, std::size_t n, int steps = 12) {
  Grid t(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) t[i][i] = 1;
  for (int s = 0; s < steps; ++s) {
    std::size_t i = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 1));
    std::size_t j = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 1));
    int kind = static_cast<int>(uniform(rng, 0, 2));
    if (kind == 0 && i != j) {
      long f = uniform(rng, -2, 2);
      for (std::size_t r = 0; r < n; ++r) t[r][i] += f * t[r][j];
    } else if (kind == 1 && i != j) {
      for (std::size_t r = 0; r < n; ++r) std::swap(t[r][i], t[r][j]);
    } else {
      for (std::size_t r = 0; r < n; ++r) t[r][i] = -t[r][i];
    }
  }
  return t;
}

inline Grid multiply(const Grid& a, const Grid& b) {
  Grid c(a.size(), std::vector<long>(b[0].size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Grid transpose(const Grid& a) {
  Grid t(a[0].size(), std::vector<long>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

}  // namespace oracle
