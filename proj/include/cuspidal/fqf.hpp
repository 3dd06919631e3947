#pragma once

// Finite quadratic forms q: A -> Q/2Z on finite abelian groups given as
// direct sums of cyclic groups.  Values are kept as integer numerators over
// the exponent e of A: q(x) = Q/e mod 2, b(x,y) = B/e mod 1.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cuspidal/errors.hpp"
#include "cuspidal/lattice.hpp"
#include "cuspidal/linalg.hpp"

namespace cuspidal {

struct FqfElement {
  std::vector<std::int64_t> c;
  bool operator==(const FqfElement&) const = default;
  auto operator<=>(const FqfElement&) const = default;
};

/// Default cap on exhaustive scans over group elements.
inline constexpr std::uint64_t kDefaultEnumerationBound = 1'000'000;

/// Representative of a rational mod 2 in (-1, 1].
inline Rat reduce_mod2(Rat x) {
  x.canonicalize();
  Rat r = x - 2 * floor_of(Rat(x / 2));
  if (r > 1) r -= 2;
  return r;
}

/// Representative of a rational mod 1 in (-1/2, 1/2].
inline Rat reduce_mod1(Rat x) {
  x.canonicalize();
  Rat r = x - floor_of(x);
  if (r > Rat(1, 2)) r -= 1;
  return r;
}

namespace detail {

inline std::int64_t pmod(__int128 a, std::int64_t m) {
  __int128 r = a % m;
  if (r < 0) r += m;
  return static_cast<std::int64_t>(r);
}

inline std::int64_t to_i64(const Int& z, const char* what) {
  if (!z.fits_slong_p()) fail(ErrorKind::GroupTooLarge, what);
  return z.get_si();
}

}  // namespace detail

/// Lifts of the generators into L* for forms computed from a lattice.
struct DualLifts {
  IntMatrix gram;
  RatMatrix lifts;       // column i lifts generator i
  IntMatrix coord_rows;  // c_i = coord_rows.row(i) . (G x)  mod d_i for x in L*
};

class FiniteQuadraticForm {
 public:
  FiniteQuadraticForm() = default;

  /// orders[i] >= 1 (order-1 generators are dropped); q[i] in Q/2Z; b[i][j] in Q/Z.
  FiniteQuadraticForm(std::vector<std::int64_t> orders, std::vector<Rat> q, std::vector<std::vector<Rat>> b) {
    const std::size_t r = orders.size();
    if (q.size() != r || b.size() != r) fail(ErrorKind::BadParameter, "form data size mismatch");
    for (const auto& row : b)
      if (row.size() != r) fail(ErrorKind::BadParameter, "bilinear matrix is not square");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < r; ++i) {
      if (orders[i] < 1) fail(ErrorKind::BadParameter, "generator order must be positive");
      if (orders[i] > 1) keep.push_back(i);
    }
    orders_.clear();
    for (auto i : keep) orders_.push_back(orders[i]);
    exponent_ = 1;
    for (auto d : orders_) exponent_ = std::lcm(exponent_, d);
    const std::size_t n = keep.size();
    qnum_.assign(n, 0);
    bnum_.assign(n * n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t i = keep[a];
      const Rat di(orders[i]);
      Rat t = q[i] * orders[i];
      if (t.get_den() != 1) fail(ErrorKind::BadParameter, "q(x_i) denominator must divide the order");
      t = q[i] * orders[i] * orders[i];
      if (t.get_den() != 1 || mpz_odd_p(t.get_num_mpz_t()))
        fail(ErrorKind::BadParameter, "q(d_i x_i) must vanish in Q/2Z");
      if (reduce_mod1(b[i][i] - q[i]) != 0) fail(ErrorKind::BadParameter, "b(x,x) must equal q(x) mod 1");
      qnum_[a] = detail::pmod(detail::to_i64(Rat(q[i] * exponent_).get_num(), "form too large"), 2 * exponent_);
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t j = keep[c];
        if (reduce_mod1(b[i][j] - b[j][i]) != 0) fail(ErrorKind::BadParameter, "b must be symmetric");
        if (Rat(b[i][j] * orders[i]).get_den() != 1)
          fail(ErrorKind::BadParameter, "b(x_i, x_j) must be killed by the order of x_i");
        bnum_[a * n + c] = detail::pmod(detail::to_i64(Rat(b[i][j] * exponent_).get_num(), "form too large"), exponent_);
      }
    }
    size_ = 1;
    for (auto d : orders_) {
      if (size_ > (std::uint64_t(1) << 62) / static_cast<std::uint64_t>(d))
        fail(ErrorKind::GroupTooLarge, "group order overflows 62 bits");
      size_ *= static_cast<std::uint64_t>(d);
    }
  }

  /// Orthogonal sum of cyclic groups with the given q values.
  static FiniteQuadraticForm diagonal(const std::vector<std::int64_t>& orders, const std::vector<Rat>& q) {
    std::vector<std::vector<Rat>> b(orders.size(), std::vector<Rat>(orders.size(), Rat(0)));
    for (std::size_t i = 0; i < orders.size(); ++i) b[i][i] = reduce_mod1(q[i]);
    return FiniteQuadraticForm(orders, q, b);
  }

  std::size_t rank() const noexcept { return orders_.size(); }
  const std::vector<std::int64_t>& orders() const noexcept { return orders_; }
  std::int64_t exponent() const noexcept { return exponent_; }
  std::uint64_t size() const noexcept { return size_; }
  bool is_trivial() const noexcept { return orders_.empty(); }

  Rat q_gen(std::size_t i) const { return reduce_mod2(Rat(qnum_[i], exponent_)); }
  Rat b_gen(std::size_t i, std::size_t j) const { return reduce_mod1(Rat(bnum_[i * rank() + j], exponent_)); }

  /// Numerator of q(x) over the exponent, in [0, 2e).
  std::int64_t q_num(const FqfElement& x) const {
    const std::size_t n = rank();
    const std::int64_t m = 2 * exponent_;
    __int128 acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t ci = x.c[i];
      if (ci == 0) continue;
      acc += static_cast<__int128>(detail::pmod(static_cast<__int128>(ci) * ci, m)) * qnum_[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        if (x.c[j] == 0 || bnum_[i * n + j] == 0) continue;
        acc += 2 * static_cast<__int128>(detail::pmod(static_cast<__int128>(ci) * x.c[j], m)) * bnum_[i * n + j];
      }
      acc %= m;
    }
    return detail::pmod(acc, m);
  }

  /// Numerator of b(x,y) over the exponent, in [0, e).
  std::int64_t b_num(const FqfElement& x, const FqfElement& y) const {
    const std::size_t n = rank();
    __int128 acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x.c[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (y.c[j] == 0 || bnum_[i * n + j] == 0) continue;
        acc += static_cast<__int128>(detail::pmod(static_cast<__int128>(x.c[i]) * y.c[j], exponent_)) *
               bnum_[i * n + j];
        acc %= exponent_;
      }
    }
    return detail::pmod(acc, exponent_);
  }

  Rat q(const FqfElement& x) const { return reduce_mod2(Rat(q_num(x), exponent_)); }
  Rat b(const FqfElement& x, const FqfElement& y) const { return reduce_mod1(Rat(b_num(x, y), exponent_)); }
  bool is_isotropic(const FqfElement& x) const { return q_num(x) == 0; }

  FqfElement zero() const { return FqfElement{std::vector<std::int64_t>(rank(), 0)}; }

  FqfElement generator(std::size_t i) const {
    FqfElement g = zero();
    g.c[i] = 1;
    return g;
  }

  FqfElement reduce(std::vector<std::int64_t> c) const {
    if (c.size() != rank()) fail(ErrorKind::BadParameter, "element has the wrong number of coordinates");
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = detail::pmod(c[i], orders_[i]);
    return FqfElement{std::move(c)};
  }

  FqfElement add(const FqfElement& x, const FqfElement& y) const {
    FqfElement r = x;
    for (std::size_t i = 0; i < rank(); ++i) {
      r.c[i] += y.c[i];
      if (r.c[i] >= orders_[i]) r.c[i] -= orders_[i];
    }
    return r;
  }

  FqfElement neg(const FqfElement& x) const {
    FqfElement r = x;
    for (std::size_t i = 0; i < rank(); ++i) r.c[i] = r.c[i] == 0 ? 0 : orders_[i] - r.c[i];
    return r;
  }

  FqfElement scale(const FqfElement& x, std::int64_t k) const {
    FqfElement r = x;
    for (std::size_t i = 0; i < rank(); ++i) r.c[i] = detail::pmod(static_cast<__int128>(r.c[i]) * k, orders_[i]);
    return r;
  }

  std::int64_t order_of(const FqfElement& x) const {
    std::int64_t o = 1;
    for (std::size_t i = 0; i < rank(); ++i) o = std::lcm(o, orders_[i] / std::gcd(orders_[i], x.c[i]));
    return o;
  }

  /// Mixed-radix index with the last coordinate varying fastest (index order = lex order).
  std::uint64_t index_of(const FqfElement& x) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < rank(); ++i) idx = idx * static_cast<std::uint64_t>(orders_[i]) + x.c[i];
    return idx;
  }

  FqfElement element_at(std::uint64_t idx) const {
    FqfElement x = zero();
    for (std::size_t i = rank(); i-- > 0;) {
      x.c[i] = static_cast<std::int64_t>(idx % orders_[i]);
      idx /= orders_[i];
    }
    return x;
  }

  void check_enumerable(std::uint64_t bound) const {
    if (size_ > bound)
      fail(ErrorKind::GroupTooLarge,
           "group of order " + std::to_string(size_) + " exceeds enumeration bound " + std::to_string(bound));
  }

  const std::optional<DualLifts>& provenance() const noexcept { return lifts_; }
  void set_provenance(DualLifts lifts) { lifts_ = std::move(lifts); }

  /// Class of x in L*/L; requires provenance.
  FqfElement element_from_dual(const RatVector& x) const {
    if (!lifts_) fail(ErrorKind::BadParameter, "form has no lattice provenance");
    auto y = to_integral(to_rational(lifts_->gram) * x);
    if (!y) fail(ErrorKind::BadParameter, "vector is not in the dual lattice");
    std::vector<std::int64_t> c(rank());
    for (std::size_t i = 0; i < rank(); ++i) {
      Int acc = 0;
      for (std::size_t j = 0; j < y->size(); ++j) acc += lifts_->coord_rows(i, j) * (*y)[j];
      Int r;
      mpz_fdiv_r_ui(r.get_mpz_t(), acc.get_mpz_t(), static_cast<unsigned long>(orders_[i]));
      c[i] = r.get_si();
    }
    return FqfElement{std::move(c)};
  }

  /// A vector of L* in the class x; requires provenance.
  RatVector lift(const FqfElement& x) const {
    if (!lifts_) fail(ErrorKind::BadParameter, "form has no lattice provenance");
    RatVector v(lifts_->lifts.rows(), Rat(0));
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) v[j] += x.c[i] * lifts_->lifts(j, i);
    return v;
  }

  /// q and b values as fractions, for serialization.
  std::vector<Rat> q_values() const {
    std::vector<Rat> out;
    for (std::size_t i = 0; i < rank(); ++i) out.push_back(q_gen(i));
    return out;
  }
  std::vector<std::vector<Rat>> b_values() const {
    std::vector<std::vector<Rat>> out(rank());
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j) out[i].push_back(b_gen(i, j));
    return out;
  }

 private:
  std::vector<std::int64_t> orders_;
  std::int64_t exponent_ = 1;
  std::vector<std::int64_t> qnum_;
  std::vector<std::int64_t> bnum_;
  std::uint64_t size_ = 1;
  std::optional<DualLifts> lifts_;
};

// ---------------------------------------------------------------------------

/// A_L = L*/L with generators taken from the Smith form of the Gram matrix.
inline FiniteQuadraticForm discriminant_form(const Lattice& l) {
  if (!l.is_even()) fail(ErrorKind::OddLattice, "discriminant form needs an even lattice");
  const IntMatrix& g = l.gram();
  const std::size_t n = l.rank();
  auto snf = smith_normal_form(g);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (snf.diag[i] > 1) idx.push_back(i);
  const std::size_t r = idx.size();
  std::vector<std::int64_t> orders;
  RatMatrix lifts(n, r);
  IntMatrix coord_rows(r, n);
  for (std::size_t a = 0; a < r; ++a) {
    const std::size_t i = idx[a];
    orders.push_back(detail::to_i64(snf.diag[i], "discriminant group too large"));
    for (std::size_t j = 0; j < n; ++j) {
      lifts(j, a) = Rat(snf.right(j, i), snf.diag[i]);
      lifts(j, a).canonicalize();
      coord_rows(a, j) = snf.left(i, j);
    }
  }
  std::vector<Rat> q(r);
  std::vector<std::vector<Rat>> b(r, std::vector<Rat>(r));
  for (std::size_t a = 0; a < r; ++a) {
    RatVector xa = lifts.column(a);
    q[a] = bilinear(g, xa, xa);
    for (std::size_t c = 0; c < r; ++c) b[a][c] = bilinear(g, xa, lifts.column(c));
  }
  FiniteQuadraticForm f(orders, q, b);
  f.set_provenance(DualLifts{g, std::move(lifts), std::move(coord_rows)});
  return f;
}

// ---------------------------------------------------------------------------

struct FqfSubgroup {
  std::vector<FqfElement> generators;  // canonical: greedy over sorted members
  std::vector<std::uint64_t> members;  // sorted element indices

  std::uint64_t order() const { return members.size(); }
  bool contains(const FiniteQuadraticForm& a, const FqfElement& x) const {
    return std::binary_search(members.begin(), members.end(), a.index_of(x));
  }
  bool operator==(const FqfSubgroup& o) const { return members == o.members; }
};

namespace detail {

inline std::set<std::uint64_t> closure(const FiniteQuadraticForm& a, const std::vector<FqfElement>& gens) {
  std::set<std::uint64_t> members{0};
  std::vector<FqfElement> frontier{a.zero()};
  while (!frontier.empty()) {
    std::vector<FqfElement> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        FqfElement y = a.add(x, g);
        if (members.insert(a.index_of(y)).second) next.push_back(std::move(y));
      }
    frontier = std::move(next);
  }
  return members;
}

}  // namespace detail

/// Subgroup generated by gens.  Generators are canonical: members are scanned in
/// index order and kept when they lie outside the span of those already kept.
inline FqfSubgroup span(const FiniteQuadraticForm& a, const std::vector<FqfElement>& gens) {
  auto members = detail::closure(a, gens);
  FqfSubgroup h;
  h.members.assign(members.begin(), members.end());
  std::set<std::uint64_t> current{0};
  for (auto idx : h.members) {
    if (current.count(idx)) continue;
    h.generators.push_back(a.element_at(idx));
    current = detail::closure(a, h.generators);
  }
  return h;
}

/// Validate that the listed elements form a subgroup.
inline FqfSubgroup subgroup_from_members(const FiniteQuadraticForm& a, const std::vector<FqfElement>& elems) {
  FqfSubgroup h = span(a, elems);
  if (h.members.size() != std::set<std::uint64_t>([&] {
        std::set<std::uint64_t> s;
        for (const auto& e : elems) s.insert(a.index_of(a.reduce(e.c)));
        return s;
      }())
                              .size())
    fail(ErrorKind::BadParameter, "element list is not closed under addition");
  return h;
}

inline bool is_isotropic_subgroup(const FiniteQuadraticForm& a, const FqfSubgroup& h) {
  for (const auto& g : h.generators) {
    if (a.q_num(g) != 0) return false;
    for (const auto& g2 : h.generators)
      if (a.b_num(g, g2) != 0) return false;
  }
  return true;
}

inline std::vector<FqfElement> isotropic_elements(const FiniteQuadraticForm& a,
                                                  std::uint64_t bound = kDefaultEnumerationBound) {
  a.check_enumerable(bound);
  std::vector<FqfElement> out;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    FqfElement x = a.element_at(i);
    if (a.q_num(x) == 0) out.push_back(std::move(x));
  }
  return out;
}

/// One representative per {x, -x}: the lexicographically smaller one.
inline std::vector<FqfElement> mod_pm1(const FiniteQuadraticForm& a, const std::vector<FqfElement>& xs) {
  std::set<std::uint64_t> reps;
  for (const auto& x : xs) reps.insert(std::min(a.index_of(x), a.index_of(a.neg(x))));
  std::vector<FqfElement> out;
  for (auto r : reps) out.push_back(a.element_at(r));
  return out;
}

/// Every subgroup on which q vanishes identically, ordered by (order, members).
inline std::vector<FqfSubgroup> isotropic_subgroups(const FiniteQuadraticForm& a,
                                                    std::uint64_t bound = kDefaultEnumerationBound) {
  const auto iso = isotropic_elements(a, bound);
  std::map<std::vector<std::uint64_t>, FqfSubgroup> found;
  FqfSubgroup trivial = span(a, {});
  found.emplace(trivial.members, trivial);
  std::vector<FqfSubgroup> frontier{trivial};
  while (!frontier.empty()) {
    std::vector<FqfSubgroup> next;
    for (const auto& h : frontier) {
      for (const auto& x : iso) {
        if (h.contains(a, x)) continue;
        bool orth = std::all_of(h.generators.begin(), h.generators.end(),
                                [&](const FqfElement& g) { return a.b_num(x, g) == 0; });
        if (!orth) continue;
        auto gens = h.generators;
        gens.push_back(x);
        FqfSubgroup bigger = span(a, gens);
        if (found.emplace(bigger.members, bigger).second) next.push_back(bigger);
      }
    }
    frontier = std::move(next);
  }
  std::vector<FqfSubgroup> out;
  for (auto& [k, h] : found) out.push_back(h);
  std::stable_sort(out.begin(), out.end(), [](const FqfSubgroup& x, const FqfSubgroup& y) {
    if (x.order() != y.order()) return x.order() < y.order();
    return x.members < y.members;
  });
  return out;
}

// ---------------------------------------------------------------------------

/// S/H for subgroups H <= S of A given by generators, with the form induced from
/// A.  Generators of the result are expressed as elements of A.
struct Subquotient {
  FiniteQuadraticForm form;
  std::vector<FqfElement> representatives;  // in A, one per generator of form
};

inline Subquotient subquotient(const FiniteQuadraticForm& a, const std::vector<FqfElement>& s_gens,
                               const std::vector<FqfElement>& h_gens) {
  const std::size_t r = a.rank(), g = s_gens.size(), k = h_gens.size();
  if (r == 0 || g == 0) return {FiniteQuadraticForm(), {}};
  // Relations on Z^g: c with sum c_j s_j in H, i.e. kernel of [S | H | D] projected to c.
  IntMatrix m(r, g + k + r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < g; ++j) m(i, j) = s_gens[j].c[i];
    for (std::size_t j = 0; j < k; ++j) m(i, g + j) = h_gens[j].c[i];
    m(i, g + k + i) = a.orders()[i];
  }
  IntMatrix ker = integer_kernel(m);
  IntMatrix rel(g, ker.cols());
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < ker.cols(); ++j) rel(i, j) = ker(i, j);
  auto snf = smith_normal_form(rel);
  if (snf.rank() != g) fail(ErrorKind::BadParameter, "subquotient is infinite");
  auto uinv = to_integral(*inverse(snf.left));
  std::vector<std::int64_t> orders;
  std::vector<FqfElement> reps;
  for (std::size_t i = 0; i < g; ++i) {
    if (snf.diag[i] == 1) continue;
    orders.push_back(detail::to_i64(snf.diag[i], "subquotient too large"));
    FqfElement x = a.zero();
    for (std::size_t j = 0; j < g; ++j) {
      Int cj = (*uinv)(j, i);
      Int red;
      mpz_fdiv_r_ui(red.get_mpz_t(), cj.get_mpz_t(), static_cast<unsigned long>(a.exponent()));
      x = a.add(x, a.scale(s_gens[j], red.get_si()));
    }
    reps.push_back(std::move(x));
  }
  std::vector<Rat> q;
  std::vector<std::vector<Rat>> b(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    q.push_back(a.q(reps[i]));
    for (std::size_t j = 0; j < reps.size(); ++j) b[i].push_back(a.b(reps[i], reps[j]));
  }
  return {FiniteQuadraticForm(orders, q, b), std::move(reps)};
}

/// Same form, re-expressed on invariant-factor generators d1 | d2 | ...
inline FiniteQuadraticForm normalized(const FiniteQuadraticForm& a) {
  std::vector<FqfElement> gens;
  for (std::size_t i = 0; i < a.rank(); ++i) gens.push_back(a.generator(i));
  return subquotient(a, gens, {}).form;
}

inline FiniteQuadraticForm orthogonal_sum(const FiniteQuadraticForm& x, const FiniteQuadraticForm& y) {
  const std::size_t n = x.rank() + y.rank();
  std::vector<std::int64_t> orders = x.orders();
  orders.insert(orders.end(), y.orders().begin(), y.orders().end());
  std::vector<Rat> q = x.q_values();
  for (auto& v : y.q_values()) q.push_back(v);
  std::vector<std::vector<Rat>> b(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < x.rank(); ++i)
    for (std::size_t j = 0; j < x.rank(); ++j) b[i][j] = x.b_gen(i, j);
  for (std::size_t i = 0; i < y.rank(); ++i)
    for (std::size_t j = 0; j < y.rank(); ++j) b[x.rank() + i][x.rank() + j] = y.b_gen(i, j);
  return normalized(FiniteQuadraticForm(orders, q, b));
}

/// H^perp / H for an isotropic subgroup H.
inline FiniteQuadraticForm perp_quotient(const FiniteQuadraticForm& a, const FqfSubgroup& h,
                                         std::uint64_t bound = kDefaultEnumerationBound) {
  if (!is_isotropic_subgroup(a, h)) fail(ErrorKind::NotIsotropic, "H is not isotropic");
  a.check_enumerable(bound);
  std::vector<FqfElement> perp;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    FqfElement x = a.element_at(i);
    bool orth = std::all_of(h.generators.begin(), h.generators.end(),
                            [&](const FqfElement& g) { return a.b_num(x, g) == 0; });
    if (orth) perp.push_back(std::move(x));
  }
  FqfSubgroup perp_group = span(a, perp);
  return subquotient(a, perp_group.generators, h.generators).form;
}

// ---------------------------------------------------------------------------
// Homomorphisms of forms, given by the images of the source generators.

struct FormMap {
  std::vector<FqfElement> images;
  bool operator==(const FormMap&) const = default;
  auto operator<=>(const FormMap&) const = default;
};

inline FqfElement apply_map(const FiniteQuadraticForm& src, const FiniteQuadraticForm& dst, const FormMap& f,
                        const FqfElement& x) {
  FqfElement y = dst.zero();
  for (std::size_t i = 0; i < src.rank(); ++i)
    if (x.c[i] != 0) y = dst.add(y, dst.scale(f.images[i], x.c[i]));
  return y;
}

namespace detail {

/// a/e1 == b/e2 modulo m (m = 2 for q values, 1 for b values).
inline bool same_value(std::int64_t a, std::int64_t e1, std::int64_t b, std::int64_t e2, std::int64_t m) {
  __int128 mod = static_cast<__int128>(m) * e1 * e2;
  __int128 diff = static_cast<__int128>(a) * e2 - static_cast<__int128>(b) * e1;
  diff %= mod;
  return diff == 0;
}

enum class MapSearch { Isomorphism, Embedding };

/// Backtracking over images of generators with matching order, q and b.
inline void search_maps(const FiniteQuadraticForm& src, const FiniteQuadraticForm& dst, MapSearch mode,
                        bool collect_all, std::vector<FormMap>& out, std::uint64_t bound) {
  src.check_enumerable(bound);
  dst.check_enumerable(bound);
  if (mode == MapSearch::Isomorphism && src.size() != dst.size()) return;
  if (src.size() > dst.size()) return;
  const std::size_t r = src.rank();
  std::vector<std::vector<FqfElement>> cands(r);
  std::vector<std::int64_t> src_q(r);
  for (std::size_t i = 0; i < r; ++i) src_q[i] = src.q_num(src.generator(i));
  for (std::uint64_t idx = 0; idx < dst.size(); ++idx) {
    FqfElement y = dst.element_at(idx);
    const std::int64_t oy = dst.order_of(y);
    const std::int64_t qy = dst.q_num(y);
    for (std::size_t i = 0; i < r; ++i)
      if (oy == src.orders()[i] && same_value(src_q[i], src.exponent(), qy, dst.exponent(), 2))
        cands[i].push_back(y);
  }
  std::vector<std::vector<std::int64_t>> src_b(r, std::vector<std::int64_t>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) src_b[i][j] = src.b_num(src.generator(i), src.generator(j));

  FormMap cur;
  cur.images.resize(r);
  bool done = false;
  std::function<void(std::size_t)> dfs = [&](std::size_t i) {
    if (done) return;
    if (i == r) {
      // Injectivity: the kernel of the induced homomorphism is trivial.
      for (std::uint64_t idx = 1; idx < src.size(); ++idx) {
        FqfElement y = apply_map(src, dst, cur, src.element_at(idx));
        if (dst.index_of(y) == 0) return;
      }
      out.push_back(cur);
      if (!collect_all) done = true;
      return;
    }
    for (const auto& y : cands[i]) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j)
        ok = same_value(src_b[i][j], src.exponent(), dst.b_num(y, cur.images[j]), dst.exponent(), 1);
      if (!ok) continue;
      cur.images[i] = y;
      dfs(i + 1);
      if (done) return;
    }
  };
  dfs(0);
}

}  // namespace detail

/// A q-preserving group isomorphism a -> b, if one exists.
inline std::optional<FormMap> are_isometric(const FiniteQuadraticForm& a, const FiniteQuadraticForm& b,
                                            std::uint64_t bound = kDefaultEnumerationBound) {
  std::vector<FormMap> out;
  detail::search_maps(a, b, detail::MapSearch::Isomorphism, false, out, bound);
  if (out.empty()) return std::nullopt;
  return out.front();
}

/// All q-preserving automorphisms, identity first.
inline std::vector<FormMap> orthogonal_group(const FiniteQuadraticForm& a,
                                             std::uint64_t bound = kDefaultEnumerationBound) {
  std::vector<FormMap> out;
  detail::search_maps(a, a, detail::MapSearch::Isomorphism, true, out, bound);
  FormMap id;
  for (std::size_t i = 0; i < a.rank(); ++i) id.images.push_back(a.generator(i));
  std::sort(out.begin(), out.end());
  auto it = std::find(out.begin(), out.end(), id);
  if (it != out.end()) std::rotate(out.begin(), it, it + 1);
  return out;
}

inline std::optional<FormMap> find_embedding(const FiniteQuadraticForm& a, const FiniteQuadraticForm& b,
                                             std::uint64_t bound = kDefaultEnumerationBound) {
  std::vector<FormMap> out;
  detail::search_maps(a, b, detail::MapSearch::Embedding, false, out, bound);
  if (out.empty()) return std::nullopt;
  return out.front();
}

/// An injective q-preserving homomorphism a -> b exists.
inline bool embeds(const FiniteQuadraticForm& a, const FiniteQuadraticForm& b,
                   std::uint64_t bound = kDefaultEnumerationBound) {
  return find_embedding(a, b, bound).has_value();
}

/// f preserves q on generators and b on pairs (hence everywhere).
inline bool preserves_form(const FiniteQuadraticForm& src, const FiniteQuadraticForm& dst, const FormMap& f) {
  for (std::size_t i = 0; i < src.rank(); ++i) {
    if (dst.order_of(f.images[i]) > src.orders()[i] || src.orders()[i] % dst.order_of(f.images[i]) != 0)
      return false;
    if (!detail::same_value(src.q_num(src.generator(i)), src.exponent(), dst.q_num(f.images[i]), dst.exponent(),
                            2))
      return false;
    for (std::size_t j = 0; j < src.rank(); ++j)
      if (!detail::same_value(src.b_num(src.generator(i), src.generator(j)), src.exponent(),
                              dst.b_num(f.images[i], f.images[j]), dst.exponent(), 1))
        return false;
  }
  return true;
}

inline FormMap compose(const FiniteQuadraticForm& a, const FormMap& outer, const FormMap& inner) {
  FormMap r;
  for (const auto& im : inner.images) r.images.push_back(apply_map(a, a, outer, im));
  return r;
}

}  // namespace cuspidal
