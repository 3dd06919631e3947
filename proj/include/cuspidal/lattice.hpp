#pragma once

// Even integral lattices given by Gram matrices, vectors in L (x) Q, sums,
// twists, orthogonal complements and rational splittings.

#include <cctype>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuspidal/errors.hpp"
#include "cuspidal/linalg.hpp"

namespace cuspidal {

class Lattice {
 public:
  Lattice() : Lattice(IntMatrix(0, 0)) {}

  explicit Lattice(IntMatrix gram, std::vector<std::string> labels = {}) {
    if (!gram.is_symmetric()) fail(ErrorKind::BadParameter, "Gram matrix must be symmetric");
    auto data = std::make_shared<Data>();
    data->det = determinant(gram);
    if (data->det == 0) fail(ErrorKind::SingularMatrix, "Gram matrix is degenerate");
    data->signature = gram.rows() == 0 ? Signature{} : signature_of_symmetric(gram);
    data->even = true;
    for (std::size_t i = 0; i < gram.rows(); ++i)
      if (mpz_odd_p(gram(i, i).get_mpz_t())) data->even = false;
    if (labels.empty())
      for (std::size_t i = 0; i < gram.rows(); ++i) labels.push_back("x" + std::to_string(i + 1));
    if (labels.size() != gram.rows()) fail(ErrorKind::BadParameter, "label count differs from rank");
    data->labels = std::move(labels);
    data->gram = std::move(gram);
    data_ = std::move(data);
  }

  const IntMatrix& gram() const noexcept { return data_->gram; }
  std::size_t rank() const noexcept { return data_->gram.rows(); }
  const Int& det() const noexcept { return data_->det; }
  const Signature& signature() const noexcept { return data_->signature; }
  bool is_even() const noexcept { return data_->even; }
  bool is_unimodular() const { return abs(data_->det) == 1; }
  bool is_negative_definite() const { return data_->signature.negative == rank(); }
  bool is_positive_definite() const { return data_->signature.positive == rank(); }
  bool is_definite() const { return is_negative_definite() || is_positive_definite(); }
  const std::vector<std::string>& labels() const noexcept { return data_->labels; }

  /// Same underlying lattice: identical object, or identical Gram matrix.
  bool same_as(const Lattice& o) const { return data_ == o.data_ || data_->gram == o.data_->gram; }

 private:
  struct Data {
    IntMatrix gram;
    std::vector<std::string> labels;
    Int det;
    Signature signature;
    bool even = true;
  };
  std::shared_ptr<const Data> data_;
};

class LatticeVector {
 public:
  LatticeVector(Lattice home, RatVector coords) : home_(std::move(home)), coords_(std::move(coords)) {
    if (coords_.size() != home_.rank()) fail(ErrorKind::BadParameter, "coordinate count differs from rank");
  }
  LatticeVector(Lattice home, const IntVector& coords) : LatticeVector(std::move(home), to_rational(coords)) {}

  const Lattice& home() const noexcept { return home_; }
  const RatVector& coords() const noexcept { return coords_; }

  bool is_integral() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rat& c) { return c.get_den() == 1; });
  }
  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rat& c) { return c == 0; });
  }
  std::optional<IntVector> integral_coords() const { return to_integral(coords_); }

  LatticeVector operator+(const LatticeVector& o) const {
    check_same(o);
    RatVector c = coords_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coords_[i];
    return {home_, std::move(c)};
  }
  LatticeVector operator-(const LatticeVector& o) const {
    check_same(o);
    RatVector c = coords_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.coords_[i];
    return {home_, std::move(c)};
  }
  LatticeVector operator*(const Rat& s) const {
    RatVector c = coords_;
    for (auto& x : c) x *= s;
    return {home_, std::move(c)};
  }
  bool operator==(const LatticeVector& o) const { return home_.same_as(o.home_) && coords_ == o.coords_; }

  void check_same(const LatticeVector& o) const {
    if (!home_.same_as(o.home_)) fail(ErrorKind::MixedLattices, "vectors live in different lattices");
  }

 private:
  Lattice home_;
  RatVector coords_;
};

inline Rat pair(const LatticeVector& v, const LatticeVector& w) {
  v.check_same(w);
  return bilinear(v.home().gram(), v.coords(), w.coords());
}

inline Rat norm(const LatticeVector& v) { return pair(v, v); }

/// Positive generator of the ideal (v, L).
inline Int divisibility(const LatticeVector& v) {
  auto c = v.integral_coords();
  if (!c) fail(ErrorKind::BadParameter, "divisibility needs an integral vector");
  if (v.is_zero()) fail(ErrorKind::ZeroVector, "divisibility of the zero vector");
  IntVector pairings = v.home().gram() * *c;
  Int g = 0;
  for (const auto& p : pairings) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), p.get_mpz_t());
  return g;
}

// ---------------------------------------------------------------------------
// Standard lattices, negative definite convention for the ADE family.

struct StandardKind {
  enum class Family { U, A, D, E, B, Rank1 };
  Family family;
  long param = 0;
};

namespace detail {

inline IntMatrix dynkin_gram(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  IntMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) g(i, i) = -2;
  for (auto [a, b] : edges) g(a, b) = g(b, a) = 1;
  return g;
}

inline std::vector<std::string> numbered(const std::string& stem, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i + 1));
  return out;
}

}  // namespace detail

inline Lattice lattice_U() { return Lattice(IntMatrix{{0, 1}, {1, 0}}, {"u", "v"}); }

/// A_k: simple roots in a chain.
inline Lattice lattice_A(long k) {
  if (k < 1) fail(ErrorKind::BadParameter, "A_k needs k >= 1");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (long i = 0; i + 1 < k; ++i) edges.emplace_back(i, i + 1);
  return Lattice(detail::dynkin_gram(k, edges), detail::numbered("a", k));
}

/// D_h: chain 0-1-...-(h-2) with node h-1 attached to node h-3.
inline Lattice lattice_D(long h) {
  if (h < 4) fail(ErrorKind::BadParameter, "D_h needs h >= 4");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (long i = 0; i + 2 < h; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(h - 3, h - 1);
  return Lattice(detail::dynkin_gram(h, edges), detail::numbered("d", h));
}

/// E_l in Bourbaki order: chain 0-2-3-...-(l-1) with node 1 attached to node 3.
inline Lattice lattice_E(long l) {
  if (l < 6 || l > 8) fail(ErrorKind::BadParameter, "E_l needs l in {6,7,8}");
  std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 2}, {1, 3}};
  for (long i = 2; i + 1 < l; ++i) edges.emplace_back(i, i + 1);
  return Lattice(detail::dynkin_gram(l, edges), detail::numbered("e", l));
}

inline Lattice lattice_B(long d) {
  if (d <= 0 || d % 4 != 3) fail(ErrorKind::BadParameter, "B_d needs d = 3 mod 4");
  return Lattice(IntMatrix{{-(d + 1) / 2, 1}, {1, -2}}, {"b1", "b2"});
}

inline Lattice lattice_rank1(long n) {
  if (n == 0 || n % 2 != 0) fail(ErrorKind::BadParameter, "<n> needs a nonzero even n");
  return Lattice(IntMatrix{{n}}, {"g"});
}

inline Lattice make_standard(const StandardKind& kind) {
  switch (kind.family) {
    case StandardKind::Family::U: return lattice_U();
    case StandardKind::Family::A: return lattice_A(kind.param);
    case StandardKind::Family::D: return lattice_D(kind.param);
    case StandardKind::Family::E: return lattice_E(kind.param);
    case StandardKind::Family::B: return lattice_B(kind.param);
    case StandardKind::Family::Rank1: return lattice_rank1(kind.param);
  }
  fail(ErrorKind::BadParameter, "unknown lattice family");
}

inline Lattice direct_sum(const std::vector<Lattice>& parts) {
  if (parts.empty()) fail(ErrorKind::BadParameter, "direct sum of no lattices");
  std::size_t n = 0;
  for (const auto& p : parts) n += p.rank();
  IntMatrix g(n, n);
  std::vector<std::string> labels;
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.rank(); ++i)
      for (std::size_t j = 0; j < p.rank(); ++j) g(off + i, off + j) = p.gram()(i, j);
    labels.insert(labels.end(), p.labels().begin(), p.labels().end());
    off += p.rank();
  }
  return Lattice(std::move(g), std::move(labels));
}

/// Form multiplied by any nonzero integer (t = -1 flips the sign convention).
inline Lattice scaled(const Lattice& l, long t) {
  if (t == 0) fail(ErrorKind::BadParameter, "scaling by zero");
  return Lattice(l.gram() * Int(t), l.labels());
}

/// L(t) for t >= 1.
inline Lattice twist(const Lattice& l, long t) {
  if (t < 1) fail(ErrorKind::BadParameter, "twist needs t >= 1");
  return scaled(l, t);
}

// ---------------------------------------------------------------------------
// Builtin names: "U", "A5", "D16", "E8", "B7", "<-4>", optional multiplicity
// prefix ("2E8"), optional twist suffix ("U(2)"), joined with '+'.

struct SpecTerm {
  StandardKind kind;
  long multiplicity = 1;
  long twist = 1;
};

inline std::vector<SpecTerm> parse_spec_terms(std::string_view spec) {
  std::vector<SpecTerm> terms;
  std::size_t pos = 0;
  auto bad = [&](const std::string& why) -> void {
    fail(ErrorKind::ParseError, "lattice spec '" + std::string(spec) + "': " + why);
  };
  auto skip_ws = [&] {
    while (pos < spec.size() && std::isspace(static_cast<unsigned char>(spec[pos]))) ++pos;
  };
  auto read_int = [&](bool allow_sign) -> long {
    skip_ws();
    std::size_t start = pos;
    if (allow_sign && pos < spec.size() && (spec[pos] == '-' || spec[pos] == '+')) ++pos;
    while (pos < spec.size() && std::isdigit(static_cast<unsigned char>(spec[pos]))) ++pos;
    if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(spec[start]))))
      bad("expected an integer");
    return std::stol(std::string(spec.substr(start, pos - start)));
  };
  skip_ws();
  if (pos == spec.size()) bad("empty");
  while (true) {
    SpecTerm term{StandardKind{StandardKind::Family::U, 0}};
    skip_ws();
    if (pos < spec.size() && std::isdigit(static_cast<unsigned char>(spec[pos]))) {
      term.multiplicity = read_int(false);
      if (term.multiplicity < 1) bad("multiplicity must be positive");
    }
    skip_ws();
    if (pos >= spec.size()) bad("missing lattice name");
    char c = spec[pos];
    if (c == '<') {
      ++pos;
      term.kind = {StandardKind::Family::Rank1, read_int(true)};
      skip_ws();
      if (pos >= spec.size() || spec[pos] != '>') bad("missing '>'");
      ++pos;
    } else if (c == 'U') {
      ++pos;
      term.kind = {StandardKind::Family::U, 0};
    } else if (c == 'A' || c == 'D' || c == 'E' || c == 'B') {
      ++pos;
      long p = read_int(false);
      auto fam = c == 'A'   ? StandardKind::Family::A
                 : c == 'D' ? StandardKind::Family::D
                 : c == 'E' ? StandardKind::Family::E
                            : StandardKind::Family::B;
      term.kind = {fam, p};
    } else {
      bad(std::string("unknown lattice name starting with '") + c + "'");
    }
    skip_ws();
    if (pos < spec.size() && spec[pos] == '(') {
      ++pos;
      term.twist = read_int(true);
      skip_ws();
      if (pos >= spec.size() || spec[pos] != ')') bad("missing ')'");
      ++pos;
    }
    terms.push_back(term);
    skip_ws();
    if (pos == spec.size()) break;
    if (spec[pos] != '+') bad("expected '+'");
    ++pos;
  }
  return terms;
}

inline Lattice lattice_from_terms(const std::vector<SpecTerm>& terms) {
  std::vector<Lattice> parts;
  for (const auto& t : terms) {
    Lattice base = make_standard(t.kind);
    if (t.twist != 1) base = scaled(base, t.twist);
    for (long i = 0; i < t.multiplicity; ++i) parts.push_back(base);
  }
  return direct_sum(parts);
}

inline Lattice parse_lattice_spec(std::string_view spec) {
  try {
    return lattice_from_terms(parse_spec_terms(spec));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    fail(ErrorKind::ParseError, "lattice spec '" + std::string(spec) + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Sublattices, complements and rational splittings.

/// A sublattice given by a basis (columns, ambient coordinates) with its Gram matrix.
struct Sublattice {
  Lattice lattice;
  IntMatrix basis;
};

inline IntMatrix vectors_to_columns(const Lattice& ambient, const std::vector<LatticeVector>& vs) {
  IntMatrix m(ambient.rank(), vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) {
    if (!vs[j].home().same_as(ambient)) fail(ErrorKind::MixedLattices, "vector not in the ambient lattice");
    auto c = vs[j].integral_coords();
    if (!c) fail(ErrorKind::BadParameter, "sublattice generators must be integral");
    m.set_column(j, *c);
  }
  return m;
}

inline IntMatrix restricted_gram(const Lattice& ambient, const IntMatrix& basis) {
  return basis.transpose() * ambient.gram() * basis;
}

/// Saturated iff every invariant factor of the basis matrix is 1.
inline bool is_primitive(const IntMatrix& basis) {
  auto snf = smith_normal_form(basis);
  if (snf.rank() != basis.cols()) return false;
  for (std::size_t i = 0; i < basis.cols(); ++i)
    if (snf.diag[i] != 1) return false;
  return true;
}

/// Reduce a definite sublattice basis with LLL; others are left alone.
inline Sublattice make_sublattice(const Lattice& ambient, IntMatrix basis) {
  IntMatrix g = restricted_gram(ambient, basis);
  if (determinant(g) == 0) fail(ErrorKind::DegenerateComplement, "sublattice form is degenerate");
  Signature s = signature_of_symmetric(g);
  if (g.rows() > 1 && (s.positive == 0 || s.negative == 0)) {
    auto red = lll_reduce(g);
    basis = basis * red.transform;
    g = std::move(red.gram);
  }
  return {Lattice(std::move(g)), std::move(basis)};
}

/// Primitive basis of {x in L : (x, s) = 0 for all s}.
inline Sublattice orthogonal_complement(const Lattice& ambient, const std::vector<LatticeVector>& s) {
  IntMatrix cols = vectors_to_columns(ambient, s);
  if (rank_of(cols) != s.size()) fail(ErrorKind::DependentInput, "generators are linearly dependent");
  IntMatrix constraints = cols.transpose() * ambient.gram();
  IntMatrix kernel = integer_kernel(constraints);
  IntMatrix g = restricted_gram(ambient, kernel);
  if (determinant(g) == 0) fail(ErrorKind::DegenerateComplement, "orthogonal complement is degenerate");
  return make_sublattice(ambient, std::move(kernel));
}

struct OrthogonalSplitting {
  Lattice ambient;
  IntMatrix left;   // basis of M
  IntMatrix right;  // basis of N = M^perp
  Lattice left_lattice;
  Lattice right_lattice;
};

/// M spanned by the given (primitive) vectors, N its orthogonal complement.
inline OrthogonalSplitting make_splitting(const Lattice& ambient, const std::vector<LatticeVector>& m) {
  IntMatrix left = vectors_to_columns(ambient, m);
  if (rank_of(left) != m.size()) fail(ErrorKind::DependentInput, "generators are linearly dependent");
  if (!is_primitive(left)) fail(ErrorKind::BadParameter, "M is not primitive in the ambient lattice");
  IntMatrix gm = restricted_gram(ambient, left);
  if (determinant(gm) == 0) fail(ErrorKind::DegenerateComplement, "M is degenerate");
  Sublattice n = orthogonal_complement(ambient, m);
  return {ambient, left, n.basis, Lattice(gm), n.lattice};
}

struct RationalSplit {
  RatVector m_part;    // ambient coordinates of delta_M
  RatVector n_part;    // ambient coordinates of delta_N
  RatVector m_coeffs;  // delta_M in the basis of M
  RatVector n_coeffs;  // delta_N in the basis of N
};

namespace detail {

inline RatVector project_coeffs(const Lattice& ambient, const IntMatrix& basis, const RatVector& x) {
  RatMatrix bt_g = to_rational(basis.transpose() * ambient.gram());
  RatVector rhs = bt_g * x;
  auto sol = solve_rational(restricted_gram(ambient, basis), rhs);
  if (!sol) fail(ErrorKind::DegenerateComplement, "projection onto a degenerate sublattice");
  return *sol;
}

}  // namespace detail

inline RationalSplit split_rational(const OrthogonalSplitting& split, const LatticeVector& delta) {
  if (!delta.home().same_as(split.ambient)) fail(ErrorKind::MixedLattices, "delta not in the ambient lattice");
  RationalSplit out;
  out.m_coeffs = detail::project_coeffs(split.ambient, split.left, delta.coords());
  out.n_coeffs = detail::project_coeffs(split.ambient, split.right, delta.coords());
  out.m_part = mul(split.left, out.m_coeffs);
  out.n_part = mul(split.right, out.n_coeffs);
  for (std::size_t i = 0; i < out.m_part.size(); ++i)
    if (out.m_part[i] + out.n_part[i] != delta.coords()[i])
      fail(ErrorKind::BadParameter, "splitting does not span the ambient lattice rationally");
  return out;
}

/// Both projections of delta have negative norm; delta must lie in neither summand.
inline bool delta_prime_test(const OrthogonalSplitting& split, const LatticeVector& delta) {
  if (!delta.is_integral()) fail(ErrorKind::BadParameter, "delta must be integral");
  RationalSplit s = split_rational(split, delta);
  auto is_zero = [](const RatVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rat& x) { return x == 0; });
  };
  if (is_zero(s.m_part) || is_zero(s.n_part)) fail(ErrorKind::MemberOfSummand, "delta lies in M or in N");
  const IntMatrix& g = split.ambient.gram();
  return bilinear(g, s.m_part, s.m_part) < 0 && bilinear(g, s.n_part, s.n_part) < 0;
}

// ---------------------------------------------------------------------------
// Binary forms: Gauss reduction decides isometry of definite rank-2 lattices.

struct ReducedBinaryForm {
  IntMatrix gram;       // [[a, b], [b, c]] with 0 <= 2b <= |a| <= |c|
  IntMatrix transform;  // transform^T * input * transform == gram
};

inline ReducedBinaryForm gauss_reduce(const IntMatrix& g) {
  if (g.rows() != 2 || !g.is_symmetric()) fail(ErrorKind::BadParameter, "binary form needs a 2x2 Gram");
  Signature s = signature_of_symmetric(g);
  if (s.positive != 0 && s.negative != 0) fail(ErrorKind::Unsupported, "indefinite binary forms");
  const Int sign = s.positive == 2 ? 1 : -1;
  Int a = sign * g(0, 0), b = sign * g(0, 1), c = sign * g(1, 1);
  IntMatrix t = IntMatrix::identity(2);
  while (true) {
    if (a > c) {
      std::swap(a, c);
      t.swap_cols(0, 1);
      continue;
    }
    Rat ratio(b, a);
    ratio.canonicalize();
    Int k = round_nearest(ratio);
    if (2 * abs(b) > a && k != 0) {
      // second basis vector <- second - k * first
      c = c - 2 * k * b + k * k * a;
      b = b - k * a;
      for (std::size_t i = 0; i < 2; ++i) t(i, 1) -= k * t(i, 0);
      continue;
    }
    break;
  }
  if (b < 0) {
    b = -b;
    for (std::size_t i = 0; i < 2; ++i) t(i, 1) = -t(i, 1);
  }
  IntMatrix red{{0, 0}, {0, 0}};
  red(0, 0) = sign * a;
  red(0, 1) = red(1, 0) = sign * b;
  red(1, 1) = sign * c;
  if (t.transpose() * g * t != red) fail(ErrorKind::BadParameter, "Gauss reduction bookkeeping mismatch");
  return {std::move(red), std::move(t)};
}

inline bool binary_forms_isometric(const IntMatrix& a, const IntMatrix& b) {
  return gauss_reduce(a).gram == gauss_reduce(b).gram;
}

// ---------------------------------------------------------------------------
// Isometries, reflections and the real spinor norm.

class Isometry {
 public:
  Isometry(IntMatrix matrix, Lattice domain) : matrix_(std::move(matrix)), domain_(std::move(domain)) {
    if (matrix_.rows() != domain_.rank() || matrix_.cols() != domain_.rank())
      fail(ErrorKind::NotIsometry, "matrix shape differs from the lattice rank");
    if (matrix_.transpose() * domain_.gram() * matrix_ != domain_.gram())
      fail(ErrorKind::NotIsometry, "matrix does not preserve the form");
  }

  const IntMatrix& matrix() const noexcept { return matrix_; }
  const Lattice& domain() const noexcept { return domain_; }

  /// this after o
  Isometry compose(const Isometry& o) const { return Isometry(matrix_ * o.matrix_, domain_); }

  static Isometry identity(const Lattice& l) { return Isometry(IntMatrix::identity(l.rank()), l); }

 private:
  IntMatrix matrix_;
  Lattice domain_;
};

/// Matrix of x -> x - 2 (x,v)/(v,v) v acting on coordinate columns.
inline RatMatrix reflection_matrix(const IntMatrix& gram, const RatVector& v) {
  const std::size_t n = gram.rows();
  Rat vv = bilinear(gram, v, v);
  if (vv == 0) fail(ErrorKind::BadParameter, "reflection in an isotropic vector");
  RatVector gv = to_rational(gram) * v;
  RatMatrix r = RatMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) -= 2 * v[i] * gv[j] / vv;
  return r;
}

inline Isometry reflection(const LatticeVector& v) {
  auto m = to_integral(reflection_matrix(v.home().gram(), v.coords()));
  if (!m) fail(ErrorKind::NotIsometry, "reflection is not integral on the lattice");
  return Isometry(std::move(*m), v.home());
}

namespace detail {

inline RatMatrix rational_kernel(const RatMatrix& a) {
  // Clear denominators row by row, then take the integer kernel.
  IntMatrix m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Int l = 1;
    for (std::size_t j = 0; j < a.cols(); ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).get_den_mpz_t());
    for (std::size_t j = 0; j < a.cols(); ++j) {
      Rat x = a(i, j) * l;
      m(i, j) = x.get_num();
    }
  }
  return to_rational(integer_kernel(m));
}

}  // namespace detail

/// Cartan-Dieudonne over Q: vectors v_1..v_m with g = rho_{v_1} o ... o rho_{v_m}.
inline std::vector<RatVector> reflection_factorization(const IntMatrix& gram, const RatMatrix& g) {
  const std::size_t n = gram.rows();
  RatMatrix gr = to_rational(gram);
  RatMatrix h = g;
  std::vector<RatVector> fixed;
  std::vector<RatVector> used;
  auto form = [&](const RatVector& x, const RatVector& y) { return bilinear(gram, x, y); };

  for (std::size_t step = 0; step < n; ++step) {
    RatMatrix constraints(fixed.size(), n);
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      RatVector gw = gr * fixed[i];
      for (std::size_t j = 0; j < n; ++j) constraints(i, j) = gw[j];
    }
    RatMatrix basis = fixed.empty() ? RatMatrix::identity(n) : detail::rational_kernel(constraints);
    std::optional<RatVector> x;
    for (std::size_t j = 0; j < basis.cols() && !x; ++j) {
      RatVector b = basis.column(j);
      if (form(b, b) != 0) x = b;
    }
    for (std::size_t i = 0; i < basis.cols() && !x; ++i)
      for (std::size_t j = i + 1; j < basis.cols() && !x; ++j) {
        RatVector bi = basis.column(i), bj = basis.column(j);
        if (form(bi, bj) != 0) {
          for (std::size_t l = 0; l < n; ++l) bi[l] += bj[l];
          x = bi;
        }
      }
    if (!x) fail(ErrorKind::SingularMatrix, "no anisotropic vector in a nondegenerate complement");

    RatVector y = h * *x;
    if (y != *x) {
      RatVector diff(n), sum(n);
      for (std::size_t l = 0; l < n; ++l) {
        diff[l] = (*x)[l] - y[l];
        sum[l] = (*x)[l] + y[l];
      }
      if (form(diff, diff) != 0) {
        h = reflection_matrix(gram, diff) * h;
        used.push_back(diff);
      } else {
        // x - y isotropic: rho_{x+y} sends y to -x, then rho_x restores x.
        h = reflection_matrix(gram, *x) * (reflection_matrix(gram, sum) * h);
        used.push_back(sum);
        used.push_back(*x);
      }
    }
    fixed.push_back(*x);
  }
  if (h != RatMatrix::identity(n)) fail(ErrorKind::NotIsometry, "reflection factorization did not terminate");
  return used;
}

/// Real spinor norm: sign of the product of -v_i^2/2 over a reflection factorization.
inline int spinor_norm(const Isometry& g) {
  const IntMatrix& gram = g.domain().gram();
  int sign = 1;
  for (const auto& v : reflection_factorization(gram, to_rational(g.matrix())))
    if (-bilinear(gram, v, v) < 0) sign = -sign;
  return sign;
}

}  // namespace cuspidal
