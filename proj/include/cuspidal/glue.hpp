#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cuspidal/fqf.hpp"
#include "cuspidal/lattice.hpp"
#include "cuspidal/linalg.hpp"
#include "cuspidal/orthogonal_groups.hpp"

namespace cuspidal {

// ---------------------------------------------------------------------------
// Overlattices from isotropic glue.

struct GlueData {
  Lattice base;
  FiniteQuadraticForm base_form;  // discriminant_form(base), with provenance
  FqfSubgroup glue;
};

inline GlueData make_glue(const Lattice& base, const std::vector<FqfElement>& gens) {
  GlueData gd{base, discriminant_form(base), {}};
  gd.glue = span(gd.base_form, gens);
  return gd;
}

struct Overlattice {
  Lattice lattice;
  RatMatrix basis;        // columns: basis of the overlattice in base coordinates
  IntMatrix inclusion;    // columns: base basis vectors in overlattice coordinates
  FiniteQuadraticForm form;  // discriminant_form(lattice)
};

inline Overlattice overlattice(const GlueData& gd) {
  const FiniteQuadraticForm& a = gd.base_form;
  if (!is_isotropic_subgroup(a, gd.glue)) fail(ErrorKind::NotIsotropic, "glue subgroup is not isotropic");
  const std::size_t n = gd.base.rank();
  std::vector<RatVector> gens;
  for (std::size_t i = 0; i < n; ++i) {
    RatVector e(n, Rat(0));
    e[i] = 1;
    gens.push_back(e);
  }
  for (const auto& h : gd.glue.generators) gens.push_back(a.lift(h));
  Int den = 1;
  for (const auto& g : gens)
    for (const auto& x : g) den = lcm(den, x.get_den());
  IntMatrix scaled_gens(n, gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) scaled_gens(i, j) = Int(gens[j][i] * den);
  IntMatrix span_basis = column_span_basis(scaled_gens);
  RatMatrix basis(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      basis(i, j) = Rat(span_basis(i, j), den);
      basis(i, j).canonicalize();
    }
  RatMatrix gr = basis.transpose() * to_rational(gd.base.gram()) * basis;
  auto g = to_integral(gr);
  if (!g) fail(ErrorKind::NonIntegralGlue, "glue produces a non-integral form");
  Lattice e(*g);
  if (!e.is_even()) fail(ErrorKind::NotIsotropic, "glue produces an odd lattice");
  auto inc = to_integral(*inverse(basis));
  if (!inc) fail(ErrorKind::NonIntegralGlue, "base is not contained in the overlattice");
  const Int h = gd.glue.order();
  if (e.det() * h * h != gd.base.det()) fail(ErrorKind::NonIntegralGlue, "determinant identity fails");
  return Overlattice{e, std::move(basis), std::move(*inc), discriminant_form(e)};
}

/// The overlattice form agrees with H^perp/H.
inline bool brieskorn_consistent(const GlueData& gd, const Overlattice& ov,
                                 std::uint64_t bound = kDefaultEnumerationBound) {
  return are_isometric(ov.form, perp_quotient(gd.base_form, gd.glue, bound), bound).has_value();
}

// ---------------------------------------------------------------------------
// Short vectors by Fincke-Pohst with exact rational bounds.

namespace detail {

/// All nonzero y with y^T a y == target (or <= target), one per sign class:
/// the last nonzero coordinate of y is positive.  a positive definite.
inline std::vector<IntVector> fincke_pohst(const IntMatrix& a, const Int& target, bool exact_norm) {
  const std::size_t n = a.rows();
  std::vector<IntVector> out;
  if (n == 0 || target <= 0) return out;
  std::vector<std::vector<Rat>> q(n, std::vector<Rat>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[i][j] = a(i, j);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      q[j][i] = q[i][j];
      q[i][j] /= q[i][i];
    }
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) q[k][l] -= q[k][i] * q[i][l];
  }
  std::vector<Int> y(n, Int(0));
  auto fits = [](const Int& v, const Rat& c, const Rat& s) {
    Rat t = v - c;
    return t * t <= s;
  };
  // remaining: target minus the contribution of coordinates above i.
  std::function<void(std::size_t, const Rat&, bool)> visit = [&](std::size_t i, const Rat& remaining,
                                                                  bool higher_zero) {
    Rat c = 0;
    for (std::size_t j = i + 1; j < n; ++j)
      if (y[j] != 0) c -= q[i][j] * y[j];
    Rat s = remaining / q[i][i];
    Int mid = round_nearest(c);
    if (!fits(mid, c, s)) return;
    const double cd = c.get_d(), rd = std::sqrt(std::max(0.0, s.get_d()));
    Int up(std::floor(cd + rd));
    if (up < mid) up = mid;
    while (!fits(up, c, s)) --up;
    while (fits(up + 1, c, s)) ++up;
    Int lo(std::ceil(cd - rd));
    if (lo > mid) lo = mid;
    while (!fits(lo, c, s)) ++lo;
    while (fits(lo - 1, c, s)) --lo;
    if (higher_zero && lo < 0) lo = 0;
    for (Int v = lo; v <= up; ++v) {
      y[i] = v;
      Rat t = v - c;
      Rat rest = remaining - q[i][i] * t * t;
      const bool zero = higher_zero && v == 0;
      if (i == 0) {
        if (!zero && (!exact_norm || rest == 0)) out.push_back(y);
      } else {
        visit(i - 1, rest, zero);
      }
    }
    y[i] = 0;
  };
  visit(n - 1, Rat(target), true);
  return out;
}

/// First nonzero coordinate positive.
inline IntVector sign_normalized(IntVector v) {
  for (const auto& x : v) {
    if (x == 0) continue;
    if (x < 0)
      for (auto& y : v) y = -y;
    break;
  }
  return v;
}

inline IntVector mul_int(const IntMatrix& m, const IntVector& v) { return m * v; }

}  // namespace detail

/// Vectors of the given (negative) norm in a negative definite lattice, one per
/// sign class, each normalized so its first nonzero coordinate is positive, sorted.
inline std::vector<IntVector> short_vectors(const Lattice& l, const Int& norm) {
  if (!l.is_negative_definite()) fail(ErrorKind::NotNegativeDefinite, "short vectors need a negative definite lattice");
  if (norm >= 0) fail(ErrorKind::BadParameter, "norm must be negative");
  const IntMatrix pos = l.gram() * Int(-1);
  const auto red = lll_reduce(pos);
  std::vector<IntVector> out;
  for (const auto& y : detail::fincke_pohst(red.gram, -norm, true))
    out.push_back(detail::sign_normalized(red.transform * y));
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// ADE root systems.

struct RootComponent {
  char type = 'A';  // 'A', 'D' or 'E'
  long rank = 1;
  bool operator==(const RootComponent&) const = default;
};

inline std::size_t component_order(const RootComponent& c) {
  return c.type == 'E' ? 0 : c.type == 'D' ? 1 : 2;
}

inline std::size_t root_count(const RootComponent& c) {
  const auto n = static_cast<std::size_t>(c.rank);
  if (c.type == 'A') return n * (n + 1);
  if (c.type == 'D') return 2 * n * (n - 1);
  return n == 6 ? 72 : n == 7 ? 126 : 240;
}

struct RootSystem {
  std::vector<RootComponent> components;  // canonical order: E, D, A, then descending rank

  void canonicalize() {
    std::stable_sort(components.begin(), components.end(), [](const RootComponent& a, const RootComponent& b) {
      if (component_order(a) != component_order(b)) return component_order(a) < component_order(b);
      return a.rank > b.rank;
    });
  }
  std::size_t total_roots() const {
    std::size_t s = 0;
    for (const auto& c : components) s += root_count(c);
    return s;
  }
  long rank() const {
    long r = 0;
    for (const auto& c : components) r += c.rank;
    return r;
  }
  bool operator==(const RootSystem& o) const { return components == o.components; }
};

inline std::string to_string(const RootSystem& r) {
  if (r.components.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < r.components.size();) {
    std::size_t j = i;
    while (j < r.components.size() && r.components[j] == r.components[i]) ++j;
    if (!out.empty()) out += "+";
    if (j - i > 1) out += std::to_string(j - i);
    out += r.components[i].type + std::to_string(r.components[i].rank);
    i = j;
  }
  return out;
}

/// Root-system part and declared rank-1 summands of a spec such as "E6+A11+<-4>".
struct RootSpec {
  RootSystem roots;
  std::vector<long> extras;
};

inline RootComponent component_of(const StandardKind& k) {
  switch (k.family) {
    case StandardKind::Family::A: return {'A', k.param};
    case StandardKind::Family::D:
      if (k.param < 4) fail(ErrorKind::ParseError, "D_h needs h >= 4");
      return {'D', k.param};
    case StandardKind::Family::E:
      if (k.param < 6 || k.param > 8) fail(ErrorKind::ParseError, "E_l needs l in {6,7,8}");
      return {'E', k.param};
    default: fail(ErrorKind::ParseError, "not an ADE component");
  }
}

inline RootSpec parse_root_spec(std::string_view spec) {
  RootSpec out;
  if (spec == "0") return out;
  for (const auto& t : parse_spec_terms(spec)) {
    if (t.twist != 1) fail(ErrorKind::ParseError, "twists are not allowed in root specs");
    for (long i = 0; i < t.multiplicity; ++i) {
      if (t.kind.family == StandardKind::Family::Rank1) {
        if (t.kind.param >= 0 || t.kind.param % 2 != 0) fail(ErrorKind::ParseError, "extra summands must be <-2n>");
        out.extras.push_back(t.kind.param);
      } else {
        out.roots.components.push_back(component_of(t.kind));
      }
    }
  }
  out.roots.canonicalize();
  return out;
}

inline std::string to_string(const RootSpec& r) {
  std::string s = r.roots.components.empty() && !r.extras.empty() ? "" : to_string(r.roots);
  for (long e : r.extras) s += (s.empty() ? "<" : "+<") + std::to_string(e) + ">";
  return s;
}

/// Dynkin type of a connected simply-laced graph.
inline RootComponent classify_dynkin(const std::vector<std::vector<std::size_t>>& adj,
                                     const std::vector<std::size_t>& nodes) {
  const long n = static_cast<long>(nodes.size());
  std::size_t edges = 0;
  std::vector<std::size_t> branch;
  for (auto v : nodes) {
    edges += adj[v].size();
    if (adj[v].size() > 3) fail(ErrorKind::BadParameter, "simple-root graph is not of ADE type");
    if (adj[v].size() == 3) branch.push_back(v);
  }
  if (edges / 2 != nodes.size() - 1) fail(ErrorKind::BadParameter, "simple-root graph has a cycle");
  if (branch.empty()) return {'A', n};
  if (branch.size() > 1) fail(ErrorKind::BadParameter, "simple-root graph is not of ADE type");
  std::vector<long> arms;
  for (auto start : adj[branch[0]]) {
    long len = 1;
    std::size_t prev = branch[0], cur = start;
    while (adj[cur].size() == 2) {
      std::size_t nxt = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
      prev = cur;
      cur = nxt;
      ++len;
    }
    arms.push_back(len);
  }
  std::sort(arms.begin(), arms.end());
  if (arms[0] == 1 && arms[1] == 1) return {'D', n};
  if (arms[0] == 1 && arms[1] == 2 && arms[2] >= 2 && arms[2] <= 4) return {'E', n};
  fail(ErrorKind::BadParameter, "simple-root graph is not of ADE type");
}

struct RootData {
  RootSystem system;
  IntMatrix lll_transform;           // LLL basis in lattice coordinates
  std::vector<IntVector> positive;   // positive roots, LLL coordinates
  std::vector<IntVector> simple;     // simple roots, LLL coordinates
  std::vector<std::vector<std::size_t>> components;  // indices into simple, per canonical component
};

inline RootData root_data(const Lattice& l) {
  if (!l.is_negative_definite()) fail(ErrorKind::NotNegativeDefinite, "root system needs a negative definite lattice");
  RootData rd;
  const IntMatrix pos = l.gram() * Int(-1);
  const auto red = lll_reduce(pos);
  rd.lll_transform = red.transform;
  for (const auto& y : detail::fincke_pohst(red.gram, 2, true)) rd.positive.push_back(detail::sign_normalized(y));
  std::sort(rd.positive.begin(), rd.positive.end());
  std::set<IntVector> pset(rd.positive.begin(), rd.positive.end());
  for (const auto& r : rd.positive) {
    bool simple = true;
    for (const auto& a : rd.positive) {
      if (!(a < r) && !(r < a)) continue;
      IntVector d(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) d[i] = r[i] - a[i];
      if (pset.count(d)) {
        simple = false;
        break;
      }
    }
    if (simple) rd.simple.push_back(r);
  }
  const std::size_t s = rd.simple.size();
  std::vector<std::vector<std::size_t>> adj(s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j)
      if (bilinear(red.gram, rd.simple[i], rd.simple[j]) != 0) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
  std::vector<bool> seen(s, false);
  std::vector<std::pair<RootComponent, std::vector<std::size_t>>> comps;
  for (std::size_t i = 0; i < s; ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> nodes{i}, stack{i};
    seen[i] = true;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto w : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          nodes.push_back(w);
          stack.push_back(w);
        }
    }
    std::sort(nodes.begin(), nodes.end());
    comps.emplace_back(classify_dynkin(adj, nodes), nodes);
  }
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
    if (component_order(a.first) != component_order(b.first))
      return component_order(a.first) < component_order(b.first);
    return a.first.rank > b.first.rank;
  });
  for (auto& [c, nodes] : comps) {
    rd.system.components.push_back(c);
    rd.components.push_back(nodes);
  }
  if (rd.system.total_roots() != 2 * rd.positive.size())
    fail(ErrorKind::BadParameter, "root count disagrees with the classified components");
  return rd;
}

inline RootSystem root_system(const Lattice& l) { return root_data(l).system; }

// ---------------------------------------------------------------------------
// Block-structured base lattices and the image of O(E) in O(A_E).

struct Block {
  StandardKind kind;
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct BlockLattice {
  Lattice lattice;
  std::vector<Block> blocks;
};

inline BlockLattice block_lattice(std::string_view spec) {
  BlockLattice bl;
  std::vector<Lattice> parts;
  std::size_t off = 0;
  for (const auto& t : parse_spec_terms(spec)) {
    if (t.twist != 1) fail(ErrorKind::Unsupported, "twisted blocks are not supported here");
    for (long i = 0; i < t.multiplicity; ++i) {
      Lattice p = make_standard(t.kind);
      bl.blocks.push_back(Block{t.kind, off, p.rank()});
      off += p.rank();
      parts.push_back(p);
    }
  }
  bl.lattice = direct_sum(parts);
  return bl;
}

namespace detail {

inline IntMatrix permutation_matrix(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& swaps) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (auto [a, b] : swaps) std::swap(p[a], p[b]);
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(p[i], i) = 1;
  return m;
}

}  // namespace detail

/// Diagram automorphisms, swaps of equal blocks and -1 on rank-1 blocks, as matrices on the base.
inline std::vector<IntMatrix> block_symmetry_generators(const BlockLattice& bl) {
  const std::size_t n = bl.lattice.rank();
  std::vector<IntMatrix> gens;
  using F = StandardKind::Family;
  for (const auto& b : bl.blocks) {
    const std::size_t o = b.offset;
    std::vector<std::pair<std::size_t, std::size_t>> sw;
    switch (b.kind.family) {
      case F::A:
        for (std::size_t i = 0; i < b.size / 2; ++i) sw.emplace_back(o + i, o + b.size - 1 - i);
        if (!sw.empty()) gens.push_back(detail::permutation_matrix(n, sw));
        break;
      case F::D:
        gens.push_back(detail::permutation_matrix(n, {{o + b.size - 2, o + b.size - 1}}));
        if (b.size == 4) gens.push_back(detail::permutation_matrix(n, {{o + 0, o + 2}}));
        break;
      case F::E:
        if (b.size == 6) gens.push_back(detail::permutation_matrix(n, {{o + 0, o + 5}, {o + 2, o + 4}}));
        break;
      case F::Rank1: {
        IntMatrix m = IntMatrix::identity(n);
        m(o, o) = -1;
        gens.push_back(m);
        break;
      }
      default: fail(ErrorKind::Unsupported, "block symmetries need ADE or rank-1 blocks");
    }
  }
  for (std::size_t i = 0; i + 1 < bl.blocks.size(); ++i) {
    const auto& a = bl.blocks[i];
    const auto& b = bl.blocks[i + 1];
    if (a.kind.family != b.kind.family || a.kind.param != b.kind.param) continue;
    std::vector<std::pair<std::size_t, std::size_t>> sw;
    for (std::size_t k = 0; k < a.size; ++k) sw.emplace_back(a.offset + k, b.offset + k);
    gens.push_back(detail::permutation_matrix(n, sw));
  }
  for (const auto& g : gens)
    if (g.transpose() * bl.lattice.gram() * g != bl.lattice.gram())
      fail(ErrorKind::NotIsometry, "block symmetry does not preserve the base form");
  return gens;
}

struct TauImage {
  std::vector<FormMap> image;        // distinct automorphisms of A_E
  std::vector<FormMap> orthogonal;   // O(A_E)
  bool all_preserve_q = true;
  bool subgroup_of_o = true;
  bool closed = true;
  std::size_t classes() const { return image.empty() ? 0 : orthogonal.size() / image.size(); }
};

/// Image in O(A_E) of the block symmetries stabilizing the glue.  Conditional:
/// assumes these together with the Weyl group generate O(E).
inline TauImage image_of_tau(const BlockLattice& bl, const GlueData& gd, const Overlattice& ov,
                             std::uint64_t bound = kDefaultEnumerationBound) {
  const FiniteQuadraticForm& ar = gd.base_form;
  long extras = 0;
  for (const auto& b : bl.blocks)
    if (b.kind.family == StandardKind::Family::Rank1) ++extras;
  if (root_system(ov.lattice).rank() + extras != static_cast<long>(ov.lattice.rank()))
    fail(ErrorKind::RootsNotFullRank, "roots and declared summands do not have full rank");

  // Close the generated group by its action on A_R, one matrix per action.
  auto gens = block_symmetry_generators(bl);
  std::map<FormMap, IntMatrix> group;
  const IntMatrix id = IntMatrix::identity(bl.lattice.rank());
  group.emplace(induced_action(Isometry(id, bl.lattice), ar), id);
  std::vector<IntMatrix> frontier{id};
  while (!frontier.empty()) {
    std::vector<IntMatrix> next;
    for (const auto& m : frontier)
      for (const auto& g : gens) {
        IntMatrix p = g * m;
        FormMap f = induced_action(Isometry(p, bl.lattice), ar);
        if (group.emplace(f, p).second) next.push_back(p);
      }
    frontier = std::move(next);
  }

  TauImage out;
  out.orthogonal = orthogonal_group(ov.form, bound);
  const RatMatrix binv = *inverse(ov.basis);
  std::set<FormMap> seen;
  for (const auto& [action, m] : group) {
    bool stabilizes = std::all_of(gd.glue.generators.begin(), gd.glue.generators.end(),
                                  [&](const FqfElement& h) { return gd.glue.contains(ar, apply_map(ar, ar, action, h)); });
    if (!stabilizes) continue;
    auto me = to_integral(binv * to_rational(m) * ov.basis);
    if (!me) fail(ErrorKind::NotIsometry, "glue-stabilizing symmetry is not integral on the overlattice");
    FormMap f = induced_action(Isometry(*me, ov.lattice), ov.form);
    if (!preserves_form(ov.form, ov.form, f)) out.all_preserve_q = false;
    if (seen.insert(f).second) out.image.push_back(f);
  }
  for (const auto& f : out.image)
    if (std::find(out.orthogonal.begin(), out.orthogonal.end(), f) == out.orthogonal.end()) out.subgroup_of_o = false;
  for (const auto& f : out.image)
    for (const auto& g : out.image)
      if (!seen.count(compose(ov.form, f, g))) out.closed = false;
  return out;
}

// ---------------------------------------------------------------------------
// Glue search: overlattices of a block base realizing a target form and root system.

struct GlueCandidate {
  GlueData glue;
  Overlattice over;
  RootSystem roots;
  bool brieskorn_ok = false;
};

/// Isotropic H of the requested order with H^perp/H isometric to target, in canonical order.
inline std::vector<FqfSubgroup> glue_subgroups(const FiniteQuadraticForm& ar, const FiniteQuadraticForm& target,
                                               std::uint64_t order, std::uint64_t bound = kDefaultEnumerationBound) {
  std::vector<FqfSubgroup> out;
  for (auto& h : isotropic_subgroups(ar, bound)) {
    if (h.order() != order) continue;
    if (are_isometric(perp_quotient(ar, h, bound), target, bound)) out.push_back(h);
  }
  return out;
}

/// First overlattice (in canonical subgroup order) whose root system equals want.
inline std::optional<GlueCandidate> find_glue(const BlockLattice& bl, const FiniteQuadraticForm& target,
                                              const RootSystem& want,
                                              std::uint64_t bound = kDefaultEnumerationBound) {
  const FiniteQuadraticForm ar = discriminant_form(bl.lattice);
  const std::uint64_t total = ar.size();
  if (total % target.size() != 0) return std::nullopt;
  const std::uint64_t sq = total / target.size();
  auto h = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(sq))));
  while (h * h > sq) --h;
  while ((h + 1) * (h + 1) <= sq) ++h;
  if (h * h != sq) return std::nullopt;
  for (auto& sub : glue_subgroups(ar, target, h, bound)) {
    GlueData gd{bl.lattice, ar, sub};
    Overlattice ov = overlattice(gd);
    RootSystem rs = root_system(ov.lattice);
    if (!(rs == want)) continue;
    GlueCandidate c{gd, ov, rs, brieskorn_consistent(gd, ov, bound)};
    return c;
  }
  return std::nullopt;
}

}  // namespace cuspidal
