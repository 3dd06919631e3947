#pragma once

// Boundary components for <2d>-polarizations of the K3^[2] lattice
// L = U^3 + E8^2 + <-2>.

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cuspidal/fqf.hpp"
#include "cuspidal/glue.hpp"
#include "cuspidal/io.hpp"
#include "cuspidal/lattice.hpp"

namespace cuspidal {

enum class Embedding { Split, Nonsplit };

inline const char* to_string(Embedding e) { return e == Embedding::Split ? "split" : "nonsplit"; }

inline Embedding parse_embedding(const std::string& s) {
  if (s == "split") return Embedding::Split;
  if (s == "nonsplit") return Embedding::Nonsplit;
  fail(ErrorKind::ParseError, "embedding must be split or nonsplit, got '" + s + "'");
}

struct PolarizationCase {
  long d = 1;
  Embedding embedding = Embedding::Split;
  long d_prime = 1;  // square-free part
  long k = 1;        // d = d' k^2
  long K = 1;

  bool alternative_index() const { return embedding == Embedding::Split && d_prime % 4 == 3; }
};

inline PolarizationCase make_case(long d, Embedding emb) {
  if (d < 1) fail(ErrorKind::BadParameter, "d must be positive");
  if (emb == Embedding::Nonsplit && d % 4 != 3) fail(ErrorKind::BadCase, "nonsplit embedding needs d = 3 mod 4");
  PolarizationCase c{d, emb, 1, 1, 1};
  long rest = d;
  for (long p = 2; p * p <= rest; ++p)
    while (rest % (p * p) == 0) {
      rest /= p * p;
      c.k *= p;
    }
  c.d_prime = rest;
  c.K = c.alternative_index() ? 2 * c.k : c.k;
  return c;
}

inline std::vector<long> divisors(long n) {
  std::vector<long> out;
  for (long m = 1; m <= n; ++m)
    if (n % m == 0) out.push_back(m);
  return out;
}

// ---------------------------------------------------------------------------

/// Standard basis labels of L, in order.
inline std::vector<std::string> k3n2_labels() {
  std::vector<std::string> labels{"v1", "w1", "v2", "w2", "v3", "w3"};
  for (int block = 1; block <= 2; ++block)
    for (int i = 1; i <= 8; ++i) labels.push_back("e8_" + std::to_string(block) + "_" + std::to_string(i));
  labels.push_back("e");
  return labels;
}

inline Lattice k3n2_lattice() {
  return Lattice(parse_lattice_spec("U+U+U+E8+E8+<-2>").gram(), k3n2_labels());
}

/// Vector of L from (label index, coefficient) pairs.
inline LatticeVector k3n2_vector(const Lattice& l, const std::vector<std::pair<std::size_t, long>>& terms) {
  RatVector c(l.rank(), Rat(0));
  for (auto [i, a] : terms) c[i] += a;
  return LatticeVector(l, c);
}

namespace k3n2 {
inline constexpr std::size_t v1 = 0, w1 = 1, v2 = 2, w2 = 3, v3 = 4, w3 = 5, e8a = 6, e8b = 14, e = 22;
}

struct PolarizedLattice {
  PolarizationCase pcase;
  Lattice ambient;
  LatticeVector h;
  IntMatrix n_basis;  // columns in L coordinates; first the distinguished generators
  Lattice n;
  FiniteQuadraticForm a_n;  // discriminant_form(n)
  FqfElement t_gen;         // split: t/2d; nonsplit: t = (2 b1 + b2)/d
  FqfElement e_gen;         // split: e/2; nonsplit: unused (zero)

  /// alpha t_gen + beta e_gen.
  FqfElement element(long alpha, long beta = 0) const {
    return a_n.add(a_n.scale(t_gen, alpha), a_n.scale(e_gen, beta));
  }
};

inline PolarizedLattice build_polarized(const PolarizationCase& pc) {
  using namespace k3n2;
  const Lattice l = k3n2_lattice();
  const long d = pc.d;
  std::vector<LatticeVector> cols;
  LatticeVector h = k3n2_vector(l, {});
  if (pc.embedding == Embedding::Split) {
    h = k3n2_vector(l, {{v1, 1}, {w1, d}});
    cols.push_back(k3n2_vector(l, {{v1, 1}, {w1, -d}}));  // t
  } else {
    if (d % 4 != 3) fail(ErrorKind::BadCase, "nonsplit embedding needs d = 3 mod 4");
    h = k3n2_vector(l, {{v1, 2}, {w1, (d + 1) / 2}, {e, 1}});
    cols.push_back(k3n2_vector(l, {{v1, 1}, {w1, -(d + 1) / 4}}));  // b1
    cols.push_back(k3n2_vector(l, {{w1, 1}, {e, 1}}));               // b2
  }
  for (std::size_t i = v2; i < e; ++i) cols.push_back(k3n2_vector(l, {{i, 1}}));
  if (pc.embedding == Embedding::Split) cols.push_back(k3n2_vector(l, {{e, 1}}));

  if (norm(h) != 2 * d) fail(ErrorKind::BadParameter, "polarization has the wrong square");
  const Int div = divisibility(h);
  if (div != (pc.embedding == Embedding::Split ? 1 : 2)) fail(ErrorKind::BadParameter, "polarization has the wrong divisibility");
  for (const auto& c : cols)
    if (pair(c, h) != 0) fail(ErrorKind::BadParameter, "complement basis is not orthogonal to h");
  IntMatrix basis = vectors_to_columns(l, cols);
  if (basis.cols() != l.rank() - 1 || !is_primitive(basis))
    fail(ErrorKind::BadParameter, "complement basis is not a primitive corank-1 sublattice");
  Lattice n(restricted_gram(l, basis));
  const Int expected = pc.embedding == Embedding::Split ? Int(4 * d) : Int(d);
  if (n.det() != expected) fail(ErrorKind::BadParameter, "complement has the wrong determinant");

  FiniteQuadraticForm a = discriminant_form(n);
  const std::size_t r = n.rank();
  RatVector t(r, Rat(0)), ev(r, Rat(0));
  FqfElement tg, eg;
  if (pc.embedding == Embedding::Split) {
    t[0] = Rat(1, 2 * d);
    t[0].canonicalize();
    ev[r - 1] = Rat(1, 2);
    tg = a.element_from_dual(t);
    eg = a.element_from_dual(ev);
  } else {
    t[0] = Rat(2, d);
    t[1] = Rat(1, d);
    t[0].canonicalize();
    t[1].canonicalize();
    tg = a.element_from_dual(t);
    eg = a.zero();
  }
  return PolarizedLattice{pc, l, h, std::move(basis), n, std::move(a), tg, eg};
}

/// q on A_N from the closed formulas, checked against the computed form at every element.
inline bool verify_an_formula(const PolarizedLattice& p) {
  const long d = p.pcase.d;
  const FiniteQuadraticForm& a = p.a_n;
  if (p.pcase.embedding == Embedding::Split) {
    if (a.size() != static_cast<std::uint64_t>(4 * d)) return false;
    std::set<std::uint64_t> seen;
    for (long al = 0; al < 2 * d; ++al)
      for (long be = 0; be < 2; ++be) {
        FqfElement x = p.element(al, be);
        seen.insert(a.index_of(x));
        Rat want(-(al * al + be * be * d), 2 * d);
        want.canonicalize();
        if (a.q(x) != reduce_mod2(want)) return false;
      }
    return seen.size() == a.size();
  }
  if (a.size() != static_cast<std::uint64_t>(d)) return false;
  std::set<std::uint64_t> seen;
  for (long al = 0; al < d; ++al) {
    FqfElement x = p.element(al);
    seen.insert(a.index_of(x));
    Rat want(-2 * al * al, d);
    want.canonicalize();
    if (a.q(x) != reduce_mod2(want)) return false;
  }
  return seen.size() == a.size();
}

// ---------------------------------------------------------------------------
// Zero-dimensional cusps.

enum class NuMode { Formula, Enumerate, Both };

inline NuMode parse_nu_mode(const std::string& s) {
  if (s == "formula") return NuMode::Formula;
  if (s == "enumerate") return NuMode::Enumerate;
  if (s == "both") return NuMode::Both;
  fail(ErrorKind::ParseError, "mode must be formula, enumerate or both, got '" + s + "'");
}

inline long nu_formula(const PolarizationCase& pc) {
  if (pc.alternative_index()) return pc.k + 1;
  return (pc.k + 2) / 2;
}

inline long nu_enumerate(const PolarizedLattice& p, std::uint64_t bound = kDefaultEnumerationBound) {
  return static_cast<long>(mod_pm1(p.a_n, isotropic_elements(p.a_n, bound)).size());
}

struct NuResult {
  std::optional<long> formula;
  std::optional<long> enumerated;
  bool agree() const { return !formula || !enumerated || *formula == *enumerated; }
};

inline NuResult nu(const PolarizationCase& pc, NuMode mode, std::uint64_t bound = kDefaultEnumerationBound) {
  NuResult r;
  if (mode != NuMode::Enumerate) r.formula = nu_formula(pc);
  if (mode != NuMode::Formula) r.enumerated = nu_enumerate(build_polarized(pc), bound);
  return r;
}

struct OrbitRep {
  long m = 1;
  long n = 0;
  FqfElement element;
};

/// Is m the index of an isotropic cyclic subgroup H_m for this case?
inline bool valid_index(const PolarizationCase& pc, long m) {
  if (m < 1) return false;
  if (pc.k % m == 0) return true;
  return pc.alternative_index() && m % 2 == 0 && pc.k % (m / 2) == 0;
}

/// x_{m,n} in A_N.
inline FqfElement x_mn(const PolarizedLattice& p, long m, long n) {
  const PolarizationCase& pc = p.pcase;
  if (!valid_index(pc, m)) fail(ErrorKind::BadIndex, "m does not index an isotropic subgroup");
  if (pc.embedding == Embedding::Nonsplit) return p.element((n * (pc.d / m)) % pc.d);
  const long alpha = n * (2 * pc.d / m);
  if (pc.k % m == 0) return p.element(alpha);
  return p.element(alpha, n % 2);
}

inline std::vector<OrbitRep> orbit_reps(const PolarizedLattice& p) {
  std::vector<OrbitRep> out;
  for (long m : divisors(p.pcase.K)) {
    if (!valid_index(p.pcase, m)) continue;
    for (long n = 0; 2 * n <= m; ++n) {
      if (std::gcd(m, n) != 1) continue;
      FqfElement x = x_mn(p, m, n);
      if (!p.a_n.is_isotropic(x)) fail(ErrorKind::BadParameter, "orbit representative is not isotropic");
      if (p.a_n.order_of(x) != m) fail(ErrorKind::BadParameter, "orbit representative has the wrong order");
      out.push_back(OrbitRep{m, n, std::move(x)});
    }
  }
  return out;
}

/// H_m = <x_{m,1}>.
inline FqfSubgroup h_m(const PolarizedLattice& p, long m) { return span(p.a_n, {x_mn(p, m, 1)}); }

inline std::int64_t predicted_det_e(const PolarizationCase& pc, long m) {
  if (!valid_index(pc, m)) fail(ErrorKind::BadIndex, "m does not index an isotropic subgroup");
  return (pc.embedding == Embedding::Split ? 4 * pc.d : pc.d) / (m * m);
}

/// The printed A_E for H_m.
inline FiniteQuadraticForm predicted_AE(const PolarizationCase& pc, long m) {
  if (!valid_index(pc, m)) fail(ErrorKind::BadIndex, "m does not index an isotropic subgroup");
  const long d = pc.d;
  auto frac = [](long a, long b) {
    Rat r(a, b);
    r.canonicalize();
    return r;
  };
  if (pc.embedding == Embedding::Nonsplit) return FiniteQuadraticForm::diagonal({d / (m * m)}, {frac(-2 * m * m, d)});
  if (pc.k % m == 0) return FiniteQuadraticForm::diagonal({2 * d / (m * m), 2}, {frac(-m * m, 2 * d), Rat(-1, 2)});
  return FiniteQuadraticForm::diagonal({4 * d / (m * m)}, {frac(-(m * m + 4 * d), 8 * d)});
}

inline IntMatrix t_gram(long m, long delta) { return IntMatrix{{0, m}, {m, 2 * delta}}; }

struct TEntry {
  long delta = 0;
  IntMatrix gram;
};

/// delta in [0,m) with A_{T(m,delta)} + predicted A_E isometric to A_N.
inline std::vector<TEntry> t_set(const PolarizationCase& pc, long m, std::uint64_t bound = kDefaultEnumerationBound) {
  const std::int64_t det_e = predicted_det_e(pc, m);
  if (std::gcd(static_cast<std::int64_t>(m), det_e) != 1)
    fail(ErrorKind::HypothesisFailed, "gcd(m, det E) must be 1");
  const FiniteQuadraticForm ae = predicted_AE(pc, m);
  const FiniteQuadraticForm an = build_polarized(pc).a_n;
  std::vector<TEntry> out;
  for (long delta = 0; delta < m; ++delta) {
    IntMatrix g = t_gram(m, delta);
    FiniteQuadraticForm at = discriminant_form(Lattice(g));
    if (are_isometric(orthogonal_sum(at, ae), an, bound)) out.push_back(TEntry{delta, g});
  }
  return out;
}

// ---------------------------------------------------------------------------
// One-dimensional cusps from candidate genus members.

struct Candidate {
  std::string roots;      // R(E), e.g. "E6+A11+<-4>"
  std::string niemeier;   // R(N), reproduced verbatim
};

/// The genus of E8^2 + <-2>^2: the 13 printed rows.
inline std::vector<Candidate> table1_fixture() {
  return {
      {"2E8+2A1", "3E8"},       {"D16+2A1", "E8+D16"},     {"E8+D10", "E8+D16"},
      {"E7+D10+A1", "2E7+D10"}, {"2E7+D4", "2E7+D10"},     {"A17+A1", "E7+A17"},
      {"D18", "D24"},           {"D12+D6", "2D12"},        {"2A1+2D8", "3D8"},
      {"A3+A15", "D9+A15"},     {"E6+A11+<-4>", "E6+D7+A11"}, {"3D6", "4D6"},
      {"2A9", "D6+2A9"},
  };
}

struct CandidateResult {
  Candidate candidate;
  bool genus_ok = false;
  bool roots_ok = false;
  std::string computed_roots;
  std::uint64_t glue_order = 0;
  std::size_t o_ae = 0;
  std::size_t im_tau = 0;
  std::size_t classes = 0;
  bool tau_consistent = false;  // every element preserves q, lies in O(A_E), closed
  bool brieskorn_ok = false;
  std::string error;
};

struct OneDimReport {
  std::vector<CandidateResult> candidates;
  std::size_t total = 0;
};

inline bool is_square_free(long d) {
  for (long p = 2; p * p <= d; ++p)
    if (d % (p * p) == 0) return false;
  return true;
}

inline CandidateResult check_candidate(const PolarizationCase& pc, const Candidate& cand,
                                       std::uint64_t bound = kDefaultEnumerationBound) {
  CandidateResult res;
  res.candidate = cand;
  try {
    const FiniteQuadraticForm target = predicted_AE(pc, 1);
    const BlockLattice bl = block_lattice(cand.roots);
    const RootSpec want = parse_root_spec(cand.roots);
    auto found = find_glue(bl, target, want.roots, bound);
    if (!found) fail(ErrorKind::CandidateRejected, "no even overlattice with the target form and root system");
    const Lattice& e = found->over.lattice;
    const long rank_e = static_cast<long>(build_polarized(pc).n.rank()) - 4;
    res.glue_order = found->glue.glue.order();
    res.brieskorn_ok = found->brieskorn_ok;
    res.genus_ok = e.signature().positive == 0 && static_cast<long>(e.signature().negative) == rank_e &&
                   are_isometric(found->over.form, target, bound).has_value() && res.brieskorn_ok;
    if (!res.genus_ok) fail(ErrorKind::CandidateRejected, "overlattice is not in the target genus");
    res.computed_roots = to_string(found->roots);
    res.roots_ok = found->roots == want.roots;
    TauImage tau = image_of_tau(bl, found->glue, found->over, bound);
    res.o_ae = tau.orthogonal.size();
    res.im_tau = tau.image.size();
    res.classes = tau.classes();
    res.tau_consistent = tau.all_preserve_q && tau.subgroup_of_o && tau.closed && res.im_tau > 0 &&
                         res.o_ae % res.im_tau == 0;
  } catch (const Error& err) {
    res.error = err.what();
  }
  return res;
}

inline OneDimReport one_dim_cusps(const PolarizationCase& pc, const std::vector<Candidate>& candidates,
                                  std::uint64_t bound = kDefaultEnumerationBound) {
  if (!is_square_free(pc.d)) fail(ErrorKind::NotSquareFree, "one-dimensional cusps need square-free d");
  OneDimReport rep;
  for (const auto& c : candidates) {
    rep.candidates.push_back(check_candidate(pc, c, bound));
    if (rep.candidates.back().genus_ok) rep.total += rep.candidates.back().classes;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// The C12 cubic-fourfold example: M = <6> + <-4> with printed coordinates.

struct FixtureCheck {
  std::string name;
  bool ok = false;
  std::string value;
};

inline std::vector<FixtureCheck> example_c12() {
  using namespace k3n2;
  std::vector<FixtureCheck> checks;
  auto add = [&](std::string name, bool ok, std::string value) { checks.push_back({std::move(name), ok, std::move(value)}); };
  const Lattice l = k3n2_lattice();
  const auto g = k3n2_vector(l, {{v1, 2}, {w1, 14}, {e, -5}});
  const auto tau = k3n2_vector(l, {{v2, 1}, {w2, -2}});
  const auto delta = k3n2_vector(l, {{v1, 4}, {w1, -4}, {v2, 6}, {w2, 6}, {e, -5}});
  add("g^2 = 6", norm(g) == 6, norm(g).get_str());
  add("tau^2 = -4", norm(tau) == -4, norm(tau).get_str());
  add("(g,tau) = 0", pair(g, tau) == 0, pair(g, tau).get_str());

  const Sublattice comp = orthogonal_complement(l, {g, tau});
  const Lattice& nl = comp.lattice;
  add("complement rank 21", nl.rank() == 21, std::to_string(nl.rank()));
  add("complement signature (2,19)", nl.signature().positive == 2 && nl.signature().negative == 19,
      "(" + std::to_string(nl.signature().positive) + "," + std::to_string(nl.signature().negative) + ")");
  add("complement det -12", nl.det() == -12, nl.det().get_str());

  // Printed basis a, b, z of B3 + <4>, with b -> -b to match the B3 Gram sign.
  const auto a = k3n2_vector(l, {{v1, 1}, {w1, 3}, {e, -2}});
  const auto b = k3n2_vector(l, {{e, -1}, {w1, 5}});
  const auto z = k3n2_vector(l, {{v2, 1}, {w2, 2}});
  std::vector<LatticeVector> wit;
  wit.push_back(k3n2_vector(l, {{v3, 1}}));
  wit.push_back(k3n2_vector(l, {{w3, 1}}));
  for (std::size_t i = e8a; i < e; ++i) wit.push_back(k3n2_vector(l, {{i, 1}}));
  wit.push_back(a);
  wit.push_back(b);
  wit.push_back(z);
  const IntMatrix wb = vectors_to_columns(l, wit);
  const IntMatrix wg = restricted_gram(l, wb);
  const IntMatrix model = parse_lattice_spec("U+E8+E8+B3+<4>").gram();
  bool orth = true;
  for (const auto& w : wit) orth = orth && pair(w, g) == 0 && pair(w, tau) == 0;
  const Lattice wl(wg);
  add("complement isometric to U+E8^2+B3+<4>", orth && wg == model && wl.det() == nl.det(),
      orth && wg == model ? "explicit basis" : "witness failed");

  add("delta^2 = -10", norm(delta) == -10, norm(delta).get_str());
  const Int div = divisibility(delta);
  add("div(delta) = 2", div == 2, div.get_str());

  const OrthogonalSplitting split = make_splitting(l, {g, tau});
  const RationalSplit rs = split_rational(split, delta);
  const LatticeVector dm(l, rs.m_part), dn(l, rs.n_part);
  const LatticeVector want_dm = g * Rat(-1, 3) + tau * Rat(3, 2);
  add("delta_M = -g/3 + 3 tau/2", dm == want_dm, "");
  add("delta_M^2 = -25/3", norm(dm) == Rat(-25, 3), norm(dm).get_str());
  add("delta_N^2 = -5/3", norm(dn) == Rat(-5, 3), norm(dn).get_str());
  const LatticeVector want_dn = a * Rat(14, 3) + (b * Rat(-1)) * Rat(8, 3) + z * Rat(9, 2);
  add("delta_N = 14a/3 + 8b/3 + 9z/2", dn == want_dn, "");
  add("delta_M^2 < 0 and delta_N^2 < 0", delta_prime_test(split, delta), "");
  const auto beta1 = g * Rat(-3) + tau;
  add("(beta1, delta) = 0", pair(beta1, delta) == 0, pair(beta1, delta).get_str());
  return checks;
}

// ---------------------------------------------------------------------------
// Reports.

struct CuspReport {
  PolarizationCase pcase;
  std::optional<NuResult> zero_dim;
  std::vector<std::pair<long, long>> reps;
  std::optional<OneDimReport> one_dim;
  std::vector<std::string> notes;
};

inline Json to_json(const CuspReport& r) {
  Json out;
  out["case"] = {{"d", r.pcase.d}, {"embedding", to_string(r.pcase.embedding)}};
  if (r.zero_dim) {
    Json z;
    z["formula"] = r.zero_dim->formula ? Json(*r.zero_dim->formula) : Json(nullptr);
    z["enumerated"] = r.zero_dim->enumerated ? Json(*r.zero_dim->enumerated) : Json(nullptr);
    Json reps = Json::array();
    for (auto [m, n] : r.reps) reps.push_back({m, n});
    z["reps"] = reps;
    out["zero_dim"] = z;
  }
  if (r.one_dim) {
    Json cands = Json::array();
    for (const auto& c : r.one_dim->candidates) {
      Json j;
      j["roots"] = c.candidate.roots;
      j["genus_ok"] = c.genus_ok;
      j["o_ae"] = c.o_ae;
      j["im_tau"] = c.im_tau;
      j["classes"] = c.classes;
      j["conditional"] = true;
      cands.push_back(j);
    }
    out["one_dim"] = {{"candidates", cands}, {"total", r.one_dim->total}};
  }
  if (!r.notes.empty()) out["notes"] = r.notes;
  return out;
}

inline std::string to_markdown(const CuspReport& r) {
  std::string s = "## d = " + std::to_string(r.pcase.d) + " (" + to_string(r.pcase.embedding) + ")\n\n";
  if (r.zero_dim) {
    auto show = [](const std::optional<long>& v) { return v ? std::to_string(*v) : std::string("-"); };
    s += "| formula | enumerated | reps |\n|---|---|---|\n";
    std::string reps;
    for (auto [m, n] : r.reps) reps += (reps.empty() ? "" : ", ") + std::string("(") + std::to_string(m) + "," + std::to_string(n) + ")";
    s += "| " + show(r.zero_dim->formula) + " | " + show(r.zero_dim->enumerated) + " | " + reps + " |\n\n";
  }
  if (r.one_dim) {
    s += "| # | R(E) | genus | O(A_E) order | Im tau order | classes |\n|---|---|---|---|---|---|\n";
    std::size_t i = 1;
    for (const auto& c : r.one_dim->candidates)
      s += "| " + std::to_string(i++) + " | " + c.candidate.roots + " | " + (c.genus_ok ? "ok" : "REJECTED") + " | " +
           std::to_string(c.o_ae) + " | " + std::to_string(c.im_tau) + " | " + std::to_string(c.classes) + " |\n";
    s += "\nTotal (conditional): " + std::to_string(r.one_dim->total) + "\n";
  }
  for (const auto& n : r.notes) s += "\n_" + n + "_\n";
  return s;
}

}  // namespace cuspidal
