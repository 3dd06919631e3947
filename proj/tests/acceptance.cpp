// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <iostream>
#include <sstream>

#include "cuspidal/cusps.hpp"
#include "oracles.hpp"
#include "property_checks.hpp"
#include "support.hpp"

using namespace cuspidal;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

mpq_class mod2(mpq_class x) {
  x.canonicalize();
  mpq_class half = x / 2;
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), half.get_num_mpz_t(), half.get_den_mpz_t());
  x -= 2 * f;
  x.canonicalize();
  return x;
}

// q of a rational vector straight from the Gram matrix, mod 2.
mpq_class q_direct(const Lattice& n, const std::vector<mpq_class>& x) {
  const auto g = testing_support::to_grid(n.gram());
  mpq_class q = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[i] != 0 && x[j] != 0) q += x[i] * g[i][j] * x[j];
  return mod2(q);
}

template <class F>
Outcome guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

Outcome nu_sweep() {
  int rows = 0;
  for (long d = 1; d <= 200; ++d) {
    const auto pc = make_case(d, Embedding::Split);
    const auto r = nu(pc, NuMode::Both);
    if (!r.agree() || *r.enumerated != oracle::split_orbits(d))
      return {false, "split d=" + std::to_string(d)};
    ++rows;
  }
  for (long d = 3; d <= 199; d += 4) {
    const auto pc = make_case(d, Embedding::Nonsplit);
    const auto r = nu(pc, NuMode::Both);
    if (!r.agree() || *r.enumerated != oracle::nonsplit_orbits(d))
      return {false, "nonsplit d=" + std::to_string(d)};
    ++rows;
  }
  return {true, std::to_string(rows) + " values of d"};
}

Outcome double_epw() {
  const auto r = nu(make_case(2, Embedding::Split), NuMode::Both);
  const bool ok = r.agree() && *r.formula == 1 && oracle::split_orbits(2) == 1;
  return {ok, "nu(2) = " + std::to_string(*r.enumerated)};
}

Outcome ghs_invariants() {
  for (long d : {1L, 2L, 3L, 5L, 7L, 11L}) {
    const auto p = build_polarized(make_case(d, Embedding::Split));
    const auto& a = p.a_n;
    if (oracle::det(testing_support::to_grid(p.n.gram())) != 4 * d) return {false, "det, split d=" + std::to_string(d)};
    const std::vector<std::int64_t> want = d == 1 ? std::vector<std::int64_t>{2, 2} : std::vector<std::int64_t>{2, 2 * d};
    if (a.orders() != want || !verify_an_formula(p)) return {false, "group, split d=" + std::to_string(d)};
    const std::size_t r = p.n.rank();
    for (long al = 0; al < 2 * d; ++al)
      for (long be = 0; be < 2; ++be) {
        std::vector<mpq_class> x(r, 0);
        x[0] = mpq_class(al, 2 * d);
        x[r - 1] = mpq_class(be, 2);
        x[0].canonicalize();
        x[r - 1].canonicalize();
        const mpq_class want_q = mod2(mpq_class(-(al * al + be * be * d), 2 * d));
        if (q_direct(p.n, x) != want_q || mod2(a.q(p.element(al, be))) != want_q)
          return {false, "q, split d=" + std::to_string(d)};
      }
  }
  for (long d : {3L, 7L, 11L}) {
    const auto p = build_polarized(make_case(d, Embedding::Nonsplit));
    const auto& a = p.a_n;
    if (oracle::det(testing_support::to_grid(p.n.gram())) != d) return {false, "det, nonsplit d=" + std::to_string(d)};
    if (a.orders() != std::vector<std::int64_t>{d} || !verify_an_formula(p))
      return {false, "group, nonsplit d=" + std::to_string(d)};
    for (long al = 0; al < d; ++al) {
      std::vector<mpq_class> x(p.n.rank(), 0);
      x[0] = mpq_class(2 * al, d);
      x[1] = mpq_class(al, d);
      x[0].canonicalize();
      x[1].canonicalize();
      const mpq_class want_q = mod2(mpq_class(-2 * al * al, d));
      if (q_direct(p.n, x) != want_q || mod2(a.q(p.element(al))) != want_q)
        return {false, "q, nonsplit d=" + std::to_string(d)};
    }
  }
  return {true, "split 1,2,3,5,7,11 and nonsplit 3,7,11"};
}

Outcome c12_fixture() {
  const auto checks = example_c12();
  for (const auto& c : checks)
    if (!c.ok) return {false, c.name + " = " + c.value};
  // Spot values recomputed from the raw Gram matrix.
  using namespace k3n2;
  const auto g = testing_support::to_grid(k3n2_lattice().gram());
  auto vec = [](std::vector<std::pair<std::size_t, long>> terms) {
    std::vector<long> v(23, 0);
    for (auto [i, c] : terms) v[i] += c;
    return v;
  };
  auto dot = [&](const std::vector<long>& x, const std::vector<long>& y) {
    long s = 0;
    for (std::size_t i = 0; i < 23; ++i)
      for (std::size_t j = 0; j < 23; ++j) s += x[i] * g[i][j] * y[j];
    return s;
  };
  const auto gv = vec({{v1, 2}, {w1, 14}, {e, -5}});
  const auto tv = vec({{v2, 1}, {w2, -2}});
  const auto dv = vec({{v1, 4}, {w1, -4}, {v2, 6}, {w2, 6}, {e, -5}});
  // delta_M = a g + b tau solves (delta_M, g) = (delta, g) and (delta_M, tau) = (delta, tau).
  mpq_class a(dot(dv, gv), dot(gv, gv)), b(dot(dv, tv), dot(tv, tv));
  a.canonicalize();
  b.canonicalize();
  const mpq_class dm2 = a * a * dot(gv, gv) + b * b * dot(tv, tv);
  const mpq_class dn2 = dot(dv, dv) - dm2;
  const bool ok = dot(gv, gv) == 6 && dot(tv, tv) == -4 && dot(gv, tv) == 0 && dot(dv, dv) == -10 &&
                  a == mpq_class(-1, 3) && b == mpq_class(3, 2) && dm2 == mpq_class(-25, 3) && dn2 == mpq_class(-5, 3);
  return {ok, std::to_string(checks.size()) + " fixture checks"};
}

Outcome brieskorn_square() {
  int pairs = 0;
  auto check = [&](const PolarizationCase& c) -> bool {
    const auto p = build_polarized(c);
    for (long m : divisors(c.K)) {
      if (!valid_index(c, m)) continue;
      const auto h = h_m(p, m);
      const auto quotient = perp_quotient(p.a_n, h);
      const auto predicted = predicted_AE(c, m);
      if (h.order() != static_cast<std::uint64_t>(m) || !is_isotropic_subgroup(p.a_n, h)) return false;
      if (quotient.size() * h.order() * h.order() != p.a_n.size()) return false;
      if (!are_isometric(predicted, quotient).has_value()) return false;
      ++pairs;
    }
    return true;
  };
  for (long d = 1; d <= 200; ++d)
    if (!check(make_case(d, Embedding::Split))) return {false, "split d=" + std::to_string(d)};
  for (long d = 3; d <= 199; d += 4)
    if (!check(make_case(d, Embedding::Nonsplit))) return {false, "nonsplit d=" + std::to_string(d)};
  return {true, std::to_string(pairs) + " (d, m) pairs"};
}

Outcome table1(const OneDimReport& rep) {
  if (rep.candidates.size() != 13) return {false, "row count"};
  for (const auto& c : rep.candidates) {
    if (!c.error.empty() || !c.genus_ok || !c.roots_ok || c.glue_order == 0)
      return {false, c.candidate.roots + ": " + c.error};
    // root count of the printed system from closed forms
    std::size_t want = 0;
    for (const auto& comp : parse_root_spec(c.candidate.roots).roots.components)
      want += static_cast<std::size_t>(oracle::ade_roots(comp.type, comp.rank));
    if (parse_root_spec(c.computed_roots).roots.total_roots() != want) return {false, c.candidate.roots + ": root count"};
  }
  return {true, "13 rows"};
}

Outcome properties() {
  int total = 0;
  for (const auto& [name, check] : props::all_checks()) {
    const auto r = check(200);
    if (!r.ok() || r.cases < 200) return {false, r.name + ": " + r.first_failure};
    total += r.cases;
  }
  return {true, std::to_string(props::all_checks().size()) + " suites, " + std::to_string(total) + " cases"};
}

Outcome conditional_one_dim(const OneDimReport& rep) {
  std::size_t total = 0;
  for (const auto& c : rep.candidates) {
    if (!c.tau_consistent || c.o_ae == 0 || c.im_tau == 0 || c.o_ae % c.im_tau != 0)
      return {false, c.candidate.roots};
    total += c.classes;
  }
  if (total != rep.total) return {false, "total"};
  return {true, "conditional total " + std::to_string(total)};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::string& name, auto&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = guarded(f);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << (o.ok ? "PASS" : "FAIL") << " " << id << " " << name << " (" << o.detail << ", " << secs << " s)";
    std::cout << line.str() << std::endl;
    if (!o.ok) ++failed;
  };
  report(1, "nu formula sweep", nu_sweep);
  report(2, "double EPW: one zero-dimensional cusp for d=2", double_epw);
  report(3, "discriminant invariants of N", ghs_invariants);
  report(4, "C12 fixture", c12_fixture);
  report(5, "Brieskorn square", brieskorn_square);
  OneDimReport rep;
  bool rep_ok = false;
  report(6, "genus and root systems of the table1 candidates", [&] {
    rep = one_dim_cusps(make_case(1, Embedding::Split), table1_fixture());
    rep_ok = true;
    return table1(rep);
  });
  report(7, "property suites", properties);
  report(8, "conditional one-dimensional counts",
         [&] { return rep_ok ? conditional_one_dim(rep) : Outcome{false, "one_dim_cusps threw"}; });
  return failed == 0 ? 0 : 1;
}
