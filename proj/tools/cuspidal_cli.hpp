#pragma once

// Command-line front end.  run() returns 0 on success, 1 when a verification
// fails and 2 on usage or input errors.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cuspidal/cusps.hpp"
#include "cuspidal/glue.hpp"
#include "cuspidal/io.hpp"
#include "cuspidal/parallel.hpp"

namespace cuspidal::cli {

enum Exit : int { kOk = 0, kVerifyFailed = 1, kUsage = 2 };

struct Options {
  long d = 0;
  std::string d_range;
  std::string case_name = "split";
  std::string mode = "both";
  std::string format;
  std::string out_path;
  std::uint64_t bound = kDefaultEnumerationBound;
  std::string candidates_path;
  std::string lattice;
  std::uint64_t order = 0;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A builtin spec ("U+E8+<-2>") or a path to a lattice JSON file.
inline Lattice load_lattice(const std::string& arg) {
  std::ifstream probe(arg);
  if (probe.good()) {
    try {
      return lattice_from_json(Json::parse(read_file(arg)));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::ParseError, std::string("lattice file: ") + e.what());
    }
  }
  return parse_lattice_spec(arg);
}

inline std::vector<Candidate> load_candidates(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("candidates file: ") + e.what());
  }
  const Json& list = j.is_object() && j.contains("candidates") ? j.at("candidates") : j;
  if (!list.is_array()) fail(ErrorKind::ParseError, "candidates must be a JSON array");
  std::vector<Candidate> out;
  for (const auto& c : list) {
    if (!c.is_object() || !c.contains("roots") || !c.at("roots").is_string())
      fail(ErrorKind::ParseError, "each candidate needs a \"roots\" string");
    Candidate cand{c.at("roots").get<std::string>(), ""};
    if (c.contains("niemeier") && c.at("niemeier").is_string()) cand.niemeier = c.at("niemeier").get<std::string>();
    parse_root_spec(cand.roots);
    out.push_back(cand);
  }
  return out;
}

inline std::pair<long, long> parse_range(const std::string& s) {
  const auto pos = s.find("..");
  try {
    if (pos == std::string::npos) {
      long v = std::stol(s);
      return {v, v};
    }
    std::size_t used = 0;
    long a = std::stol(s.substr(0, pos), &used);
    if (used != pos) throw std::invalid_argument(s);
    const std::string rest = s.substr(pos + 2);
    long b = std::stol(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    fail(ErrorKind::ParseError, "bad range '" + s + "', expected A..B");
  }
}

inline void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out_path);
  if (!f) fail(ErrorKind::ParseError, "cannot write '" + o.out_path + "'");
  f << text;
}

inline std::string json_text(const Json& j) { return j.dump() + "\n"; }

inline bool want_md(const Options& o, bool md_default = false) {
  if (o.format.empty()) return md_default;
  if (o.format == "md") return true;
  if (o.format == "json") return false;
  fail(ErrorKind::ParseError, "format must be json or md");
}

// ---------------------------------------------------------------------------

inline int cmd_lat_info(const Options& o, std::ostream& out) {
  const Lattice l = load_lattice(o.lattice);
  Json j = to_json(l);
  j["det"] = int_json(l.det());
  j["signature"] = {l.signature().positive, l.signature().negative};
  j["even"] = l.is_even();
  if (want_md(o)) {
    std::string s = "| rank | det | signature | even |\n|---|---|---|---|\n| " + std::to_string(l.rank()) + " | " +
                    l.det().get_str() + " | (" + std::to_string(l.signature().positive) + "," +
                    std::to_string(l.signature().negative) + ") | " + (l.is_even() ? "yes" : "no") + " |\n";
    emit(o, out, s);
  } else {
    emit(o, out, json_text(j));
  }
  return kOk;
}

inline int cmd_lat_disc(const Options& o, std::ostream& out) {
  const FiniteQuadraticForm a = discriminant_form(load_lattice(o.lattice));
  Json j = to_json(a);
  j["size"] = a.size();
  if (want_md(o)) {
    std::string s = "| generator | order | q |\n|---|---|---|\n";
    for (std::size_t i = 0; i < a.rank(); ++i)
      s += "| " + std::to_string(i + 1) + " | " + std::to_string(a.orders()[i]) + " | " + fraction_string(a.q_gen(i)) + " |\n";
    emit(o, out, s);
  } else {
    emit(o, out, json_text(j));
  }
  return kOk;
}

inline CuspReport zero_report(const PolarizationCase& pc, NuMode mode, std::uint64_t bound) {
  CuspReport r{pc, {}, {}, {}, {}};
  r.zero_dim = nu(pc, mode, bound);
  for (const auto& rep : orbit_reps(build_polarized(pc))) r.reps.emplace_back(rep.m, rep.n);
  r.notes.push_back("the trivial class (m,n) = (1,0) corresponds to divisibility-1 primitive isotropic vectors of N");
  return r;
}

inline int cmd_cusp_zero(const Options& o, std::ostream& out) {
  const PolarizationCase pc = make_case(o.d, parse_embedding(o.case_name));
  const CuspReport r = zero_report(pc, parse_nu_mode(o.mode), o.bound);
  emit(o, out, want_md(o) ? to_markdown(r) : json_text(to_json(r)));
  return r.zero_dim->agree() ? kOk : kVerifyFailed;
}

inline int cmd_cusp_one(const Options& o, std::ostream& out) {
  const PolarizationCase pc = make_case(o.d, parse_embedding(o.case_name));
  if (!is_square_free(pc.d)) fail(ErrorKind::NotSquareFree, "one-dimensional cusps need square-free d");
  std::vector<Candidate> cands;
  if (!o.candidates_path.empty())
    cands = load_candidates(o.candidates_path);
  else if (pc.d == 1 && pc.embedding == Embedding::Split)
    cands = table1_fixture();
  else
    fail(ErrorKind::ParseError, "--candidates is required unless d = 1 (split)");
  CuspReport r{pc, {}, {}, {}, {}};
  r.one_dim = one_dim_cusps(pc, cands, o.bound);
  r.notes.push_back("class counts are conditional on the candidate list being the full genus and on Im tau");
  emit(o, out, want_md(o) ? to_markdown(r) : json_text(to_json(r)));
  bool ok = true;
  for (const auto& c : r.one_dim->candidates) ok = ok && c.genus_ok && c.roots_ok && c.tau_consistent;
  return ok ? kOk : kVerifyFailed;
}

inline int cmd_cusp_sweep(const Options& o, std::ostream& out) {
  const Embedding emb = parse_embedding(o.case_name);
  const auto [lo, hi] = parse_range(o.d_range);
  if (lo < 1 || lo > hi) fail(ErrorKind::ParseError, "empty or invalid d range");
  std::vector<long> ds;
  for (long d = lo; d <= hi; ++d)
    if (emb == Embedding::Split || d % 4 == 3) ds.push_back(d);
  if (ds.empty()) fail(ErrorKind::ParseError, "no valid d in range for this embedding");
  const NuMode mode = parse_nu_mode(o.mode);
  const auto results = parallel_map<NuResult>(ds.size(), [&](std::size_t i) { return nu(make_case(ds[i], emb), mode, o.bound); });
  Json rows = Json::array();
  bool all = true;
  std::string md = "| d | formula | enumerated | match |\n|---|---|---|---|\n";
  auto show = [](const std::optional<long>& v) { return v ? Json(*v) : Json(nullptr); };
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const bool ok = results[i].agree();
    all = all && ok;
    rows.push_back({{"d", ds[i]}, {"formula", show(results[i].formula)}, {"enumerated", show(results[i].enumerated)}, {"match", ok}});
    md += "| " + std::to_string(ds[i]) + " | " + (results[i].formula ? std::to_string(*results[i].formula) : "-") + " | " +
          (results[i].enumerated ? std::to_string(*results[i].enumerated) : "-") + " | " + (ok ? "yes" : "**MISMATCH**") + " |\n";
  }
  Json j{{"embedding", to_string(emb)}, {"rows", rows}, {"all_match", all}};
  emit(o, out, want_md(o) ? md : json_text(j));
  return all ? kOk : kVerifyFailed;
}

inline int cmd_glue_enum(const Options& o, std::ostream& out) {
  const Lattice l = load_lattice(o.lattice);
  const FiniteQuadraticForm a = discriminant_form(l);
  Json list = Json::array();
  std::string md = "| # | order | generators | det | form orders | roots |\n|---|---|---|---|---|---|\n";
  std::size_t idx = 0;
  for (const auto& h : isotropic_subgroups(a, o.bound)) {
    if (o.order != 0 && h.order() != o.order) continue;
    const GlueData gd{l, a, h};
    const Overlattice ov = overlattice(gd);
    Json gens = Json::array();
    std::string gs;
    for (const auto& g : h.generators) {
      gens.push_back(g.c);
      std::string c;
      for (auto x : g.c) c += (c.empty() ? "" : ",") + std::to_string(x);
      gs += "(" + c + ")";
    }
    Json item{{"order", h.order()}, {"generators", gens}, {"det", int_json(ov.lattice.det())}, {"form", to_json(ov.form)},
              {"brieskorn_ok", brieskorn_consistent(gd, ov, o.bound)}};
    std::string roots = "-";
    if (ov.lattice.is_negative_definite()) {
      roots = to_string(root_system(ov.lattice));
      item["roots"] = roots;
    }
    std::string orders;
    for (auto d : ov.form.orders()) orders += (orders.empty() ? "" : ",") + std::to_string(d);
    md += "| " + std::to_string(++idx) + " | " + std::to_string(h.order()) + " | " + gs + " | " + ov.lattice.det().get_str() +
          " | " + orders + " | " + roots + " |\n";
    list.push_back(item);
  }
  emit(o, out, want_md(o) ? md : json_text(Json{{"subgroups", list}}));
  return kOk;
}

inline int cmd_glue_roots(const Options& o, std::ostream& out) {
  const Lattice l = load_lattice(o.lattice);
  const RootSystem rs = root_system(l);
  Json j{{"roots", to_string(rs)}, {"count", rs.total_roots()}, {"rank", rs.rank()}};
  emit(o, out, want_md(o) ? "| roots | count |\n|---|---|\n| " + to_string(rs) + " | " + std::to_string(rs.total_roots()) + " |\n"
                          : json_text(j));
  return kOk;
}

inline int cmd_verify_table1(const Options& o, std::ostream& out) {
  const PolarizationCase pc = make_case(1, Embedding::Split);
  const auto cands = o.candidates_path.empty() ? table1_fixture() : load_candidates(o.candidates_path);
  const auto rows = parallel_map<CandidateResult>(cands.size(), [&](std::size_t i) { return check_candidate(pc, cands[i], o.bound); });
  bool ok = true;
  Json list = Json::array();
  std::string md = "| # | R(E) | R(𝒩) | glue order | computed R(E) | genus | O(A_E) order | Im τ order | classes |\n"
                   "|---|---|---|---|---|---|---|---|---|\n";
  std::size_t total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool row_ok = r.genus_ok && r.roots_ok && r.tau_consistent;
    ok = ok && row_ok;
    if (r.genus_ok) total += r.classes;
    md += "| " + std::to_string(i + 1) + " | " + r.candidate.roots + " | " + r.candidate.niemeier + " | " +
          std::to_string(r.glue_order) + " | " + (r.computed_roots.empty() ? "-" : r.computed_roots) + " | " +
          (r.genus_ok ? "ok" : "**REJECTED**") + " | " + std::to_string(r.o_ae) + " | " + std::to_string(r.im_tau) +
          " | " + std::to_string(r.classes) + " |\n";
    Json item{{"roots", r.candidate.roots},   {"niemeier", r.candidate.niemeier}, {"glue_order", r.glue_order},
              {"computed_roots", r.computed_roots}, {"genus_ok", r.genus_ok},     {"roots_ok", r.roots_ok},
              {"o_ae", r.o_ae},                {"im_tau", r.im_tau},             {"classes", r.classes},
              {"conditional", true}};
    if (!r.error.empty()) item["error"] = r.error;
    list.push_back(item);
  }
  md += "\nTotal one-dimensional classes (conditional): " + std::to_string(total) + "\n";
  emit(o, out, want_md(o, true) ? md : json_text(Json{{"rows", list}, {"total", total}, {"all_ok", ok}}));
  return ok ? kOk : kVerifyFailed;
}

inline int cmd_verify_c12(const Options& o, std::ostream& out) {
  const auto checks = example_c12();
  bool ok = true;
  Json list = Json::array();
  std::string md = "| check | result | value |\n|---|---|---|\n";
  for (const auto& c : checks) {
    ok = ok && c.ok;
    list.push_back({{"name", c.name}, {"ok", c.ok}, {"value", c.value}});
    md += "| " + c.name + " | " + (c.ok ? "ok" : "**FAIL**") + " | " + c.value + " |\n";
  }
  emit(o, out, want_md(o) ? md : json_text(Json{{"checks", list}, {"all_ok", ok}}));
  return ok ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cuspidal: exact lattice and cusp computations", "cuspidal"};
  app.require_subcommand(1);
  Options o;
  int (*handler)(const Options&, std::ostream&) = nullptr;

  auto common = [&](CLI::App* c) {
    c->add_option("--format", o.format, "json or md")->check(CLI::IsMember({"json", "md"}));
    c->add_option("--out", o.out_path, "write the report to PATH");
    c->add_option("--bound", o.bound, "enumeration cap")->check(CLI::PositiveNumber);
  };
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                  int (*h)(const Options&, std::ostream&)) {
    CLI::App* c = parent->add_subcommand(name, help);
    common(c);
    c->callback([&handler, h] { handler = h; });
    return c;
  };

  CLI::App* lat = app.add_subcommand("lat", "lattice invariants");
  lat->require_subcommand(1);
  leaf(lat, "info", "rank, determinant, signature, parity", cmd_lat_info)->add_option("lattice", o.lattice)->required();
  leaf(lat, "disc", "discriminant form", cmd_lat_disc)->add_option("lattice", o.lattice)->required();

  CLI::App* cusp = app.add_subcommand("cusp", "boundary components");
  cusp->require_subcommand(1);
  auto* zero = leaf(cusp, "zero", "zero-dimensional cusps", cmd_cusp_zero);
  zero->add_option("--d", o.d)->required();
  zero->add_option("--case", o.case_name);
  zero->add_option("--mode", o.mode);
  auto* one = leaf(cusp, "one", "one-dimensional cusps", cmd_cusp_one);
  one->add_option("--d", o.d)->required();
  one->add_option("--case", o.case_name);
  one->add_option("--candidates", o.candidates_path);
  auto* sweep = leaf(cusp, "sweep", "formula against enumeration over a d range", cmd_cusp_sweep);
  sweep->add_option("--d", o.d_range, "A..B")->required();
  sweep->add_option("--case", o.case_name);
  sweep->add_option("--mode", o.mode);

  CLI::App* glue = app.add_subcommand("glue", "overlattices and root systems");
  glue->require_subcommand(1);
  auto* genum = leaf(glue, "enum", "isotropic glue subgroups and overlattices", cmd_glue_enum);
  genum->add_option("lattice", o.lattice)->required();
  genum->add_option("--order", o.order, "keep subgroups of this order");
  leaf(glue, "roots", "root system of a negative definite lattice", cmd_glue_roots)->add_option("lattice", o.lattice)->required();

  CLI::App* verify = app.add_subcommand("verify", "fixture checks");
  verify->require_subcommand(1);
  leaf(verify, "table1", "genus of E8^2+<-2>^2", cmd_verify_table1)->add_option("--candidates", o.candidates_path);
  leaf(verify, "example-c12", "the <6>+<-4> example", cmd_verify_c12);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (!handler) {
    err << "error: no command\n";
    return kUsage;
  }
  try {
    return handler(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace cuspidal::cli
