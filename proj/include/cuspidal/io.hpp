#pragma once

// JSON encodings of lattices and finite quadratic forms.

#include <regex>
#include <string>

#include "cuspidal/fqf.hpp"
#include "cuspidal/lattice.hpp"
#include "json.hpp"

namespace cuspidal {

using Json = nlohmann::json;  // keys sorted: canonical output

inline std::string fraction_string(const Rat& x) {
  Rat r = x;
  r.canonicalize();
  return r.get_str();
}

inline Rat parse_fraction(const std::string& s) {
  static const std::regex re(R"(^-?[0-9]+(/[0-9]+)?$)");
  if (!std::regex_match(s, re)) fail(ErrorKind::ParseError, "bad fraction '" + s + "'");
  Rat r(s);
  if (r.get_den() == 0) fail(ErrorKind::ParseError, "zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

inline Json int_json(const Int& z) {
  if (z.fits_slong_p()) return Json(z.get_si());
  return Json(z.get_str());
}

inline Int json_int(const Json& j) {
  if (j.is_number_integer()) return Int(j.get<long>());
  if (j.is_string()) {
    static const std::regex re(R"(^-?[0-9]+$)");
    const auto s = j.get<std::string>();
    if (!std::regex_match(s, re)) fail(ErrorKind::ParseError, "bad integer '" + s + "'");
    return Int(s);
  }
  fail(ErrorKind::ParseError, "expected an integer");
}

inline Json to_json(const Lattice& l) {
  Json gram = Json::array();
  for (std::size_t i = 0; i < l.rank(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < l.rank(); ++j) row.push_back(int_json(l.gram()(i, j)));
    gram.push_back(row);
  }
  Json out;
  out["rank"] = l.rank();
  out["gram"] = gram;
  out["labels"] = l.labels();
  return out;
}

inline Lattice lattice_from_json(const Json& j) {
  try {
    if (!j.is_object() || !j.contains("gram")) fail(ErrorKind::ParseError, "lattice JSON needs a gram field");
    const auto& g = j.at("gram");
    const std::size_t n = g.size();
    if (j.contains("rank") && j.at("rank").get<std::size_t>() != n)
      fail(ErrorKind::ParseError, "rank differs from Gram size");
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!g.at(i).is_array() || g.at(i).size() != n) fail(ErrorKind::ParseError, "Gram matrix is not square");
      for (std::size_t k = 0; k < n; ++k) m(i, k) = json_int(g.at(i).at(k));
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return Lattice(std::move(m), std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

inline Json to_json(const FiniteQuadraticForm& a) {
  Json q = Json::array(), b = Json::array();
  for (const auto& v : a.q_values()) q.push_back(fraction_string(v));
  for (const auto& row : a.b_values()) {
    Json r = Json::array();
    for (const auto& v : row) r.push_back(fraction_string(v));
    b.push_back(r);
  }
  Json out;
  out["orders"] = a.orders();
  out["q"] = q;
  out["b"] = b;
  return out;
}

inline FiniteQuadraticForm form_from_json(const Json& j) {
  try {
    auto orders = j.at("orders").get<std::vector<std::int64_t>>();
    std::vector<Rat> q;
    for (const auto& v : j.at("q")) q.push_back(parse_fraction(v.get<std::string>()));
    std::vector<std::vector<Rat>> b;
    for (const auto& row : j.at("b")) {
      b.emplace_back();
      for (const auto& v : row) b.back().push_back(parse_fraction(v.get<std::string>()));
    }
    return FiniteQuadraticForm(orders, q, b);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

}  // namespace cuspidal
