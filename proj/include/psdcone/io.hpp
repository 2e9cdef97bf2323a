#pragma once

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "psdcone/lebesgue.hpp"
#include "psdcone/preserver.hpp"
#include "psdcone/projective.hpp"
#include "psdcone/relations.hpp"

namespace psdcone::io {

using json = nlohmann::ordered_json;

using AnyMatrix = std::variant<ExactMatrix, ApproxMatrix>;

/// Canonical "p/q" form; the denominator is always written.
inline std::string rational_to_string(const mpq_class& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline mpq_class parse_rational(const std::string& s, const std::string& where) {
  static const std::regex re(R"(^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ParseError(where + ": malformed rational '" + s + "'");
  mpz_class num(m[1].str().front() == '+' ? m[1].str().substr(1) : m[1].str(), 10);
  mpz_class den(m[2].matched ? m[2].str() : std::string("1"), 10);
  if (den == 0) throw ParseError(where + ": zero denominator in '" + s + "'");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

template <BackendScalar S>
json entry_to_json(const S& x) {
  if constexpr (is_exact_v<S>) {
    return json::array({rational_to_string(x.re()), rational_to_string(x.im())});
  } else {
    return json::array({x.real(), x.imag()});
  }
}

template <BackendScalar S>
json matrix_to_json(const Matrix<S>& m) {
  json data = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(entry_to_json(m(i, j)));
    data.push_back(std::move(row));
  }
  json out;
  out["backend"] = backend_name(ScalarTraits<S>::backend);
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["data"] = std::move(data);
  return out;
}

inline json matrix_to_json(const AnyMatrix& m) {
  return std::visit([](const auto& x) { return matrix_to_json(x); }, m);
}

namespace detail {

inline std::size_t positive_size(const json& j, const char* field) {
  if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'");
  const auto& v = j.at(field);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    throw ParseError(std::string("field '") + field + "' must be a positive integer");
  return v.get<std::size_t>();
}

inline std::string pos(std::size_t i, std::size_t j) {
  return "data[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

}  // namespace detail

/// Parses a matrix document; errors name the offending field, row or entry.
inline AnyMatrix parse_matrix_json(const json& j) {
  if (!j.is_object()) throw ParseError("matrix document must be a JSON object");
  if (!j.contains("backend") || !j.at("backend").is_string())
    throw ParseError("field 'backend' must be \"exact\" or \"float\"");
  const auto backend = j.at("backend").get<std::string>();
  if (backend != "exact" && backend != "float")
    throw ParseError("field 'backend' must be \"exact\" or \"float\", got \"" + backend + "\"");
  const std::size_t rows = detail::positive_size(j, "rows");
  const std::size_t cols = detail::positive_size(j, "cols");
  if (!j.contains("data") || !j.at("data").is_array()) throw ParseError("field 'data' must be an array");
  const auto& data = j.at("data");
  if (data.size() != rows)
    throw ParseError("field 'data' has " + std::to_string(data.size()) + " rows, expected " + std::to_string(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!data[i].is_array() || data[i].size() != cols)
      throw ParseError("data[" + std::to_string(i) + "]: row has " +
                       std::to_string(data[i].is_array() ? data[i].size() : 0) + " entries, expected " +
                       std::to_string(cols));
    for (std::size_t k = 0; k < cols; ++k)
      if (!data[i][k].is_array() || data[i][k].size() != 2)
        throw ParseError(detail::pos(i, k) + ": entry must be a [re, im] pair");
  }
  if (backend == "exact") {
    ExactMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k) {
        const auto& e = data[i][k];
        mpq_class parts[2];
        for (int c = 0; c < 2; ++c) {
          if (e[c].is_string()) parts[c] = parse_rational(e[c].get<std::string>(), detail::pos(i, k));
          else if (e[c].is_number_integer()) parts[c] = mpq_class(e[c].get<long>());
          else throw ParseError(detail::pos(i, k) + ": exact entries must be \"p/q\" strings");
        }
        m(i, k) = Exact(parts[0], parts[1]);
      }
    return m;
  }
  ApproxMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) {
      const auto& e = data[i][k];
      if (!e[0].is_number() || !e[1].is_number())
        throw ParseError(detail::pos(i, k) + ": float entries must be numbers");
      const double re = e[0].get<double>(), im = e[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) throw ParseError(detail::pos(i, k) + ": non-finite value");
      m(i, k) = Approx(re, im);
    }
  return m;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
}

inline AnyMatrix parse_matrix_file(const std::string& path) {
  try {
    return parse_matrix_json(read_json_file(path));
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ParseError(path + ": " + msg);
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

template <BackendScalar S>
Matrix<S> as_backend(const AnyMatrix& m) {
  return std::visit([](const auto& x) { return convert<S>(x); }, m);
}

inline Backend backend_of(const AnyMatrix& m) {
  return std::holds_alternative<ExactMatrix>(m) ? Backend::exact : Backend::approx;
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const RelationReport& r) {
  json j;
  j["leq_ab"] = r.leq_ab;
  j["leq_ba"] = r.leq_ba;
  j["abs_cont_ab"] = r.abs_cont_ab;
  j["abs_cont_ba"] = r.abs_cont_ba;
  j["singular"] = r.singular;
  j["same_range_class"] = r.same_range_class;
  j["min_domination_constant"] = optional_number(r.min_domination_constant);
  j["rank_a"] = r.rank_a;
  j["rank_b"] = r.rank_b;
  j["dim_range_sum"] = r.dim_range_sum;
  j["dim_range_intersection"] = r.dim_range_intersection;
  return j;
}

inline std::string relation_table(const RelationReport& r) {
  std::ostringstream os;
  auto b = [](bool x) { return x ? "true" : "false"; };
  auto row = [&os](const char* name, const std::string& value) {
    os << "  " << name << std::string(24 - std::string(name).size(), ' ') << value << "\n";
  };
  row("A <= B", b(r.leq_ab));
  row("B <= A", b(r.leq_ba));
  row("A << B", b(r.abs_cont_ab));
  row("B << A", b(r.abs_cont_ba));
  row("A _|_ B", b(r.singular));
  row("same range class", b(r.same_range_class));
  if (r.min_domination_constant) {
    std::ostringstream c;
    c.precision(12);
    c << *r.min_domination_constant;
    row("min c with A <= cB", c.str());
  } else {
    row("min c with A <= cB", "none");
  }
  row("rank A", std::to_string(r.rank_a));
  row("rank B", std::to_string(r.rank_b));
  row("dim(ran A + ran B)", std::to_string(r.dim_range_sum));
  row("dim(ran A ^ ran B)", std::to_string(r.dim_range_intersection));
  return os.str();
}

inline json to_json(const SemilinearOperator<Exact>& t) {
  json j;
  j["T"] = matrix_to_json(t.matrix());
  j["flavor"] = flavor_name(t.flavor());
  return j;
}

inline json to_json(const PreserverSpec& s) {
  json j;
  j["kind"] = map_kind_name(s.kind);
  j["dim"] = s.dim;
  switch (s.kind) {
    case MapKind::congruence:
    case MapKind::form_iv:
      j["T"] = matrix_to_json(s.t);
      j["flavor"] = flavor_name(s.flavor);
      if (s.kind == MapKind::form_iv) {
        j["z_seed"] = s.z.seed;
        if (s.z.fixed) j["Z"] = matrix_to_json(*s.z.fixed);
      }
      break;
    case MapKind::wild:
      j["seed"] = s.wild_seed;
      j["V"] = matrix_to_json(s.wild_v);
      j["exponent"] = s.wild_exponent;
      break;
    case MapKind::composite: {
      json parts = json::array();
      for (const auto& p : s.parts) parts.push_back(to_json(p));
      j["parts"] = std::move(parts);
      break;
    }
  }
  return j;
}

namespace detail {

inline ExactMatrix exact_field(const json& j, const char* field) {
  if (!j.contains(field)) throw ParseError(std::string("map spec: missing field '") + field + "'");
  try {
    return as_backend<Exact>(parse_matrix_json(j.at(field)));
  } catch (const ParseError& e) {
    throw ParseError(std::string("map spec field '") + field + "': " + e.what());
  }
}

inline Seed seed_field(const json& j, const char* field, Seed fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_number_unsigned() && !j.at(field).is_number_integer())
    throw ParseError(std::string("map spec: field '") + field + "' must be an integer");
  return j.at(field).get<Seed>();
}

}  // namespace detail

/// Parses a map spec: {"kind", "dim", "T", "flavor", "z_seed", "Z", "seed",
/// "V", "exponent", "parts"}. Wild maps without "V" are derived from "seed".
inline PreserverSpec parse_spec(const json& j) {
  if (!j.is_object()) throw ParseError("map spec must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ParseError("map spec: missing field 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "congruence" || kind == "form_iv") {
    const auto flavor = parse_flavor(j.value("flavor", std::string("linear")));
    SemilinearOperator<Exact> t;
    try {
      t = SemilinearOperator<Exact>(detail::exact_field(j, "T"), flavor);
    } catch (const SingularMatrix&) {
      throw ParseError("map spec field 'T': matrix is not invertible");
    }
    if (kind == "congruence") return PreserverSpec::congruence(t);
    ZFamily z{detail::seed_field(j, "z_seed", 0), std::nullopt};
    if (j.contains("Z")) z.fixed = convert<Approx>(detail::exact_field(j, "Z"));
    return PreserverSpec::form_iv(t, z);
  }
  if (kind == "wild") {
    const Seed seed = detail::seed_field(j, "seed", 0);
    if (!j.contains("V")) return make_wild_map(seed, detail::positive_size(j, "dim"));
    const int e = j.value("exponent", 1);
    try {
      return PreserverSpec::wild(detail::exact_field(j, "V"), e, seed);
    } catch (const SingularMatrix&) {
      throw ParseError("map spec field 'V': matrix is not invertible");
    } catch (const InvalidArgument& ex) {
      throw ParseError(std::string("map spec: ") + ex.what());
    }
  }
  if (kind == "composite") {
    if (!j.contains("parts") || !j.at("parts").is_array() || j.at("parts").empty())
      throw ParseError("map spec: composite needs a non-empty 'parts' array");
    std::vector<PreserverSpec> parts;
    for (const auto& p : j.at("parts")) parts.push_back(parse_spec(p));
    try {
      return PreserverSpec::composite(std::move(parts));
    } catch (const DimensionMismatch& e) {
      throw ParseError(std::string("map spec: ") + e.what());
    }
  }
  throw ParseError("map spec: unknown kind '" + kind + "'");
}

/// Explicit line table {"kind": "line_table", "dim": n, "pairs": [[src, dst], ...]}
/// with vectors written as lists of [re, im] entries; unlisted lines are fixed.
inline LineMap parse_line_table(const json& j) {
  const std::size_t n = detail::positive_size(j, "dim");
  if (!j.contains("pairs") || !j.at("pairs").is_array()) throw ParseError("line table: missing 'pairs' array");
  auto vec = [n](const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != n) throw ParseError(where + ": expected " + std::to_string(n) + " entries");
    json m;
    m["backend"] = "exact";
    m["rows"] = n;
    m["cols"] = 1;
    json data = json::array();
    for (const auto& e : v) data.push_back(json::array({e}));
    m["data"] = data;
    return Line(as_backend<Exact>(parse_matrix_json(m)).col(0));
  };
  std::vector<std::pair<Line, Line>> table;
  std::size_t k = 0;
  for (const auto& p : j.at("pairs")) {
    const std::string where = "pairs[" + std::to_string(k++) + "]";
    if (!p.is_array() || p.size() != 2) throw ParseError(where + ": expected [source, image]");
    table.emplace_back(vec(p[0], where), vec(p[1], where));
  }
  return {n, [table](const Line& l) {
            for (const auto& [src, dst] : table)
              if (src == l) return dst;
            return l;
          }};
}

inline json to_json(const DecompositionReport& r) {
  json j;
  j["passed"] = r.passed();
  j["sum_ok"] = r.sum_ok;
  j["ac_ok"] = r.ac_ok;
  j["singular_ok"] = r.singular_ok;
  j["maximality_ok"] = r.maximality_ok;
  j["sum_error"] = r.sum_error;
  j["trials"] = r.trials;
  j["kept"] = r.kept;
  j["violations"] = r.violations;
  j["failure"] = r.failure;
  if (r.counterexample) j["counterexample"] = matrix_to_json(*r.counterexample);
  return j;
}

inline json to_json(const PreservationReport& r) {
  json j;
  j["passed"] = r.passed();
  j["trials"] = r.trials;
  j["ac_true"] = r.ac_true;
  j["singular_true"] = r.singular_true;
  j["violation_count"] = r.violation_count;
  j["skipped_unresolvable"] = r.skipped;
  json vs = json::array();
  for (const auto& v : r.violations) {
    json x;
    x["relation"] = v.relation;
    x["before"] = v.before;
    x["after"] = v.after;
    x["A"] = matrix_to_json(v.a);
    x["B"] = matrix_to_json(v.b);
    vs.push_back(std::move(x));
  }
  j["violations"] = std::move(vs);
  j["note"] = "necessary conditions checked on samples; bijectivity is not certified";
  return j;
}

inline json to_json(const RangeFormReport& r) {
  json j;
  j["passed"] = r.passed();
  j["trials"] = r.trials;
  j["violation_count"] = r.violation_count;
  json ranks = json::array();
  for (std::size_t k = 0; k < r.ranks_covered.size(); ++k)
    if (r.ranks_covered[k]) ranks.push_back(k);
  j["ranks_covered"] = std::move(ranks);
  if (r.counterexample) j["counterexample"] = matrix_to_json(*r.counterexample);
  return j;
}

inline json to_json(const Dim2Report& r) {
  json j;
  j["passed"] = r.passed();
  j["zero_fixed"] = r.zero_fixed;
  j["invertibility"] = r.invertibility;
  j["rank_one_lines"] = r.rank_one_lines;
  j["trials"] = r.trials;
  j["first_failure"] = r.first_failure;
  j["note"] = Dim2Report::note;
  return j;
}

inline json to_json(const ProjectivityReport& r) {
  json j;
  j["passed"] = r.passed;
  j["coplanar_checked"] = r.coplanar_checked;
  j["noncoplanar_checked"] = r.noncoplanar_checked;
  j["failure"] = r.failure;
  return j;
}

}  // namespace psdcone::io
