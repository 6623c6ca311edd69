#pragma once

// JSON schemas for quotient inputs and the reports, and byte-stable output.
//
//   graph:    {"q": 2, "vertices": 4, "multiplicities": [..] (optional),
//              "edges": [[0, 1], ...]}
//   operator: {"n": 1, "multiplicities": [1, 2], "C": [[0, 1], [2, 0]]}

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "l2hecke/approx.hpp"
#include "l2hecke/coxeter.hpp"
#include "l2hecke/error.hpp"
#include "l2hecke/exactmath.hpp"
#include "l2hecke/farber.hpp"
#include "l2hecke/quotient.hpp"

namespace l2hecke::io {

using Json = nlohmann::ordered_json;

inline std::string exact(const BigRational& r) { return to_string(r); }
inline std::string decimal(const BigRational& r) { return to_decimal(r, 12); }
inline std::string decimal(double x) {
  if (x == 0) x = 0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// Adds key (exact "num/den") and key_decimal (12 significant digits).
inline void put_rational(Json& j, const std::string& key, const BigRational& r) {
  j[key] = exact(r);
  j[key + "_decimal"] = decimal(r);
}

inline Json rational_list(const std::vector<BigRational>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(exact(x));
  return a;
}

inline Json graph_to_json(const quotient::QuotientGraph& g) {
  Json j;
  j["q"] = g.q;
  j["vertices"] = g.vertices;
  if (!g.multiplicities.empty()) j["multiplicities"] = g.multiplicities;
  Json edges = Json::array();
  for (auto [u, v] : g.edges) edges.push_back(Json::array({u, v}));
  j["edges"] = std::move(edges);
  return j;
}

namespace detail {

template <typename T>
T get_field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("field \"") + key + "\": " + e.what());
  }
}

}  // namespace detail

inline quotient::QuotientGraph graph_from_json(const Json& j) {
  quotient::QuotientGraph g;
  g.q = detail::get_field<long>(j, "q");
  g.vertices = detail::get_field<std::size_t>(j, "vertices");
  if (j.contains("multiplicities")) g.multiplicities = detail::get_field<std::vector<std::int64_t>>(j, "multiplicities");
  for (const auto& e : detail::get_field<std::vector<std::vector<std::uint32_t>>>(j, "edges")) {
    if (e.size() != 2) throw Error(ErrorKind::ParseError, "an edge is a pair [u, v]");
    g.edges.emplace_back(e[0], e[1]);
  }
  quotient::check_graph_shape(g);
  return g;
}

inline Json explicit_to_json(const quotient::ExplicitOperator& op) {
  Json j;
  j["n"] = op.blocks;
  j["multiplicities"] = op.multiplicities;
  Json rows = Json::array();
  for (const auto& r : op.coefficients.to_dense()) rows.push_back(r);
  j["C"] = std::move(rows);
  return j;
}

inline quotient::ExplicitOperator explicit_from_json(const Json& j) {
  quotient::ExplicitOperator op;
  op.blocks = detail::get_field<std::size_t>(j, "n");
  op.multiplicities = detail::get_field<std::vector<std::int64_t>>(j, "multiplicities");
  const auto rows = detail::get_field<std::vector<std::vector<std::int64_t>>>(j, "C");
  for (const auto& r : rows)
    if (r.size() != rows.size()) throw Error(ErrorKind::DimensionMismatch, "C must be square");
  op.coefficients = SparseIntMatrix::from_dense(rows);
  return op;
}

using QuotientInput = std::variant<quotient::QuotientGraph, quotient::ExplicitOperator>;

inline QuotientInput quotient_from_json(const Json& j) {
  if (j.contains("C")) return explicit_from_json(j);
  return graph_from_json(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, origin + ": " + e.what());
  }
}

inline Json read_json(const std::string& path) { return parse_json(read_file(path), path); }

/// Two-space indented JSON with a final newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

inline Json chevalley_to_json(const coxeter::ChevalleyReport& r) {
  Json j;
  j["type"] = r.datum.name();
  j["family"] = std::string(coxeter::family_name(r.datum.family));
  j["rank"] = r.datum.rank;
  j["q"] = r.q;
  j["exponents"] = r.datum.exponents;
  put_rational(j, "omega_at_q", r.omega_at_q);
  put_rational(j, "euler", r.euler);
  put_rational(j, "beta_top", r.beta_top);
  j["borel_order"] = to_string(r.borel_order);
  put_rational(j, "covolume", r.covolume);
  put_rational(j, "lattice_beta_top", r.lattice_beta_top);
  j["euler_poincare_ok"] = r.euler_poincare_ok;
  j["lattice_identity_ok"] = r.lattice_identity_ok;
  j["q_is_prime_power"] = r.q_is_prime_power;
  j["min_covolume_hypotheses_met"] = r.min_covolume_hypotheses_met;
  j["d3_is_a3"] = r.d3_is_a3;
  return j;
}

inline Json measure_to_json(const quotient::SpectralMeasure& mu) {
  Json j;
  j["empty_truncation"] = mu.empty_truncation;
  put_rational(j, "total_mass", mu.total_mass);
  j["nullity"] = mu.nullity;
  put_rational(j, "zero_mass", mu.zero_mass);
  put_rational(j, "normalized_nullity", mu.normalized_nullity);
  Json atoms = Json::array();
  for (const auto& a : mu.atoms) {
    Json x;
    x["value"] = decimal(a.value);
    x["multiplicity"] = a.multiplicity;
    x["mass_decimal"] = decimal(a.mass);
    x["mass"] = a.exact_mass ? Json(exact(*a.exact_mass)) : Json(nullptr);
    atoms.push_back(std::move(x));
  }
  j["atoms"] = std::move(atoms);
  j["exact_moments"] = rational_list(mu.exact_moments);
  return j;
}

/// CSV columns of a convergence report.
inline std::vector<std::string> convergence_columns(unsigned k_max, unsigned r_max) {
  std::vector<std::string> cols{"size", "seed", "covol", "girth"};
  for (unsigned r = 1; r <= r_max; ++r) cols.push_back("rho_" + std::to_string(r));
  for (unsigned k = 0; k <= k_max; ++k) cols.push_back("gap_" + std::to_string(k));
  for (const char* c : {"zero_mass_full", "zero_mass_trunc", "betti_ratio", "bound_ok"}) cols.emplace_back(c);
  return cols;
}

inline std::string girth_text(const std::optional<std::size_t>& g) { return g ? std::to_string(*g) : "inf"; }

/// Header comment lines ("# key=value"), then the column line and one row per
/// graph. Rationals are exact.
inline std::string convergence_to_csv(const approx::ConvergenceReport& rep,
                                      const std::vector<std::pair<std::string, std::string>>& header) {
  std::ostringstream out;
  for (const auto& [k, v] : header) out << "# " << k << "=" << v << "\n";
  const auto cols = convergence_columns(rep.k_max, rep.r_max);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& row : rep.rows) {
    out << row.size << "," << row.seed << "," << exact(row.covolume) << "," << girth_text(row.girth);
    for (const auto& r : row.rho) out << "," << exact(r);
    for (const auto& g : row.gaps) out << "," << exact(g);
    out << "," << exact(row.zero_mass_full) << "," << exact(row.zero_mass_trunc) << "," << exact(row.betti_ratio) << ","
        << (row.bound_ok ? "true" : "false") << "\n";
  }
  return out.str();
}

inline Json convergence_to_json(const approx::ConvergenceReport& rep) {
  Json j;
  j["q"] = rep.q;
  j["k_max"] = rep.k_max;
  j["r_max"] = rep.r_max;
  put_rational(j, "norm_bound", rep.norm_bound);
  j["tree_moments"] = rational_list(rep.tree_moments);
  put_rational(j, "limit_betti_ratio", rep.limit_betti_ratio);
  Json rows = Json::array();
  for (const auto& row : rep.rows) {
    Json r;
    r["size"] = row.size;
    r["seed"] = row.seed;
    r["covol"] = exact(row.covolume);
    r["girth"] = row.girth ? Json(*row.girth) : Json("inf");
    r["rho"] = rational_list(row.rho);
    r["moments"] = rational_list(row.moments);
    r["gaps"] = rational_list(row.gaps);
    r["gap_bounds"] = rational_list(row.gap_bounds);
    put_rational(r, "zero_mass_full", row.zero_mass_full);
    put_rational(r, "zero_mass_trunc", row.zero_mass_trunc);
    put_rational(r, "betti_ratio", row.betti_ratio);
    r["max_abs_eigenvalue"] = row.max_abs_eigenvalue ? Json(decimal(*row.max_abs_eigenvalue)) : Json(nullptr);
    r["bound_ok"] = row.bound_ok;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace l2hecke::io
