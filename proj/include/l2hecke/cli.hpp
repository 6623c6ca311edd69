#pragma once

// Command-line front end. run_command is a pure function of its arguments
// and input files; it writes the report to --output or to `out`.
//
// Exit codes: 0 success, 2 usage or invalid input, 3 I/O failure,
// 4 internal assertion (a violated bound or a failed eigensolve).

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "l2hecke/approx.hpp"
#include "l2hecke/coxeter.hpp"
#include "l2hecke/error.hpp"
#include "l2hecke/farber.hpp"
#include "l2hecke/hecke.hpp"
#include "l2hecke/io.hpp"
#include "l2hecke/quotient.hpp"

namespace l2hecke::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3, kInternal = 4 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError: return kIo;
    case ErrorKind::GapBoundViolated:
    case ErrorKind::BoundViolated:
    case ErrorKind::EigensolverFailure:
    case ErrorKind::Internal: return kInternal;
    default: return kUsage;
  }
}

namespace detail {

inline std::vector<std::size_t> parse_sizes(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorKind::ParseError, "bad size \"" + item + "\" in --sizes");
    out.push_back(std::stoull(item));
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, "--sizes is empty");
  return out;
}

/// "c@x" or "c@x,y" terms separated by ';', e.g. "2@0;-1@1;-1@-1".
inline farber::GroupRingElement parse_group_ring(const std::string& text, unsigned dim) {
  farber::GroupRingElement t;
  std::stringstream ss(text);
  std::string term;
  while (std::getline(ss, term, ';')) {
    const auto at = term.find('@');
    if (at == std::string::npos) throw Error(ErrorKind::ParseError, "term \"" + term + "\" lacks '@'");
    try {
      const long long c = std::stoll(term.substr(0, at));
      std::string pos = term.substr(at + 1);
      long x = 0, y = 0;
      if (auto comma = pos.find(','); comma != std::string::npos) {
        x = std::stol(pos.substr(0, comma));
        y = std::stol(pos.substr(comma + 1));
      } else {
        x = std::stol(pos);
      }
      if (dim == 1 && y != 0) throw Error(ErrorKind::ParseError, "two coordinates in rank 1");
      t[{x, y}] += c;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ParseError, "bad term \"" + term + "\"");
    }
  }
  return t;
}

inline farber::GroupRingElement laplacian(unsigned dim) {
  farber::GroupRingElement t;
  t[{0, 0}] = 2 * static_cast<long>(dim);
  t[{1, 0}] = t[{-1, 0}] = -1;
  if (dim == 2) t[{0, 1}] = t[{0, -1}] = -1;
  return t;
}

struct Output {
  std::string path;
  std::ostream& fallback;
  void emit(const std::string& text) const {
    if (path.empty()) fallback << text;
    else io::write_file(path, text);
  }
};

inline io::Json header(const std::string& command, const std::vector<std::pair<std::string, io::Json>>& config) {
  io::Json h;
  h["command"] = command;
  io::Json c;
  for (const auto& [k, v] : config) c[k] = v;
  h["config"] = std::move(c);
  return h;
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::ParseError, message);
}

}  // namespace detail

struct Options {
  // chevalley
  std::string family;
  unsigned rank = 0;
  long q = 2;
  bool all = false;
  long qmax = 16;
  unsigned max_rank = 8;
  // hecke
  std::string a, b;
  unsigned k = 8;
  // quotient / tree
  std::string input;
  std::string element = "A1";
  std::string model = "pairing";
  std::string sizes;
  std::optional<std::uint64_t> seed;
  unsigned moments = 8;
  unsigned radii = 3;
  std::string base;
  std::string dump_graphs;
  bool connected = false;
  bool no_spectra = false;
  // lueck
  unsigned dim = 1;
  std::string terms;
  std::string levels;
  // shared
  std::string format = "json";
  std::string output;
};

inline void run_chevalley(const Options& o, const detail::Output& out) {
  std::vector<std::pair<coxeter::Family, unsigned>> types;
  std::vector<long> qs;
  if (o.all) {
    detail::require(o.qmax >= 2, "--qmax must be >= 2");
    types = coxeter::supported_types(o.max_rank);
    for (long q = 2; q <= o.qmax; ++q) qs.push_back(q);
  } else {
    detail::require(!o.family.empty(), "--family is required unless --all is given");
    auto f = coxeter::parse_family(o.family);
    if (!f) throw Error(ErrorKind::UnsupportedType, "unknown family \"" + o.family + "\"");
    unsigned rank = o.rank;
    if (auto fr = coxeter::fixed_rank(*f); fr && rank == 0) rank = *fr;
    types.emplace_back(*f, rank);
    qs.push_back(o.q);
  }
  std::vector<coxeter::ChevalleyReport> reports;
  for (auto [f, r] : types)
    for (long q : qs) reports.push_back(coxeter::chevalley_report(f, r, q));

  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "# command=chevalley\n";
    csv << "type,q,omega_at_q,euler,beta_top,borel_order,covolume,lattice_beta_top,euler_poincare_ok,"
           "lattice_identity_ok,q_is_prime_power\n";
    for (const auto& r : reports)
      csv << r.datum.name() << "," << r.q << "," << io::exact(r.omega_at_q) << "," << io::exact(r.euler) << ","
          << io::exact(r.beta_top) << "," << to_string(r.borel_order) << "," << io::exact(r.covolume) << ","
          << io::exact(r.lattice_beta_top) << "," << (r.euler_poincare_ok ? "true" : "false") << ","
          << (r.lattice_identity_ok ? "true" : "false") << "," << (r.q_is_prime_power ? "true" : "false") << "\n";
    out.emit(csv.str());
    return;
  }
  io::Json doc = detail::header("chevalley", {{"family", o.all ? io::Json(nullptr) : io::Json(o.family)},
                                              {"rank", o.all ? io::Json(nullptr) : io::Json(types.front().second)},
                                              {"q", o.all ? io::Json(nullptr) : io::Json(o.q)},
                                              {"all", o.all},
                                              {"qmax", o.all ? io::Json(o.qmax) : io::Json(nullptr)},
                                              {"max_rank", o.all ? io::Json(o.max_rank) : io::Json(nullptr)},
                                              {"format", o.format}});
  if (o.all) {
    io::Json list = io::Json::array();
    bool all_ok = true;
    for (const auto& r : reports) {
      list.push_back(io::chevalley_to_json(r));
      all_ok = all_ok && r.euler_poincare_ok && r.lattice_identity_ok;
    }
    doc["count"] = reports.size();
    doc["all_consistent"] = all_ok;
    doc["reports"] = std::move(list);
  } else {
    doc["report"] = io::chevalley_to_json(reports.front());
  }
  out.emit(io::dump(doc));
}

inline void run_hecke(const std::string& action, const Options& o, const detail::Output& out) {
  const hecke::TreeHeckePair pair(o.q);
  detail::require(!o.a.empty(), "--a is required");
  const auto a = hecke::parse_element(o.a, pair);
  io::Json doc = detail::header("hecke " + action, {{"q", o.q}, {"a", o.a}, {"b", o.b.empty() ? io::Json(nullptr) : io::Json(o.b)},
                                                    {"k", action == "moments" ? io::Json(o.k) : io::Json(nullptr)}});
  if (action == "mult") {
    detail::require(!o.b.empty(), "--b is required for mult");
    const auto b = hecke::parse_element(o.b, pair);
    doc["product"] = hecke::tree_mul(a, b).to_string();
  } else if (action == "trace") {
    io::put_rational(doc, "trace", hecke::trace(a));
    io::put_rational(doc, "l1_norm", hecke::l1_norm(a));
  } else {
    doc["moments"] = io::rational_list(hecke::moments(hecke::HeckeMatrix::scalar(a), o.k));
  }
  out.emit(io::dump(doc));
}

inline void run_quotient(const Options& o, const detail::Output& out) {
  detail::require(!o.input.empty(), "--input is required");
  const auto input = io::quotient_from_json(io::read_json(o.input));
  std::shared_ptr<const quotient::WeightedQuotient> wq;
  quotient::QuotientOperator op;
  io::Json doc = detail::header("quotient", {{"input", o.input}, {"element", o.element}, {"moments", o.moments}});
  if (const auto* g = std::get_if<quotient::QuotientGraph>(&input)) {
    wq = std::make_shared<const quotient::WeightedQuotient>(quotient::build_quotient(*g));
    const auto t = hecke::HeckeMatrix::scalar(hecke::parse_element(o.element, hecke::TreeHeckePair(g->q)));
    op = quotient::assemble_operator(wq, t);
    io::put_rational(doc, "norm_bound", t.norm_bound());
    doc["girth"] = io::girth_text(farber::girth(*g));
  } else {
    wq = std::make_shared<const quotient::WeightedQuotient>(
        quotient::build_quotient(std::get<quotient::ExplicitOperator>(input)));
    op = quotient::explicit_operator(wq);
  }
  doc["points"] = wq->size();
  doc["full_measure_points"] = wq->full_measure_points.size();
  io::put_rational(doc, "covolume", wq->covolume);
  io::put_rational(doc, "phi", quotient::phi(op));
  io::put_rational(doc, "phi_e", quotient::phi_e(op));
  const auto dims = quotient::kernel_dims(op);
  doc["kernel_dims"] = io::Json::array({dims.full, dims.truncated});
  doc["moments_full"] = io::rational_list(quotient::exact_moments_full(op, o.moments));
  doc["moments_truncated"] = io::rational_list(quotient::exact_moments_truncated(op, o.moments));
  doc["measure_full"] = io::measure_to_json(quotient::spectral_measure_full(op));
  doc["measure_truncated"] = io::measure_to_json(quotient::spectral_measure_truncated(op));
  out.emit(io::dump(doc));
}

inline void run_tree(const Options& o, const detail::Output& out) {
  detail::require(o.seed.has_value(), "--seed is required");
  detail::require(o.q >= 1, "--q must be >= 1");
  farber::GraphGenConfig config;
  config.q = o.q;
  config.sizes = detail::parse_sizes(o.sizes);
  config.seed = *o.seed;
  config.require_connected = o.connected;
  if (o.model == "lift") {
    config.model = farber::Model::Lift;
    detail::require(!o.base.empty(), "--base is required for --model lift");
    const auto base = io::quotient_from_json(io::read_json(o.base));
    const auto* g = std::get_if<quotient::QuotientGraph>(&base);
    detail::require(g != nullptr, "--base must be a graph");
    config.base = *g;
  } else {
    config.model = farber::Model::Pairing;
  }
  const auto graphs = farber::generate_all(config);
  if (!o.dump_graphs.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(o.dump_graphs, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + o.dump_graphs);
    for (std::size_t i = 0; i < graphs.size(); ++i)
      io::write_file((std::filesystem::path(o.dump_graphs) / ("graph_" + std::to_string(i) + ".json")).string(),
                     io::dump(io::graph_to_json(graphs[i].graph)));
  }
  const auto t = hecke::HeckeMatrix::scalar(hecke::parse_element(o.element, hecke::TreeHeckePair(o.q)));
  approx::ConvergenceOptions opt;
  opt.k_max = o.moments;
  opt.r_max = o.radii;
  opt.spectra = !o.no_spectra;
  const auto rep = approx::convergence_report(approx::as_inputs(graphs), t, opt);

  const std::vector<std::pair<std::string, std::string>> config_text{
      {"command", "tree"},          {"q", std::to_string(o.q)},
      {"model", o.model},           {"sizes", o.sizes},
      {"seed", std::to_string(*o.seed)}, {"moments", std::to_string(o.moments)},
      {"radii", std::to_string(o.radii)}, {"element", o.element},
      {"base", o.base},             {"connected", o.connected ? "true" : "false"},
      {"spectra", o.no_spectra ? "false" : "true"}};
  if (o.format == "csv") {
    out.emit(io::convergence_to_csv(rep, config_text));
    return;
  }
  std::vector<std::pair<std::string, io::Json>> cfg;
  for (const auto& [k, v] : config_text)
    if (k != "command") cfg.emplace_back(k, v);
  io::Json doc = detail::header("tree", cfg);
  doc["report"] = io::convergence_to_json(rep);
  out.emit(io::dump(doc));
}

inline void run_lueck(const Options& o, const detail::Output& out) {
  detail::require(o.dim == 1 || o.dim == 2, "--dim must be 1 or 2");
  const auto t = o.terms.empty() ? detail::laplacian(o.dim) : detail::parse_group_ring(o.terms, o.dim);
  const auto levels = farber::lueck_finite_quotient(o.dim, t, detail::parse_sizes(o.levels));
  std::string terms_text;
  for (const auto& [g, c] : t)
    terms_text += (terms_text.empty() ? "" : ";") + std::to_string(c) + "@" + std::to_string(g.first) +
                  (o.dim == 2 ? "," + std::to_string(g.second) : "");
  io::Json doc = detail::header("lueck", {{"dim", o.dim}, {"terms", terms_text}, {"levels", o.levels}});
  io::Json rows = io::Json::array();
  for (const auto& l : levels) {
    io::Json r;
    r["modulus"] = l.modulus;
    r["points"] = l.op.dimension();
    r["nullity"] = l.nullity;
    io::put_rational(r, "normalized_nullity", l.normalized_nullity);
    rows.push_back(std::move(r));
  }
  doc["levels"] = std::move(rows);
  out.emit(io::dump(doc));
}

/// args excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"Exact L2-invariants and finite tree-lattice quotients"};
  app.require_subcommand(1);
  Options o;
  auto add_format = [&](CLI::App* sub, std::vector<std::string> allowed) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember(std::move(allowed)));
    sub->add_option("--output", o.output, "Output file (default: standard output)");
  };

  auto* chev = app.add_subcommand("chevalley", "L2-invariants of Chevalley groups over local function fields");
  chev->add_option("--family", o.family, "A, B, C, D, E6, E7, E8, F4 or G2");
  chev->add_option("--rank", o.rank, "Rank d");
  chev->add_option("--q", o.q, "Residue field size");
  chev->add_flag("--all", o.all, "Every supported type up to --max-rank, every q in 2..qmax");
  chev->add_option("--qmax", o.qmax, "Largest q for --all");
  chev->add_option("--max-rank", o.max_rank, "Largest rank for --all");
  add_format(chev, {"json", "csv"});

  auto* hk = app.add_subcommand("hecke", "Arithmetic in the Hecke algebra of the (q+1)-regular tree");
  hk->require_subcommand(1);
  std::string hecke_action;
  const std::pair<const char*, const char*> actions[] = {
      {"mult", "Product a*b"}, {"trace", "Trace and l1 norm of a"}, {"moments", "Moments tr(a^k) of [a]"}};
  for (const auto& [name, description] : actions) {
    auto* s = hk->add_subcommand(name, description);
    s->add_option("--q", o.q, "Tree parameter q")->required();
    s->add_option("--a", o.a, "Element such as \"A0+3*A2\"")->required();
    if (std::string(name) == "mult") s->add_option("--b", o.b, "Second factor")->required();
    if (std::string(name) == "moments") s->add_option("--k", o.k, "Largest moment");
    s->add_option("--output", o.output, "Output file (default: standard output)");
    s->callback([&hecke_action, name] { hecke_action = name; });
  }

  auto* quo = app.add_subcommand("quotient", "Spectral data of one weighted quotient");
  quo->add_option("--input", o.input, "Graph or operator JSON")->required();
  quo->add_option("--element", o.element, "Hecke element for graph inputs");
  quo->add_option("--moments", o.moments, "Largest exact moment");
  add_format(quo, {"json"});

  auto* tree = app.add_subcommand("tree", "Convergence report over generated tree-lattice quotients");
  tree->add_option("--q", o.q, "Tree parameter q")->required();
  tree->add_option("--model", o.model, "pairing or lift")->check(CLI::IsMember({"pairing", "lift"}));
  tree->add_option("--sizes", o.sizes, "Comma-separated sizes (vertices, or lift degrees)")->required();
  tree->add_option("--seed", o.seed, "64-bit seed")->required();
  tree->add_option("--moments", o.moments, "Largest moment k");
  tree->add_option("--radii", o.radii, "Largest Farber radius r");
  tree->add_option("--base", o.base, "Base graph JSON for lifts");
  tree->add_option("--dump-graphs", o.dump_graphs, "Directory receiving each generated graph");
  tree->add_option("--element", o.element, "Hecke element");
  tree->add_flag("--connected", o.connected, "Resample until connected");
  tree->add_flag("--no-spectra", o.no_spectra, "Skip eigensolves");
  add_format(tree, {"csv", "json"});

  auto* lk = app.add_subcommand("lueck", "Nullities of circulant quotients of Z or Z^2");
  lk->add_option("--dim", o.dim, "1 or 2");
  lk->add_option("--terms", o.terms, "Terms c@x or c@x,y separated by ';' (default: Laplacian)");
  lk->add_option("--levels", o.levels, "Comma-separated moduli")->required();
  add_format(lk, {"json"});

  std::vector<const char*> argv{"l2hecke"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (tree->parsed() && o.format == "json" && !tree->count("--format")) o.format = "csv";
    const detail::Output sink{o.output, out};
    if (chev->parsed()) run_chevalley(o, sink);
    else if (hk->parsed()) run_hecke(hecke_action, o, sink);
    else if (quo->parsed()) run_quotient(o, sink);
    else if (tree->parsed()) run_tree(o, sink);
    else if (lk->parsed()) run_lueck(o, sink);
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace l2hecke::cli
