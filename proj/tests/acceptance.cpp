// Acceptance run: one PASS/FAIL line per criterion, each under its runtime
// budget. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "l2hecke.hpp"

using namespace l2hecke;
using hecke::HeckeElement;
using hecke::HeckeMatrix;
using hecke::TreeHeckePair;
using quotient::QuotientGraph;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int number;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

QuotientGraph complete_graph(std::size_t n) {
  QuotientGraph g{static_cast<long>(n) - 2, n, {}, {}};
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
  return g;
}

QuotientGraph cycle(std::size_t n) {
  QuotientGraph g{1, n, {}, {}};
  for (std::uint32_t v = 0; v < n; ++v) g.edges.emplace_back(v, static_cast<std::uint32_t>((v + 1) % n));
  return g;
}

HeckeMatrix scalar(const HeckeElement& x) { return HeckeMatrix::scalar(x); }

HeckeElement random_integral(std::mt19937_64& rng, TreeHeckePair p, unsigned max_radius, long bound) {
  std::uniform_int_distribution<long> coef(-bound, bound);
  HeckeElement x(p);
  for (unsigned r = 0; r <= max_radius; ++r) x.add(r, BigRational(coef(rng)));
  return x;
}

// 1. Chevalley identities over every supported type and q in 2..16.
Outcome chevalley_identities() {
  Outcome o;
  std::size_t checked = 0;
  for (auto [f, r] : coxeter::supported_types(8))
    for (long q = 2; q <= 16; ++q) {
      const auto rep = coxeter::chevalley_report(f, r, q);
      const BigRational sign = rep.datum.rank % 2 == 0 ? 1 : -1;
      if (rep.lattice_beta_top != rep.covolume * rep.beta_top || rep.euler != sign * rep.beta_top) o.ok = false;
      ++checked;
    }
  const auto a1 = coxeter::chevalley_report(coxeter::Family::A, 1, 2);
  const auto a2 = coxeter::chevalley_report(coxeter::Family::A, 2, 2);
  o.ok = o.ok && a1.beta_top == make_rational(1, 3) && a1.covolume == 1 && a1.lattice_beta_top == make_rational(1, 3) &&
         a2.beta_top == make_rational(1, 7) && a2.covolume == make_rational(1, 3) &&
         a2.lattice_beta_top == make_rational(1, 21);
  o.detail = std::to_string(checked) + " (type, q) pairs; ~A1 q=2 -> " + to_string(a1.beta_top) + ", " +
             to_string(a1.covolume) + ", " + to_string(a1.lattice_beta_top) + "; ~A2 q=2 -> " + to_string(a2.beta_top) +
             ", " + to_string(a2.covolume) + ", " + to_string(a2.lattice_beta_top);
  return o;
}

// 2. Convolution products against ball counting.
Outcome hecke_oracle() {
  Outcome o;
  std::size_t pairs = 0, mismatches = 0;
  for (long q : {1, 2, 3}) {
    const TreeHeckePair p(q);
    for (unsigned r = 0; r <= 5; ++r)
      for (unsigned s = 0; s <= 5; ++s) {
        HeckeElement expected(p);
        for (const auto& [u, c] : hecke::structure_constants_oracle(p, r, s, r + s)) expected.add(u, BigRational(c));
        if (!(hecke::tree_mul(HeckeElement::basis(p, r), HeckeElement::basis(p, s)) == expected)) ++mismatches;
        ++pairs;
      }
  }
  o.ok = mismatches == 0;
  o.detail = std::to_string(pairs) + " products, " + std::to_string(mismatches) + " mismatches";
  return o;
}

// 3. Trace against the ball representation, trace property, positivity.
Outcome trace_consistency() {
  Outcome o;
  std::size_t failures = 0, samples = 0;
  std::mt19937_64 rng(20260);
  for (long q : {1, 2, 3}) {
    const TreeHeckePair p(q);
    const hecke::TreeBall ball(q, 7);
    std::vector<HeckeElement> sample;
    for (int i = 0; i < 50; ++i) sample.push_back(random_integral(rng, p, 3, 3));
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const auto& t = sample[i];
      const auto& u = sample[(i + 1) % sample.size()];
      const auto op = hecke::operator_on_ball(scalar(t), ball);
      const BigRational return_value(hecke::ball_return_value(op, 0, 1));
      const BigRational return_square(hecke::ball_return_value(op, 0, 2));
      const bool ok = return_value == hecke::trace(t) && return_square == hecke::trace(hecke::tree_mul(t, t)) &&
                      hecke::trace(hecke::tree_mul(t, u)) == hecke::trace(hecke::tree_mul(u, t)) &&
                      hecke::trace(hecke::tree_mul(hecke::involution(t), t)) >= 0;
      if (!ok) ++failures;
      ++samples;
    }
  }
  o.ok = failures == 0;
  o.detail = std::to_string(samples) + " elements on radius-7 balls, " + std::to_string(failures) + " failures";
  return o;
}

// 4. Tree moments three ways, on graphs of girth > 10.
Outcome triple_moments() {
  Outcome o;
  constexpr unsigned k_max = 10;
  std::size_t graphs_checked = 0;
  for (long q : {1, 2, 3}) {
    const TreeHeckePair p(q);
    const auto dp = approx::tree_moments_dp(q, k_max);
    const auto hk = hecke::moments(scalar(HeckeElement::basis(p, 1)), k_max);
    for (unsigned k = 0; k <= k_max; ++k)
      if (BigRational(dp[k]) != hk[k]) o.ok = false;

    std::vector<QuotientGraph> graphs;
    if (q == 1) {
      for (std::size_t n : {1, 3, 10}) graphs.push_back(farber::gen_random_lift(cycle(11), n, 100 + n));
    } else {
      const auto hex = farber::hexagon_incidence_graph(q);
      graphs.push_back(hex);
      for (std::size_t n : {2, 4}) graphs.push_back(farber::gen_random_lift(hex, n, 200 + n));
    }
    for (const auto& g : graphs) {
      const auto gi = farber::girth(g);
      if (gi && *gi <= k_max) {
        o.ok = false;
        o.detail += "girth " + std::to_string(*gi) + " too small; ";
        continue;
      }
      const auto op = quotient::assemble_operator(quotient::build_quotient(g), scalar(HeckeElement::basis(p, 1)));
      const auto m = quotient::exact_moments_full(op, k_max);
      for (unsigned k = 0; k <= k_max; ++k)
        if (m[k] != hk[k]) o.ok = false;
      ++graphs_checked;
    }
  }
  o.detail += std::to_string(graphs_checked) + " graphs of girth > 10, k <= 10, q in {1,2,3}";
  return o;
}

// 5. Betti ratio 1/2 + 1/n on connected cubic graphs; normalisation identity.
Outcome betti_ratio() {
  Outcome o;
  farber::GraphGenConfig cfg;
  cfg.q = 2;
  cfg.sizes = {100, 200, 500, 1000, 2000};
  cfg.seed = 55;
  cfg.require_connected = true;
  std::vector<QuotientGraph> graphs;
  for (const auto& g : farber::generate_all(cfg)) graphs.push_back(g.graph);
  const auto rep = approx::betti_ratio_experiment(graphs, 2);
  for (const auto& row : rep.rows)
    if (row.b0 != 1 || row.ratio != make_rational(1, 2) + make_rational(1, static_cast<long>(row.vertices))) o.ok = false;
  for (long q = 1; q <= 9; ++q)
    if (make_rational(q - 1, q + 1) * make_rational(q + 1, 2) != make_rational(q - 1, 2)) o.ok = false;
  o.detail = std::to_string(rep.rows.size()) + " connected graphs; n=2000 ratio " + to_string(rep.rows.back().ratio);
  return o;
}

struct CorpusEntry {
  QuotientGraph graph;
  std::uint64_t seed;
};

std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> out;
  auto pairing = [&](long q, std::initializer_list<std::size_t> sizes, std::uint64_t seeds) {
    for (std::size_t n : sizes)
      for (std::uint64_t s = 0; s < seeds; ++s) {
        const std::uint64_t seed = 1000 * static_cast<std::uint64_t>(q) + 10 * n + s;
        out.push_back({farber::gen_random_regular(n, q, seed), seed});
      }
  };
  auto lifts = [&](const QuotientGraph& base, std::initializer_list<std::size_t> degrees, std::uint64_t salt) {
    for (std::size_t n : degrees) out.push_back({farber::gen_random_lift(base, n, salt + n), salt + n});
  };
  pairing(1, {50, 100, 200, 500}, 3);
  lifts(cycle(3), {10, 50, 100, 300}, 1);
  pairing(2, {20, 50, 100, 200, 500, 1000}, 3);
  pairing(2, {2000}, 1);
  lifts(complete_graph(4), {5, 25, 125, 500}, 2);
  lifts(QuotientGraph{2, 2, {{0, 1}, {0, 1}, {0, 1}}, {}}, {10, 100, 1000}, 3);
  lifts(QuotientGraph{2, 2, {{0, 0}, {1, 1}, {0, 1}}, {}}, {50, 500}, 4);
  lifts(farber::hexagon_incidence_graph(2), {1, 2, 4}, 5);
  pairing(3, {20, 50, 100, 200, 500, 1000}, 3);
  lifts(complete_graph(5), {4, 20, 100, 400}, 6);
  lifts(farber::hexagon_incidence_graph(3), {1, 2}, 7);
  return out;
}

// 6. Moment gaps within 2 (q+1)^k rho_{ceil(k/2)} across the corpus.
Outcome moment_gap_bounds(const std::vector<CorpusEntry>& graphs) {
  Outcome o;
  std::size_t rows = 0, violations = 0;
  BigRational worst_ratio(0);
  for (long q : {1, 2, 3}) {
    std::vector<approx::InputGraph> inputs;
    for (const auto& e : graphs)
      if (e.graph.q == q) inputs.push_back({e.graph, e.seed});
    const auto t = scalar(HeckeElement::basis(TreeHeckePair(q), 1));
    try {
      const auto rep = approx::convergence_report(inputs, t, {10, 5, false});
      for (const auto& row : rep.rows) {
        ++rows;
        for (unsigned k = 1; k <= 10; ++k) {
          const BigRational bound = 2 * pow_rational(BigRational(q + 1), k) * row.rho[(k + 1) / 2 - 1];
          if (row.gaps[k] > bound) ++violations;
          if (bound > 0) worst_ratio = std::max(worst_ratio, BigRational(row.gaps[k] / bound));
        }
      }
    } catch (const Error& e) {
      ++violations;
      o.detail += std::string(e.what()) + "; ";
    }
  }
  o.ok = violations == 0 && rows >= 60;
  o.detail += std::to_string(rows) + " graphs, " + std::to_string(violations) + " violations, max gap/bound " +
              to_decimal(worst_ratio, 4);
  return o;
}

// 7. Log bound on every corpus operator.
Outcome log_bounds(const std::vector<CorpusEntry>& graphs) {
  Outcome o;
  const std::vector<double> eps{0.5, 0.1, 0.01};
  std::size_t operators = 0, violations = 0, nonzero_windows = 0;
  std::mt19937_64 rng(77);
  for (const auto& e : graphs) {
    const TreeHeckePair p(e.graph.q);
    std::vector<HeckeMatrix> ops{scalar(HeckeElement::basis(p, 1))};
    if (e.graph.vertices <= 500) ops.push_back(scalar(HeckeElement::basis(p, 2)));
    if (e.graph.vertices <= 200) ops.push_back(scalar(random_integral(rng, p, 3, 2)));
    const auto wq = std::make_shared<const quotient::WeightedQuotient>(quotient::build_quotient(e.graph));
    for (const auto& t : ops) {
      ++operators;
      try {
        const auto rep = approx::log_bound_check(quotient::assemble_operator(wq, t), t.norm_bound(), eps);
        for (const auto& row : rep.rows) {
          if (!row.ok) ++violations;
          if (row.delta > 0) ++nonzero_windows;
        }
      } catch (const Error& err) {
        ++violations;
        o.detail += std::string(err.what()) + "; ";
      }
    }
  }
  quotient::ExplicitOperator golden{1, {1, 2}, SparseIntMatrix::from_dense({{0, 1}, {2, 0}})};
  const auto gop = quotient::explicit_operator(std::make_shared<const quotient::WeightedQuotient>(quotient::build_quotient(golden)));
  for (const auto& row : approx::log_bound_check(gop, 2, eps).rows)
    if (!row.ok) ++violations;
  ++operators;
  o.ok = violations == 0;
  o.detail += std::to_string(operators) + " operators x 3 windows, " + std::to_string(violations) + " violations, " +
              std::to_string(nonzero_windows) + " windows with delta > 0";
  return o;
}

// 8. The two-point weighted quotient.
Outcome golden_example() {
  Outcome o;
  quotient::ExplicitOperator input{1, {1, 2}, SparseIntMatrix::from_dense({{0, 1}, {2, 0}})};
  const auto op = quotient::explicit_operator(std::make_shared<const quotient::WeightedQuotient>(quotient::build_quotient(input)));
  const auto mu = quotient::spectral_measure_full(op);
  const auto mue = quotient::spectral_measure_truncated(op);
  const auto dims = quotient::kernel_dims(op);
  const double s2 = std::sqrt(2.0);
  o.ok = mu.atoms.size() == 2 && std::fabs(mu.atoms[0].value + s2) <= 1e-12 && std::fabs(mu.atoms[1].value - s2) <= 1e-12 &&
         mu.atoms[0].exact_mass == make_rational(1, 2) && mu.atoms[1].exact_mass == make_rational(1, 2) &&
         mue.atoms.size() == 1 && mue.atoms[0].value == 0.0 && mue.atoms[0].exact_mass == make_rational(2, 3) &&
         dims == quotient::KernelDims{0, 1};
  char buf[160];
  std::snprintf(buf, sizeof buf, "mu atoms %.15f, %.15f; mu^e zero mass %s; kernel dims (%zu, %zu)",
                mu.atoms.empty() ? 0.0 : mu.atoms.front().value, mu.atoms.empty() ? 0.0 : mu.atoms.back().value,
                to_string(mue.zero_mass).c_str(), dims.full, dims.truncated);
  o.detail = buf;
  return o;
}

// 9. Residual chains of Z and Z^2.
Outcome lueck_mode() {
  Outcome o;
  const farber::GroupRingElement z{{{-1, 0}, -1}, {{0, 0}, 2}, {{1, 0}, -1}};
  const farber::GroupRingElement z2{{{0, 0}, 4}, {{1, 0}, -1}, {{-1, 0}, -1}, {{0, 1}, -1}, {{0, -1}, -1}};
  std::string values;
  for (const auto& l : farber::lueck_finite_quotient(1, z, {10, 100, 1000})) {
    const long n = static_cast<long>(l.modulus);
    if (l.normalized_nullity != make_rational(1, n)) o.ok = false;
    values += to_string(l.normalized_nullity) + " ";
  }
  for (const auto& l : farber::lueck_finite_quotient(2, z2, {4, 8, 16})) {
    const long n = static_cast<long>(l.modulus);
    if (l.normalized_nullity != make_rational(1, n * n)) o.ok = false;
    values += to_string(l.normalized_nullity) + " ";
  }
  o.detail = "normalized nullities " + values;
  return o;
}

// 10. Joint moments of words along a lift tower of K4.
Outcome joint_moments() {
  Outcome o;
  const TreeHeckePair p(2);
  const std::vector<HeckeElement> elems{HeckeElement::basis(p, 1), HeckeElement::basis(p, 2)};
  const std::vector<approx::Word> words{{0, 0}, {0, 1, 0}, {1, 1}};
  std::vector<QuotientGraph> tower;
  for (std::size_t n : {10, 100, 1000}) tower.push_back(farber::gen_random_lift(complete_graph(4), n, 31337 + n));
  const auto reports = approx::cep_joint_moments(tower, elems, words);
  for (const auto& w : reports) {
    for (const auto& entry : w.per_graph)
      if (!entry.ok) o.ok = false;
    const auto& last = w.per_graph.back();
    if (last.gap > w.c_w / 20) o.ok = false;
    o.detail += w.label + " n=1000 gap/c_w " + to_decimal(BigRational(last.gap / w.c_w), 4) + "; ";
  }
  return o;
}

}  // namespace

int main() {
  const auto graphs = corpus();
  const std::vector<Criterion> criteria{
      {1, "Chevalley exact identities", 1.0, chevalley_identities},
      {2, "Hecke oracle equivalence", 10.0, hecke_oracle},
      {3, "trace and ball representation", 10.0, trace_consistency},
      {4, "triple moment agreement", 30.0, triple_moments},
      {5, "Betti ratio, tree case", 5.0, betti_ratio},
      {6, "moment gap bounds", 120.0, [&] { return moment_gap_bounds(graphs); }},
      {7, "log bound", 120.0, [&] { return log_bounds(graphs); }},
      {8, "weighted two-point example", 0.1, golden_example},
      {9, "residual chains of Z and Z^2", 30.0, lueck_mode},
      {10, "joint moments of words", 120.0, joint_moments},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = outcome.ok && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %s  %s [%.3f s / %.1f s%s]: %s\n", c.number, pass ? "PASS" : "FAIL", c.title, seconds,
                c.budget_seconds, in_time ? "" : ", over budget", outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
