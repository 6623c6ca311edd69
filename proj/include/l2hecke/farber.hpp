#pragma once

// Random regular multigraphs and random lifts standing in for sequences of
// tree lattices, with girth and the local-cycle statistic rho_r: the fraction
// of vertices whose closed r-ball is not a tree. Also finite circulant
// quotients of integer group-ring elements over Z and Z^2.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "l2hecke/error.hpp"
#include "l2hecke/coxeter.hpp"
#include "l2hecke/exactmath.hpp"
#include "l2hecke/quotient.hpp"

namespace l2hecke::farber {

using quotient::QuotientGraph;

enum class Model { Pairing, Lift };

struct GraphGenConfig {
  Model model = Model::Pairing;
  long q = 2;
  std::vector<std::size_t> sizes;
  std::optional<QuotientGraph> base;
  std::uint64_t seed = 0;
  bool require_connected = false;
};

struct GeneratedGraph {
  QuotientGraph graph;
  std::uint64_t seed = 0;  // seed actually used for this instance
  bool simple = false;
  bool connected = false;
};

namespace detail {

/// Uniform integer in [0, bound) by rejection, so results do not depend on
/// the standard library's distribution implementation.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

inline std::vector<std::uint32_t> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
  shuffle(p, rng);
  return p;
}

/// splitmix64 finaliser, used to derive per-instance and per-retry seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

inline bool is_simple(const QuotientGraph& g) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
  for (auto [u, v] : g.edges) {
    if (u == v) return false;
    e.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(e.begin(), e.end());
  return std::adjacent_find(e.begin(), e.end()) == e.end();
}

inline bool is_connected(const QuotientGraph& g) { return g.vertices > 0 && quotient::connected_components(g) == 1; }

inline GeneratedGraph describe(QuotientGraph g, std::uint64_t seed) {
  GeneratedGraph out;
  out.simple = is_simple(g);
  out.connected = is_connected(g);
  out.graph = std::move(g);
  out.seed = seed;
  return out;
}

/// Configuration model: n(q+1) half-edges paired uniformly at random.
inline QuotientGraph gen_random_regular(std::size_t n, long q, std::uint64_t seed) {
  if (q < 1) throw Error(ErrorKind::IrregularGraph, "degree q+1 must be at least 2");
  const std::size_t degree = static_cast<std::size_t>(q + 1);
  if (n < 2) throw Error(ErrorKind::ParityViolation, "pairing model needs n >= 2");
  if ((n * degree) % 2 != 0)
    throw Error(ErrorKind::ParityViolation, "n(q+1) = " + std::to_string(n * degree) + " is odd");
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> stubs(n * degree);
  for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<std::uint32_t>(i / degree);
  detail::shuffle(stubs, rng);
  QuotientGraph g;
  g.q = q;
  g.vertices = n;
  for (std::size_t i = 0; i < stubs.size(); i += 2) g.edges.emplace_back(stubs[i], stubs[i + 1]);
  return g;
}

/// n-lift of base: vertex (v, i) becomes v*n + i. A non-loop edge [u, v]
/// with permutation p joins (u, i) to (v, p(i)). A loop at v with
/// permutation p joins (v, i) to (v, p(i)); the pair p, p^-1 supplies the
/// two darts of the loop, so each fibre vertex keeps degree 2 from it.
inline QuotientGraph lift_with_permutations(const QuotientGraph& base, std::size_t n,
                                            const std::vector<std::vector<std::uint32_t>>& perms) {
  quotient::check_graph_shape(base);
  if (perms.size() != base.edges.size()) throw Error(ErrorKind::DimensionMismatch, "one permutation per edge");
  QuotientGraph g;
  g.q = base.q;
  g.vertices = base.vertices * n;
  for (std::size_t e = 0; e < base.edges.size(); ++e) {
    if (perms[e].size() != n) throw Error(ErrorKind::DimensionMismatch, "permutation of the wrong size");
    auto [u, v] = base.edges[e];
    for (std::size_t i = 0; i < n; ++i)
      g.edges.emplace_back(static_cast<std::uint32_t>(u * n + i), static_cast<std::uint32_t>(v * n + perms[e][i]));
  }
  if (!base.multiplicities.empty()) {
    g.multiplicities.reserve(g.vertices);
    for (std::size_t v = 0; v < base.vertices; ++v) g.multiplicities.insert(g.multiplicities.end(), n, base.multiplicities[v]);
  }
  return g;
}

inline QuotientGraph gen_random_lift(const QuotientGraph& base, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::DimensionMismatch, "lift degree must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::uint32_t>> perms;
  for (std::size_t e = 0; e < base.edges.size(); ++e) perms.push_back(detail::random_permutation(n, rng));
  return lift_with_permutations(base, n, perms);
}

/// Point-line incidence graph of the split Cayley hexagon H(p), p prime:
/// points of the quadric x0x4 + x1x5 + x2x6 = x3^2 in PG(6, p), lines the
/// quadric lines whose Grassmann coordinates satisfy p12=p34, p54=p32,
/// p20=p35, p65=p30, p01=p36, p46=p31. The result is (p+1)-regular,
/// bipartite, of girth 12, on 2(p^6-1)/(p-1) vertices; points come first.
inline QuotientGraph hexagon_incidence_graph(long p) {
  const auto pp = coxeter::prime_power_decomposition(p);
  if (p > 5 || !pp || pp->second != 1) throw Error(ErrorKind::UnsupportedType, "hexagon needs a prime p <= 5");
  using Point = std::array<long, 7>;
  auto mod = [p](long x) { return ((x % p) + p) % p; };
  auto quad = [&](const Point& x) { return mod(x[0] * x[4] + x[1] * x[5] + x[2] * x[6] - x[3] * x[3]); };
  auto normalize = [&](Point x) {
    for (long v : x)
      if (v != 0) {
        long inv = 1;
        for (long e = 0; e < p - 2; ++e) inv = inv * v % p;
        for (auto& c : x) c = c * inv % p;
        break;
      }
    return x;
  };
  std::vector<Point> points;
  Point x{};
  long total = 1;
  for (int i = 0; i < 7; ++i) total *= p;
  for (long code = 1; code < total; ++code) {
    long c = code;
    for (int i = 0; i < 7; ++i, c /= p) x[i] = c % p;
    if (quad(x) == 0 && normalize(x) == x) points.push_back(x);
  }
  std::sort(points.begin(), points.end());
  auto index_of = [&](const Point& y) {
    return static_cast<std::uint32_t>(std::lower_bound(points.begin(), points.end(), y) - points.begin());
  };
  static constexpr int kConditions[6][4] = {{1, 2, 3, 4}, {5, 4, 3, 2}, {2, 0, 3, 5}, {6, 5, 3, 0}, {0, 1, 3, 6}, {4, 6, 3, 1}};
  std::vector<std::vector<std::uint32_t>> lines;
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      const Point &u = points[a], &v = points[b];
      Point sum;
      for (int i = 0; i < 7; ++i) sum[i] = u[i] + v[i];
      if (quad(sum) != 0) continue;  // u, v singular, so this is the polar form
      auto pl = [&](int i, int j) { return mod(u[i] * v[j] - u[j] * v[i]); };
      bool ok = true;
      for (const auto& k : kConditions) ok = ok && pl(k[0], k[1]) == pl(k[2], k[3]);
      if (!ok) continue;
      std::vector<std::uint32_t> line;
      for (long s = 0; s < p; ++s)
        for (long t = 0; t < p; ++t) {
          if (s == 0 && t == 0) continue;
          Point w;
          for (int i = 0; i < 7; ++i) w[i] = mod(s * u[i] + t * v[i]);
          line.push_back(index_of(normalize(w)));
        }
      std::sort(line.begin(), line.end());
      line.erase(std::unique(line.begin(), line.end()), line.end());
      if (line.front() == a && line[1] == b) lines.push_back(std::move(line));  // first pair of each line only
    }
  QuotientGraph g;
  g.q = p;
  g.vertices = points.size() + lines.size();
  for (std::size_t l = 0; l < lines.size(); ++l)
    for (auto pt : lines[l]) g.edges.emplace_back(pt, static_cast<std::uint32_t>(points.size() + l));
  return g;
}

/// Instance `index` of a config: seed derived from (config seed, index), and
/// re-derived until connected when required.
inline GeneratedGraph generate(const GraphGenConfig& config, std::size_t index) {
  const std::size_t n = config.sizes.at(index);
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t seed = detail::mix_seed(detail::mix_seed(config.seed, index), attempt);
    QuotientGraph g;
    if (config.model == Model::Pairing) {
      g = gen_random_regular(n, config.q, seed);
    } else {
      if (!config.base) throw Error(ErrorKind::DimensionMismatch, "lift model needs a base graph");
      if (config.base->q != config.q) throw Error(ErrorKind::MixedDegrees, "base graph degree differs from q+1");
      g = gen_random_lift(*config.base, n, seed);
    }
    GeneratedGraph out = describe(std::move(g), seed);
    if (!config.require_connected || out.connected) return out;
    if (attempt >= 1000) throw Error(ErrorKind::Internal, "no connected sample after 1000 attempts");
  }
}

inline std::vector<GeneratedGraph> generate_all(const GraphGenConfig& config) {
  std::vector<GeneratedGraph> out;
  for (std::size_t i = 0; i < config.sizes.size(); ++i) out.push_back(generate(config, i));
  return out;
}

/// Length of a shortest cycle (loop = 1, parallel pair = 2); nullopt for
/// forests. BFS from every vertex tracking the arrival edge.
inline std::optional<std::size_t> girth(const QuotientGraph& g) {
  quotient::check_graph_shape(g);
  std::optional<std::size_t> best;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(g.vertices);  // (neighbour, edge id)
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [u, v] = g.edges[e];
    if (u == v) return 1;
    adj[u].emplace_back(v, static_cast<std::uint32_t>(e));
    adj[v].emplace_back(u, static_cast<std::uint32_t>(e));
  }
  constexpr std::uint32_t kNone = ~0u;
  std::vector<std::uint32_t> dist(g.vertices, kNone), via(g.vertices, kNone), queue;
  for (std::size_t s = 0; s < g.vertices; ++s) {
    queue.assign(1, static_cast<std::uint32_t>(s));
    dist[s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const auto x = queue[h];
      if (best && 2 * dist[x] + 1 >= *best) break;
      for (auto [y, e] : adj[x]) {
        if (e == via[x]) continue;
        if (dist[y] == kNone) {
          dist[y] = dist[x] + 1;
          via[y] = e;
          queue.push_back(y);
        } else {
          const std::size_t len = dist[x] + dist[y] + 1;
          if (!best || len < *best) best = len;
        }
      }
    }
    for (auto x : queue) dist[x] = via[x] = kNone;
  }
  return best;
}

/// Number of vertices whose closed r-ball (induced on vertices at distance
/// <= r, all edge instances between them) has more edges than a tree.
inline std::size_t vertices_seeing_cycles(const QuotientGraph& g, unsigned r) {
  quotient::check_graph_shape(g);
  std::vector<std::vector<std::uint32_t>> adj(g.vertices);
  for (auto [u, v] : g.edges) {
    adj[u].push_back(v);
    if (u != v) adj[v].push_back(u);
  }
  constexpr std::uint32_t kNone = ~0u;
  std::vector<std::uint32_t> dist(g.vertices, kNone), queue;
  std::size_t count = 0;
  for (std::size_t s = 0; s < g.vertices; ++s) {
    queue.assign(1, static_cast<std::uint32_t>(s));
    dist[s] = 0;
    std::size_t edge_ends = 0;  // each internal edge counted from both ends, loops once
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const auto x = queue[h];
      for (auto y : adj[x]) {
        if (dist[y] == kNone && dist[x] < r) {
          dist[y] = dist[x] + 1;
          queue.push_back(y);
        }
      }
    }
    for (auto x : queue)
      for (auto y : adj[x])
        if (dist[y] != kNone) edge_ends += x == y ? 2 : 1;
    const std::size_t edges = edge_ends / 2;
    if (edges + 1 > queue.size()) ++count;
    for (auto x : queue) dist[x] = kNone;
  }
  return count;
}

/// rho_r: exact fraction of vertices whose r-ball is not a tree.
inline BigRational farber_statistic(const QuotientGraph& g, unsigned r) {
  if (r < 1) throw Error(ErrorKind::InsufficientRadius, "radius must be >= 1");
  if (g.vertices == 0) return 0;
  return make_rational(static_cast<long>(vertices_seeing_cycles(g, r)), static_cast<long>(g.vertices));
}

/// Offsets in Z^d (d = 1 or 2; second coordinate 0 when d = 1) to integer
/// coefficients.
using GroupRingElement = std::map<std::pair<long, long>, std::int64_t>;

struct LueckLevel {
  std::size_t modulus = 0;
  quotient::QuotientOperator op;
  std::size_t nullity = 0;
  BigRational normalized_nullity;  // nullity / modulus^d
};

/// Circulant (d = 1) or doubly circulant (d = 2) matrices of T acting on
/// l^2((Z/n)^d) for each level n, with their exact nullities.
inline std::vector<LueckLevel> lueck_finite_quotient(unsigned d, const GroupRingElement& t,
                                                     const std::vector<std::size_t>& levels) {
  if (d != 1 && d != 2) throw Error(ErrorKind::DimensionMismatch, "rank must be 1 or 2");
  for (const auto& [g, c] : t) {
    if (d == 1 && g.second != 0) throw Error(ErrorKind::DimensionMismatch, "offset has a second coordinate in rank 1");
    auto it = t.find({-g.first, -g.second});
    if (c != 0 && (it == t.end() || it->second != c))
      throw Error(ErrorKind::NotSymmetric, "coefficient of g differs from that of g^-1");
  }
  std::vector<LueckLevel> out;
  for (std::size_t n : levels) {
    if (n < 1) throw Error(ErrorKind::DimensionMismatch, "level must be >= 1");
    const long ln = static_cast<long>(n);
    const std::size_t side2 = d == 2 ? n : 1;
    const std::size_t points = n * side2;
    auto wrap = [ln](long x) { return static_cast<std::size_t>(((x % ln) + ln) % ln); };
    std::vector<SparseIntMatrix::Entry> entries;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < side2; ++y)
        for (const auto& [g, c] : t) {
          if (c == 0) continue;
          const std::size_t tx = wrap(static_cast<long>(x) + g.first);
          const std::size_t ty = d == 2 ? wrap(static_cast<long>(y) + g.second) : 0;
          entries.push_back({x * side2 + y, tx * side2 + ty, c});
        }
    auto wq = std::make_shared<quotient::WeightedQuotient>();
    wq->multiplicities.assign(points, 1);
    wq->covolume = static_cast<long>(points);
    wq->full_measure_points.resize(points);
    for (std::size_t s = 0; s < points; ++s) wq->full_measure_points[s] = s;
    auto c = SparseIntMatrix::from_entries(points, points, std::move(entries));
    wq->source = quotient::ExplicitOperator{1, wq->multiplicities, c};
    LueckLevel level;
    level.modulus = n;
    level.op = quotient::QuotientOperator{wq, 1, std::move(c)};
    level.nullity = integer_nullity(level.op.coefficients);
    level.normalized_nullity = make_rational(static_cast<long>(level.nullity), static_cast<long>(points));
    out.push_back(std::move(level));
  }
  return out;
}

}  // namespace l2hecke::farber
