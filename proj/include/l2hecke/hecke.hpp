#pragma once

// The Hecke algebra of the pair (Aut(T), K) where T is the (q+1)-regular
// tree and K a vertex stabiliser. Double cosets are indexed by the distance r
// they move the base vertex; A_r denotes the indicator of the r-th double
// coset, so that pi(A_r) sums a function over spheres of radius r.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l2hecke/error.hpp"
#include "l2hecke/exactmath.hpp"

namespace l2hecke::hecke {

struct TreeHeckePair {
  long q = 2;  // the tree is (q+1)-regular; q >= 1

  explicit TreeHeckePair(long q_ = 2) : q(q_) {
    if (q < 1) throw Error(ErrorKind::PairMismatch, "tree Hecke pair needs q >= 1");
  }
  friend bool operator==(const TreeHeckePair&, const TreeHeckePair&) = default;
};

/// Number of vertices at distance r from a vertex: 1, then (q+1) q^(r-1).
inline BigInt sphere_size(long q, unsigned r) {
  if (r == 0) return 1;
  return BigInt(q + 1) * pow_int(BigInt(q), r - 1);
}

/// Finitely supported combination sum_r c_r A_r. Zero coefficients are never
/// stored.
class HeckeElement {
 public:
  using Coefficients = std::map<unsigned, BigRational>;

  explicit HeckeElement(TreeHeckePair pair) : pair_(pair) {}
  HeckeElement(TreeHeckePair pair, Coefficients coeffs) : pair_(pair), coeffs_(std::move(coeffs)) { prune(); }

  static HeckeElement basis(TreeHeckePair pair, unsigned radius, const BigRational& c = 1) {
    return HeckeElement(pair, Coefficients{{radius, c}});
  }
  static HeckeElement unit(TreeHeckePair pair) { return basis(pair, 0); }

  const TreeHeckePair& pair() const { return pair_; }
  const Coefficients& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  BigRational coefficient(unsigned r) const {
    auto it = coeffs_.find(r);
    return it == coeffs_.end() ? BigRational(0) : it->second;
  }

  /// Largest radius in the support; 0 for the zero element.
  unsigned support_radius() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

  bool is_integral() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.second.get_den() == 1; });
  }

  void add(unsigned r, const BigRational& c) {
    if (c == 0) return;
    auto [it, inserted] = coeffs_.try_emplace(r, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) coeffs_.erase(it);
    }
  }

  friend HeckeElement operator+(HeckeElement a, const HeckeElement& b) {
    check_pair(a, b);
    for (const auto& [r, c] : b.coeffs_) a.add(r, c);
    return a;
  }
  friend HeckeElement operator-(HeckeElement a, const HeckeElement& b) {
    check_pair(a, b);
    for (const auto& [r, c] : b.coeffs_) a.add(r, -c);
    return a;
  }
  friend HeckeElement operator*(const BigRational& s, const HeckeElement& a) {
    HeckeElement out(a.pair_);
    for (const auto& [r, c] : a.coeffs_) out.add(r, s * c);
    return out;
  }
  friend bool operator==(const HeckeElement& a, const HeckeElement& b) {
    return a.pair_ == b.pair_ && a.coeffs_ == b.coeffs_;
  }

  /// "A0+3*A2" style rendering, ascending radius.
  std::string to_string() const {
    if (coeffs_.empty()) return "0";
    std::string out;
    for (const auto& [r, c] : coeffs_) {
      BigRational mag = abs(c);
      if (c < 0) out += "-";
      else if (!out.empty()) out += "+";
      if (mag != 1) out += l2hecke::to_string(mag) + "*";
      out += "A" + std::to_string(r);
    }
    return out;
  }

  static void check_pair(const HeckeElement& a, const HeckeElement& b) {
    if (!(a.pair_ == b.pair_)) throw Error(ErrorKind::PairMismatch, "elements over different Hecke pairs");
  }

 private:
  void prune() {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) it = it->second == 0 ? coeffs_.erase(it) : std::next(it);
  }

  TreeHeckePair pair_;
  Coefficients coeffs_;
};

/// Parses sums of terms like "A0+3*A2-1/2*A5" (a bare number means a
/// multiple of A0). Whitespace is ignored.
inline HeckeElement parse_element(std::string_view text, TreeHeckePair pair) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::ParseError, "bad Hecke element '" + std::string(text) + "': " + why);
  };
  if (s.empty()) fail("empty");
  HeckeElement out(pair);
  std::size_t i = 0;
  while (i < s.size()) {
    BigRational sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      if (s[i] == '-') sign = -1;
      ++i;
    } else if (i != 0) {
      fail("expected '+' or '-'");
    }
    std::size_t end = s.find_first_of("+-", i);
    std::string term = s.substr(i, end == std::string::npos ? std::string::npos : end - i);
    i = end == std::string::npos ? s.size() : end;
    if (term.empty()) fail("empty term");
    BigRational coeff = 1;
    std::string basis = term;
    if (auto star = term.find('*'); star != std::string::npos) {
      coeff = parse_rational(term.substr(0, star));
      basis = term.substr(star + 1);
    }
    if (basis.empty() || (basis[0] != 'A' && basis[0] != 'a')) {
      if (term.find('*') != std::string::npos) fail("expected A<radius> after '*'");
      out.add(0, sign * parse_rational(term));
      continue;
    }
    std::string digits = basis.substr(1);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      fail("bad radius");
    out.add(static_cast<unsigned>(std::stoul(digits)), sign * coeff);
  }
  return out;
}

/// A_1 * x, from A_1 A_0 = A_1, A_1 A_1 = A_2 + (q+1) A_0 and
/// A_1 A_r = A_(r+1) + q A_(r-1) for r >= 2.
inline HeckeElement multiply_by_a1(const HeckeElement& x) {
  const long q = x.pair().q;
  HeckeElement out(x.pair());
  for (const auto& [r, c] : x.coefficients()) {
    out.add(r + 1, c);
    if (r == 1) out.add(0, c * (q + 1));
    else if (r >= 2) out.add(r - 1, c * q);
  }
  return out;
}

/// Integer coefficients of the polynomial P_r with A_r = P_r(A_1).
inline std::vector<BigInt> radius_polynomial(long q, unsigned r) {
  std::vector<BigInt> prev{1}, cur{0, 1};
  if (r == 0) return prev;
  for (unsigned k = 1; k < r; ++k) {
    // P_(k+1) = x P_k - c P_(k-1), c = q+1 for k = 1 and q afterwards.
    const long c = k == 1 ? q + 1 : q;
    std::vector<BigInt> next(cur.size() + 1, BigInt(0));
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= c * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// Convolution product. A_r * b is evaluated as P_r(A_1) b with repeated
/// application of the A_1 recursion.
inline HeckeElement tree_mul(const HeckeElement& a, const HeckeElement& b) {
  HeckeElement::check_pair(a, b);
  HeckeElement out(a.pair());
  if (a.is_zero() || b.is_zero()) return out;
  const unsigned top = a.support_radius();
  std::vector<HeckeElement> powers{b};  // A_1^j b
  for (unsigned j = 1; j <= top; ++j) powers.push_back(multiply_by_a1(powers.back()));
  for (const auto& [r, c] : a.coefficients()) {
    const auto poly = radius_polynomial(a.pair().q, r);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      if (poly[j] == 0) continue;
      const BigRational scale = c * BigRational(poly[j]);
      for (const auto& [u, x] : powers[j].coefficients()) out.add(u, scale * x);
    }
  }
  return out;
}

/// Each double coset is its own inverse on the tree, and coefficients are
/// real, so the involution is the identity.
inline HeckeElement involution(const HeckeElement& a) { return a; }

/// The canonical trace: the coefficient of the unit A_0.
inline BigRational trace(const HeckeElement& a) { return a.coefficient(0); }

/// L1 norm for nu(K) = 1: sum |c_r| * nu(K g_r K) = sum |c_r| |S_r|.
inline BigRational l1_norm(const HeckeElement& a) {
  BigRational n(0);
  for (const auto& [r, c] : a.coefficients()) n += abs(c) * BigRational(sphere_size(a.pair().q, r));
  return n;
}

/// Square matrix over the Hecke algebra of one pair.
class HeckeMatrix {
 public:
  HeckeMatrix(TreeHeckePair pair, std::size_t n) : pair_(pair), n_(n), entries_(n * n, HeckeElement(pair)) {
    if (n == 0) throw Error(ErrorKind::DimensionMismatch, "Hecke matrix must have positive size");
  }

  static HeckeMatrix scalar(const HeckeElement& x) {
    HeckeMatrix m(x.pair(), 1);
    m.at(0, 0) = x;
    return m;
  }

  static HeckeMatrix from_rows(TreeHeckePair pair, const std::vector<std::vector<HeckeElement>>& rows) {
    HeckeMatrix m(pair, rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw Error(ErrorKind::DimensionMismatch, "Hecke matrix must be square");
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (!(rows[i][j].pair() == pair)) throw Error(ErrorKind::PairMismatch, "entry over a different pair");
        m.at(i, j) = rows[i][j];
      }
    }
    return m;
  }

  const TreeHeckePair& pair() const { return pair_; }
  std::size_t size() const { return n_; }
  HeckeElement& at(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
  const HeckeElement& at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  bool is_self_adjoint() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (!(at(i, j) == involution(at(j, i)))) return false;
    return true;
  }

  bool is_integral() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const HeckeElement& x) { return x.is_integral(); });
  }

  unsigned support_radius() const {
    unsigned r = 0;
    for (const auto& x : entries_) r = std::max(r, x.support_radius());
    return r;
  }

  /// Matrix trace followed by the algebra trace.
  BigRational trace() const {
    BigRational t(0);
    for (std::size_t i = 0; i < n_; ++i) t += hecke::trace(at(i, i));
    return t;
  }

  /// n^2 * max_ij ||T_ij||_1, a bound for every operator norm of T.
  BigRational norm_bound() const {
    BigRational m(0);
    for (const auto& x : entries_) m = std::max(m, l1_norm(x));
    return m * BigRational(static_cast<long>(n_ * n_));
  }

  friend HeckeMatrix operator*(const HeckeMatrix& a, const HeckeMatrix& b) {
    if (!(a.pair_ == b.pair_)) throw Error(ErrorKind::PairMismatch, "matrices over different Hecke pairs");
    if (a.n_ != b.n_) throw Error(ErrorKind::DimensionMismatch, "Hecke matrix sizes differ");
    HeckeMatrix out(a.pair_, a.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
      for (std::size_t k = 0; k < a.n_; ++k) {
        if (a.at(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < a.n_; ++j) out.at(i, j) = out.at(i, j) + tree_mul(a.at(i, k), b.at(k, j));
      }
    return out;
  }

  static HeckeMatrix identity(TreeHeckePair pair, std::size_t n) {
    HeckeMatrix m(pair, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = HeckeElement::unit(pair);
    return m;
  }

 private:
  TreeHeckePair pair_;
  std::size_t n_;
  std::vector<HeckeElement> entries_;
};

/// tr(T^k) for k = 0..k_max; element k is the k-th moment of the spectral
/// measure of T.
inline std::vector<BigRational> moments(const HeckeMatrix& t, unsigned k_max) {
  if (!t.is_self_adjoint()) throw Error(ErrorKind::NotSelfAdjoint, "moments need a self-adjoint Hecke matrix");
  std::vector<BigRational> out;
  HeckeMatrix power = HeckeMatrix::identity(t.pair(), t.size());
  for (unsigned k = 0; k <= k_max; ++k) {
    out.push_back(power.trace());
    if (k < k_max) power = power * t;
  }
  return out;
}

/// The rooted (q+1)-regular tree cut off at a radius. Vertex 0 is the root
/// and vertices are numbered breadth first, so depth is nondecreasing.
class TreeBall {
 public:
  TreeBall(long q, unsigned radius) : q_(q), radius_(radius) {
    if (q < 1) throw Error(ErrorKind::PairMismatch, "tree ball needs q >= 1");
    depth_.push_back(0);
    adjacency_.emplace_back();
    for (std::size_t v = 0; v < depth_.size(); ++v) {
      if (depth_[v] == radius_) continue;
      const long children = v == 0 ? q + 1 : q;
      for (long c = 0; c < children; ++c) {
        const auto id = static_cast<std::uint32_t>(depth_.size());
        depth_.push_back(depth_[v] + 1);
        adjacency_.emplace_back(std::vector<std::uint32_t>{static_cast<std::uint32_t>(v)});
        adjacency_[v].push_back(id);
      }
    }
  }

  long q() const { return q_; }
  unsigned radius() const { return radius_; }
  std::size_t size() const { return depth_.size(); }
  unsigned depth(std::size_t v) const { return depth_[v]; }
  const std::vector<std::uint32_t>& neighbors(std::size_t v) const { return adjacency_[v]; }

  /// Vertices at distance <= max_dist from v inside the ball, with their
  /// distances, in breadth-first order.
  std::vector<std::pair<std::uint32_t, unsigned>> ball_around(std::size_t v, unsigned max_dist) const {
    struct Item {
      std::uint32_t vertex;
      std::uint32_t from;
      unsigned dist;
    };
    std::vector<Item> queue{{static_cast<std::uint32_t>(v), UINT32_MAX, 0}};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Item it = queue[head];
      if (it.dist == max_dist) continue;
      for (std::uint32_t y : adjacency_[it.vertex])
        if (y != it.from) queue.push_back({y, it.vertex, it.dist + 1});
    }
    std::vector<std::pair<std::uint32_t, unsigned>> out;
    out.reserve(queue.size());
    for (const auto& it : queue) out.emplace_back(it.vertex, it.dist);
    return out;
  }

 private:
  long q_;
  unsigned radius_;
  std::vector<unsigned> depth_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
};

/// Structure constants of A_r * A_s by brute-force counting on a ball: for
/// each vertex w at depth u, the number of v with d(root, v) = r and
/// d(v, w) = s. The count must be constant on every sphere; the result maps
/// u to that constant, omitting zeros.
inline std::map<unsigned, BigInt> structure_constants_oracle(TreeHeckePair pair, unsigned r, unsigned s,
                                                              unsigned ball_radius) {
  if (ball_radius < r + s)
    throw Error(ErrorKind::InsufficientRadius, "ball radius must be at least r + s");
  const TreeBall ball(pair.q, ball_radius);
  std::vector<std::uint64_t> hits(ball.size(), 0);
  for (std::size_t v = 0; v < ball.size(); ++v) {
    if (ball.depth(v) != r) continue;
    for (auto [w, d] : ball.ball_around(v, s))
      if (d == s) ++hits[w];
  }
  std::map<unsigned, BigInt> out;
  std::vector<std::int64_t> sphere_value(ball_radius + 1, -1);
  for (std::size_t w = 0; w < ball.size(); ++w) {
    auto& slot = sphere_value[ball.depth(w)];
    const auto h = static_cast<std::int64_t>(hits[w]);
    if (slot < 0) slot = h;
    else if (slot != h)
      throw Error(ErrorKind::NonconstantOnSphere, "count differs across the sphere of radius " +
                                                      std::to_string(ball.depth(w)));
  }
  for (unsigned u = 0; u <= ball_radius; ++u)
    if (sphere_value[u] > 0) out.emplace(u, BigInt(static_cast<unsigned long>(sphere_value[u])));
  return out;
}

/// pi(T) restricted to indicator functions of ball vertices, one block per
/// matrix index: row (i, x), column (j, y) holds sum_r T_ij[r] [d(x, y) = r].
/// A row is complete when the whole support sphere of x lies in the ball.
struct BallOperator {
  std::size_t blocks = 1;
  std::size_t ball_size = 0;
  SparseIntMatrix matrix;
  std::vector<bool> complete_rows;

  std::size_t index(std::size_t block, std::size_t vertex) const { return block * ball_size + vertex; }
};

inline BallOperator operator_on_ball(const HeckeMatrix& t, const TreeBall& ball) {
  if (!t.is_integral()) throw Error(ErrorKind::NonIntegral, "ball operator needs integral coefficients");
  if (ball.q() != t.pair().q) throw Error(ErrorKind::PairMismatch, "ball and Hecke pair differ in q");
  const unsigned supp = t.support_radius();
  if (ball.radius() < supp + 1) throw Error(ErrorKind::InsufficientRadius, "ball radius must exceed the support");
  BallOperator op;
  op.blocks = t.size();
  op.ball_size = ball.size();
  const std::size_t dim = op.blocks * op.ball_size;
  op.complete_rows.assign(dim, false);
  std::vector<SparseIntMatrix::Entry> entries;
  for (std::size_t x = 0; x < ball.size(); ++x) {
    const bool complete = ball.depth(x) + supp <= ball.radius();
    const auto around = ball.ball_around(x, supp);
    for (std::size_t i = 0; i < op.blocks; ++i) {
      op.complete_rows[op.index(i, x)] = complete;
      for (std::size_t j = 0; j < op.blocks; ++j) {
        const auto& coeffs = t.at(i, j).coefficients();
        if (coeffs.empty()) continue;
        for (auto [y, d] : around) {
          auto it = coeffs.find(d);
          if (it == coeffs.end()) continue;
          entries.push_back({op.index(i, x), op.index(j, y), it->second.get_num().get_si()});
        }
      }
    }
  }
  op.matrix = SparseIntMatrix::from_entries(dim, dim, std::move(entries));
  return op;
}

inline BallOperator operator_on_ball(const HeckeMatrix& t, unsigned radius) {
  return operator_on_ball(t, TreeBall(t.pair().q, radius));
}

/// <pi(T)^k 1_K, 1_K> in block i, using only complete rows of the ball
/// operator. Exact as long as k * support + 1 <= radius.
inline BigInt ball_return_value(const BallOperator& op, std::size_t block, unsigned k) {
  std::vector<BigInt> x(op.matrix.rows(), BigInt(0)), y(op.matrix.rows());
  x[op.index(block, 0)] = 1;
  for (unsigned step = 0; step < k; ++step) {
    for (std::size_t r = 0; r < op.matrix.rows(); ++r) {
      y[r] = 0;
      if (!op.complete_rows[r]) continue;
      auto [cols, vals] = op.matrix.row(r);
      for (std::size_t e = 0; e < op.matrix.row_size(r); ++e)
        if (x[cols[e]] != 0) y[r] += x[cols[e]] * vals[e];
    }
    std::swap(x, y);
  }
  return x[op.index(block, 0)];
}

}  // namespace l2hecke::hecke
