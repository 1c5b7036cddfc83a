#pragma once

// Brute-force reference implementations. They work on a flat edge list and
// share no code with the library beyond GraphBuilder for the conversion.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "kwgraph/graph.hpp"

namespace oracle {

struct Edge {
  std::size_t u, v;
  double w;
};

struct RawGraph {
  std::vector<std::string> ids;
  std::vector<double> mu;
  std::vector<Edge> edges;

  std::size_t size() const { return ids.size(); }

  std::size_t add(std::string id, double m) {
    ids.push_back(std::move(id));
    mu.push_back(m);
    return ids.size() - 1;
  }
  void connect(std::size_t u, std::size_t v, double w) { edges.push_back({u, v, w}); }

  kwg::MeasuredGraph build() const {
    kwg::GraphBuilder b;
    for (std::size_t i = 0; i < size(); ++i) b.add_vertex(ids[i], mu[i]);
    for (const auto& e : edges) b.add_edge(ids[e.u], ids[e.v], e.w);
    return std::move(b).build();
  }

  // raw index -> graph index
  std::vector<std::size_t> map_into(const kwg::MeasuredGraph& g) const {
    std::vector<std::size_t> m(size());
    for (std::size_t i = 0; i < size(); ++i) m[i] = g.index_of(ids[i]);
    return m;
  }
};

using Set = std::set<std::size_t>;
using Values = std::vector<double>;  // indexed like RawGraph

// Z restricted to [-n, n], ids "i".
inline RawGraph integer_segment(int n) {
  RawGraph r;
  for (int i = -n; i <= n; ++i) r.add(std::to_string(i), 1.0);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) r.connect(i, i + 1, 1.0);
  return r;
}

// Connected random graph: random tree plus extra edges, parameters drawn
// by hand so the library's random_graph is not reused.
inline RawGraph random_raw(std::mt19937_64& rng, std::size_t max_n = 50) {
  auto uni = [&](double a, double b) { return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };
  const std::size_t n = 2 + rng() % (max_n - 1);
  RawGraph r;
  for (std::size_t i = 0; i < n; ++i) r.add("n" + std::to_string(i), uni(0.05, 4.0));
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t p = rng() % i;
    seen.insert({p, i});
    r.connect(p, i, uni(0.05, 4.0));
  }
  const std::size_t extra = rng() % (n + 1);
  for (std::size_t t = 0; t < extra; ++t) {
    std::size_t a = rng() % n, b = rng() % n;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;
    r.connect(a, b, uni(0.05, 4.0));
  }
  return r;
}

inline std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(const RawGraph& r) {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(r.size());
  for (const auto& e : r.edges) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }
  return adj;
}

inline Set ball(const RawGraph& r, std::size_t root, int radius) {
  const auto adj = adjacency(r);
  std::vector<int> d(r.size(), -1);
  d[root] = 0;
  std::vector<std::size_t> q{root};
  for (std::size_t i = 0; i < q.size(); ++i)
    for (auto [y, w] : adj[q[i]])
      if (d[y] < 0) {
        d[y] = d[q[i]] + 1;
        q.push_back(y);
      }
  Set s;
  for (std::size_t x = 0; x < r.size(); ++x)
    if (d[x] >= 0 && d[x] <= radius) s.insert(x);
  return s;
}

inline Set boundary(const RawGraph& r, const Set& S) {
  Set b;
  for (const auto& e : r.edges) {
    if (S.count(e.u) && !S.count(e.v)) b.insert(e.v);
    if (S.count(e.v) && !S.count(e.u)) b.insert(e.u);
  }
  return b;
}

// (1/mu) sum w (f(y) - f(x)), neighbours restricted to S if given.
inline double laplacian(const RawGraph& r, const Values& f, std::size_t x, const Set* S = nullptr) {
  double s = 0.0;
  for (const auto& e : r.edges) {
    std::size_t y;
    if (e.u == x)
      y = e.v;
    else if (e.v == x)
      y = e.u;
    else
      continue;
    if (S && !S->count(y)) continue;
    s += e.w * (f[y] - f[x]);
  }
  return s / r.mu[x];
}

inline double phi(const RawGraph& r, const Set& S, std::size_t x) {
  double s = 0.0;
  for (const auto& e : r.edges) {
    if (e.u == x && !S.count(e.v)) s += e.w;
    if (e.v == x && !S.count(e.u)) s += e.w;
  }
  return s / r.mu[x];
}

inline double grad_sq(const RawGraph& r, const Values& f, std::size_t x, const Set* S = nullptr) {
  double s = 0.0;
  for (const auto& e : r.edges) {
    std::size_t y;
    if (e.u == x)
      y = e.v;
    else if (e.v == x)
      y = e.u;
    else
      continue;
    if (S && !S->count(y)) continue;
    s += e.w * (f[x] - f[y]) * (f[x] - f[y]);
  }
  return s / (2.0 * r.mu[x]);
}

struct Sides {
  double lhs, rhs;
};

// f supported on S; sums over the closure.
inline Sides green(const RawGraph& r, const Set& S, const Values& f) {
  Set closure = S;
  for (auto b : boundary(r, S)) closure.insert(b);
  Sides s{0.0, 0.0};
  for (auto x : closure) {
    s.lhs += grad_sq(r, f, x) * r.mu[x];
    s.rhs -= f[x] * laplacian(r, f, x) * r.mu[x];
  }
  return s;
}

inline Sides dirichlet(const RawGraph& r, const Set& S, const Values& f) {
  Set closure = S;
  for (auto b : boundary(r, S)) closure.insert(b);
  Sides s{0.0, 0.0};
  for (auto x : closure) s.lhs += grad_sq(r, f, x) * r.mu[x];
  for (auto x : S) s.rhs += (grad_sq(r, f, x, &S) + phi(r, S, x) * f[x] * f[x]) * r.mu[x];
  return s;
}

inline double energy(const RawGraph& r, const Set& S, const Values& f, const Values& g, const Values& h) {
  double J = 0.0;
  for (auto x : S)
    J += (f[x] * g[x] + 0.5 * grad_sq(r, f, x, &S) - std::expm1(f[x]) * h[x] + 0.5 * phi(r, S, x) * f[x] * f[x]) *
         r.mu[x];
  return J;
}

// Root of a continuous, strictly monotone fn on [a, b].
inline double bisect(const std::function<double(double)>& fn, double a, double b, int iters = 200) {
  double fa = fn(a);
  for (int i = 0; i < iters; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = fn(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Smallest eigenvalue of the Dirichlet problem on S via the symmetric
// matrix M^{-1/2} (L_S + diag(boundary weight)) M^{-1/2}.
inline double dense_lambda1(const RawGraph& r, const Set& S) {
  std::vector<std::size_t> v(S.begin(), S.end());
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < v.size(); ++i) pos[v[i]] = i;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (const auto& e : r.edges) {
    const bool iu = S.count(e.u), iv = S.count(e.v);
    if (iu) A(pos[e.u], pos[e.u]) += e.w;
    if (iv) A(pos[e.v], pos[e.v]) += e.w;
    if (iu && iv) {
      A(pos[e.u], pos[e.v]) -= e.w;
      A(pos[e.v], pos[e.u]) -= e.w;
    }
  }
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /= std::sqrt(r.mu[v[i]] * r.mu[v[j]]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double path_lambda1(int n) { return 2.0 * (1.0 - std::cos(M_PI / (n + 1))); }

// sum_{n=from}^{to} term(n), summed from the small end.
inline double partial_sum(const std::function<double(long)>& term, long from, long to) {
  double s = 0.0;
  for (long n = to; n >= from; --n) s += term(n);
  return s;
}

// Number of vertices of the d-regular tree ball of radius n, by recursion.
inline long tree_ball_size(int d, int n) {
  std::function<long(int, int)> below = [&](int children, int depth) -> long {
    if (depth == 0) return 1;
    long s = 1;
    for (int i = 0; i < children; ++i) s += below(d - 1, depth - 1);
    return s;
  };
  return below(d, n);
}

// |{x in Z^d : |x|_1 = n}| by enumeration.
inline long lattice_sphere(int d, int n) {
  long count = 0;
  std::vector<int> x(static_cast<std::size_t>(d), -n);
  while (true) {
    int s = 0;
    for (int c : x) s += std::abs(c);
    if (s == n) ++count;
    std::size_t i = 0;
    while (i < x.size() && x[i] == n) x[i++] = -n;
    if (i == x.size()) break;
    ++x[i];
  }
  return count;
}

}  // namespace oracle
