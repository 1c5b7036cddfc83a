#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "kwgraph/functions.hpp"
#include "kwgraph/graph.hpp"

namespace kwg {

// coef * base^n * (1+n)^(-power), n = distance to the root. Closed under
// products and quotients, which covers |h|, g^2, g^2/|h|, 1/|h| and 1 for
// the radial presets.
struct RadialForm {
  double coef = 1.0;
  double base = 1.0;
  double power = 0.0;

  RadialForm operator*(const RadialForm& o) const { return {coef * o.coef, base * o.base, power + o.power}; }
  RadialForm operator/(const RadialForm& o) const { return {coef / o.coef, base / o.base, power - o.power}; }
};

inline std::optional<RadialForm> abs_form(const FunctionSpec& s) {
  switch (s.preset) {
    case Preset::constant: return RadialForm{std::abs(s.a), 1.0, 0.0};
    case Preset::geometric: return RadialForm{std::abs(s.a), s.r, 0.0};
    case Preset::power: return RadialForm{std::abs(s.a), 1.0, s.p};
    case Preset::table: return std::nullopt;
  }
  return std::nullopt;
}

// Upper model of (sphere size) x (vertex measure) at radius n >= 1 for a
// generated family:  poly(n) * base^n,  poly with nonnegative coefficients.
struct SphereModel {
  std::vector<double> poly;  // coefficients of n^0, n^1, ...
  double base = 1.0;
  bool exact = true;  // poly(n) base^n equals the true sphere mass

  double at(int n) const {
    double p = 0.0, np = 1.0;
    for (double c : poly) {
      p += c * np;
      np *= n;
    }
    return p * std::pow(base, n);
  }
  int degree() const { return static_cast<int>(poly.size()) - 1; }
};

inline SphereModel sphere_model(const FamilyTag& tag) {
  SphereModel m;
  switch (tag.family) {
    case Family::lattice: {
      // |S(n)| = sum_k 2^k C(d,k) C(n-1,k-1) <= sum_k 2^k C(d,k) n^(k-1)/(k-1)!
      const int d = tag.dimension;
      m.poly.assign(static_cast<std::size_t>(d), 0.0);
      double binom = 1.0, fact = 1.0;
      for (int k = 1; k <= d; ++k) {
        binom = binom * (d - k + 1) / k;
        if (k > 1) fact *= (k - 1);
        m.poly[static_cast<std::size_t>(k - 1)] = std::pow(2.0, k) * binom / fact;
      }
      m.exact = d == 1;
      break;
    }
    case Family::tree:
      // d (d-1)^(n-1)
      m.poly = {static_cast<double>(tag.degree) / (tag.degree - 1)};
      m.base = tag.degree - 1;
      break;
    case Family::path: m.poly = {1.0}; break;
    case Family::collapsing_chain:
      m.poly = {2.0};
      m.base = tag.ratio;
      break;
  }
  return m;
}

struct TailBound {
  std::optional<double> value;  // upper bound on sum_{n > depth}; empty if divergent
  bool exact = false;           // value equals the tail
};

// Bound on sum_{n > depth} sphere(n) * q(n).
//   base < 1: explicit terms until the term ratio bound drops below one,
//             then a geometric majorant;
//   base = 1: integral comparison, finite iff power > degree + 1;
//   base > 1: divergent.
inline TailBound tail_bound(const SphereModel& sphere, const RadialForm& q, int depth) {
  TailBound out;
  if (q.coef == 0.0) {
    out.value = 0.0;
    out.exact = true;
    return out;
  }
  const double beta = sphere.base * q.base;
  const int m = sphere.degree();
  const double p = q.power;
  auto term = [&](long n) {
    return q.coef * sphere.at(static_cast<int>(n)) * std::pow(q.base, static_cast<double>(n)) *
           std::pow(1.0 + n, -p);
  };
  if (beta < 1.0) {
    auto ratio = [&](long n) {
      const double dn = static_cast<double>(n);
      double r = beta * std::pow((dn + 1.0) / dn, m);
      if (p < 0.0) r *= std::pow((dn + 2.0) / (dn + 1.0), -p);
      return r;
    };
    double sum = 0.0;
    long n = depth + 1;
    constexpr long kMaxExplicit = 10'000'000;
    while (ratio(n) >= 1.0) {
      sum += term(n);
      if (++n - depth > kMaxExplicit) return out;
    }
    out.value = sum + term(n) / (1.0 - ratio(n));
    out.exact = sphere.exact && m == 0 && p == 0.0;
    return out;
  }
  if (beta == 1.0 && p > m + 1.0) {
    const double s = p - m;
    const double poly_sum = std::accumulate(sphere.poly.begin(), sphere.poly.end(), 0.0);
    out.value = q.coef * poly_sum * std::pow(1.0 + depth, 1.0 - s) / (s - 1.0);
    return out;
  }
  return out;
}

}  // namespace kwg
