#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kwgraph/exhaustion.hpp"
#include "kwgraph/functions.hpp"
#include "kwgraph/series.hpp"
#include "kwgraph/spectral.hpp"

namespace kwg {

enum class Verdict { satisfied, satisfied_on_truncation, violated, hard_violation };
enum class Applicability { c1, c2, both, neither };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::satisfied_on_truncation: return "satisfied-on-truncation";
    case Verdict::violated: return "violated";
    case Verdict::hard_violation: return "hard-violation";
  }
  return "?";
}

inline const char* applicability_name(Applicability a) {
  switch (a) {
    case Applicability::c1: return "C-1";
    case Applicability::c2: return "C-2";
    case Applicability::both: return "both";
    case Applicability::neither: return "neither";
  }
  return "?";
}

// Integral of a nonnegative radial density: partial sum over the scanned
// ball plus, when known, a bound on the remainder.
struct Quantity {
  double partial = 0.0;
  std::optional<double> tail;
  bool tail_exact = false;
  bool divergent = false;

  std::optional<double> total() const {
    if (!tail) return std::nullopt;
    return partial + *tail;
  }
  bool finite() const { return tail.has_value(); }

  bool operator==(const Quantity&) const = default;
};

struct C1Report {
  bool pointwise_ok = false;  // g <= h < 0 on the scanned ball
  std::string pointwise_message;
  Quantity h_L1;
  Quantity psi2h;  // int (g/h)^2 |h| dmu
  Verdict verdict = Verdict::violated;
  bool caveat = false;  // verdict only covers the truncation

  bool operator==(const C1Report&) const = default;
};

struct C2Report {
  bool pointwise_ok = false;  // h <= 0 on the scanned ball
  std::string pointwise_message;
  Quantity g_L2_squared;
  Quantity h_L1;
  CheegerVerdict cheeger_verdict = CheegerVerdict::inconclusive;
  Verdict verdict = Verdict::violated;
  bool caveat = false;
  bool conditional_on_empirical_cheeger = false;

  bool operator==(const C2Report&) const = default;
};

struct HypothesisReport {
  C1Report c1;
  C2Report c2;
  Applicability theorem_applicable = Applicability::neither;

  bool operator==(const HypothesisReport&) const = default;
};

struct ConstantGReport {
  double c = 0.0;
  Quantity volume;
  Quantity h_L1;
  Quantity h_inverse_L1;
  double h_supremum = 0.0;
  bool inverse_integrable = false;  // c <= h < 0, h and 1/h in L1  -> C-1
  bool finite_volume = false;       // finite volume, c <= h <= -eps -> C-1
  bool zero_g = false;              // c = 0, Cheeger, h in L1, h <= 0 -> C-2
  std::vector<std::string> reductions;
  Applicability verdict = Applicability::neither;

  bool operator==(const ConstantGReport&) const = default;
};

namespace detail {

// Vertices within `depth` of the root; throws if the generated truncation
// does not contain the whole ball.
inline std::vector<VertexIndex> scanned_ball(const MeasuredGraph& g, const Exhaustion& ex, int depth) {
  if (depth < 0) throw DomainError("scan depth must be nonnegative");
  const auto& d = ex.distance();
  for (VertexIndex x = 0; x < g.size(); ++x)
    if (d[x] < depth && !g.complete(x))
      throw DomainError("scan depth " + std::to_string(depth) + " exceeds the generated truncation");
  std::vector<VertexIndex> ball;
  for (VertexIndex x = 0; x < g.size(); ++x)
    if (d[x] <= depth) ball.push_back(x);
  return ball;
}

inline bool whole_graph_scanned(const MeasuredGraph& g, const std::vector<VertexIndex>& ball) {
  return g.finite() && ball.size() == g.size();
}

inline Quantity integrate(const MeasuredGraph& g, const Exhaustion& ex, int depth,
                          const std::function<double(VertexIndex)>& density,
                          const std::optional<RadialForm>& form) {
  Quantity q;
  const auto ball = scanned_ball(g, ex, depth);
  for (VertexIndex x : ball) q.partial += density(x) * g.mu(x);
  if (whole_graph_scanned(g, ball)) {
    q.tail = 0.0;
    q.tail_exact = true;
    return q;
  }
  if (g.family() && g.origin() == ex.root() && form) {
    const TailBound t = tail_bound(sphere_model(*g.family()), *form, depth);
    q.tail = t.value;
    q.tail_exact = t.exact;
    q.divergent = !t.value.has_value();
  }
  return q;
}

inline std::optional<RadialForm> both(const FunctionSpec& a, const FunctionSpec& b,
                                      const std::function<RadialForm(RadialForm, RadialForm)>& op) {
  auto fa = abs_form(a), fb = abs_form(b);
  if (!fa || !fb) return std::nullopt;
  return op(*fa, *fb);
}

inline Verdict integrability_verdict(std::initializer_list<const Quantity*> qs, bool& caveat) {
  caveat = false;
  for (const Quantity* q : qs)
    if (q->divergent) return Verdict::violated;
  for (const Quantity* q : qs)
    if (!q->finite()) caveat = true;
  return caveat ? Verdict::satisfied_on_truncation : Verdict::satisfied;
}

inline bool holds(Verdict v) { return v == Verdict::satisfied || v == Verdict::satisfied_on_truncation; }

}  // namespace detail

// (C-1): h in L1, g <= h < 0, int (g/h)^2 |h| < infinity.
inline C1Report check_c1(const MeasuredGraph& g, const Exhaustion& ex, const FunctionSpec& gs,
                         const FunctionSpec& hs, int depth) {
  C1Report rep;
  const auto ball = detail::scanned_ball(g, ex, depth);
  const auto& dist = ex.distance();
  auto gv = [&](VertexIndex x) { return gs.at(g.id(x), dist[x]); };
  auto hv = [&](VertexIndex x) { return hs.at(g.id(x), dist[x]); };

  rep.pointwise_ok = true;
  for (VertexIndex x : ball) {
    if (!(hv(x) < 0.0)) {
      rep.pointwise_ok = false;
      rep.pointwise_message = "h >= 0 at '" + g.id(x) + "'";
      break;
    }
    if (gv(x) > hv(x)) {
      rep.pointwise_ok = false;
      rep.pointwise_message = "g > h at '" + g.id(x) + "'";
      break;
    }
  }

  rep.h_L1 = detail::integrate(g, ex, depth, [&](VertexIndex x) { return std::abs(hv(x)); }, abs_form(hs));
  rep.psi2h = detail::integrate(
      g, ex, depth,
      [&](VertexIndex x) {
        const double h = hv(x);
        return h == 0.0 ? 0.0 : gv(x) * gv(x) / std::abs(h);
      },
      detail::both(gs, hs, [](RadialForm a, RadialForm b) { return a * a / b; }));

  if (!rep.pointwise_ok) {
    rep.verdict = Verdict::hard_violation;
    return rep;
  }
  rep.verdict = detail::integrability_verdict({&rep.h_L1, &rep.psi2h}, rep.caveat);
  return rep;
}

// (C-2): G Cheeger, g in L2, h in L1, h <= 0.
inline C2Report check_c2(const MeasuredGraph& g, const Exhaustion& ex, const FunctionSpec& gs,
                         const FunctionSpec& hs, int depth, const CheegerReport& cheeger) {
  C2Report rep;
  const auto ball = detail::scanned_ball(g, ex, depth);
  const auto& dist = ex.distance();
  auto gv = [&](VertexIndex x) { return gs.at(g.id(x), dist[x]); };
  auto hv = [&](VertexIndex x) { return hs.at(g.id(x), dist[x]); };

  rep.pointwise_ok = true;
  for (VertexIndex x : ball)
    if (hv(x) > 0.0) {
      rep.pointwise_ok = false;
      rep.pointwise_message = "h > 0 at '" + g.id(x) + "'";
      break;
    }

  rep.g_L2_squared = detail::integrate(
      g, ex, depth, [&](VertexIndex x) { return gv(x) * gv(x); },
      detail::both(gs, gs, [](RadialForm a, RadialForm b) { return a * b; }));
  rep.h_L1 = detail::integrate(g, ex, depth, [&](VertexIndex x) { return std::abs(hv(x)); }, abs_form(hs));
  rep.cheeger_verdict = cheeger.verdict;

  if (!rep.pointwise_ok) {
    rep.verdict = Verdict::hard_violation;
    return rep;
  }
  rep.verdict = detail::integrability_verdict({&rep.g_L2_squared, &rep.h_L1}, rep.caveat);
  if (rep.verdict == Verdict::violated) return rep;
  switch (cheeger.verdict) {
    case CheegerVerdict::empirically_cheeger: rep.conditional_on_empirical_cheeger = true; break;
    case CheegerVerdict::empirically_degenerating: rep.verdict = Verdict::violated; break;
    case CheegerVerdict::inconclusive:
      rep.verdict = Verdict::satisfied_on_truncation;
      rep.caveat = true;
      break;
  }
  return rep;
}

inline Applicability combine(bool c1, bool c2) {
  if (c1 && c2) return Applicability::both;
  if (c1) return Applicability::c1;
  if (c2) return Applicability::c2;
  return Applicability::neither;
}

inline HypothesisReport check_hypotheses(const MeasuredGraph& g, const Exhaustion& ex, const FunctionSpec& gs,
                                         const FunctionSpec& hs, int depth, const CheegerReport& cheeger) {
  HypothesisReport rep;
  rep.c1 = check_c1(g, ex, gs, hs, depth);
  rep.c2 = check_c2(g, ex, gs, hs, depth, cheeger);
  rep.theorem_applicable = combine(detail::holds(rep.c1.verdict), detail::holds(rep.c2.verdict));
  return rep;
}

// Constant g = c: which reduction to C-1 or C-2 applies.
inline ConstantGReport check_constant_g(const MeasuredGraph& g, const Exhaustion& ex, double c,
                                                 const FunctionSpec& hs, int depth,
                                                 const CheegerReport& cheeger) {
  ConstantGReport rep;
  rep.c = c;
  const auto ball = detail::scanned_ball(g, ex, depth);
  const auto& dist = ex.distance();
  auto hv = [&](VertexIndex x) { return hs.at(g.id(x), dist[x]); };

  bool c_below_h = true, h_negative = true, h_nonpositive = true;
  double h_max = -INFINITY;
  for (VertexIndex x : ball) {
    const double h = hv(x);
    h_max = std::max(h_max, h);
    if (c > h) c_below_h = false;
    if (!(h < 0.0)) h_negative = false;
    if (h > 0.0) h_nonpositive = false;
  }
  rep.h_supremum = std::max(h_max, hs.radial() ? hs.supremum() : h_max);

  rep.volume = detail::integrate(g, ex, depth, [](VertexIndex) { return 1.0; }, RadialForm{});
  rep.h_L1 = detail::integrate(g, ex, depth, [&](VertexIndex x) { return std::abs(hv(x)); }, abs_form(hs));
  if (h_negative)
    rep.h_inverse_L1 = detail::integrate(
        g, ex, depth, [&](VertexIndex x) { return 1.0 / std::abs(hv(x)); },
        abs_form(hs) ? std::optional<RadialForm>(RadialForm{} / *abs_form(hs)) : std::nullopt);
  else
    rep.h_inverse_L1.divergent = true;

  rep.inverse_integrable = c_below_h && h_negative && rep.h_L1.finite() && rep.h_inverse_L1.finite();
  rep.finite_volume = c_below_h && rep.volume.finite() && rep.h_supremum < 0.0;
  rep.zero_g = c == 0.0 && h_nonpositive && rep.h_L1.finite() &&
                   cheeger.verdict == CheegerVerdict::empirically_cheeger;
  if (rep.inverse_integrable) rep.reductions.push_back("h and 1/h integrable -> C-1");
  if (rep.finite_volume) rep.reductions.push_back("finite volume -> C-1");
  if (rep.zero_g) rep.reductions.push_back("g = 0 -> C-2");
  rep.verdict = combine(rep.inverse_integrable || rep.finite_volume, rep.zero_g);
  return rep;
}

}  // namespace kwg
