#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "kwgraph/conditions.hpp"
#include "kwgraph/spectral.hpp"

namespace nlohmann {

template <typename T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& v) {
    if (v)
      j = *v;
    else
      j = nullptr;
  }
  static void from_json(const json& j, std::optional<T>& v) {
    if (j.is_null())
      v = std::nullopt;
    else
      v = j.get<T>();
  }
};

}  // namespace nlohmann

namespace kwg {

NLOHMANN_JSON_SERIALIZE_ENUM(CheegerVerdict, {
                                                 {CheegerVerdict::inconclusive, "inconclusive"},
                                                 {CheegerVerdict::empirically_cheeger, "empirically-cheeger"},
                                                 {CheegerVerdict::empirically_degenerating,
                                                  "empirically-degenerating"},
                                             })

NLOHMANN_JSON_SERIALIZE_ENUM(Verdict, {
                                          {Verdict::violated, "violated"},
                                          {Verdict::satisfied, "satisfied"},
                                          {Verdict::satisfied_on_truncation, "satisfied-on-truncation"},
                                          {Verdict::hard_violation, "hard-violation"},
                                      })

NLOHMANN_JSON_SERIALIZE_ENUM(Applicability, {
                                                {Applicability::neither, "neither"},
                                                {Applicability::c1, "C-1"},
                                                {Applicability::c2, "C-2"},
                                                {Applicability::both, "both"},
                                            })

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CheegerLevel, k, lambda_1, sqrt_lambda_1, dense_lambda_1, boundary_empty)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CheegerReport, per_level, inf_over_levels, extrapolated_limit, monotone, margin,
                                   verdict, note)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Quantity, partial, tail, tail_exact, divergent)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(C1Report, pointwise_ok, pointwise_message, h_L1, psi2h, verdict, caveat)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(C2Report, pointwise_ok, pointwise_message, g_L2_squared, h_L1, cheeger_verdict,
                                   verdict, caveat, conditional_on_empirical_cheeger)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(HypothesisReport, c1, c2, theorem_applicable)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConstantGReport, c, volume, h_L1, h_inverse_L1, h_supremum, inverse_integrable,
                                   finite_volume, zero_g, reductions, verdict)

}  // namespace kwg
