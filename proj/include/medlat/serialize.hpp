#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "medlat/algorithm.hpp"
#include "medlat/index_set.hpp"
#include "medlat/korobov.hpp"

namespace medlat {

using Json = nlohmann::json;

inline const char* weight_kind_name(WeightSequence::Kind kind) {
  switch (kind) {
    case WeightSequence::Kind::explicit_list: return "explicit";
    case WeightSequence::Kind::polynomial_decay: return "polynomial";
    case WeightSequence::Kind::geometric_decay: return "geometric";
  }
  return "explicit";
}

/// JSON has no infinity; non-finite values are written as strings.
inline Json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline Json to_json(const KorobovParams& params) {
  const auto values = params.gamma().values();
  return Json{{"d", params.dim()},
              {"alpha", params.alpha()},
              {"gamma", std::vector<double>(values.begin(), values.end())},
              {"gamma_kind", weight_kind_name(params.gamma().kind())}};
}

inline Json to_json(const AlgorithmPlan& plan) {
  Json j = to_json(plan.params);
  j["tau"] = plan.tau;
  j["R"] = plan.repetitions;
  j["N"] = plan.modulus;
  j["P_Nd"] = plan.p_nd;
  j["N2"] = plan.n2;
  j["card_A"] = plan.index_set->size();
  j["eps1"] = json_number(plan.eps1);
  j["eps2"] = json_number(plan.eps2);
  j["total_evaluations"] = plan.total_evaluations;
  j["guaranteed"] = plan.guaranteed;
  j["warnings"] = plan.warnings;
  if (plan.n2 > 1.0) j["cardinality_bound"] = cardinality_bound(plan.modulus, plan.tau, plan.n2);
  return j;
}

inline Json to_json(const FrequencyVector& h) { return Json(std::vector<std::int64_t>(h.begin(), h.end())); }

inline Json to_json(const Approximant& approx) {
  Json members = Json::array();
  for (const auto& h : approx.index_set->members()) members.push_back(to_json(h));
  Json coeffs = Json::array();
  for (const auto& c : approx.coeffs) coeffs.push_back({c.real(), c.imag()});
  Json reps = Json::array();
  for (const auto& e : approx.estimates) {
    Json r{{"r", e.repetition}, {"z", e.rule.generator()}};
    r["shift"] = e.rule.shift() ? Json(*e.rule.shift()) : Json(nullptr);
    reps.push_back(std::move(r));
  }
  return Json{{"plan", to_json(approx.plan)}, {"seed", approx.seed},       {"shifted", approx.shifted},
              {"index_set", members},       {"coefficients", coeffs},     {"repetitions", reps},
              {"evaluations", approx.evaluations}};
}

/// Rebuilds an approximant from its JSON form. The plan is recomputed from its
/// parameters and must reproduce the stored index set.
inline Approximant approximant_from_json(const Json& j) {
  const auto& p = j.at("plan");
  auto params = KorobovParams(p.at("alpha").get<double>(),
                              WeightSequence::from_list(p.at("gamma").get<std::vector<double>>()));
  auto plan = build_plan(params, p.at("tau").get<double>(), p.at("R").get<std::size_t>(), p.at("N").get<std::uint64_t>());
  const auto& members = j.at("index_set");
  if (members.size() != plan.index_set->size()) throw std::invalid_argument("approximant JSON: index set does not match plan");
  for (std::size_t i = 0; i < members.size(); ++i)
    if (FrequencyVector(members[i].get<std::vector<std::int64_t>>()) != (*plan.index_set)[i])
      throw std::invalid_argument("approximant JSON: index set does not match plan");
  Approximant out{plan.index_set, {}, plan, j.at("seed").get<std::uint64_t>(), j.at("shifted").get<bool>(), {}, 0};
  for (const auto& c : j.at("coefficients")) out.coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  for (const auto& r : j.at("repetitions")) {
    std::optional<std::vector<double>> shift;
    if (!r.at("shift").is_null()) shift = r.at("shift").get<std::vector<double>>();
    LatticeRule rule(plan.modulus, r.at("z").get<std::vector<std::int64_t>>(), shift);
    out.estimates.push_back(SpectrumEstimate{plan.index_set, {}, rule, r.at("r").get<std::size_t>(), plan.modulus});
  }
  out.evaluations = j.at("evaluations").get<std::uint64_t>();
  return out;
}

}  // namespace medlat
