#pragma once

// JSON presentations shared by the HTTP service and the CLI. Reals are
// rounded to 12 significant digits; non-finite values become null.

#include <cmath>

#include <json.hpp>

#include "bayeslab/conjugate_models.hpp"
#include "bayeslab/format.hpp"
#include "bayeslab/plotdata.hpp"
#include "bayeslab/session.hpp"

namespace bayeslab::views {

inline constexpr double kReportedLevel = 0.95;

inline nlohmann::json real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_significant(v);
}

inline nlohmann::json beta(const BetaParams& p) {
  return {{"alpha", real(p.alpha())}, {"beta", real(p.beta())}};
}

inline nlohmann::json data(const BinomialData& d) { return {{"n", d.n()}, {"y", d.y()}}; }

inline nlohmann::json summary(const BetaSummary& s) {
  return {{"mean", real(s.mean)},
          {"mode", s.mode ? real(*s.mode) : nlohmann::json()},
          {"variance", real(s.variance)},
          {"sd", real(s.sd)}};
}

inline nlohmann::json interval(const CredibleInterval& ci) {
  return {{"level", real(ci.level)}, {"lower", real(ci.lower)}, {"upper", real(ci.upper)}};
}

inline nlohmann::json mark(const ConfidenceMark& m) {
  return {{"stage", m.stage() == Stage::prior ? "prior" : "after_round"},
          {"round", m.round()},
          {"value", real(m.value())}};
}

inline nlohmann::json elicitation(const PriorElicitation& e) {
  return {{"alpha", real(e.params.alpha())},
          {"beta", real(e.params.beta())},
          {"point_estimate", e.point_estimate ? real(e.point_estimate->value()) : nlohmann::json()},
          {"assumptions", e.assumptions},
          {"confidence", e.confidence ? real(e.confidence->value()) : nlohmann::json()}};
}

/// prior_in, posterior_out, posterior summary and 95% interval for one round.
inline nlohmann::json round(const UpdateRound& r) {
  return {{"index", r.index},
          {"data", data(r.data)},
          {"prior_in", beta(r.prior_in)},
          {"posterior_out", beta(r.posterior_out)},
          {"confidence", r.confidence ? real(r.confidence->value()) : nlohmann::json()},
          {"summary", summary(beta_summary(r.posterior_out))},
          {"interval", interval(credible_interval(r.posterior_out, kReportedLevel))}};
}

/// Session contents without identity fields; identical for CLI replays and API sessions.
inline nlohmann::json activity_report(const ActivitySession& s) {
  nlohmann::json j;
  j["elicitation"] = s.elicitation() ? elicitation(*s.elicitation()) : nlohmann::json();
  j["rounds"] = nlohmann::json::array();
  for (const auto& r : s.rounds()) j["rounds"].push_back(round(r));
  j["cumulative"] = data(s.cumulative_data());
  j["confidence_trajectory"] = nlohmann::json::array();
  for (const auto& m : s.confidence_trajectory()) j["confidence_trajectory"].push_back(mark(m));
  if (s.elicitation()) {
    const BetaParams post = s.current_posterior();
    j["current_posterior"] = beta(post);
    j["current_summary"] = summary(beta_summary(post));
    j["current_interval"] = interval(credible_interval(post, kReportedLevel));
  } else {
    j["current_posterior"] = nullptr;
    j["current_summary"] = nullptr;
    j["current_interval"] = nullptr;
  }
  return j;
}

inline nlohmann::json session_state(const ActivitySession& s) {
  nlohmann::json j = activity_report(s);
  j["id"] = s.id();
  j["created_at"] = s.created_at();
  return j;
}

inline nlohmann::json curves(const CurveBundle& b) {
  const auto series = [](const std::vector<double>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) arr.push_back(real(x));
    return arr;
  };
  nlohmann::json j;
  j["grid"] = {{"count", b.grid.count()}, {"epsilon", real(b.grid.epsilon())}};
  j["x"] = series(b.grid.points());
  j["prior"] = series(b.prior);
  j["likelihood"] = b.likelihood ? series(*b.likelihood) : nlohmann::json();
  j["posterior"] = b.posterior ? series(*b.posterior) : nlohmann::json();
  j["labels"] = nlohmann::json::array();
  for (const auto& l : b.labels) {
    j["labels"].push_back(
        {{"name", l.name}, {"alpha", real(l.params.alpha())}, {"beta", real(l.params.beta())}});
  }
  return j;
}

}  // namespace bayeslab::views
