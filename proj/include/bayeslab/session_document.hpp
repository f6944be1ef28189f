#pragma once

// JSON document form of an ActivitySession. Field names are stable; see
// docs/session_format.md. Reals are written at full round-trip precision.

#include <string>

#include <json.hpp>

#include "bayeslab/errors.hpp"
#include "bayeslab/session.hpp"

namespace bayeslab {

inline constexpr const char* kSessionFormat = "bayeslab.session/1";

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError(std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

inline double require_number(const nlohmann::json& obj, const char* key) {
  const auto& v = require_field(obj, key);
  if (!v.is_number()) throw FormatError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline std::optional<double> optional_number(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  if (!obj.at(key).is_number()) {
    throw FormatError(std::string("field '") + key + "' must be a number or null");
  }
  return obj.at(key).get<double>();
}

inline Count require_count(const nlohmann::json& obj, const char* key) {
  const auto& v = require_field(obj, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw FormatError(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<Count>();
}

}  // namespace detail

inline nlohmann::json beta_to_json(const BetaParams& p) {
  return {{"alpha", p.alpha()}, {"beta", p.beta()}};
}

inline nlohmann::json data_to_json(const BinomialData& d) { return {{"n", d.n()}, {"y", d.y()}}; }

inline BinomialData data_from_json(const nlohmann::json& j) {
  return BinomialData(detail::require_count(j, "n"), detail::require_count(j, "y"));
}

inline nlohmann::json elicitation_to_json(const PriorElicitation& e) {
  nlohmann::json j;
  j["alpha"] = e.params.alpha();
  j["beta"] = e.params.beta();
  j["point_estimate"] = e.point_estimate ? nlohmann::json(e.point_estimate->value()) : nullptr;
  j["assumptions"] = e.assumptions;
  j["confidence"] = e.confidence ? nlohmann::json(e.confidence->value()) : nullptr;
  return j;
}

/// Accepts `point_estimate` or its short alias `estimate`.
inline PriorElicitation elicitation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("elicitation must be an object");
  auto estimate = detail::optional_number(j, "point_estimate");
  if (!estimate) estimate = detail::optional_number(j, "estimate");
  std::string assumptions;
  if (j.contains("assumptions") && !j.at("assumptions").is_null()) {
    if (!j.at("assumptions").is_string()) throw FormatError("field 'assumptions' must be a string");
    assumptions = j.at("assumptions").get<std::string>();
  }
  return make_elicitation(detail::require_number(j, "alpha"), detail::require_number(j, "beta"),
                          estimate, detail::optional_number(j, "confidence"),
                          std::move(assumptions));
}

inline nlohmann::json to_document(const ActivitySession& s) {
  nlohmann::json doc;
  doc["format"] = kSessionFormat;
  doc["id"] = s.id();
  doc["created_at"] = s.created_at();
  doc["elicitation"] = s.elicitation() ? elicitation_to_json(*s.elicitation()) : nlohmann::json();
  doc["rounds"] = nlohmann::json::array();
  for (const auto& r : s.rounds()) {
    doc["rounds"].push_back({{"index", r.index},
                             {"data", data_to_json(r.data)},
                             {"prior_in", beta_to_json(r.prior_in)},
                             {"posterior_out", beta_to_json(r.posterior_out)},
                             {"confidence", r.confidence ? nlohmann::json(r.confidence->value())
                                                         : nlohmann::json()}});
  }
  return doc;
}

/// Rebuilds a session by replaying its rounds; stored prior_in/posterior_out
/// must match the replayed chain exactly.
inline ActivitySession session_from_document(const nlohmann::json& doc) {
  if (!doc.is_object()) throw FormatError("session document must be a JSON object");
  if (doc.contains("format") && doc.at("format") != kSessionFormat) {
    throw FormatError("unsupported session format");
  }
  const auto& id = detail::require_field(doc, "id");
  const auto& created = detail::require_field(doc, "created_at");
  if (!id.is_string() || !created.is_string()) throw FormatError("id and created_at must be strings");
  ActivitySession s(id.get<std::string>(), created.get<std::string>());

  if (doc.contains("elicitation") && !doc.at("elicitation").is_null()) {
    s.set_prior(elicitation_from_json(doc.at("elicitation")));
  }
  if (!doc.contains("rounds")) return s;
  const auto& rounds = doc.at("rounds");
  if (!rounds.is_array()) throw FormatError("field 'rounds' must be an array");
  for (const auto& rj : rounds) {
    const auto data = data_from_json(detail::require_field(rj, "data"));
    const auto& added = s.add_round(data, detail::optional_number(rj, "confidence"));
    if (rj.contains("index") && rj.at("index") != added.index) {
      throw FormatError("round index out of sequence");
    }
    for (const char* key : {"prior_in", "posterior_out"}) {
      if (!rj.contains(key)) continue;
      const BetaParams stored(detail::require_number(rj.at(key), "alpha"),
                              detail::require_number(rj.at(key), "beta"));
      const BetaParams& replayed = std::string(key) == "prior_in" ? added.prior_in : added.posterior_out;
      if (!(stored == replayed)) {
        throw FormatError("round " + std::to_string(added.index) + ": stored " + key +
                          " does not match the replayed update chain");
      }
    }
  }
  return s;
}

inline std::string serialize_session(const ActivitySession& s) { return to_document(s).dump(2); }

inline ActivitySession deserialize_session(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  return session_from_document(doc);
}

}  // namespace bayeslab
