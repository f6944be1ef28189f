#pragma once

// Replayable activity scripts. A script is a session document whose rounds
// may name observation files instead of inline counts:
//
//   {"elicitation": {"alpha": 2, "beta": 2, "point_estimate": 0.4, "confidence": 60},
//    "rounds": [
//      {"observations": {"files": ["group1.csv"], "first": 5}, "confidence": 70},
//      {"observations": {"files": ["group1.csv"], "skip": 5}, "confidence": 80},
//      {"data": {"n": 155, "y": 63}}]}
//
// Inline counts ({"n": 5, "y": 3}) are accepted in place of "data".
//
// Relative file paths resolve against the script's directory.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bayeslab/ingest.hpp"
#include "bayeslab/session.hpp"
#include "bayeslab/session_document.hpp"

namespace bayeslab {

struct ObservationSource {
  std::vector<std::filesystem::path> files;
  std::size_t skip = 0;
  std::optional<std::size_t> first;
};

struct RoundSpec {
  std::variant<BinomialData, ObservationSource> source;
  std::optional<double> confidence;
  nlohmann::json recorded;  // prior_in / posterior_out carried over from a saved document
};

struct ScriptedActivity {
  std::optional<PriorElicitation> elicitation;
  std::vector<RoundSpec> rounds;
};

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

inline ScriptedActivity parse_script(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw FormatError("script must be a JSON object");
  ScriptedActivity script;
  if (doc.contains("elicitation") && !doc.at("elicitation").is_null()) {
    script.elicitation = elicitation_from_json(doc.at("elicitation"));
  }
  if (!doc.contains("rounds")) return script;
  if (!doc.at("rounds").is_array()) throw FormatError("field 'rounds' must be an array");
  for (const auto& rj : doc.at("rounds")) {
    if (!rj.is_object()) throw FormatError("each round must be an object");
    RoundSpec spec{BinomialData{}, detail::optional_number(rj, "confidence"), nlohmann::json::object()};
    if (rj.contains("data")) {
      spec.source = data_from_json(rj.at("data"));
    } else if (rj.contains("n")) {
      spec.source = data_from_json(rj);
    } else if (rj.contains("observations")) {
      const auto& oj = rj.at("observations");
      ObservationSource src;
      const auto& files = detail::require_field(oj, "files");
      if (!files.is_array() || files.empty()) throw FormatError("observations.files must be a non-empty array");
      for (const auto& f : files) {
        if (!f.is_string()) throw FormatError("observations.files entries must be strings");
        std::filesystem::path p = f.get<std::string>();
        src.files.push_back(p.is_absolute() ? p : base_dir / p);
      }
      if (oj.contains("skip")) src.skip = detail::require_count(oj, "skip");
      if (oj.contains("first")) src.first = detail::require_count(oj, "first");
      spec.source = std::move(src);
    } else {
      throw FormatError("each round needs 'data', inline 'n' and 'y', or 'observations'");
    }
    for (const char* key : {"index", "prior_in", "posterior_out"}) {
      if (rj.contains(key)) spec.recorded[key] = rj.at(key);
    }
    script.rounds.push_back(std::move(spec));
  }
  return script;
}

inline ScriptedActivity load_script(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("script is not valid JSON: " + std::string(e.what()));
  }
  return parse_script(doc, path.parent_path());
}

/// Reads, pools, then slices (skip, then first) the named files.
inline BinomialData resolve_observations(const ObservationSource& src) {
  std::vector<ObservationSet> sets;
  for (const auto& file : src.files) {
    sets.push_back(parse_observations(read_text_file(file), file.stem().string()).set);
  }
  ObservationSet selected = drop_first(pool(sets), src.skip);
  if (src.first) selected = take_first(selected, *src.first);
  return to_binomial(selected);
}

/// Replays a script through the session engine. Recorded prior_in /
/// posterior_out values, when present, must match the replay.
inline ActivitySession run_script(const ScriptedActivity& script, std::string id = "script") {
  nlohmann::json doc;
  doc["id"] = std::move(id);
  doc["created_at"] = detail::utc_timestamp_now();
  doc["elicitation"] = script.elicitation ? elicitation_to_json(*script.elicitation) : nlohmann::json();
  doc["rounds"] = nlohmann::json::array();
  for (const auto& spec : script.rounds) {
    const BinomialData data = std::holds_alternative<BinomialData>(spec.source)
                                  ? std::get<BinomialData>(spec.source)
                                  : resolve_observations(std::get<ObservationSource>(spec.source));
    nlohmann::json rj = spec.recorded;
    rj["data"] = data_to_json(data);
    rj["confidence"] = spec.confidence ? nlohmann::json(*spec.confidence) : nlohmann::json();
    doc["rounds"].push_back(std::move(rj));
  }
  return session_from_document(doc);
}

}  // namespace bayeslab
