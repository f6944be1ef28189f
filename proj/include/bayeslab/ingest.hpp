#pragma once

// Observation sheets: one row per room, `room_id,lights_on`.
//
// Input: UTF-8 (optional BOM), LF or CRLF, mandatory header, comma
// separated, fields optionally double-quoted ("" escapes a quote).
// lights_on accepts 0/1, yes/no, true/false (case-insensitive).
// Output is always LF with canonical 0/1.

#include <algorithm>
#include <cctype>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bayeslab/conjugate_models.hpp"
#include "bayeslab/errors.hpp"

namespace bayeslab {

struct Observation {
  std::string room_id;
  bool lights_on;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct ObservationSet {
  std::string group_label;
  std::vector<Observation> observations;

  std::size_t size() const noexcept { return observations.size(); }
  friend bool operator==(const ObservationSet&, const ObservationSet&) = default;
};

struct ParseWarning {
  std::size_t line;
  std::string message;
};

struct ParseOptions {
  /// Treat a repeated room_id as a validation error instead of a warning.
  bool strict_duplicates = false;
};

struct ParsedObservations {
  ObservationSet set;
  std::vector<ParseWarning> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  auto b = std::find_if(s.begin(), s.end(), not_space);
  auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b)) : std::string_view{};
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Splits one physical line into trimmed fields, honouring double quotes.
inline std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      if (!trim(field).empty()) throw ValidationError(line_no, "unexpected quote inside field");
      field.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.emplace_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else if (was_quoted) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        throw ValidationError(line_no, "characters after closing quote");
      }
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ValidationError(line_no, "unterminated quoted field");
  fields.emplace_back(was_quoted ? field : std::string(trim(field)));
  return fields;
}

inline bool parse_light_status(std::string_view raw, std::size_t line_no) {
  const std::string v = lower(trim(raw));
  if (v == "1" || v == "yes" || v == "true") return true;
  if (v == "0" || v == "no" || v == "false") return false;
  throw ValidationError(line_no, "lights_on must be 0 or 1 (or yes/no, true/false), got '" +
                                     std::string(raw) + "'");
}

inline std::string quote_if_needed(const std::string& field) {
  const bool needs = field.find_first_of(",\"\r\n") != std::string::npos ||
                     (!field.empty() && (std::isspace(static_cast<unsigned char>(field.front())) ||
                                         std::isspace(static_cast<unsigned char>(field.back()))));
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// Parses one group's sheet. Line numbers in errors and warnings are 1-based
/// physical lines (the header is line 1).
inline ParsedObservations parse_observations(std::string_view raw, std::string group_label,
                                             const ParseOptions& options = {}) {
  if (raw.starts_with("\xEF\xBB\xBF")) raw.remove_prefix(3);

  ParsedObservations result;
  result.set.group_label = std::move(group_label);
  std::set<std::string> seen;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    const std::size_t end = std::min(raw.find('\n', pos), raw.size());
    std::string_view line = raw.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (detail::trim(line).empty()) {
      if (end == raw.size()) break;
      continue;
    }

    auto fields = detail::split_fields(line, line_no);
    if (!header_seen) {
      if (fields.size() != 2 || detail::lower(fields[0]) != "room_id" ||
          detail::lower(fields[1]) != "lights_on") {
        throw FormatError("missing header row 'room_id,lights_on'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 2) {
      throw ValidationError(line_no, "expected 2 fields, found " + std::to_string(fields.size()));
    }
    std::string room = std::string(detail::trim(fields[0]));
    if (room.empty()) throw ValidationError(line_no, "room_id is empty");
    const bool on = detail::parse_light_status(fields[1], line_no);
    if (!seen.insert(room).second) {
      if (options.strict_duplicates) {
        throw ValidationError(line_no, "duplicate room_id '" + room + "'");
      }
      result.warnings.push_back({line_no, "duplicate room_id '" + room + "'"});
    }
    result.set.observations.push_back({std::move(room), on});
  }
  if (!header_seen) throw FormatError("missing header row 'room_id,lights_on'");
  return result;
}

/// Canonical text form: LF line endings, 0/1 values.
inline std::string serialize_observations(const ObservationSet& set) {
  std::string out = "room_id,lights_on\n";
  for (const auto& o : set.observations) {
    out += detail::quote_if_needed(o.room_id);
    out += o.lights_on ? ",1\n" : ",0\n";
  }
  return out;
}

inline BinomialData to_binomial(const ObservationSet& set) {
  const auto on = std::count_if(set.observations.begin(), set.observations.end(),
                                [](const Observation& o) { return o.lights_on; });
  return BinomialData(set.observations.size(), static_cast<Count>(on));
}

/// The first k observations, in order.
inline ObservationSet take_first(const ObservationSet& set, std::size_t k) {
  if (k > set.size()) {
    throw DomainError("cannot take " + std::to_string(k) + " observations from a set of " +
                      std::to_string(set.size()));
  }
  return ObservationSet{set.group_label,
                        {set.observations.begin(), set.observations.begin() + static_cast<std::ptrdiff_t>(k)}};
}

/// Everything after the first k observations.
inline ObservationSet drop_first(const ObservationSet& set, std::size_t k) {
  if (k > set.size()) {
    throw DomainError("cannot skip " + std::to_string(k) + " observations from a set of " +
                      std::to_string(set.size()));
  }
  return ObservationSet{set.group_label,
                        {set.observations.begin() + static_cast<std::ptrdiff_t>(k), set.observations.end()}};
}

/// Concatenates sets in order under the label "pooled".
inline ObservationSet pool(std::span<const ObservationSet> sets) {
  if (sets.empty()) throw DomainError("pool needs at least one observation set");
  ObservationSet pooled{"pooled", {}};
  for (const auto& s : sets) {
    pooled.observations.insert(pooled.observations.end(), s.observations.begin(), s.observations.end());
  }
  return pooled;
}

}  // namespace bayeslab
