#pragma once

// HTTP/JSON service over activity sessions, backed by one JSON document
// per session on disk. Endpoint reference: docs/api.md.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include <fcntl.h>
#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

#include "bayeslab/ingest.hpp"
#include "bayeslab/plotdata.hpp"
#include "bayeslab/session.hpp"
#include "bayeslab/session_document.hpp"
#include "bayeslab/views.hpp"

namespace bayeslab::api {

enum class ErrorCode { bad_request, not_found, conflict, internal };

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_request: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::internal: return 500;
  }
  return 500;
}

inline const char* code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_request: return "bad_request";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

struct ApiError {
  ErrorCode code;
  std::string message;
  nlohmann::json detail;  // null when there is nothing field-specific to report
};

class ApiException : public std::runtime_error {
 public:
  explicit ApiException(ApiError error) : std::runtime_error(error.message), error_(std::move(error)) {}
  const ApiError& error() const noexcept { return error_; }

 private:
  ApiError error_;
};

struct Reply {
  int status;
  nlohmann::json body;
};

inline Reply error_reply(const ApiError& e) {
  nlohmann::json body = {{"error", {{"code", code_name(e.code)}, {"message", e.message}}}};
  if (!e.detail.is_null()) body["error"]["detail"] = e.detail;
  return Reply{http_status(e.code), std::move(body)};
}

/// Directory of `<id>.json` session documents. Writes go to a temp file
/// that is fsynced and renamed over the target.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path directory) : dir_(std::move(directory)) {}

  const std::filesystem::path& directory() const noexcept { return dir_; }

  static bool valid_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
    }
    return true;
  }

  bool exists(const std::string& id) const {
    return valid_id(id) && std::filesystem::exists(path_for(id));
  }

  /// Throws std::runtime_error (or std::filesystem::filesystem_error) on I/O failure.
  void save(const ActivitySession& s) const {
    std::filesystem::create_directories(dir_);
    const auto target = path_for(s.id());
    const auto temp = dir_ / (s.id() + ".json.tmp");
    const std::string text = serialize_session(s);

    const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) throw std::runtime_error("cannot open session file for writing");
    std::size_t written = 0;
    while (written < text.size()) {
      const auto n = ::write(fd, text.data() + written, text.size() - written);
      if (n <= 0) {
        ::close(fd);
        throw std::runtime_error("short write to session file");
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) throw std::runtime_error("cannot flush session file");
    std::filesystem::rename(temp, target);
  }

  std::optional<ActivitySession> load(const std::string& id) const {
    if (!valid_id(id)) return std::nullopt;
    std::ifstream in(path_for(id), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream text;
    text << in.rdbuf();
    return deserialize_session(text.str());
  }

 private:
  std::filesystem::path path_for(const std::string& id) const { return dir_ / (id + ".json"); }

  std::filesystem::path dir_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8787;
  std::filesystem::path data_dir = "bayeslab-data";
  std::size_t grid_points = kDefaultGridPoints;
  std::string cors_origin = "*";

  /// Parses "host:port" (BAYES_ADDR form).
  void set_address(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw DomainError("address must be host:port");
    host = addr.substr(0, colon);
    const std::string port_text = addr.substr(colon + 1);
    int p = 0;
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), p);
    if (ec != std::errc() || ptr != port_text.data() + port_text.size() || p < 0 || p > 65535) {
      throw DomainError("invalid port in address '" + addr + "'");
    }
    port = p;
  }
};

namespace detail {

inline nlohmann::json parse_body(const std::string& body) {
  try {
    auto j = nlohmann::json::parse(body);
    if (!j.is_object()) throw ApiException({ErrorCode::bad_request, "request body must be a JSON object", {}});
    return j;
  } catch (const nlohmann::json::parse_error&) {
    throw ApiException({ErrorCode::bad_request, "request body is not valid JSON", {}});
  }
}

inline std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) {
    throw ApiException({ErrorCode::bad_request, std::string(key) + " must be a number", {{"field", key}}});
  }
  return j.at(key).get<double>();
}

inline double required_number(const nlohmann::json& j, const char* key) {
  auto v = optional_number(j, key);
  if (!v) throw ApiException({ErrorCode::bad_request, std::string(key) + " is required", {{"field", key}}});
  return *v;
}

inline Count required_count(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
    throw ApiException({ErrorCode::bad_request, std::string(key) + " must be a non-negative integer",
                        {{"field", key}}});
  }
  return j.at(key).get<Count>();
}

inline std::size_t parse_index(const std::string& text, const char* name) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ApiException({ErrorCode::bad_request, std::string(name) + " must be a non-negative integer",
                        {{"field", name}}});
  }
  return value;
}

inline void check_range(double v, double lo, double hi, const char* field) {
  if (!(v >= lo && v <= hi)) {
    throw ApiException({ErrorCode::bad_request,
                        std::string(field) + " must lie in [" + format_real(lo) + ", " + format_real(hi) + "]",
                        {{"field", field}}});
  }
}

}  // namespace detail

/// Request handlers, independent of the transport. Per-session writes are
/// serialized by a per-id mutex; reads return immutable snapshots.
class ApiService {
 public:
  explicit ApiService(ServiceConfig config) : config_(std::move(config)), store_(config_.data_dir) {}

  const ServiceConfig& config() const noexcept { return config_; }

  Reply create_session() {
    return guarded([&] {
      auto s = bayeslab::create_session();
      const std::string id = s.id();
      store_.save(s);
      publish(std::make_shared<const ActivitySession>(std::move(s)));
      return Reply{201, {{"id", id}}};
    });
  }

  Reply put_prior(const std::string& id, const std::string& body) {
    return guarded([&] {
      const auto j = detail::parse_body(body);
      const double alpha = detail::required_number(j, "alpha");
      const double beta = detail::required_number(j, "beta");
      if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ApiException({ErrorCode::bad_request, "alpha must be > 0", {{"field", "alpha"}}});
      }
      if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ApiException({ErrorCode::bad_request, "beta must be > 0", {{"field", "beta"}}});
      }
      auto estimate = detail::optional_number(j, "estimate");
      if (!estimate) estimate = detail::optional_number(j, "point_estimate");
      if (estimate) detail::check_range(*estimate, 0.0, 1.0, "estimate");
      const auto confidence = detail::optional_number(j, "confidence");
      if (confidence) detail::check_range(*confidence, 0.0, 100.0, "confidence");
      std::string assumptions;
      if (j.contains("assumptions") && !j.at("assumptions").is_null()) {
        if (!j.at("assumptions").is_string()) {
          throw ApiException({ErrorCode::bad_request, "assumptions must be a string", {{"field", "assumptions"}}});
        }
        assumptions = j.at("assumptions").get<std::string>();
      }
      auto updated = mutate(id, [&](ActivitySession& s) {
        if (!s.rounds().empty()) {
          throw ApiException({ErrorCode::conflict, "prior is locked once data rounds exist", {}});
        }
        s.set_prior(make_elicitation(alpha, beta, estimate, confidence, std::move(assumptions)));
      });
      return Reply{200, views::session_state(*updated)};
    });
  }

  /// Body: {n, y, confidence?} or {observations_csv, confidence?}.
  Reply post_round(const std::string& id, const std::string& body) {
    return guarded([&] {
      const auto j = detail::parse_body(body);
      BinomialData data;
      nlohmann::json warnings = nlohmann::json::array();
      if (j.contains("observations_csv")) {
        if (!j.at("observations_csv").is_string()) {
          throw ApiException({ErrorCode::bad_request, "observations_csv must be a string",
                              {{"field", "observations_csv"}}});
        }
        auto parsed = parse_csv(j.at("observations_csv").get<std::string>(), "round", std::nullopt);
        data = to_binomial(parsed.set);
        for (const auto& w : parsed.warnings) warnings.push_back({{"line", w.line}, {"message", w.message}});
      } else {
        const Count n = detail::required_count(j, "n");
        const Count y = detail::required_count(j, "y");
        if (y > n) {
          throw ApiException({ErrorCode::bad_request, "y must not exceed n", {{"field", "y"}}});
        }
        data = BinomialData(n, y);
      }
      const auto confidence = detail::optional_number(j, "confidence");
      if (confidence) detail::check_range(*confidence, 0.0, 100.0, "confidence");

      auto updated = mutate(id, [&](ActivitySession& s) {
        if (!s.elicitation()) throw ApiException({ErrorCode::conflict, "set a prior before adding rounds", {}});
        s.add_round(data, confidence);
      });
      auto reply = views::round(updated->rounds().back());
      if (!warnings.empty()) reply["warnings"] = warnings;
      return Reply{201, reply};
    });
  }

  Reply get_session(const std::string& id) {
    return guarded([&] { return Reply{200, views::session_state(*snapshot(id))}; });
  }

  /// round = 0 plots the elicited prior alone; default is the latest round.
  Reply get_plot(const std::string& id, const std::optional<std::string>& round_param,
                 const std::optional<std::string>& points_param) {
    return guarded([&] {
      const auto s = snapshot(id);
      const std::size_t points =
          points_param ? detail::parse_index(*points_param, "points") : config_.grid_points;
      if (points < 2 || points > 100000) {
        throw ApiException({ErrorCode::bad_request, "points must lie in [2, 100000]", {{"field", "points"}}});
      }
      const std::size_t round = round_param ? detail::parse_index(*round_param, "round") : s->rounds().size();
      if (round > s->rounds().size()) {
        throw ApiException({ErrorCode::bad_request,
                            "round must lie in [0, " + std::to_string(s->rounds().size()) + "]",
                            {{"field", "round"}}});
      }
      if (!s->elicitation()) throw ApiException({ErrorCode::conflict, "no prior has been set", {}});
      const Grid grid = make_grid(points, kDefaultGridEpsilon);
      CurveBundle bundle = round == 0
                               ? curves_for_round(s->elicitation()->params, std::nullopt, grid)
                               : curves_for_round(s->rounds()[round - 1].prior_in,
                                                  s->rounds()[round - 1].data, grid);
      auto body = views::curves(bundle);
      body["round"] = round;
      return Reply{200, body};
    });
  }

  /// Body: {datasets: [csv | {label, csv}, ...]}.
  Reply pool_datasets(const std::string& body) {
    return guarded([&] {
      const auto j = detail::parse_body(body);
      if (!j.contains("datasets") || !j.at("datasets").is_array() || j.at("datasets").empty()) {
        throw ApiException({ErrorCode::bad_request, "datasets must be a non-empty array", {{"field", "datasets"}}});
      }
      std::vector<ObservationSet> sets;
      nlohmann::json per_group = nlohmann::json::array();
      std::size_t index = 0;
      for (const auto& item : j.at("datasets")) {
        std::string label = "group " + std::to_string(index + 1);
        std::string csv;
        if (item.is_string()) {
          csv = item.get<std::string>();
        } else if (item.is_object() && item.contains("csv") && item.at("csv").is_string()) {
          csv = item.at("csv").get<std::string>();
          if (item.contains("label") && item.at("label").is_string()) label = item.at("label").get<std::string>();
        } else {
          throw ApiException({ErrorCode::bad_request, "each dataset must be a CSV string or {label, csv}",
                              {{"group_index", index}}});
        }
        auto parsed = parse_csv(csv, label, index);
        const auto counts = to_binomial(parsed.set);
        per_group.push_back({{"label", label}, {"n", counts.n()}, {"y", counts.y()}});
        sets.push_back(std::move(parsed.set));
        ++index;
      }
      const auto total = to_binomial(pool(sets));
      return Reply{200, {{"n", total.n()}, {"y", total.y()}, {"per_group", per_group}}};
    });
  }

  /// Registers routes, CORS handling and JSON error bodies on `server`.
  void mount(httplib::Server& server) {
    const auto send = [](httplib::Response& res, const Reply& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    const auto opt_param = [](const httplib::Request& req, const char* key) -> std::optional<std::string> {
      if (!req.has_param(key)) return std::nullopt;
      return req.get_param_value(key);
    };

    server.Post("/sessions", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, create_session());
    });
    server.Put(R"(/sessions/([^/]+)/prior)", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, put_prior(req.matches[1], req.body));
    });
    server.Post(R"(/sessions/([^/]+)/rounds)", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, post_round(req.matches[1], req.body));
    });
    server.Get(R"(/sessions/([^/]+)/plot)",
               [this, send, opt_param](const httplib::Request& req, httplib::Response& res) {
                 send(res, get_plot(req.matches[1], opt_param(req, "round"), opt_param(req, "points")));
               });
    server.Get(R"(/sessions/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, get_session(req.matches[1]));
    });
    server.Post("/datasets/pool", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, pool_datasets(req.body));
    });
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });

    const std::string origin = config_.cors_origin;
    server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
      if (!origin.empty()) res.set_header("Access-Control-Allow-Origin", origin);
    });
    server.set_error_handler([send](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      const ErrorCode code = res.status == 404 ? ErrorCode::not_found
                             : res.status >= 500 ? ErrorCode::internal
                                                 : ErrorCode::bad_request;
      send(res, error_reply({code, res.status == 404 ? "no such endpoint" : "request failed", {}}));
      return httplib::Server::HandlerResponse::Handled;
    });
    server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
      send(res, error_reply({ErrorCode::internal, "internal error", {}}));
    });
  }

 private:
  template <class F>
  Reply guarded(F&& f) {
    try {
      return f();
    } catch (const ApiException& e) {
      return error_reply(e.error());
    } catch (const ValidationError& e) {
      return error_reply({ErrorCode::bad_request, e.what(), {{"line", e.line()}}});
    } catch (const DomainError& e) {
      return error_reply({ErrorCode::bad_request, e.what(), {}});
    } catch (const std::exception&) {
      return error_reply({ErrorCode::internal, "internal error", {}});
    }
  }

  ParsedObservations parse_csv(const std::string& csv, const std::string& label,
                               std::optional<std::size_t> group_index) {
    const auto with_group = [&](nlohmann::json d) {
      if (group_index) d["group_index"] = *group_index;
      return d;
    };
    try {
      return parse_observations(csv, label);
    } catch (const ValidationError& e) {
      throw ApiException({ErrorCode::bad_request, e.what(), with_group({{"line", e.line()}})});
    } catch (const FormatError& e) {
      throw ApiException({ErrorCode::bad_request, e.what(), with_group({{"line", 1}})});
    }
  }

  std::shared_ptr<std::mutex> lock_for(const std::string& id) {
    std::lock_guard guard(registry_mutex_);
    auto& m = locks_[id];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
  }

  void publish(std::shared_ptr<const ActivitySession> s) {
    std::lock_guard guard(registry_mutex_);
    cache_[s->id()] = std::move(s);
  }

  std::shared_ptr<const ActivitySession> snapshot(const std::string& id) {
    {
      std::lock_guard guard(registry_mutex_);
      if (auto it = cache_.find(id); it != cache_.end()) return it->second;
    }
    std::optional<ActivitySession> loaded;
    try {
      loaded = store_.load(id);
    } catch (const FormatError&) {
      throw ApiException({ErrorCode::internal, "stored session is unreadable", {}});
    }
    if (!loaded) throw ApiException({ErrorCode::not_found, "no session with id '" + id + "'", {}});
    auto shared = std::make_shared<const ActivitySession>(std::move(*loaded));
    std::lock_guard guard(registry_mutex_);
    return cache_.try_emplace(id, shared).first->second;
  }

  template <class F>
  std::shared_ptr<const ActivitySession> mutate(const std::string& id, F&& change) {
    const auto lock = lock_for(id);
    std::lock_guard writer(*lock);
    ActivitySession next = *snapshot(id);
    change(next);
    store_.save(next);
    auto shared = std::make_shared<const ActivitySession>(std::move(next));
    std::lock_guard guard(registry_mutex_);
    cache_[id] = shared;
    return shared;
  }

  ServiceConfig config_;
  SessionStore store_;
  std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::map<std::string, std::shared_ptr<const ActivitySession>> cache_;
};

}  // namespace bayeslab::api
