#pragma once

// Activity session: a prior elicitation followed by an append-only chain of
// update rounds, where each round's posterior is the next round's prior.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bayeslab/conjugate_models.hpp"
#include "bayeslab/errors.hpp"

namespace bayeslab {

enum class Stage { prior, after_round };

/// Self-reported confidence (0-100 %) at one stage of the activity.
class ConfidenceMark {
 public:
  static ConfidenceMark at_prior(double percent) { return ConfidenceMark(Stage::prior, 0, percent); }
  static ConfidenceMark after_round(std::size_t round, double percent) {
    if (round == 0) throw DomainError("round numbers start at 1");
    return ConfidenceMark(Stage::after_round, round, percent);
  }

  Stage stage() const noexcept { return stage_; }
  /// 0 for the prior stage, otherwise the 1-based round number.
  std::size_t round() const noexcept { return round_; }
  double value() const noexcept { return value_; }

  std::string label() const {
    return stage_ == Stage::prior ? "prior" : "after_round(" + std::to_string(round_) + ")";
  }

  friend bool operator==(const ConfidenceMark&, const ConfidenceMark&) = default;

 private:
  ConfidenceMark(Stage stage, std::size_t round, double value)
      : stage_(stage), round_(round), value_(value) {
    if (!(value >= 0.0 && value <= 100.0)) {
      throw DomainError("confidence must lie in [0, 100], got " + std::to_string(value));
    }
  }

  Stage stage_;
  std::size_t round_;
  double value_;
};

/// What the participant committed to before seeing data. The point estimate
/// and assumptions are kept verbatim and never checked against `params`.
struct PriorElicitation {
  BetaParams params;
  std::optional<Probability> point_estimate;
  std::string assumptions;
  std::optional<ConfidenceMark> confidence;

  friend bool operator==(const PriorElicitation&, const PriorElicitation&) = default;
};

inline PriorElicitation make_elicitation(double alpha, double beta,
                                         std::optional<double> point_estimate = std::nullopt,
                                         std::optional<double> confidence = std::nullopt,
                                         std::string assumptions = {}) {
  PriorElicitation e{BetaParams(alpha, beta), std::nullopt, std::move(assumptions), std::nullopt};
  if (point_estimate) e.point_estimate = Probability(*point_estimate);
  if (confidence) e.confidence = ConfidenceMark::at_prior(*confidence);
  return e;
}

struct UpdateRound {
  std::size_t index;  // 1-based
  BinomialData data;
  BetaParams prior_in;
  BetaParams posterior_out;
  std::optional<ConfidenceMark> confidence;

  friend bool operator==(const UpdateRound&, const UpdateRound&) = default;
};

namespace detail {

inline std::string fresh_session_id() {
  static std::atomic<std::uint64_t> counter{0};
  thread_local std::mt19937_64 engine{[] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }()};
  const std::uint64_t hi = engine() ^ counter.fetch_add(1, std::memory_order_relaxed);
  const std::uint64_t lo = engine();
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

inline std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// Single-writer: callers serialize mutations of one session.
class ActivitySession {
 public:
  ActivitySession(std::string id, std::string created_at)
      : id_(std::move(id)), created_at_(std::move(created_at)) {}

  const std::string& id() const noexcept { return id_; }
  const std::string& created_at() const noexcept { return created_at_; }
  const std::optional<PriorElicitation>& elicitation() const noexcept { return elicitation_; }
  const std::vector<UpdateRound>& rounds() const noexcept { return rounds_; }

  /// Stores (or replaces) the elicited prior. Locked once any round exists.
  void set_prior(PriorElicitation elicitation) {
    if (!rounds_.empty()) {
      throw StateError("prior is locked once data rounds exist; start a new session instead");
    }
    elicitation_ = std::move(elicitation);
  }

  const UpdateRound& add_round(const BinomialData& data,
                               std::optional<double> confidence = std::nullopt) {
    if (!elicitation_) throw StateError("set a prior before adding data rounds");
    const std::size_t index = rounds_.size() + 1;
    std::optional<ConfidenceMark> mark;
    if (confidence) mark = ConfidenceMark::after_round(index, *confidence);
    const BetaParams prior_in = current_posterior();
    rounds_.push_back(UpdateRound{index, data, prior_in, beta_binomial_update(prior_in, data), mark});
    return rounds_.back();
  }

  BetaParams current_posterior() const {
    if (!elicitation_) throw StateError("no prior has been set");
    return rounds_.empty() ? elicitation_->params : rounds_.back().posterior_out;
  }

  /// Marks in stage order; stages without a mark are omitted.
  std::vector<ConfidenceMark> confidence_trajectory() const {
    std::vector<ConfidenceMark> marks;
    if (elicitation_ && elicitation_->confidence) marks.push_back(*elicitation_->confidence);
    for (const auto& r : rounds_) {
      if (r.confidence) marks.push_back(*r.confidence);
    }
    return marks;
  }

  BinomialData cumulative_data() const {
    BinomialData total;
    for (const auto& r : rounds_) total = total + r.data;
    return total;
  }

  friend bool operator==(const ActivitySession&, const ActivitySession&) = default;

 private:
  std::string id_;
  std::string created_at_;
  std::optional<PriorElicitation> elicitation_;
  std::vector<UpdateRound> rounds_;
};

inline ActivitySession create_session() {
  return ActivitySession(detail::fresh_session_id(), detail::utc_timestamp_now());
}

}  // namespace bayeslab
