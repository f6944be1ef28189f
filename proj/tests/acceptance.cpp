// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bayeslab/api_service.hpp"
#include "bayeslab/conjugate_models.hpp"
#include "bayeslab/ingest.hpp"
#include "bayeslab/plotdata.hpp"
#include "bayeslab/script.hpp"
#include "support/oracles.hpp"

using namespace bayeslab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kRoundTripTol = 1e-8;
constexpr double kSimpsonTol = 1e-8;
constexpr double kPmfTol = 1e-12;
constexpr double kC1Seconds = 1.0;
constexpr double kC3Seconds = 30.0;
constexpr double kIntervalOverlapMin = 0.90;
constexpr std::uint64_t kSeed = 20211;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ObservationSet group(int k) {
  const auto path = std::string(BAYESLAB_TEST_DATA) + "/group" + std::to_string(k) + ".csv";
  return parse_observations(read_text_file(path), "group" + std::to_string(k)).set;
}

Outcome conjugate_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    // (0, 100]: 100 * (1 - u) with u in [0, 1)
    const double a = 100.0 * (1.0 - unit(rng));
    const double b = 100.0 * (1.0 - unit(rng));
    const Count n = std::uniform_int_distribution<Count>(0, 500)(rng);
    const Count y = std::uniform_int_distribution<Count>(0, n)(rng);
    const BetaParams post = beta_binomial_update(BetaParams(a, b), BinomialData(n, y));
    if (post.alpha() != a + static_cast<double>(y) || post.beta() != b + static_cast<double>(n - y)) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < kC1Seconds,
          fmt("mismatches %.0f of 1000, %.4f s (limit %.0f s)", static_cast<double>(mismatches), elapsed, kC1Seconds)};
}

Outcome sequential_equals_batch() {
  std::mt19937_64 rng(kSeed + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const BetaParams prior(100.0 * (1.0 - unit(rng)), 100.0 * (1.0 - unit(rng)));
    const Count n = std::uniform_int_distribution<Count>(0, 500)(rng);
    const Count y = std::uniform_int_distribution<Count>(0, n)(rng);
    // random split of the n trials into rounds, successes distributed by a random order
    std::vector<bool> outcomes(n, false);
    std::fill(outcomes.begin(), outcomes.begin() + static_cast<std::ptrdiff_t>(y), true);
    std::shuffle(outcomes.begin(), outcomes.end(), rng);
    const int rounds = std::uniform_int_distribution<int>(1, 10)(rng);
    std::vector<std::size_t> cuts{0, n};
    for (int r = 1; r < rounds; ++r) cuts.push_back(std::uniform_int_distribution<std::size_t>(0, n)(rng));
    std::sort(cuts.begin(), cuts.end());
    BetaParams chained = prior;
    for (std::size_t k = 1; k < cuts.size(); ++k) {
      const auto begin = outcomes.begin() + static_cast<std::ptrdiff_t>(cuts[k - 1]);
      const auto end = outcomes.begin() + static_cast<std::ptrdiff_t>(cuts[k]);
      chained = beta_binomial_update(
          chained, BinomialData(cuts[k] - cuts[k - 1], static_cast<Count>(std::count(begin, end, true))));
    }
    const BetaParams batch = beta_binomial_update(prior, BinomialData(n, y));
    if (chained.alpha() != batch.alpha() || chained.beta() != batch.beta()) ++mismatches;
  }
  return {mismatches == 0, fmt("mismatches %.0f of 1000 (exact equality)", static_cast<double>(mismatches))};
}

Outcome special_function_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  const double lattice[] = {0.5, 1, 2, 5, 20, 100};
  double round_trip = 0.0;
  for (double a : lattice) {
    for (double b : lattice) {
      for (int i = 1; i <= 999; ++i) {
        const double x = i / 1000.0;
        // Lower tail directly, upper tail through the reflected distribution
        // so the probability argument keeps full relative precision.
        const double p = beta_cdf(x, a, b);
        const double back = p <= 0.5 ? beta_quantile(p, a, b) : 1.0 - beta_quantile(beta_cdf(1.0 - x, b, a), b, a);
        round_trip = std::max(round_trip, std::abs(back - x));
      }
    }
  }
  double simpson = 0.0;
  for (double a : {0.5, 1.0, 2.0, 5.0, 20.0, 50.0}) {
    for (double b : {0.5, 1.0, 2.0, 5.0, 20.0, 50.0}) {
      for (double x : {0.05, 0.25, 0.5, 0.75, 0.95}) {
        simpson = std::max(simpson, std::abs(beta_cdf(x, a, b) - oracle::beta_cdf_by_quadrature(x, a, b)));
      }
    }
  }
  double pmf = 0.0;
  for (Count n = 0; n <= 60; ++n) {
    for (double p : {0.001, 0.1, 0.25, 0.5, 0.75, 0.9, 0.999}) {
      double total = 0.0;
      for (Count y = 0; y <= n; ++y) total += std::exp(binomial_log_pmf(y, n, p));
      pmf = std::max(pmf, std::abs(total - 1.0));
    }
  }
  const double elapsed = seconds_since(t0);
  const bool pass = round_trip <= kRoundTripTol && simpson <= kSimpsonTol && pmf <= kPmfTol && elapsed < kC3Seconds;
  return {pass, fmt("round-trip %.2e, cdf vs Simpson %.2e, ", round_trip, simpson) +
                    fmt("pmf sum %.2e, %.2f s", pmf, elapsed)};
}

Outcome scenario_replication() {
  const auto script = load_script(std::string(BAYESLAB_SAMPLES) + "/lights_activity.json");
  const ActivitySession s = run_script(script);
  if (!s.elicitation() || s.rounds().size() < 3) return {false, "script did not produce three rounds"};
  const BetaParams prior = s.elicitation()->params;
  const auto& r = s.rounds();
  const Count group_total = r[0].data.n() + r[1].data.n();
  const BinomialData cumulative = s.cumulative_data();

  const bool setup = prior == BetaParams(2, 2) && r[0].data.n() == 5 && group_total >= 48 && group_total <= 57 &&
                     cumulative.n() == 205;
  const BetaParams one_shot = beta_binomial_update(prior, cumulative);
  const bool chained = s.current_posterior().alpha() == one_shot.alpha() &&
                       s.current_posterior().beta() == one_shot.beta();
  const double a = prior.alpha(), b = prior.beta();
  const double bound = (a + b) / (a + b + 205.0);
  const double gap = std::abs(beta_summary(s.current_posterior()).mean - static_cast<double>(cumulative.y()) / 205.0);
  return {setup && chained && gap <= bound,
          fmt("rounds n=%.0f, group %.0f, class %.0f; ", static_cast<double>(r[0].data.n()), static_cast<double>(group_total),
              static_cast<double>(cumulative.n())) +
              fmt("|mean - y/n| = %.5f <= %.5f; chained == one-shot: ", gap, bound) + (chained ? "yes" : "no")};
}

Outcome convergence() {
  const Grid g = make_grid();
  const BetaParams prior(5, 5);
  std::vector<double> distances;
  for (Count n : {5u, 50u, 205u}) {
    const BinomialData d(n, static_cast<Count>(std::llround(0.4 * static_cast<double>(n))));
    const auto bundle = curves_for_round(prior, d, g);
    distances.push_back(sup_distance(*bundle.posterior, *bundle.likelihood));
  }
  // n = 205 gives y = 82, exactly 0.4 of n
  const bool pass = distances[0] > distances[1] && distances[1] > distances[2];
  return {pass, fmt("sup distance %.4f > %.4f > %.4f", distances[0], distances[1], distances[2])};
}

Outcome prior_insensitivity() {
  const std::vector<ObservationSet> groups{group(1), group(2), group(3), group(4)};
  const BinomialData pooled = to_binomial(pool(groups));
  const BetaParams flat = beta_binomial_update(BetaParams(1, 1), pooled);
  const BetaParams informed = beta_binomial_update(BetaParams(5, 5), pooled);
  const double mean_gap = std::abs(beta_summary(flat).mean - beta_summary(informed).mean);
  const auto i1 = credible_interval(flat, 0.95);
  const auto i2 = credible_interval(informed, 0.95);
  const double overlap = std::max(0.0, std::min(i1.upper, i2.upper) - std::max(i1.lower, i2.lower));
  const double uni = std::max(i1.upper, i2.upper) - std::min(i1.lower, i2.lower);
  const double ratio = overlap / uni;
  const double bound = 10.0 / 215.0;
  return {pooled.n() == 205 && mean_gap <= bound && ratio >= kIntervalOverlapMin,
          fmt("y=%.0f of 205, mean gap %.5f <= %.5f", static_cast<double>(pooled.y()), mean_gap, bound) +
              fmt(", interval overlap %.4f >= %.2f", ratio, kIntervalOverlapMin)};
}

Outcome ingestion() {
  const std::vector<ObservationSet> groups{group(1), group(2), group(3), group(4)};
  const bool sizes = groups[0].size() == 50 && groups[1].size() == 52 && groups[2].size() == 48 && groups[3].size() == 55;
  const bool pooled = to_binomial(pool(groups)).n() == 205;

  bool line_numbers = false;
  try {
    parse_observations("room_id,lights_on\nA101,1\nA102,1\nA103,maybe\n", "bad");
  } catch (const ValidationError& e) {
    line_numbers = e.line() == 4;
  }

  bool round_trip = true;
  for (const auto& g : groups) {
    const auto text = serialize_observations(g);
    const auto again = parse_observations(text, g.group_label).set;
    round_trip = round_trip && again == g && serialize_observations(again) == text;
  }
  std::mt19937_64 rng(kSeed + 7);
  for (int t = 0; t < 200 && round_trip; ++t) {
    ObservationSet s{"random", {}};
    const int rows = std::uniform_int_distribution<int>(0, 30)(rng);
    for (int r = 0; r < rows; ++r) {
      std::string id = "R" + std::to_string(rng() % 1000);
      if (rng() % 4 == 0) id += ", wing \"" + std::to_string(r) + "\"";
      s.observations.push_back({id, static_cast<bool>(rng() & 1)});
    }
    const auto text = serialize_observations(s);
    round_trip = parse_observations(text, "random").set == s;
  }
  return {sizes && pooled && line_numbers && round_trip,
          std::string("group sizes 50/52/48/55: ") + (sizes ? "yes" : "no") + ", pooled n=205: " +
              (pooled ? "yes" : "no") + ", line-numbered error: " + (line_numbers ? "yes" : "no") +
              ", round-trip identity: " + (round_trip ? "yes" : "no")};
}

// Minimal HTTP conformance run against the service on a loopback port.
class Conformance {
 public:
  explicit Conformance(fs::path dir) : dir_(std::move(dir)) { start(); }
  ~Conformance() { stop(); }

  void restart() {
    stop();
    start();
  }

  void expect(const std::string& what, int status, int want, const json& body = nullptr,
              const std::string& code = "") {
    bool ok = status == want;
    if (ok && !code.empty()) ok = body.contains("error") && body["error"]["code"] == code;
    if (!ok) failures_.push_back(what + " -> " + std::to_string(status));
    ++checks_;
  }

  std::pair<int, json> request(const std::string& method, const std::string& path, const json& payload = nullptr) {
    httplib::Client c("127.0.0.1", port_);
    const std::string text = payload.is_null() ? "" : payload.dump();
    httplib::Result r = method == "GET"    ? c.Get(path)
                        : method == "PUT"  ? c.Put(path, text, "application/json")
                                           : c.Post(path, text, "application/json");
    if (!r) return {0, nullptr};
    return {r->status, r->body.empty() ? json() : json::parse(r->body, nullptr, false)};
  }

  const std::vector<std::string>& failures() const { return failures_; }
  int checks() const { return checks_; }

 private:
  void start() {
    api::ServiceConfig cfg;
    cfg.data_dir = dir_.string();
    service_ = std::make_unique<api::ApiService>(cfg);
    server_ = std::make_unique<httplib::Server>();
    service_->mount(*server_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }
  void stop() {
    if (!server_) return;
    server_->stop();
    thread_.join();
    server_.reset();
    service_.reset();
  }

  fs::path dir_;
  std::unique_ptr<api::ApiService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::vector<std::string> failures_;
  int checks_ = 0;
};

Outcome api_contract() {
  const auto dir = fs::temp_directory_path() / ("bayeslab-acceptance-" + std::to_string(std::random_device{}()));
  std::vector<std::string> failures;
  int checks = 0;
  {
    Conformance t(dir);
    auto [st, created] = t.request("POST", "/sessions");
    t.expect("create session", st, 201);
    const std::string id = created.value("id", "");
    const std::string base = "/sessions/" + id;

    auto r = t.request("POST", base + "/rounds", {{"n", 5}, {"y", 3}});
    t.expect("round before prior", r.first, 409, r.second, "conflict");
    r = t.request("PUT", base + "/prior", {{"alpha", 0}, {"beta", 1}});
    t.expect("alpha <= 0", r.first, 400, r.second, "bad_request");
    r = t.request("PUT", base + "/prior", {{"alpha", 1}, {"beta", 1}, {"estimate", 2}});
    t.expect("estimate outside [0,1]", r.first, 400, r.second, "bad_request");
    r = t.request("PUT", base + "/prior", {{"alpha", 1}, {"beta", 1}, {"confidence", 60}});
    t.expect("set prior", r.first, 200);
    r = t.request("POST", base + "/rounds", {{"n", 5}, {"y", 7}});
    t.expect("y > n", r.first, 400, r.second, "bad_request");
    r = t.request("POST", base + "/rounds", {{"observations_csv", "room_id,lights_on\nA,1\nB,2\n"}});
    t.expect("malformed csv", r.first, 400, r.second, "bad_request");
    if (r.second.is_object() && r.second["error"]["detail"]["line"] != 3) t.expect("csv error line", 0, 1);
    r = t.request("POST", base + "/rounds", {{"n", 5}, {"y", 3}, {"confidence", 70}});
    t.expect("add round", r.first, 201);
    if (r.second["posterior_out"] != json{{"alpha", 4.0}, {"beta", 3.0}}) t.expect("posterior Beta(4,3)", 0, 1);
    r = t.request("PUT", base + "/prior", {{"alpha", 2}, {"beta", 2}});
    t.expect("prior after round", r.first, 409, r.second, "conflict");
    r = t.request("GET", base + "/plot");
    t.expect("plot", r.first, 200);
    if (r.first == 200 && r.second["posterior"] != r.second["likelihood"]) t.expect("flat-prior curves equal", 0, 1);
    r = t.request("GET", base + "/plot?round=9");
    t.expect("plot round out of range", r.first, 400, r.second, "bad_request");
    r = t.request("GET", "/sessions/doesnotexist");
    t.expect("unknown session", r.first, 404, r.second, "not_found");
    r = t.request("POST", "/datasets/pool",
                  {{"datasets", {read_text_file(std::string(BAYESLAB_TEST_DATA) + "/group1.csv"),
                                 read_text_file(std::string(BAYESLAB_TEST_DATA) + "/group2.csv"),
                                 read_text_file(std::string(BAYESLAB_TEST_DATA) + "/group3.csv"),
                                 read_text_file(std::string(BAYESLAB_TEST_DATA) + "/group4.csv")}}});
    t.expect("pool", r.first, 200);
    if (r.second.value("n", 0) != 205) t.expect("pool n=205", 0, 1);

    const auto before = t.request("GET", base).second;
    t.restart();
    r = t.request("GET", base);
    t.expect("state after restart", r.first, 200);
    if (r.second != before) t.expect("state identical after restart", 0, 1);
    failures = t.failures();
    checks = t.checks();
  }
  fs::remove_all(dir);
  std::string detail = std::to_string(checks - static_cast<int>(failures.size())) + "/" + std::to_string(checks) +
                       " endpoint checks";
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 conjugate correctness", conjugate_correctness},
      {"2 sequential equals batch", sequential_equals_batch},
      {"3 special-function oracles", special_function_oracles},
      {"4 classroom scenario replication", scenario_replication},
      {"5 posterior approaches likelihood", convergence},
      {"6 prior insensitivity at n=205", prior_insensitivity},
      {"7 ingestion", ingestion},
      {"8 API contract", api_contract},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %-36s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
