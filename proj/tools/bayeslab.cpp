// bayeslab: batch updates, plot export, scripted activity replay and
// self-verification.
//
// Exit codes: 0 success, 2 usage or validation error, 1 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bayeslab/conjugate_models.hpp"
#include "bayeslab/errors.hpp"
#include "bayeslab/format.hpp"
#include "bayeslab/plotdata.hpp"
#include "bayeslab/script.hpp"
#include "bayeslab/self_check.hpp"
#include "bayeslab/views.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

using bayeslab::format_real;

std::string beta_text(const bayeslab::BetaParams& p) {
  return "Beta(" + format_real(p.alpha()) + "," + format_real(p.beta()) + ")";
}

void print_summary(std::ostream& out, const bayeslab::BetaParams& p, double level) {
  const auto s = bayeslab::beta_summary(p);
  const auto ci = bayeslab::credible_interval(p, level);
  out << "  mean " << format_real(s.mean) << '\n';
  out << "  mode " << (s.mode ? format_real(*s.mode) : std::string("none")) << '\n';
  out << "  variance " << format_real(s.variance) << '\n';
  out << "  sd " << format_real(s.sd) << '\n';
  out << "  " << format_real(level * 100) << "% interval [" << format_real(ci.lower) << ", "
      << format_real(ci.upper) << "]\n";
}

std::vector<bayeslab::BinomialData> pair_rounds(const std::vector<long long>& ns,
                                                const std::vector<long long>& ys) {
  if (ns.size() != ys.size()) throw bayeslab::DomainError("--n and --y must be given the same number of times");
  std::vector<bayeslab::BinomialData> rounds;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 0 || ys[i] < 0) throw bayeslab::DomainError("counts must be non-negative");
    rounds.emplace_back(static_cast<bayeslab::Count>(ns[i]), static_cast<bayeslab::Count>(ys[i]));
  }
  return rounds;
}

struct UpdateArgs {
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<long long> n;
  std::vector<long long> y;
  double level = 0.95;
};

int cmd_update(const UpdateArgs& args) {
  bayeslab::BetaParams current(args.alpha, args.beta);
  const auto rounds = pair_rounds(args.n, args.y);
  std::cout << "prior " << beta_text(current) << '\n';
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    current = bayeslab::beta_binomial_update(current, rounds[i]);
    std::cout << "round " << i + 1 << ": n=" << rounds[i].n() << " y=" << rounds[i].y() << " -> "
              << beta_text(current) << '\n';
  }
  std::cout << "posterior " << beta_text(current) << '\n';
  print_summary(std::cout, current, args.level);
  return kExitOk;
}

struct PlotArgs {
  double alpha = 1.0;
  double beta = 1.0;
  std::optional<long long> n;
  std::optional<long long> y;
  std::size_t points = bayeslab::kDefaultGridPoints;
  std::string out = "-";
  std::string format = "csv";
};

int cmd_plot(const PlotArgs& args) {
  const bayeslab::BetaParams prior(args.alpha, args.beta);
  if (args.n.has_value() != args.y.has_value()) throw bayeslab::DomainError("--n and --y go together");
  std::optional<bayeslab::BinomialData> data;
  if (args.n) data = pair_rounds({*args.n}, {*args.y}).front();
  const auto format = bayeslab::parse_export_format(args.format);
  const auto grid = bayeslab::make_grid(args.points, bayeslab::kDefaultGridEpsilon);
  const std::string text = bayeslab::export_curves(bayeslab::curves_for_round(prior, data, grid), format);
  if (args.out == "-") {
    std::cout << text;
  } else {
    std::ofstream file(args.out, std::ios::binary);
    if (!file) throw bayeslab::FormatError("cannot write '" + args.out + "'");
    file << text;
  }
  return kExitOk;
}

int cmd_run(const std::string& path, bool json) {
  const auto session = bayeslab::run_script(bayeslab::load_script(path));
  if (json) {
    std::cout << bayeslab::views::activity_report(session).dump(2) << '\n';
    return kExitOk;
  }
  if (!session.elicitation()) {
    std::cout << "no prior set\n";
    return kExitOk;
  }
  const auto& e = *session.elicitation();
  std::cout << "prior " << beta_text(e.params) << '\n';
  if (e.point_estimate) std::cout << "  point estimate " << format_real(e.point_estimate->value()) << '\n';
  if (!e.assumptions.empty()) std::cout << "  assumptions " << e.assumptions << '\n';
  print_summary(std::cout, e.params, bayeslab::views::kReportedLevel);
  for (const auto& r : session.rounds()) {
    std::cout << "round " << r.index << ": n=" << r.data.n() << " y=" << r.data.y() << " prior "
              << beta_text(r.prior_in) << " -> posterior " << beta_text(r.posterior_out) << '\n';
    print_summary(std::cout, r.posterior_out, bayeslab::views::kReportedLevel);
  }
  const auto total = session.cumulative_data();
  std::cout << "cumulative n=" << total.n() << " y=" << total.y() << '\n';
  std::cout << "posterior " << beta_text(session.current_posterior()) << '\n';
  std::cout << "confidence";
  const auto marks = session.confidence_trajectory();
  if (marks.empty()) std::cout << " none";
  for (const auto& m : marks) std::cout << ' ' << m.label() << '=' << format_real(m.value());
  std::cout << '\n';
  return kExitOk;
}

int cmd_check(double tolerance_scale) {
  bool ok = true;
  for (const auto& r : bayeslab::run_self_check(tolerance_scale)) {
    std::printf("%-4s %-30s max error %-12s tolerance %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                format_real(r.max_error).c_str(), format_real(r.tolerance).c_str());
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beta-Binomial updating, plotting and activity replay"};
  app.require_subcommand(1);

  UpdateArgs update;
  auto* update_cmd = app.add_subcommand("update", "Apply one or more data rounds to a Beta prior");
  update_cmd->add_option("--alpha", update.alpha, "Prior alpha")->required();
  update_cmd->add_option("--beta", update.beta, "Prior beta")->required();
  update_cmd->add_option("--n", update.n, "Number of observations (repeat per round)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  update_cmd->add_option("--y", update.y, "Number of specified outcomes (repeat per round)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  update_cmd->add_option("--level", update.level, "Credible level")->capture_default_str();

  PlotArgs plot;
  long long plot_n = 0, plot_y = 0;
  auto* plot_cmd = app.add_subcommand("plot", "Export prior/likelihood/posterior curves");
  plot_cmd->add_option("--alpha", plot.alpha, "Prior alpha")->required();
  plot_cmd->add_option("--beta", plot.beta, "Prior beta")->required();
  auto* plot_n_opt = plot_cmd->add_option("--n", plot_n, "Number of observations");
  auto* plot_y_opt = plot_cmd->add_option("--y", plot_y, "Number of specified outcomes");
  plot_cmd->add_option("--points", plot.points, "Grid points")->capture_default_str();
  plot_cmd->add_option("--out", plot.out, "Output file ('-' for stdout)")->capture_default_str();
  plot_cmd->add_option("--format", plot.format, "csv or svg")->capture_default_str();

  std::string script_path;
  bool run_json = false;
  auto* run_cmd = app.add_subcommand("run", "Replay a scripted activity");
  run_cmd->add_option("script", script_path, "Script file (JSON)")->required();
  run_cmd->add_flag("--json", run_json, "Print the report as JSON");

  double tolerance_scale = 1.0;
  auto* check_cmd = app.add_subcommand("check", "Run the built-in numerical oracles");
  check_cmd->add_option("--tolerance-scale", tolerance_scale, "Multiply oracle tolerances (testing aid)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*update_cmd) return cmd_update(update);
    if (*plot_cmd) {
      if (*plot_n_opt) plot.n = plot_n;
      if (*plot_y_opt) plot.y = plot_y;
      return cmd_plot(plot);
    }
    if (*run_cmd) return cmd_run(script_path, run_json);
    if (*check_cmd) return cmd_check(tolerance_scale);
  } catch (const bayeslab::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const bayeslab::StateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const bayeslab::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const bayeslab::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
