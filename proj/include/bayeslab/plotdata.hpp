#pragma once

// Grid-evaluated prior / normalised likelihood / posterior densities and
// their table and SVG exports.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bayeslab/conjugate_models.hpp"
#include "bayeslab/errors.hpp"
#include "bayeslab/format.hpp"
#include "bayeslab/special_functions.hpp"

namespace bayeslab {

inline constexpr std::size_t kDefaultGridPoints = 501;
inline constexpr double kDefaultGridEpsilon = 1e-6;

/// Uniform, strictly increasing points on [epsilon, 1 - epsilon].
class Grid {
 public:
  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t count() const noexcept { return points_.size(); }
  double epsilon() const noexcept { return epsilon_; }
  double step() const noexcept { return points_[1] - points_[0]; }

  friend Grid make_grid(std::size_t count, double epsilon);

 private:
  Grid(std::vector<double> points, double epsilon) : points_(std::move(points)), epsilon_(epsilon) {}

  std::vector<double> points_;
  double epsilon_;
};

/// epsilon == 0 selects the default 1e-6. An odd count puts 0.5 exactly at the middle.
inline Grid make_grid(std::size_t count = kDefaultGridPoints, double epsilon = kDefaultGridEpsilon) {
  if (count < 2) throw DomainError("grid needs at least 2 points");
  if (epsilon == 0.0) epsilon = kDefaultGridEpsilon;
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("grid epsilon must lie in (0, 0.5)");
  std::vector<double> pts(count);
  const double span = 1.0 - 2.0 * epsilon;
  const double last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    if (2 * i == count - 1) {
      pts[i] = 0.5;
    } else if (2 * i < count) {
      pts[i] = epsilon + span * (static_cast<double>(i) / last);
    } else {
      pts[i] = 1.0 - (epsilon + span * (static_cast<double>(count - 1 - i) / last));
    }
  }
  pts.back() = 1.0 - epsilon;
  return Grid(std::move(pts), epsilon);
}

struct CurveLabel {
  std::string name;  // "prior", "likelihood" or "posterior"
  BetaParams params;
};

struct CurveBundle {
  Grid grid;
  std::vector<double> prior;
  std::optional<std::vector<double>> likelihood;
  std::optional<std::vector<double>> posterior;
  std::vector<CurveLabel> labels;
};

inline std::vector<double> evaluate_density(const BetaParams& params, const Grid& grid) {
  std::vector<double> values;
  values.reserve(grid.count());
  for (double x : grid.points()) values.push_back(beta_pdf(x, params.alpha(), params.beta()));
  return values;
}

/// Curves for one round. Without data only the prior is present. A round
/// with n = 0 has no likelihood; its posterior equals the prior.
inline CurveBundle curves_for_round(const BetaParams& prior, const std::optional<BinomialData>& data,
                                    const Grid& grid) {
  CurveBundle bundle{grid, evaluate_density(prior, grid), std::nullopt, std::nullopt,
                     {CurveLabel{"prior", prior}}};
  if (!data) return bundle;
  if (data->n() > 0) {
    const BetaParams lik = scaled_likelihood(*data);
    bundle.likelihood = evaluate_density(lik, grid);
    bundle.labels.push_back({"likelihood", lik});
  }
  const BetaParams post = beta_binomial_update(prior, *data);
  bundle.posterior = evaluate_density(post, grid);
  bundle.labels.push_back({"posterior", post});
  return bundle;
}

/// Largest finite pointwise |a - b|.
inline double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DomainError("curves have different lengths");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isfinite(d)) worst = std::max(worst, d);
  }
  return worst;
}

/// Trapezoid rule over the grid points.
inline double trapezoid_area(const Grid& grid, const std::vector<double>& curve) {
  const auto& x = grid.points();
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (curve[i] + curve[i - 1]) * (x[i] - x[i - 1]);
  return area;
}

enum class ExportFormat { table, svg };

inline ExportFormat parse_export_format(const std::string& name) {
  if (name == "csv" || name == "table") return ExportFormat::table;
  if (name == "svg") return ExportFormat::svg;
  throw DomainError("unsupported export format '" + name + "' (expected csv or svg)");
}

namespace detail {

inline std::string curves_to_table(const CurveBundle& b) {
  std::string out = "x,prior,likelihood,posterior\n";
  const auto cell = [](const std::optional<std::vector<double>>& c, std::size_t i) {
    return c ? format_real((*c)[i]) : std::string();
  };
  for (std::size_t i = 0; i < b.grid.count(); ++i) {
    out += format_real(b.grid.points()[i]);
    out += ',' + format_real(b.prior[i]);
    out += ',' + cell(b.likelihood, i);
    out += ',' + cell(b.posterior, i) + '\n';
  }
  return out;
}

inline std::string curves_to_svg(const CurveBundle& b) {
  constexpr double width = 800, height = 500;
  constexpr double left = 60, right = 20, top = 20, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  struct Series {
    const std::vector<double>* values;
    const char* name;
    const char* color;
  };
  std::vector<Series> series{{&b.prior, "prior", "#1b9e77"}};
  if (b.likelihood) series.push_back({&*b.likelihood, "likelihood", "#d95f02"});
  if (b.posterior) series.push_back({&*b.posterior, "posterior", "#7570b3"});

  // Vertical scale from finite values; infinite sentinels are clipped to the top edge.
  double y_max = 0.0;
  for (const auto& s : series) {
    for (double v : *s.values) {
      if (std::isfinite(v)) y_max = std::max(y_max, v);
    }
  }
  y_max = y_max > 0.0 ? y_max * 1.05 : 1.0;

  const auto px = [&](double x) { return left + x * plot_w; };
  const auto py = [&](double y) {
    const double clipped = std::isfinite(y) ? std::min(y, y_max) : y_max;
    return top + plot_h * (1.0 - clipped / y_max);
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  out += "<g stroke=\"black\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + format_real(left) + "\" y1=\"" + format_real(top + plot_h) + "\" x2=\"" +
         format_real(left + plot_w) + "\" y2=\"" + format_real(top + plot_h) + "\"/>\n";
  out += "<line x1=\"" + format_real(left) + "\" y1=\"" + format_real(top) + "\" x2=\"" +
         format_real(left) + "\" y2=\"" + format_real(top + plot_h) + "\"/>\n";
  out += "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = i / 4.0;
    out += "<text x=\"" + format_real(px(x)) + "\" y=\"" + format_real(top + plot_h + 18) +
           "\" text-anchor=\"middle\">" + format_real(x) + "</text>\n";
  }
  out += "<text x=\"" + format_real(left + plot_w / 2) + "\" y=\"" + format_real(height - 8) +
         "\" text-anchor=\"middle\">proportion</text>\n";
  out += "<text x=\"" + format_real(left - 8) + "\" y=\"" + format_real(top + 4) +
         "\" text-anchor=\"end\">" + format_real(y_max) + "</text>\n</g>\n";

  for (const auto& s : series) {
    out += "<polyline fill=\"none\" stroke=\"" + std::string(s.color) +
           "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < b.grid.count(); ++i) {
      if (i) out += ' ';
      out += format_real(px(b.grid.points()[i])) + ',' + format_real(py((*s.values)[i]));
    }
    out += "\"/>\n";
  }

  out += "<g font-family=\"sans-serif\" font-size=\"13\">\n";
  double legend_y = top + 15;
  for (const auto& s : series) {
    std::string text = s.name;
    for (const auto& l : b.labels) {
      if (l.name == s.name) {
        text += " Beta(" + format_real(l.params.alpha()) + ", " + format_real(l.params.beta()) + ")";
      }
    }
    out += "<line x1=\"560\" y1=\"" + format_real(legend_y - 4) + "\" x2=\"590\" y2=\"" +
           format_real(legend_y - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"3\"/>\n";
    out += "<text x=\"598\" y=\"" + format_real(legend_y) + "\">" + text + "</text>\n";
    legend_y += 20;
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace detail

inline std::string export_curves(const CurveBundle& bundle, ExportFormat format) {
  switch (format) {
    case ExportFormat::table:
      return detail::curves_to_table(bundle);
    case ExportFormat::svg:
      return detail::curves_to_svg(bundle);
  }
  throw DomainError("unsupported export format");
}

}  // namespace bayeslab
