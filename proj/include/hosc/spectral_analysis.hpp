#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hosc/eigensolver.hpp"
#include "hosc/errors.hpp"
#include "hosc/grid.hpp"
#include "hosc/vector_ops.hpp"

namespace hosc {

struct FilterSettings {
  double shell_fraction = 0.1;
  double mass_threshold = 1e-4;

  void validate() const {
    require(shell_fraction > 0.0 && shell_fraction < 1.0, "filter: shell_fraction must lie in (0, 1)");
    require(mass_threshold >= 0.0 && mass_threshold <= 1.0, "filter: mass_threshold must lie in [0, 1]");
  }
};

struct FitWindow {
  int skip = 10;
  int use = 0;  // 0: everything after skip
  void validate() const { require(skip >= 0 && use >= 0, "fit window: skip and use must be nonnegative"); }
};

/// Number of grid layers along `axis` within shell_fraction * L of a face.
inline int shell_layers(const GridSpec& g, int axis, double shell_fraction) {
  const double reach = shell_fraction * g.half_extent[static_cast<std::size_t>(axis)];
  const double h = g.spacing(axis);
  int layers = 0;
  while (layers < g.points[static_cast<std::size_t>(axis)] && (layers + 1) * h <= reach * (1.0 + 1e-12)) ++layers;
  return layers;
}

/// Squared mass of v on grid points whose distance to some face is at most
/// shell_fraction * L along that axis.
inline double boundary_mass(const GridSpec& g, std::span<const double> v, double shell_fraction) {
  if (!(shell_fraction > 0.0 && shell_fraction < 1.0))
    throw InvalidArgument("boundary_mass: shell_fraction must lie in (0, 1)");
  require_size(v.size(), g.size(), "boundary_mass vector");
  const double nrm = norm2(v);
  require(std::abs(nrm - 1.0) <= 1e-8, "boundary_mass: vector must have unit norm");
  std::vector<int> layers(static_cast<std::size_t>(g.axes()));
  for (int a = 0; a < g.axes(); ++a) layers[static_cast<std::size_t>(a)] = shell_layers(g, a, shell_fraction);
  double mass = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(g.axes()), 0);
  for (std::size_t p = 0; p < v.size(); ++p) {
    bool in_shell = false;
    for (int a = 0; a < g.axes() && !in_shell; ++a)
      in_shell = g.layers_inside(a, idx[static_cast<std::size_t>(a)]) < layers[static_cast<std::size_t>(a)];
    if (in_shell) mass += v[p] * v[p];
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (++idx[a] < g.points[a]) break;
      idx[a] = 0;
    }
  }
  return std::min(1.0, mass);
}

/// #{s : values_s <= lambda}; values must be ascending.
inline std::size_t counting_function(std::span<const double> values, double lambda) {
  return static_cast<std::size_t>(std::upper_bound(values.begin(), values.end(), lambda) - values.begin());
}

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double reference = 0.0;
  double ols_slope = 0.0;  // ordinary least squares, for comparison
  double r_squared = 0.0;
  double rms_residual = 0.0;
  std::size_t skip = 0;
  std::size_t count = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::string warning;
};

namespace detail {

// Reduced-major-axis line through (x, y): slope sign(cov) * sd(y) / sd(x).
// Swapping x and y inverts the slope exactly.
inline FitResult rma_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  // Spreads at rounding level of the means count as constant.
  auto negligible = [n](double ss, double mean) { return ss <= n * std::pow(1e-14 * std::max(1.0, std::abs(mean)), 2); };
  if (negligible(sxx, mx)) sxx = 0.0;
  if (negligible(syy, my)) syy = 0.0;
  FitResult f;
  f.count = x.size();
  if (sxx == 0.0) {
    f.slope = syy == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    f.ols_slope = f.slope;
    f.intercept = std::numeric_limits<double>::quiet_NaN();
    f.warning = "degenerate fit: abscissa is constant";
    return f;
  }
  if (syy == 0.0) {
    f.slope = 0.0;
    f.ols_slope = 0.0;
    f.intercept = my;
    f.warning = "degenerate fit: ordinate is constant";
    return f;
  }
  const double sign = sxy > 0.0 ? 1.0 : (sxy < 0.0 ? -1.0 : 0.0);
  f.slope = sign * std::sqrt(syy / sxx);
  f.intercept = my - f.slope * mx;
  f.ols_slope = sxy / sxx;
  f.r_squared = (sxy * sxy) / (sxx * syy);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

struct LogWindow {
  std::vector<double> log_s, log_lambda;
  std::size_t skip;
  double lo, hi;
};

inline LogWindow log_window(std::span<const double> values, const FitWindow& w) {
  w.validate();
  const auto skip = static_cast<std::size_t>(w.skip);
  const std::size_t avail = values.size() > skip ? values.size() - skip : 0;
  const std::size_t use = w.use == 0 ? avail : std::min(avail, static_cast<std::size_t>(w.use));
  if (use < 20 || (w.use != 0 && static_cast<std::size_t>(w.use) > avail))
    throw InsufficientData("exponent fit needs at least 20 values after skipping " + std::to_string(skip) + ", have " +
                           std::to_string(avail));
  LogWindow lw{{}, {}, skip, values[skip], values[skip + use - 1]};
  for (std::size_t i = skip; i < skip + use; ++i) {
    if (!(values[i] > 0.0)) throw InvalidArgument("exponent fit needs positive values");
    if (i > 0 && values[i] < values[i - 1]) throw InvalidArgument("exponent fit needs ascending values");
    lw.log_s.push_back(std::log(static_cast<double>(i + 1)));
    lw.log_lambda.push_back(std::log(values[i]));
  }
  return lw;
}

}  // namespace detail

inline double counting_reference(int n) { return (6.0 * n + 3.0) / 2.0; }
inline double magnitude_reference(int n) { return 2.0 / (6.0 * n + 3.0); }

/// Slope of log N(lambda_s) = log s against log lambda_s, s the 1-based rank.
inline FitResult fit_counting_exponent(std::span<const double> values, const FitWindow& w = {}, int n = 1) {
  const detail::LogWindow lw = detail::log_window(values, w);
  FitResult f = detail::rma_fit(lw.log_lambda, lw.log_s);
  f.reference = counting_reference(n);
  f.skip = lw.skip;
  f.lambda_min = lw.lo;
  f.lambda_max = lw.hi;
  return f;
}

/// Slope of log lambda_s against log s.
inline FitResult fit_eigenvalue_exponent(std::span<const double> values, const FitWindow& w = {}, int n = 1) {
  const detail::LogWindow lw = detail::log_window(values, w);
  FitResult f = detail::rma_fit(lw.log_s, lw.log_lambda);
  f.reference = magnitude_reference(n);
  f.skip = lw.skip;
  f.lambda_min = lw.lo;
  f.lambda_max = lw.hi;
  return f;
}

/// max_{i,j} |<v_i, v_j> - delta_ij|.
inline double gram_defect(const std::vector<std::vector<double>>& vs) {
  double d = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i; j < vs.size(); ++j) {
      require_size(vs[j].size(), vs[i].size(), "gram_defect");
      d = std::max(d, std::abs(dot(vs[i], vs[j]) - (i == j ? 1.0 : 0.0)));
    }
  }
  return d;
}

struct Multiplet {
  std::size_t first = 0;  // index into the value list
  std::size_t size = 0;
  double value = 0.0;
};

/// Runs of consecutive values whose gaps are below rel_tol * value.
inline std::vector<Multiplet> multiplets(std::span<const double> values, double rel_tol = 1e-8) {
  std::vector<Multiplet> out;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i + 1;
    while (j < values.size() && values[j] - values[j - 1] < rel_tol * std::abs(values[j])) ++j;
    out.push_back({i, j - i, values[i]});
    i = j;
  }
  return out;
}

struct CountingSample {
  double lambda;
  std::size_t count;
};

/// One sample per distinct value: (lambda, N(lambda)).
inline std::vector<CountingSample> counting_samples(std::span<const double> values) {
  std::vector<CountingSample> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], i + 1});
  }
  return out;
}

struct SpectrumReport {
  std::string assembly;
  GridSpec grid;
  FilterSettings filter;
  FitWindow window;
  std::vector<double> values;
  std::vector<double> residuals;
  std::vector<double> boundary_masses;
  std::vector<std::size_t> accepted;  // indices into values
  std::vector<CountingSample> counting;
  std::vector<Multiplet> accepted_multiplets;
  bool fits_available = false;
  FitResult count_fit, mag_fit;
  std::string fit_error;
  double accepted_gram_defect = 0.0;
  double min_accepted = 0.0;
  bool solver_complete = false;
  std::string solver_diagnostic;
  std::size_t cg_iterations = 0;
  int restarts = 0;

  std::vector<double> accepted_values() const {
    std::vector<double> v;
    for (std::size_t i : accepted) v.push_back(values[i]);
    return v;
  }
};

/// Accepted indices: boundary mass at or below the threshold.
inline std::vector<std::size_t> accepted_indices(std::span<const double> masses, const FilterSettings& f) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < masses.size(); ++i)
    if (masses[i] <= f.mass_threshold) idx.push_back(i);
  return idx;
}

inline SpectrumReport analyze_spectrum(const GridSpec& g, const EigenResult& r, const FilterSettings& filter,
                                       const FitWindow& window, std::string assembly = "sos") {
  filter.validate();
  SpectrumReport rep;
  rep.assembly = std::move(assembly);
  rep.grid = g;
  rep.filter = filter;
  rep.window = window;
  rep.solver_complete = r.complete;
  rep.solver_diagnostic = r.diagnostic;
  rep.cg_iterations = r.cg_iterations;
  rep.restarts = r.restarts;
  for (const EigenPair& p : r.pairs) {
    rep.values.push_back(p.value);
    rep.residuals.push_back(p.residual);
    rep.boundary_masses.push_back(boundary_mass(g, p.vector, filter.shell_fraction));
  }
  rep.accepted = accepted_indices(rep.boundary_masses, filter);
  const std::vector<double> acc = rep.accepted_values();
  rep.counting = counting_samples(acc);
  rep.accepted_multiplets = multiplets(acc);
  rep.min_accepted = acc.empty() ? 0.0 : acc.front();
  std::vector<std::vector<double>> vecs;
  for (std::size_t i : rep.accepted) vecs.push_back(r.pairs[i].vector);
  rep.accepted_gram_defect = gram_defect(vecs);
  try {
    rep.count_fit = fit_counting_exponent(acc, window, g.n);
    rep.mag_fit = fit_eigenvalue_exponent(acc, window, g.n);
    rep.fits_available = true;
  } catch (const InsufficientData& e) {
    rep.fit_error = e.what();
  }
  return rep;
}

inline nlohmann::json to_json(const FitResult& f) {
  nlohmann::json j{{"slope", f.slope},         {"reference", f.reference},       {"intercept", f.intercept},
                   {"ols_slope", f.ols_slope}, {"r_squared", f.r_squared},       {"rms_residual", f.rms_residual},
                   {"skip", f.skip},           {"count", f.count},               {"lambda_min", f.lambda_min},
                   {"lambda_max", f.lambda_max}};
  if (!f.warning.empty()) j["warning"] = f.warning;
  return j;
}

inline nlohmann::json to_json(const SpectrumReport& r) {
  nlohmann::json j;
  j["assembly"] = r.assembly;
  j["grid"] = r.grid;
  j["filter"] = {{"shell_fraction", r.filter.shell_fraction}, {"mass_threshold", r.filter.mass_threshold}};
  j["fit_window"] = {{"skip", r.window.skip}, {"use", r.window.use}};
  j["solver"] = {{"complete", r.solver_complete},
                 {"diagnostic", r.solver_diagnostic},
                 {"cg_iterations", r.cg_iterations},
                 {"restarts", r.restarts}};
  j["eigenvalues"] = r.values;
  j["residuals"] = r.residuals;
  j["boundary_masses"] = r.boundary_masses;
  j["accepted"] = r.accepted;
  nlohmann::json counting = nlohmann::json::array();
  for (const auto& c : r.counting) counting.push_back({c.lambda, c.count});
  j["counting"] = counting;
  nlohmann::json mult = nlohmann::json::array();
  for (const auto& m : r.accepted_multiplets)
    if (m.size > 1) mult.push_back({{"first", m.first}, {"size", m.size}, {"value", m.value}});
  j["multiplets"] = mult;
  j["accepted_gram_defect"] = r.accepted_gram_defect;
  j["min_accepted"] = r.min_accepted;
  if (r.fits_available) {
    j["beta_count"] = to_json(r.count_fit);
    j["beta_mag"] = to_json(r.mag_fit);
    j["beta_product"] = r.count_fit.slope * r.mag_fit.slope;
  } else {
    j["fit_error"] = r.fit_error;
  }
  return j;
}

/// index, value, residual, boundary_mass, accepted
inline void write_eigenvalues_csv(std::ostream& os, const SpectrumReport& r) {
  os << "index,value,residual,boundary_mass,accepted\n";
  os.precision(17);
  std::size_t a = 0;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const bool acc = a < r.accepted.size() && r.accepted[a] == i;
    if (acc) ++a;
    os << (i + 1) << ',' << r.values[i] << ',' << r.residuals[i] << ',' << r.boundary_masses[i] << ',' << (acc ? 1 : 0)
       << '\n';
  }
}

/// lambda, N(lambda) over accepted values.
inline void write_counting_csv(std::ostream& os, const SpectrumReport& r) {
  os << "lambda,count\n";
  os.precision(17);
  for (const auto& c : r.counting) os << c.lambda << ',' << c.count << '\n';
}

/// Largest relative gap max_s |a_s - b_s| / |b_s| over the first `count` entries.
inline double max_relative_gap(std::span<const double> a, std::span<const double> b, std::size_t count) {
  require(a.size() >= count && b.size() >= count, "comparison needs " + std::to_string(count) + " values on each side");
  double m = 0.0;
  for (std::size_t i = 0; i < count; ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::abs(b[i]));
  return m;
}

struct RefinementRow {
  std::string label;
  std::vector<double> leading;  // first `count` accepted values
  double beta_count = std::numeric_limits<double>::quiet_NaN();
  double beta_mag = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> reference_error;  // |leading - reference|, when a reference is given
};

struct RefinementTable {
  std::vector<RefinementRow> rows;
  /// Per consecutive pair: |leading_{i+1} - leading_i| and its max over s.
  std::vector<std::vector<double>> differences;
  std::vector<double> max_difference;

  bool differences_decrease() const {
    for (std::size_t i = 1; i < max_difference.size(); ++i)
      if (!(max_difference[i] < max_difference[i - 1])) return false;
    return true;
  }
};

/// Runs `solve(grid)` on each grid (each returning ascending accepted values)
/// and tabulates the leading values and their Cauchy differences. `label`
/// names a grid for the table.
template <class Grid, class Solve, class Label>
RefinementTable refinement_study(const std::vector<Grid>& grids, Solve&& solve, Label&& label, std::size_t count = 20,
                                 std::span<const double> reference = {}, const FitWindow& window = {}, int n = 1) {
  require(grids.size() >= 2, "refinement study needs at least two grids");
  RefinementTable t;
  for (const Grid& g : grids) {
    const std::vector<double> acc = solve(g);
    require(acc.size() >= count, "refinement study: grid " + label(g) + " produced only " + std::to_string(acc.size()) +
                                     " accepted values, need " + std::to_string(count));
    RefinementRow row;
    row.label = label(g);
    row.leading.assign(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(count));
    try {
      row.beta_count = fit_counting_exponent(acc, window, n).slope;
      row.beta_mag = fit_eigenvalue_exponent(acc, window, n).slope;
    } catch (const InsufficientData&) {
    }
    if (!reference.empty()) {
      require(reference.size() >= count, "refinement study: reference shorter than count");
      for (std::size_t s = 0; s < count; ++s) row.reference_error.push_back(std::abs(row.leading[s] - reference[s]));
    }
    t.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    std::vector<double> d(count);
    double m = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      d[s] = std::abs(t.rows[i + 1].leading[s] - t.rows[i].leading[s]);
      m = std::max(m, d[s]);
    }
    t.differences.push_back(std::move(d));
    t.max_difference.push_back(m);
  }
  return t;
}

inline nlohmann::json to_json(const RefinementTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json j{{"grid", r.label}, {"leading", r.leading}};
    j["beta_count"] = std::isnan(r.beta_count) ? nlohmann::json() : nlohmann::json(r.beta_count);
    j["beta_mag"] = std::isnan(r.beta_mag) ? nlohmann::json() : nlohmann::json(r.beta_mag);
    if (!r.reference_error.empty()) j["reference_error"] = r.reference_error;
    rows.push_back(j);
  }
  return {{"rows", rows},
          {"differences", t.differences},
          {"max_difference", t.max_difference},
          {"decreasing", t.differences_decrease()}};
}

}  // namespace hosc
