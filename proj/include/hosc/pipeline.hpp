#pragma once

// Assemble -> solve -> filter -> fit, with error messages naming the stage,
// and writers for the run artifacts.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hosc/config.hpp"
#include "hosc/discretization.hpp"
#include "hosc/eigensolver.hpp"
#include "hosc/spectral_analysis.hpp"

namespace hosc {

using Logger = std::function<void(const std::string&)>;

struct SpectralRun {
  Assembly assembly = Assembly::sos;
  SpectrumReport report;
  EigenResult eig;
  std::size_t nnz = 0;
  std::size_t max_row_nnz = 0;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct StageError : Error {
  StageError(const std::string& stage, const std::string& what) : Error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

template <class F>
auto run_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

namespace detail {
inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace detail

/// One spectral run. `on_matrix` sees the assembled operator (e.g. to export it).
inline SpectralRun run_spectrum(const GridSpec& g, Assembly a, const SolverConfig& solver, const FilterSettings& filter,
                                const FitWindow& window, const Logger& log = {},
                                const std::function<void(const SparseSymmetricMatrix&)>& on_matrix = {}) {
  SpectralRun run;
  run.assembly = a;
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  std::ostringstream gd;
  for (std::size_t i = 0; i < g.points.size(); ++i) gd << (i ? "x" : "") << g.points[i];
  say("assembling " + to_string(a) + " operator on " + gd.str() + " grid");
  auto t0 = std::chrono::steady_clock::now();
  const SparseSymmetricMatrix A = run_stage("assembly", [&] { return assemble_oscillator(g, a); });
  run.assemble_seconds = detail::seconds_since(t0);
  run.nnz = A.csr().nnz();
  run.max_row_nnz = A.csr().max_row_nnz();
  if (on_matrix) run_stage("export", [&] { on_matrix(A); });

  say("solving for " + std::to_string(solver.k) + " eigenpairs (N = " + std::to_string(A.dim()) + ")");
  t0 = std::chrono::steady_clock::now();
  run.eig = run_stage("eigensolver", [&] { return smallest_eigenpairs(A, solver); });
  run.solve_seconds = detail::seconds_since(t0);
  say("solver finished in " + std::to_string(run.solve_seconds) + " s, " + std::to_string(run.eig.pairs.size()) +
      " pairs, " + std::to_string(run.eig.cg_iterations) + " CG iterations");

  run.report = run_stage("analysis", [&] { return analyze_spectrum(g, run.eig, filter, window, to_string(a)); });
  return run;
}

struct CrossAgreement {
  std::size_t count = 0;
  std::vector<double> first, second, relative_gap;
  double max_relative_gap = 0.0;
};

inline CrossAgreement cross_agreement(const SpectrumReport& a, const SpectrumReport& b, std::size_t count = 20) {
  const std::vector<double> va = a.accepted_values(), vb = b.accepted_values();
  require(va.size() >= count && vb.size() >= count,
          "cross-assembly comparison needs " + std::to_string(count) + " accepted values in each run (have " +
              std::to_string(va.size()) + " and " + std::to_string(vb.size()) + ")");
  CrossAgreement c;
  c.count = count;
  c.first.assign(va.begin(), va.begin() + static_cast<std::ptrdiff_t>(count));
  c.second.assign(vb.begin(), vb.begin() + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = 0; i < count; ++i) {
    c.relative_gap.push_back(std::abs(c.first[i] - c.second[i]) / std::abs(c.second[i]));
    c.max_relative_gap = std::max(c.max_relative_gap, c.relative_gap.back());
  }
  return c;
}

inline nlohmann::json to_json(const CrossAgreement& c) {
  return {{"count", c.count}, {"first", c.first}, {"second", c.second}, {"relative_gap", c.relative_gap},
          {"max_relative_gap", c.max_relative_gap}};
}

/// Checks a finished run must pass: complete solve, positive accepted
/// spectrum, orthonormal accepted vectors.
inline std::vector<std::pair<std::string, bool>> run_gates(const SpectralRun& r, double gram_tol = 1e-8) {
  return {{"solver_complete", r.eig.complete},
          {"accepted_positive", r.report.accepted.empty() || r.report.min_accepted > 0.0},
          {"accepted_orthonormal", r.report.accepted_gram_defect <= gram_tol}};
}

inline nlohmann::json to_json(const SpectralRun& r) {
  nlohmann::json j = to_json(r.report);
  j["nnz"] = r.nnz;
  j["max_row_nnz"] = r.max_row_nnz;
  j["assemble_seconds"] = r.assemble_seconds;
  j["solve_seconds"] = r.solve_seconds;
  nlohmann::json gates;
  for (const auto& [name, ok] : run_gates(r)) gates[name] = ok;
  j["gates"] = gates;
  return j;
}

/// Raw little-endian float64 eigenvectors, one after another, plus a JSON
/// header describing the grid and layout.
inline void dump_vectors(const std::filesystem::path& dir, const SpectralRun& r) {
  std::ofstream bin(dir / "vectors.bin", std::ios::binary);
  for (const auto& p : r.eig.pairs)
    bin.write(reinterpret_cast<const char*>(p.vector.data()), static_cast<std::streamsize>(p.vector.size() * sizeof(double)));
  nlohmann::json h{{"grid", r.report.grid},
                   {"count", r.eig.pairs.size()},
                   {"length", r.report.grid.size()},
                   {"dtype", "float64"},
                   {"byte_order", "native"},
                   {"layout", "vector-major; within a vector axis 0 (t_1) varies fastest"},
                   {"eigenvalues", r.report.values}};
  std::ofstream(dir / "vectors.json") << h.dump(2) << '\n';
}

inline void write_run_files(const std::filesystem::path& dir, const SpectralRun& r, const nlohmann::json& config) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "eigenvalues.csv");
    write_eigenvalues_csv(os, r.report);
  }
  {
    std::ofstream os(dir / "counting.csv");
    write_counting_csv(os, r.report);
  }
  nlohmann::json j = to_json(r);
  j["config"] = config;
  std::ofstream(dir / "report.json") << j.dump(2) << '\n';
}

inline std::string summarize(const SpectralRun& r) {
  const SpectrumReport& s = r.report;
  std::ostringstream os;
  os << std::setprecision(6);
  os << "[" << s.assembly << "] grid";
  for (std::size_t i = 0; i < s.grid.points.size(); ++i) os << (i ? "x" : " ") << s.grid.points[i];
  os << " on half extents";
  for (double L : s.grid.half_extent) os << ' ' << L;
  os << "\n  computed " << s.values.size() << " eigenpairs, accepted " << s.accepted.size() << " (shell "
     << s.filter.shell_fraction << ", mass <= " << s.filter.mass_threshold << ")\n";
  if (!s.solver_complete) os << "  solver: " << s.solver_diagnostic << '\n';
  os << "  smallest accepted eigenvalue " << s.min_accepted << ", accepted Gram defect " << s.accepted_gram_defect
     << '\n';
  os << "  first accepted:";
  const auto acc = s.accepted_values();
  for (std::size_t i = 0; i < std::min<std::size_t>(10, acc.size()); ++i) os << ' ' << acc[i];
  os << '\n';
  if (s.fits_available) {
    os << "  beta_count = " << s.count_fit.slope << " (reference " << s.count_fit.reference << ", ratio "
       << s.count_fit.slope / s.count_fit.reference << ")\n";
    os << "  beta_mag   = " << s.mag_fit.slope << " (reference " << s.mag_fit.reference << ", ratio "
       << s.mag_fit.slope / s.mag_fit.reference << ")\n";
    os << "  fit window: values " << (s.count_fit.skip + 1) << ".." << (s.count_fit.skip + s.count_fit.count)
       << ", lambda in [" << s.count_fit.lambda_min << ", " << s.count_fit.lambda_max << "], OLS slope "
       << s.count_fit.ols_slope << ", r^2 " << s.count_fit.r_squared << '\n';
  } else {
    os << "  exponent fit unavailable: " << s.fit_error << '\n';
  }
  os << "  timings: assemble " << r.assemble_seconds << " s, solve " << r.solve_seconds << " s\n";
  return os.str();
}

}  // namespace hosc
