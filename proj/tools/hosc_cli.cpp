// Command-line front end: structural checks, assembly, spectral runs.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hosc/hosc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void log_line(const std::string& s) {
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%H:%M:%S", std::localtime(&now));
  std::cerr << "[" << stamp << "] " << s << std::endl;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw hosc::InvalidArgument("cannot parse '" + item + "' as a number");
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_reals(s)) {
    if (v != static_cast<int>(v)) throw hosc::InvalidArgument("grid sizes must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

struct RunFlags {
  std::string config;
  int n = 0;
  std::string grid, extent, assembly;
  int num_eigs = 0;
  double tol = 0.0;
  long long seed = -1;
  std::string out;
  bool write_matrix = false, dump_vectors = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON run configuration");
    app->add_option("--n", n, "Heisenberg dimension parameter n");
    app->add_option("--grid", grid, "interior points per axis, e.g. \"48,48,48\" (one value applies to all axes)");
    app->add_option("--extent", extent, "half extents per axis, e.g. \"6,6,6\" (one value applies to all axes)");
    app->add_option("--num-eigs", num_eigs, "number of eigenpairs to compute");
    app->add_option("--tol", tol, "eigenpair residual tolerance");
    app->add_option("--seed", seed, "seed for all randomness");
    app->add_option("--out", out, "output directory");
    app->add_option("--assembly", assembly, "sos | expanded | both");
    app->add_flag("--write-matrix", write_matrix, "export the assembled operator as matrix.mtx");
    app->add_flag("--dump-vectors", dump_vectors, "write eigenvectors as raw float64 with a JSON header");
  }

  // Config file, then flags on top; validated before returning.
  hosc::RunConfig resolve() const {
    json j = json::object();
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw hosc::InvalidArgument("cannot open config file " + config);
      in >> j;
    }
    if (n > 0) j["n"] = n;
    const int nn = j.value("n", 1);
    const auto axes = static_cast<std::size_t>(2 * nn + 1);
    if (!j.contains("grid")) j["grid"] = json{{"extent", std::vector<double>(axes, 6.0)}, {"points", std::vector<int>(axes, 48)}};
    j["grid"]["n"] = nn;
    auto widen = [axes](auto v) {
      if (v.size() == 1) v.assign(axes, v.front());
      return v;
    };
    if (!grid.empty()) j["grid"]["points"] = widen(parse_ints(grid));
    if (!extent.empty()) j["grid"]["extent"] = widen(parse_reals(extent));
    if (num_eigs > 0) j["solver"]["k"] = num_eigs;
    if (tol > 0.0) j["solver"]["tol"] = tol;
    if (seed >= 0) j["seed"] = seed;
    if (!out.empty()) j["output_dir"] = out;
    if (!assembly.empty()) j["assembly"] = assembly;
    if (write_matrix) j["write_matrix"] = true;
    if (dump_vectors) j["dump_vectors"] = true;
    hosc::RunConfig c = hosc::config_from_json(j);
    c.validate();
    return c;
  }
};

void write_json(const fs::path& p, const json& j) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream(p) << j.dump(2) << '\n';
}

int finish_check(const hosc::CheckReport& rep, const std::string& out, const std::string& name) {
  const json j = rep.to_json();
  std::cout << j.dump(2) << std::endl;
  if (!out.empty()) write_json(fs::path(out) / (name + ".json"), j);
  if (!rep.pass) {
    std::cerr << name << " failed:";
    for (const auto& v : rep.violations) std::cerr << ' ' << v;
    std::cerr << std::endl;
  }
  return rep.pass ? 0 : 1;
}

struct SolveOutcome {
  json report;
  std::string summary;
  bool pass = true;
};

SolveOutcome run_solve(const hosc::RunConfig& cfg) {
  SolveOutcome o;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  const json cfg_json = to_json(cfg);
  std::vector<hosc::SpectralRun> runs;
  std::ostringstream summary;
  summary << "Harmonic oscillator on H_" << cfg.n << ": discrete spectrum run\n";
  summary << "reference exponents: counting " << hosc::counting_reference(cfg.n) << ", magnitude "
          << hosc::magnitude_reference(cfg.n) << "\n\n";
  json runs_json = json::array();
  for (hosc::Assembly a : hosc::assemblies(cfg.assembly)) {
    const fs::path sub = dir / hosc::to_string(a);
    fs::create_directories(sub);
    auto export_matrix = [&](const hosc::SparseSymmetricMatrix& A) {
      if (!cfg.write_matrix) return;
      std::ofstream os(sub / "matrix.mtx");
      hosc::write_matrix_market(os, A);
    };
    hosc::SpectralRun run = hosc::run_spectrum(cfg.grid, a, cfg.solver, cfg.filter, cfg.window, log_line, export_matrix);
    hosc::write_run_files(sub, run, cfg_json);
    if (cfg.dump_vectors) hosc::dump_vectors(sub, run);
    summary << hosc::summarize(run);
    json rj{{"assembly", hosc::to_string(a)}, {"directory", sub.string()}};
    for (const auto& [name, ok] : hosc::run_gates(run)) {
      rj["gates"][name] = ok;
      o.pass = o.pass && ok;
      if (!ok) summary << "  CHECK FAILED: " << name << '\n';
    }
    if (run.report.fits_available) {
      rj["beta_count"] = run.report.count_fit.slope;
      rj["beta_mag"] = run.report.mag_fit.slope;
    }
    rj["accepted"] = run.report.accepted.size();
    runs_json.push_back(rj);
    summary << '\n';
    run.eig.pairs.clear();  // vectors are no longer needed
    runs.push_back(std::move(run));
  }
  o.report["config"] = cfg_json;
  o.report["runs"] = runs_json;
  if (runs.size() == 2) {
    try {
      const hosc::CrossAgreement c = hosc::cross_agreement(runs[0].report, runs[1].report);
      o.report["cross_agreement"] = to_json(c);
      summary << "cross-assembly agreement (first " << c.count << " accepted): max relative gap "
              << c.max_relative_gap << '\n';
    } catch (const hosc::Error& e) {
      o.report["cross_agreement"] = {{"error", e.what()}};
      summary << "cross-assembly agreement unavailable: " << e.what() << '\n';
    }
  }
  o.summary = summary.str();
  return o;
}

json run_refinement(const hosc::RunConfig& cfg, std::string& summary) {
  std::vector<hosc::GridSpec> grids;
  for (int m : cfg.refinement) grids.push_back(cfg.refined_grid(m));
  auto solve = [&](const hosc::GridSpec& g) {
    return hosc::run_spectrum(g, hosc::Assembly::sos, cfg.solver, cfg.filter, cfg.window, log_line).report.accepted_values();
  };
  auto label = [](const hosc::GridSpec& g) {
    std::string s;
    for (std::size_t i = 0; i < g.points.size(); ++i) s += (i ? "x" : "") + std::to_string(g.points[i]);
    return s;
  };
  const hosc::RefinementTable t = hosc::refinement_study(grids, solve, label, 20, {}, cfg.window, cfg.n);
  std::ostringstream os;
  os << "refinement (sos, first 20 accepted), max |difference| between consecutive grids:";
  for (double d : t.max_difference) os << ' ' << d;
  os << (t.differences_decrease() ? " (decreasing)\n" : " (not decreasing)\n");
  summary += os.str();
  return to_json(t);
}

int cmd_solve(const RunFlags& flags, bool full) {
  const hosc::RunConfig cfg = flags.resolve();
  const fs::path dir(cfg.output_dir);
  json top;
  bool pass = true;
  std::string summary;
  if (full) {
    const hosc::CheckReport alg = hosc::algebra_check(cfg.n, cfg.seed);
    const hosc::CheckReport rep = hosc::rep_check(cfg.n, 1.0, 100, cfg.seed);
    top["algebra_check"] = alg.to_json();
    top["rep_check"] = rep.to_json();
    pass = alg.pass && rep.pass;
    summary += std::string("algebra check: ") + (alg.pass ? "pass" : "FAIL") + "\n";
    summary += std::string("representation check: ") + (rep.pass ? "pass" : "FAIL") + "\n\n";
  }
  SolveOutcome o = run_solve(cfg);
  pass = pass && o.pass;
  summary += o.summary;
  for (auto& [k, v] : o.report.items()) top[k] = v;
  if (full && !cfg.refinement.empty()) top["refinement"] = run_refinement(cfg, summary);
  top["pass"] = pass;
  write_json(dir / "report.json", top);
  std::ofstream(dir / "summary.txt") << summary;
  std::cout << summary;
  return pass ? 0 : 1;
}

int cmd_assemble(const RunFlags& flags) {
  const hosc::RunConfig cfg = flags.resolve();
  const fs::path dir(cfg.output_dir);
  json report{{"config", to_json(cfg)}};
  for (hosc::Assembly a : hosc::assemblies(cfg.assembly)) {
    const hosc::SparseSymmetricMatrix A = hosc::run_stage("assembly", [&] { return hosc::assemble_oscillator(cfg.grid, a); });
    const fs::path sub = dir / hosc::to_string(a);
    fs::create_directories(sub);
    std::ofstream os(sub / "matrix.mtx");
    hosc::write_matrix_market(os, A);
    report[hosc::to_string(a)] = {{"dim", A.dim()},
                                  {"nnz", A.csr().nnz()},
                                  {"max_row_nnz", A.csr().max_row_nnz()},
                                  {"symmetry_defect", A.csr().symmetry_defect()},
                                  {"matrix", (sub / "matrix.mtx").string()}};
    log_line("wrote " + (sub / "matrix.mtx").string());
  }
  write_json(dir / "assemble.json", report);
  std::cout << report.dump(2) << std::endl;
  return 0;
}

// Re-filter and re-fit an existing eigenvalues.csv.
int cmd_analyze(const std::string& input, double threshold, int skip, int use, int n, const std::string& out) {
  std::ifstream in(input);
  if (!in) throw hosc::InvalidArgument("cannot open " + input);
  std::string line;
  std::getline(in, line);
  if (line.rfind("index,value,residual,boundary_mass", 0) != 0) throw hosc::InvalidArgument("unexpected CSV header in " + input);
  hosc::SpectrumReport r;
  r.filter.mass_threshold = threshold;
  r.window = {skip, use};
  r.window.validate();
  r.filter.validate();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> f = parse_reals(line);
    hosc::require(f.size() >= 4, "malformed CSV row: " + line);
    r.values.push_back(f[1]);
    r.residuals.push_back(f[2]);
    r.boundary_masses.push_back(f[3]);
  }
  r.accepted = hosc::accepted_indices(r.boundary_masses, r.filter);
  const auto acc = r.accepted_values();
  r.counting = hosc::counting_samples(acc);
  r.accepted_multiplets = hosc::multiplets(acc);
  r.min_accepted = acc.empty() ? 0.0 : acc.front();
  r.solver_complete = true;
  try {
    r.count_fit = hosc::fit_counting_exponent(acc, r.window, n);
    r.mag_fit = hosc::fit_eigenvalue_exponent(acc, r.window, n);
    r.fits_available = true;
  } catch (const hosc::InsufficientData& e) {
    r.fit_error = e.what();
  }
  json j = to_json(r);
  j.erase("accepted_gram_defect");
  j.erase("grid");
  j["input"] = input;
  const fs::path dir = out.empty() ? fs::path(input).parent_path() : fs::path(out);
  write_json(dir / "analysis.json", j);
  {
    std::ofstream os(dir / "counting.csv");
    hosc::write_counting_csv(os, r);
  }
  std::cout << "accepted " << acc.size() << " of " << r.values.size() << "\n";
  if (r.fits_available)
    std::cout << "beta_count " << r.count_fit.slope << " (reference " << r.count_fit.reference << ")\nbeta_mag "
              << r.mag_fit.slope << " (reference " << r.mag_fit.reference << ")\n";
  else
    std::cout << r.fit_error << "\n";
  const bool positive = acc.empty() || r.min_accepted > 0.0;
  return positive ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for the harmonic oscillator on the Heisenberg group"};
  app.require_subcommand(1);

  int alg_n = 1;
  std::string alg_table, alg_emit, alg_out;
  long long alg_seed = 42;
  auto* alg = app.add_subcommand("algebra-check", "structure-table identities and the group law");
  alg->add_option("--n", alg_n, "Heisenberg dimension parameter n")->check(CLI::PositiveNumber);
  alg->add_option("--table", alg_table, "check a structure table from a JSON file instead");
  alg->add_option("--emit-table", alg_emit, "write the built-in table for n to this JSON file and exit");
  alg->add_option("--seed", alg_seed, "seed for random probes");
  alg->add_option("--out", alg_out, "directory for algebra_check.json");

  int rep_n = 1, rep_samples = 100;
  double rep_lambda = 1.0;
  long long rep_seed = 42;
  std::string rep_out;
  auto* rep = app.add_subcommand("rep-check", "homomorphism, unitarity and generator checks of pi_lambda");
  rep->add_option("--n", rep_n, "Heisenberg dimension parameter n")->check(CLI::PositiveNumber);
  rep->add_option("--lambda", rep_lambda, "nonzero representation parameter");
  rep->add_option("--samples", rep_samples, "random group pairs");
  rep->add_option("--seed", rep_seed, "seed");
  rep->add_option("--out", rep_out, "directory for rep_check.json");

  RunFlags asm_flags, solve_flags, full_flags;
  auto* assemble = app.add_subcommand("assemble", "assemble the discretized operator and export it");
  asm_flags.attach(assemble);
  auto* solve = app.add_subcommand("solve", "assemble, solve, filter and fit");
  solve_flags.attach(solve);
  auto* full = app.add_subcommand("full-run", "algebra and representation checks, then solve and refinement study");
  full_flags.attach(full);

  std::string an_input, an_out;
  double an_threshold = 1e-4;
  int an_skip = 10, an_use = 0, an_n = 1;
  auto* analyze = app.add_subcommand("analyze", "re-filter and re-fit an eigenvalues.csv");
  analyze->add_option("--input", an_input, "eigenvalues.csv from a previous solve")->required();
  analyze->add_option("--mass-threshold", an_threshold, "boundary mass threshold");
  analyze->add_option("--skip", an_skip, "accepted values skipped before fitting");
  analyze->add_option("--use", an_use, "accepted values used in the fit (0: all remaining)");
  analyze->add_option("--n", an_n, "Heisenberg dimension parameter n");
  analyze->add_option("--out", an_out, "output directory (default: next to the input)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*alg) {
      if (!alg_emit.empty()) {
        write_json(alg_emit, hosc::to_json(hosc::build_dynin_folland(alg_n)));
        return 0;
      }
      if (!alg_table.empty()) {
        std::ifstream in(alg_table);
        if (!in) throw hosc::InvalidArgument("cannot open table " + alg_table);
        json j;
        in >> j;
        return finish_check(hosc::algebra_check(hosc::algebra_from_json(j), static_cast<std::uint64_t>(alg_seed)),
                            alg_out, "algebra_check");
      }
      return finish_check(hosc::algebra_check(alg_n, static_cast<std::uint64_t>(alg_seed)), alg_out, "algebra_check");
    }
    if (*rep)
      return finish_check(hosc::rep_check(rep_n, rep_lambda, rep_samples, static_cast<std::uint64_t>(rep_seed)), rep_out,
                          "rep_check");
    if (*assemble) return cmd_assemble(asm_flags);
    if (*solve) return cmd_solve(solve_flags, false);
    if (*full) return cmd_solve(full_flags, true);
    if (*analyze) return cmd_analyze(an_input, an_threshold, an_skip, an_use, an_n, an_out);
  } catch (const hosc::StageError& e) {
    std::cerr << "error in stage " << e.stage() << ": " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
