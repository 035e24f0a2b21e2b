#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hosc/discretization.hpp"
#include "hosc/eigensolver.hpp"
#include "hosc/errors.hpp"
#include "hosc/grid.hpp"
#include "hosc/spectral_analysis.hpp"

namespace hosc {

enum class AssemblyChoice { sos, expanded, both };

inline AssemblyChoice parse_assembly(const std::string& s) {
  if (s == "sos") return AssemblyChoice::sos;
  if (s == "expanded") return AssemblyChoice::expanded;
  if (s == "both") return AssemblyChoice::both;
  throw InvalidArgument("assembly must be one of sos, expanded, both (got '" + s + "')");
}

inline std::string to_string(AssemblyChoice a) {
  switch (a) {
    case AssemblyChoice::sos: return "sos";
    case AssemblyChoice::expanded: return "expanded";
    case AssemblyChoice::both: return "both";
  }
  return "?";
}

inline std::vector<Assembly> assemblies(AssemblyChoice a) {
  if (a == AssemblyChoice::sos) return {Assembly::sos};
  if (a == AssemblyChoice::expanded) return {Assembly::expanded};
  return {Assembly::sos, Assembly::expanded};
}

/// Everything a spectral run needs. Loading materializes every default.
struct RunConfig {
  int n = 1;
  GridSpec grid = GridSpec{1, {6.0, 6.0, 6.0}, {48, 48, 48}};
  SolverConfig solver{200};
  FilterSettings filter;
  FitWindow window;
  AssemblyChoice assembly = AssemblyChoice::both;
  std::string output_dir = "hosc_out";
  std::uint64_t seed = 42;
  std::vector<int> refinement;  // uniform point counts for a refinement study, e.g. {24, 32, 48}
  bool write_matrix = false;
  bool dump_vectors = false;

  void validate() const {
    require(n >= 1, "config: n must be >= 1");
    require(grid.n == n, "config: grid.n must equal n");
    grid.validate();
    solver.validate(grid.size());
    filter.validate();
    window.validate();
    require(!output_dir.empty(), "config: output_dir must be set");
    for (std::size_t i = 0; i < refinement.size(); ++i) {
      require(refinement[i] >= 3, "config: refinement point counts must be >= 3");
      require(i == 0 || refinement[i] >= refinement[i - 1], "config: refinement point counts must be nondecreasing");
      GridSpec g = grid;
      g.points.assign(g.points.size(), refinement[i]);
      solver.validate(g.size());
    }
  }

  GridSpec refined_grid(int m) const {
    GridSpec g = grid;
    g.points.assign(g.points.size(), m);
    return g;
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"n", c.n},
          {"grid", c.grid},
          {"solver",
           {{"k", c.solver.k},
            {"tol", c.solver.tol},
            {"max_subspace", c.solver.subspace_cap()},
            {"cg_tol", c.solver.cg_tol},
            {"cg_max_iter", c.solver.cg_max_iter},
            {"block_size", c.solver.block_size},
            {"max_restarts", c.solver.max_restarts}}},
          {"filter", {{"shell_fraction", c.filter.shell_fraction}, {"mass_threshold", c.filter.mass_threshold}}},
          {"fit", {{"skip", c.window.skip}, {"use", c.window.use}}},
          {"assembly", to_string(c.assembly)},
          {"output_dir", c.output_dir},
          {"seed", c.seed},
          {"refinement", c.refinement},
          {"write_matrix", c.write_matrix},
          {"dump_vectors", c.dump_vectors}};
}

namespace detail {
inline RunConfig parse_config(const nlohmann::json& j) {
  RunConfig c;
  c.n = j.value("n", c.n);
  if (j.contains("grid")) {
    nlohmann::json g = j.at("grid");
    if (!g.contains("n")) g["n"] = c.n;
    c.grid = g.get<GridSpec>();
  } else {
    c.grid = GridSpec{c.n, std::vector<double>(static_cast<std::size_t>(2 * c.n + 1), 6.0),
                      std::vector<int>(static_cast<std::size_t>(2 * c.n + 1), 48)};
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    c.solver.k = s.value("k", c.solver.k);
    c.solver.tol = s.value("tol", c.solver.tol);
    c.solver.max_subspace = s.value("max_subspace", c.solver.max_subspace);
    c.solver.cg_tol = s.value("cg_tol", c.solver.cg_tol);
    c.solver.cg_max_iter = s.value("cg_max_iter", c.solver.cg_max_iter);
    c.solver.block_size = s.value("block_size", c.solver.block_size);
    c.solver.max_restarts = s.value("max_restarts", c.solver.max_restarts);
  }
  if (j.contains("filter")) {
    c.filter.shell_fraction = j["filter"].value("shell_fraction", c.filter.shell_fraction);
    c.filter.mass_threshold = j["filter"].value("mass_threshold", c.filter.mass_threshold);
  }
  if (j.contains("fit")) {
    c.window.skip = j["fit"].value("skip", c.window.skip);
    c.window.use = j["fit"].value("use", c.window.use);
  }
  c.assembly = parse_assembly(j.value("assembly", to_string(c.assembly)));
  c.output_dir = j.value("output_dir", c.output_dir);
  c.seed = j.value("seed", c.seed);
  c.solver.seed = c.seed;
  c.refinement = j.value("refinement", c.refinement);
  c.write_matrix = j.value("write_matrix", c.write_matrix);
  c.dump_vectors = j.value("dump_vectors", c.dump_vectors);
  return c;
}
}  // namespace detail

/// Reads a config document; absent keys keep their defaults. Does not validate.
inline RunConfig config_from_json(const nlohmann::json& j) {
  try {
    return detail::parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: malformed document: ") + e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace hosc
