#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssgap/kernels.hpp"

namespace ssgap::verify {

/// Settings shared by the CLI and the Python module.
struct RunConfig {
  int quad_order = 60;
  double ode_rel_tol = 1e-12;
  double series_start = 0.5;  ///< cap on the series/ODE switch point
  int eps_sign = 1;
  std::string output_format = "csv";  ///< tabulate file format (csv | json); json also switches gap output
  std::uint64_t seed = 0;

  /// Throws DomainError on an unknown key or an invalid value.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

/// Parses fredholm | hard-edge | cross | sigma1; throws DomainError otherwise.
kernels::GapMethod parse_method(const std::string& name);

/// One gap route with the tolerances, start cap, order and eps from `cfg`.
kernels::GapResult run_gap(kernels::GapMethod method, double a, double x, const RunConfig& cfg);

/// Largest |E_i - E_j| / max(E_i, E_j) over pairs.
double max_pairwise_discrepancy(const std::vector<kernels::GapResult>& results);

struct Check {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Report {
  std::string suite;
  std::vector<Check> checks;
  nlohmann::ordered_json resolved = nlohmann::ordered_json::object();
  bool all_pass() const;
  void add(std::string name, double residual, double threshold);
};

const std::vector<std::string>& suite_names();  ///< without "all"

/// Runs one suite, or every suite for "all" (concurrently, merged in suite order).
/// Throws DomainError for an unknown name.
Report run_suite(const std::string& suite, const RunConfig& cfg, std::size_t trials, std::uint64_t seed);

/// Default trial counts when the caller passes 0.
std::size_t default_trials(const std::string& suite);

nlohmann::ordered_json to_json(const Report& rep, const RunConfig& cfg, std::uint64_t seed);

}  // namespace ssgap::verify
