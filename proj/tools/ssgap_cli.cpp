// ssgap: gap probabilities, tabulation and verification suites.
#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ssgap/errors.hpp"
#include "ssgap/kernels.hpp"
#include "ssgap/verify.hpp"

namespace {

using ssgap::kernels::GapMethod;
using ssgap::kernels::GapResult;
using ssgap::verify::RunConfig;

constexpr double kAgreement = 1e-5;
const std::vector<std::string> kConfigKeys = {"quad_order", "ode_rel_tol", "series_start",
                                              "eps_sign",   "output_format", "seed"};

struct ConfigFlags {
  std::string file;
  std::optional<int> quad_order;
  std::optional<double> ode_rel_tol;
  std::optional<double> series_start;
  std::optional<int> eps_sign;
  std::optional<std::string> output_format;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key=value config file");
    app->add_option("--quad-order", quad_order, "Fredholm quadrature order");
    app->add_option("--ode-rel-tol", ode_rel_tol, "ODE relative tolerance");
    app->add_option("--series-start", series_start, "cap on the series/ODE switch point");
    app->add_option("--eps", eps_sign, "cross-route sign (+1 or -1)");
    app->add_option("--output-format", output_format, "csv or json");
    app->add_option("--seed", seed, "random seed");
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

void load_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ssgap::DomainError("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ssgap::DomainError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void load_env(RunConfig& cfg) {
  for (const auto& key : kConfigKeys) {
    std::string var = "GAP_";
    for (char c : key) var += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(var.c_str())) cfg.set(key, v);
  }
}

// defaults < file < GAP_* environment < flags
RunConfig resolve(const ConfigFlags& f) {
  RunConfig cfg;
  if (!f.file.empty()) load_file(cfg, f.file);
  load_env(cfg);
  if (f.quad_order) cfg.quad_order = *f.quad_order;
  if (f.ode_rel_tol) cfg.ode_rel_tol = *f.ode_rel_tol;
  if (f.series_start) cfg.series_start = *f.series_start;
  if (f.eps_sign) cfg.eps_sign = *f.eps_sign;
  if (f.output_format) cfg.output_format = *f.output_format;
  if (f.seed) cfg.seed = *f.seed;
  cfg.validate();
  return cfg;
}

std::vector<GapMethod> methods_for(const std::string& name) {
  if (name == "all") {
    return {GapMethod::Fredholm, GapMethod::Sigma1, GapMethod::HardEdgeProduct, GapMethod::CrossProduct};
  }
  return {ssgap::verify::parse_method(name)};
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_gap(double a, double x, const std::string& method, bool json, const RunConfig& cfg) {
  std::vector<GapResult> results;
  for (GapMethod m : methods_for(method)) results.push_back(ssgap::verify::run_gap(m, a, x, cfg));
  const double disc = ssgap::verify::max_pairwise_discrepancy(results);
  const bool ok = disc <= kAgreement;
  if (json) {
    nlohmann::ordered_json out;
    out["a"] = a;
    out["x"] = x;
    out["results"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
      out["results"].push_back({{"method", ssgap::kernels::to_string(r.method)},
                                {"E", r.E},
                                {"logE", r.logE},
                                {"err_est", r.err_est}});
    }
    if (results.size() > 1) {
      out["max_rel_discrepancy"] = disc;
      out["threshold"] = kAgreement;
      out["pass"] = ok;
    }
    out["config"] = cfg.to_json();
    std::cout << out.dump(2) << "\n";
  } else {
    std::printf("%-10s %-24s %-24s %s\n", "method", "E", "logE", "err_est");
    for (const auto& r : results) {
      std::printf("%-10s %-24.17g %-24.17g %.3g\n", ssgap::kernels::to_string(r.method).c_str(), r.E, r.logE,
                  r.err_est);
    }
    if (results.size() > 1) std::printf("max_rel_discrepancy %.3g (%s)\n", disc, ok ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

int cmd_tabulate(double a, double x_min, double x_max, int steps, const std::string& out_path,
                 const std::string& method, const RunConfig& cfg) {
  if (steps < 1) throw ssgap::DomainError("--steps must be >= 1");
  if (!(x_min >= 0.0) || !(x_max >= x_min)) throw ssgap::DomainError("need 0 <= x-min <= x-max");
  const std::vector<GapMethod> methods = methods_for(method);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ssgap::DomainError("cannot write " + out_path);

  std::vector<double> xs(steps);
  for (int i = 0; i < steps; ++i) xs[i] = steps == 1 ? x_min : x_min + (x_max - x_min) * i / (steps - 1);
  const std::size_t n = xs.size() * methods.size();
  std::vector<GapResult> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      try {
        rows[k] = ssgap::verify::run_gap(methods[k % methods.size()], a, xs[k / methods.size()], cfg);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), n));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (cfg.output_format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"x", r.x}, {"a", r.a}, {"method", ssgap::kernels::to_string(r.method)}, {"E", r.E},
                     {"logE", r.logE}, {"err_est", r.err_est}});
    }
    out << arr.dump(2) << "\n";
  } else {
    out << "x,a,method,E,logE,err_est\n";
    for (const auto& r : rows) {
      out << fmt17(r.x) << ',' << fmt17(r.a) << ',' << ssgap::kernels::to_string(r.method) << ',' << fmt17(r.E)
          << ',' << fmt17(r.logE) << ',' << fmt17(r.err_est) << '\n';
    }
  }
  out.close();
  if (!out) throw ssgap::DomainError("write to " + out_path + " failed");
  return 0;
}

int cmd_verify(const std::string& suite, std::size_t trials, const RunConfig& cfg) {
  const ssgap::verify::Report rep = ssgap::verify::run_suite(suite, cfg, trials, cfg.seed);
  std::cout << ssgap::verify::to_json(rep, cfg, cfg.seed).dump(2) << "\n";
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrum-singularity gap probabilities"};
  app.require_subcommand(1);

  double a = 0.0, x = 0.0, x_min = 0.0, x_max = 1.0;
  int steps = 11;
  std::string method = "all", tab_method = "fredholm", out_path, suite = "all";
  bool json = false;
  std::size_t trials = 0;
  ConfigFlags gap_flags, tab_flags, ver_flags;

  auto* gap = app.add_subcommand("gap", "gap probability on (-x, x)");
  gap->add_option("--a", a, "singularity exponent (> -1/2)")->required();
  gap->add_option("--x", x, "half-width of the interval (>= 0)")->required();
  gap->add_option("--method", method, "all|fredholm|hard-edge|cross|sigma1")
      ->check(CLI::IsMember({"all", "fredholm", "hard-edge", "cross", "sigma1"}));
  gap->add_flag("--json", json, "JSON output");
  gap_flags.attach(gap);

  auto* tab = app.add_subcommand("tabulate", "CSV table of E over an x grid");
  tab->add_option("--a", a, "singularity exponent (> -1/2)")->required();
  tab->add_option("--x-min", x_min, "first grid point")->required();
  tab->add_option("--x-max", x_max, "last grid point")->required();
  tab->add_option("--steps", steps, "number of grid points")->required();
  tab->add_option("--out", out_path, "output path")->required();
  tab->add_option("--method", tab_method, "all|fredholm|hard-edge|cross|sigma1")
      ->check(CLI::IsMember({"all", "fredholm", "hard-edge", "cross", "sigma1"}));
  tab_flags.attach(tab);

  auto* ver = app.add_subcommand("verify", "run verification suites, JSON report on stdout");
  ver->add_option("--suite", suite, "all|theorem1|lemma|backlund|tau-identity|series|classical")
      ->check(CLI::IsMember({"all", "theorem1", "lemma", "backlund", "tau-identity", "series", "classical"}));
  ver->add_option("--trials", trials, "random trials (0: suite default)");
  ver_flags.attach(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gap->parsed()) {
      const RunConfig cfg = resolve(gap_flags);
      return cmd_gap(a, x, method, json || cfg.output_format == "json", cfg);
    }
    if (tab->parsed()) return cmd_tabulate(a, x_min, x_max, steps, out_path, tab_method, resolve(tab_flags));
    return cmd_verify(suite, trials, resolve(ver_flags));
  } catch (const ssgap::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
