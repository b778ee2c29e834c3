#include <doctest.h>

#include "ssgap/errors.hpp"
#include "ssgap/verify.hpp"

using namespace ssgap;
using namespace ssgap::verify;

TEST_CASE("config keys") {
  RunConfig c;
  c.set("quad_order", "80");
  c.set("ode_rel_tol", "1e-11");
  c.set("series_start", "1e-3");
  c.set("eps", "-1");
  c.set("output_format", "json");
  c.set("seed", "42");
  CHECK(c.quad_order == 80);
  CHECK(c.ode_rel_tol == 1e-11);
  CHECK(c.series_start == 1e-3);
  CHECK(c.eps_sign == -1);
  CHECK(c.output_format == "json");
  CHECK(c.seed == 42);
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(c.set("colour", "red"), DomainError);
  CHECK_THROWS_AS(c.set("quad_order", "many"), DomainError);
  c.eps_sign = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("method names") {
  CHECK(parse_method("fredholm") == kernels::GapMethod::Fredholm);
  CHECK(parse_method("sigma1") == kernels::GapMethod::Sigma1);
  CHECK(parse_method("hard-edge") == kernels::GapMethod::HardEdgeProduct);
  CHECK(parse_method("cross") == kernels::GapMethod::CrossProduct);
  CHECK_THROWS_AS(parse_method("magic"), DomainError);
}

TEST_CASE("routes agree through the config") {
  const RunConfig c;
  std::vector<kernels::GapResult> rs;
  for (const char* m : {"fredholm", "sigma1", "hard-edge", "cross"}) rs.push_back(run_gap(parse_method(m), 0.5, 1.0, c));
  CHECK(max_pairwise_discrepancy(rs) <= 1e-6);
}

TEST_CASE("classical suite and report schema") {
  const RunConfig c;
  const Report r = run_suite("classical", c, 0, 0);
  CHECK(r.all_pass());
  CHECK(!r.checks.empty());
  const auto j = to_json(r, c, 0);
  CHECK(j.at("suite") == "classical");
  CHECK(j.at("checks").is_array());
  CHECK(j.at("checks")[0].contains("residual"));
  CHECK(j.at("config").at("quad_order") == 60);
  CHECK(j.at("resolved").at("table1_time_symbol").is_null());
  CHECK_THROWS_AS(run_suite("everything", c, 0, 0), DomainError);
}

TEST_CASE("backlund suite is deterministic in the seed") {
  const RunConfig c;
  const auto a = to_json(run_suite("backlund", c, 40, 3), c, 3);
  const auto b = to_json(run_suite("backlund", c, 40, 3), c, 3);
  CHECK(a.dump() == b.dump());
  CHECK(a.at("resolved").at("table1_time_symbol") == "t_means_s");
}
