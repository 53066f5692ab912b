#include <doctest.h>

#include <sstream>

#include "maisac/checks.hpp"
#include "maisac/experiments.hpp"
#include "maisac/report.hpp"

using namespace maisac;

namespace {

// Single-element 4x4 scenario: every solve takes a few milliseconds.
Scenario tiny() {
  Scenario s;
  s.rx_candidates = s.tx_candidates = 4;
  s.rx_elements = s.tx_elements = 1;
  s.uplink_users = s.downlink_users = 1;
  s.uplink_db = -12.0;
  s.swarm.particles = 4;
  s.swarm.iterations = 3;
  return s;
}

}  // namespace

TEST_CASE("scenario parser reads keys, comments and overrides") {
  std::istringstream in(
      "# comment\n"
      "grid.rx_candidates = 16   # trailing\n"
      "threshold.uplink_db = -6\n"
      "\n"
      "seed = 42\n");
  const Scenario s = parse_scenario(in);
  CHECK(s.rx_candidates == 16);
  CHECK(s.uplink_db == -6.0);
  CHECK(s.seed == 42);
  CHECK(s.tx_candidates == 9);
}

TEST_CASE("scenario parser reports the offending line") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      parse_scenario(in);
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_with("seed = 1\nno.such.key = 3\n", "line 2"));
  CHECK(fails_with("seed = 1\nseed = 2\n", "line 2"));
  CHECK(fails_with("grid.rx_candidates = nine\n", "line 1"));
  CHECK(fails_with("just text\n", "line 1"));
}

TEST_CASE("resolved configuration reproduces the scenario exactly") {
  Scenario s;
  set_scenario_value(s, "threshold.sensing_db", "7.25");
  set_scenario_value(s, "channel.wavelength", "0.0612345678901234");
  set_scenario_value(s, "swarm.particles", "13");
  const std::string text = resolved_config(s);
  std::istringstream in(text);
  const Scenario back = parse_scenario(in);
  CHECK(resolved_config(back) == text);
  CHECK(back.wavelength == s.wavelength);
  CHECK(back.swarm.particles == 13);
  CHECK_THROWS_AS(set_scenario_value(s, "swarm.nope", "1"), ConfigError);
}

TEST_CASE("scenario validation rejects inconsistent settings") {
  Scenario s;
  s.rx_candidates = 8;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = Scenario{};
  s.clutter_gain_db.pop_back();
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = Scenario{};
  s.rx_elements = 10;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_NOTHROW(Scenario{}.validate());
}

TEST_CASE("threshold and unit conversions") {
  Scenario s;
  const Thresholds th = s.thresholds();
  CHECK(th.sensing == doctest::Approx(db_to_linear(6.0)));
  REQUIRE(th.uplink.size() == 2);
  CHECK(th.uplink[0] == doctest::Approx(db_to_linear(-3.0)));
  const ChannelParams p = s.channel_params();
  CHECK(p.noise_bs == doctest::Approx(1e-13));
  CHECK(std::abs(p.target_gain) == doctest::Approx(std::pow(10.0, 9.0 / 20.0)));
  CHECK(p.si_power == doctest::Approx(1e-11));
}

TEST_CASE("method names round-trip") {
  for (const char* name : {"ma", "fixed", "random1", "random12"}) {
    CHECK(Method::parse(name).name() == name);
  }
  CHECK_THROWS_AS(Method::parse("random0"), ConfigError);
  CHECK_THROWS_AS(Method::parse("randomx"), ConfigError);
  CHECK_THROWS_AS(Method::parse("best"), ConfigError);
}

TEST_CASE("baseline placements") {
  CHECK(fixed_linear_placement(9, 2).selected() == std::vector<int>{0, 1});
  Scenario s;
  const auto a = random_placement(s, 1);
  const auto b = random_placement(s, 1);
  const auto c = random_placement(s, 2);
  CHECK(a == b);
  CHECK(a != c);
  const auto d = distance_matrix(s.rx_grid());
  CHECK(violation_count(a.first, a.second, d, d, s.d_min) == 0);
}

TEST_CASE("sweep variables set the right field") {
  const Scenario s;
  CHECK(with_value(s, SweepVariable::sensing_db, 9.0).sensing_db == 9.0);
  CHECK(with_value(s, SweepVariable::downlink_db, 3.0).downlink_db == 3.0);
  CHECK(with_value(s, SweepVariable::paths, 1.0).paths == 1);
  CHECK(with_value(s, SweepVariable::p_min_w, 0.25).p_min_w == 0.25);
  CHECK_THROWS_AS(with_value(s, SweepVariable::paths, 1.5), ConfigError);
  CHECK(parse_sweep_variable("gamma_r") == SweepVariable::sensing_db);
  CHECK(to_string(SweepVariable::p_min_w) == "p_min");
  CHECK_THROWS_AS(parse_sweep_variable("speed"), ConfigError);
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(kInfinity) == "inf");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("sweep csv round-trips and rejects malformed rows") {
  SweepRow r;
  r.variable = "gamma_r";
  r.value = 6.0;
  r.method = "ma";
  r.power_w = 0.123456789012345;
  r.power_dbm = watts_to_dbm(r.power_w);
  r.tr_w = 0.1;
  r.sum_pu = 0.023456789012345;
  r.feasible = true;
  r.iters = 7;
  SweepRow inf_row;
  inf_row.variable = "gamma_r";
  inf_row.value = 9.0;
  inf_row.method = "fixed";
  std::stringstream ss;
  write_sweep_csv(ss, {r, inf_row});
  const auto back = read_sweep_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == r);
  CHECK(back[1] == inf_row);

  std::istringstream bad_header("a,b\n");
  CHECK_THROWS_AS(read_sweep_csv(bad_header), ConfigError);
  std::istringstream short_row(
      "variable,value,method,power_w,power_dbm,tr_w,sum_pu,feasible,iters,wall_ms\ngamma_r,1,ma\n");
  CHECK_THROWS_AS(read_sweep_csv(short_row), ConfigError);
}

TEST_CASE("single run on a small scenario is reproducible and audited") {
  const Scenario s = tiny();
  const RunResult a = run_single(s);
  const RunResult b = run_single(s);
  REQUIRE(a.feasible());
  CHECK(a.power_w() == b.power_w());
  CHECK(a.rx == b.rx);
  CHECK(a.wall_ms == 0.0);
  CHECK(a.history.size() == 4);
  for (double v : a.sinr_ratios) CHECK(v >= 1.0 - 1e-3);

  std::ostringstream summary;
  write_run_summary(summary, a);
  CHECK(summary.str().find("method = ma") != std::string::npos);
  CHECK(summary.str().find("channel_checksum = ") != std::string::npos);
}

TEST_CASE("sweep rows share the channel realization across methods") {
  const Scenario s = tiny();
  const auto rows = sweep(s, SweepVariable::sensing_db, {0.0, 3.0}, {Method::parse("ma"), Method::parse("fixed")});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].method == "ma");
  CHECK(rows[1].method == "fixed");
  CHECK(rows[2].value == 3.0);
  for (const auto& r : rows) CHECK(r.feasible);
  // The fixed row is exactly the fixed placement solved on this point's channels.
  const Scenario point = with_value(s, SweepVariable::sensing_db, 3.0);
  const ChannelSet ch = synthesize_channels(point.channel_params(), point.seed);
  const FitnessResult direct = solve_fitness(ch, fixed_linear_placement(4, 1), fixed_linear_placement(4, 1),
                                             point.thresholds(), point.sca_settings(), point.d_min);
  CHECK(rows[3].power_w == direct.sca.power_w);
  CHECK_THROWS_AS(sweep(s, SweepVariable::sensing_db, {3.0, 0.0}, {Method::parse("ma")}), ConfigError);
}

TEST_CASE("built-in invariant and oracle suites pass on the small scenario") {
  const Scenario s = tiny();
  for (const auto& c : run_invariant_checks(s)) {
    INFO(c.name, " ", c.detail);
    CHECK(c.passed);
  }
  for (const auto& c : run_oracle_checks(s)) {
    INFO(c.name, " ", c.detail);
    CHECK(c.passed);
  }
}
