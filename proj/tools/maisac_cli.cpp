#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "maisac/checks.hpp"
#include "maisac/experiments.hpp"
#include "maisac/report.hpp"

namespace fs = std::filesystem;
using namespace maisac;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "out";
  bool trace = false;
  bool timing = false;
  std::vector<std::string> overrides;
};

Scenario load(const Globals& g) {
  Scenario s = g.config.empty() ? Scenario{} : load_scenario(g.config);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_scenario_value(s, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed_given) s.seed = g.seed;
  s.validate();
  return s;
}

std::ofstream open_out(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  std::ofstream f(fs::path(g.out) / name);
  if (!f) throw ConfigError("cannot write " + (fs::path(g.out) / name).string());
  return f;
}

void write_resolved(const Globals& g, const Scenario& s) {
  auto f = open_out(g, "scenario.resolved");
  f << resolved_config(s);
}

void print_trace(const RunResult& r) {
  for (const auto& h : r.history) {
    std::printf("swarm j=%d best=%s mean=%s feasible=%d\n", h.iteration,
                format_number(h.best_fitness).c_str(), format_number(h.mean_fitness).c_str(),
                h.feasible);
  }
  for (const auto& e : r.fitness.sca.trace) {
    std::printf("sca phase=%d it=%d objective_w=%s power_w=%s rank=%s rho=%s slack=%s ratio=%s %s\n",
                e.phase, e.iteration, format_number(e.objective_w).c_str(),
                format_number(e.power_w).c_str(), format_number(e.rank_residual).c_str(),
                format_number(e.rho).c_str(), format_number(e.slack).c_str(),
                format_number(e.min_sinr_ratio).c_str(), e.status.c_str());
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double x = std::stod(item, &used);
    if (used != item.size()) throw ConfigError("bad sweep value '" + item + "'");
    v.push_back(x);
  }
  if (v.empty()) throw ConfigError("--values needs at least one number");
  return v;
}

int report_checks(const std::vector<CheckResult>& checks) {
  int failed = 0;
  for (const auto& c : checks) {
    std::printf("%s  %s%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.empty() ? "" : "  ", c.detail.c_str());
    if (!c.passed) ++failed;
  }
  std::printf("%d of %zu checks passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movable-antenna full-duplex ISAC power minimization"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Scenario seed (overrides the config)");
  app.add_option("--config", g.config, "Scenario file (key = value lines)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--set", g.overrides, "Override one key, e.g. --set threshold.uplink_db=-6");
  app.add_flag("--trace", g.trace, "Print swarm and SCA traces");
  app.add_flag("--timing", g.timing, "Record wall-clock times (outputs stop being reproducible)");

  auto* run_cmd = app.add_subcommand("run", "Optimize placements and beamformers for one scenario");
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter across methods");
  std::string var;
  std::string values;
  std::string methods = "ma,fixed";
  sweep_cmd->add_option("--var", var, "gamma_r, gamma_d, paths or p_min")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated ascending values")->required();
  sweep_cmd->add_option("--methods", methods, "Comma-separated: ma, fixed, random<k>")
      ->capture_default_str();
  auto* beam_cmd = app.add_subcommand("beampattern", "Optimize, then write beampatterns");
  auto* validate_cmd = app.add_subcommand("validate", "Run the invariant suite");
  auto* oracle_cmd = app.add_subcommand("oracle", "Run randomized and exhaustive oracles");

  CLI11_PARSE(app, argc, argv);
  g.seed_given = seed_opt->count() > 0;

  try {
    const Scenario s = load(g);
    if (*run_cmd) {
      const RunResult r = run_single(s, g.timing);
      write_resolved(g, s);
      auto hist = open_out(g, "history.csv");
      write_history_csv(hist, r.history);
      auto summary = open_out(g, "solution.txt");
      write_run_summary(summary, r);
      write_run_summary(std::cout, r);
      if (g.trace) print_trace(r);
      return 0;
    }
    if (*sweep_cmd) {
      std::vector<Method> ms;
      std::stringstream ss(methods);
      std::string m;
      while (std::getline(ss, m, ',')) ms.push_back(Method::parse(m));
      const auto rows = sweep(s, parse_sweep_variable(var), parse_values(values), ms, g.timing);
      write_resolved(g, s);
      auto f = open_out(g, "sweep.csv");
      write_sweep_csv(f, rows);
      write_sweep_csv(std::cout, rows);
      return 0;
    }
    if (*beam_cmd) {
      const ChannelSet ch = synthesize_channels(s.channel_params(), s.seed);
      const RunResult r = run_single(s, ch, g.timing);
      write_resolved(g, s);
      write_run_summary(std::cout, r);
      if (g.trace) print_trace(r);
      if (!r.fitness.sca.feasible) {
        std::cerr << "no feasible placement; beampatterns not written\n";
        return 2;
      }
      const Beampatterns b = beampatterns(ch, r);
      auto write = [&](const std::string& name, const RMatrix& m) {
        auto f = open_out(g, "beampattern_" + name + ".csv");
        write_beampattern_csv(f, b.elevation_deg, b.azimuth_deg, m);
      };
      write("transmit", b.transmit);
      write("sensing", b.sensing);
      for (std::size_t u = 0; u < b.uplink.size(); ++u) write("uplink" + std::to_string(u + 1), b.uplink[u]);
      return 0;
    }
    if (*validate_cmd) return report_checks(run_invariant_checks(s));
    if (*oracle_cmd) return report_checks(run_oracle_checks(s));
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
