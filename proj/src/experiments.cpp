#include "maisac/experiments.hpp"

#include <algorithm>
#include <chrono>

namespace maisac {

namespace {

constexpr std::uint64_t kSwarmStream = 0x5A;
constexpr std::uint64_t kRandomStream = 0x5B;

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  // Zero unless enabled, so outputs stay byte-identical across runs.
  double ms() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

FitnessFunction fitness_for(const Scenario& s, const ChannelSet& channels) {
  const Thresholds th = s.thresholds();
  const ScaSettings settings = s.sca_settings();
  const double d_min = s.d_min;
  return [&channels, th, settings, d_min](const Placement& rx, const Placement& tx) {
    return solve_fitness(channels, rx, tx, th, settings, d_min);
  };
}

void finish(const Scenario& s, const ChannelSet& channels, RunResult& r) {
  r.channel_checksum = checksum(channels);
  if (r.fitness.sca.feasible) {
    r.sinr_ratios = sinr_ratios(place(channels, r.rx, r.tx), r.fitness.sca.solution, s.thresholds());
  }
}

}  // namespace

Method Method::parse(const std::string& name) {
  if (name == "ma") return {Kind::movable, 0};
  if (name == "fixed") return {Kind::fixed_linear, 0};
  if (name.rfind("random", 0) == 0 && name.size() > 6) {
    const std::string digits = name.substr(6);
    if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 6) {
      const int k = std::stoi(digits);
      if (k >= 1) return {Kind::random_placement, k};
    }
  }
  throw ConfigError("unknown method '" + name + "' (expected ma, fixed or random<k>)");
}

std::string Method::name() const {
  switch (kind) {
    case Kind::movable:
      return "ma";
    case Kind::fixed_linear:
      return "fixed";
    case Kind::random_placement:
      return "random" + std::to_string(index);
  }
  return "unknown";
}

double RunResult::power_w() const {
  return feasible() ? fitness.sca.solution.total_power() : kInfinity;
}

std::uint64_t swarm_seed(const Scenario& s) { return derive_seed(s.seed, kSwarmStream); }

RunResult run_single(const Scenario& s, const ChannelSet& channels, bool timing) {
  const Stopwatch clock(timing);
  FitnessCache cache(fitness_for(s, channels));
  SwarmState swarm = init_swarm(s.rx_grid(), s.rx_elements, s.tx_grid(), s.tx_elements, s.d_min,
                                s.swarm, swarm_seed(s));
  SwarmResult best = run(swarm, cache, s.swarm);
  RunResult r;
  r.method = Method::parse("ma");
  r.rx = best.rx;
  r.tx = best.tx;
  r.fitness = std::move(best.best);
  r.history = std::move(best.history);
  r.fitness_evaluations = cache.evaluations();
  finish(s, channels, r);
  r.wall_ms = clock.ms();
  return r;
}

RunResult run_single(const Scenario& s, bool timing) {
  return run_single(s, synthesize_channels(s.channel_params(), s.seed), timing);
}

Placement fixed_linear_placement(int candidates, int elements) {
  if (elements < 1 || elements > candidates) throw ConfigError("grid cannot host the elements");
  std::vector<int> sel(static_cast<std::size_t>(elements));
  for (int e = 0; e < elements; ++e) sel[static_cast<std::size_t>(e)] = e;
  return Placement(candidates, std::move(sel));
}

std::pair<Placement, Placement> random_placement(const Scenario& s, int k) {
  std::mt19937_64 gen(derive_seed(s.seed, kRandomStream, static_cast<std::uint64_t>(k)));
  Placement rx = random_feasible_placement(s.rx_grid(), s.rx_elements, s.d_min, gen);
  Placement tx = random_feasible_placement(s.tx_grid(), s.tx_elements, s.d_min, gen);
  return {rx.canonical(), tx.canonical()};
}

RunResult run_baseline(const Scenario& s, const ChannelSet& channels, const Method& method,
                       bool timing) {
  const Stopwatch clock(timing);
  RunResult r;
  r.method = method;
  switch (method.kind) {
    case Method::Kind::fixed_linear:
      r.rx = fixed_linear_placement(s.rx_candidates, s.rx_elements);
      r.tx = fixed_linear_placement(s.tx_candidates, s.tx_elements);
      break;
    case Method::Kind::random_placement:
      std::tie(r.rx, r.tx) = random_placement(s, method.index);
      break;
    case Method::Kind::movable:
      throw DomainError("the movable method is not a baseline");
  }
  r.fitness = fitness_for(s, channels)(r.rx, r.tx);
  r.fitness_evaluations = 1;
  finish(s, channels, r);
  r.wall_ms = clock.ms();
  return r;
}

RunResult run_method(const Scenario& s, const ChannelSet& channels, const Method& method,
                     bool timing) {
  return method.kind == Method::Kind::movable ? run_single(s, channels, timing)
                                              : run_baseline(s, channels, method, timing);
}

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "gamma_r") return SweepVariable::sensing_db;
  if (name == "gamma_d") return SweepVariable::downlink_db;
  if (name == "paths") return SweepVariable::paths;
  if (name == "p_min") return SweepVariable::p_min_w;
  throw ConfigError("unknown sweep variable '" + name + "' (expected gamma_r, gamma_d, paths or p_min)");
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::sensing_db:
      return "gamma_r";
    case SweepVariable::downlink_db:
      return "gamma_d";
    case SweepVariable::paths:
      return "paths";
    case SweepVariable::p_min_w:
      return "p_min";
  }
  return "unknown";
}

Scenario with_value(const Scenario& s, SweepVariable v, double value) {
  Scenario out = s;
  switch (v) {
    case SweepVariable::sensing_db:
      out.sensing_db = value;
      break;
    case SweepVariable::downlink_db:
      out.downlink_db = value;
      break;
    case SweepVariable::paths:
      if (value != std::floor(value) || value < 1.0) {
        throw ConfigError("path counts must be positive integers");
      }
      out.paths = static_cast<int>(value);
      break;
    case SweepVariable::p_min_w:
      out.p_min_w = value;
      break;
  }
  out.validate();
  return out;
}

SweepRow to_row(SweepVariable v, double value, const RunResult& r) {
  SweepRow row;
  row.variable = to_string(v);
  row.value = value;
  row.method = r.method.name();
  row.feasible = r.feasible();
  row.iters = r.fitness.sca.iterations;
  row.wall_ms = r.wall_ms;
  if (row.feasible) {
    const auto& sol = r.fitness.sca.solution;
    row.tr_w = sol.transmit_power();
    row.sum_pu = sol.uplink_power_sum();
    row.power_w = r.power_w();
    row.power_dbm = watts_to_dbm(row.power_w);
  }
  return row;
}

std::vector<SweepRow> sweep(const Scenario& s, SweepVariable v, const std::vector<double>& values,
                            const std::vector<Method>& methods, bool timing) {
  if (!std::is_sorted(values.begin(), values.end())) {
    throw ConfigError("sweep values must be ascending");
  }
  if (methods.empty()) throw ConfigError("sweep needs at least one method");
  std::vector<SweepRow> rows;
  for (double value : values) {
    const Scenario point = with_value(s, v, value);
    const ChannelSet channels = synthesize_channels(point.channel_params(), point.seed);
    const std::uint64_t digest = checksum(channels);
    for (const Method& m : methods) {
      const RunResult r = run_method(point, channels, m, timing);
      if (r.channel_checksum != digest) {
        throw NumericalError("methods at one sweep point saw different channels");
      }
      rows.push_back(to_row(v, value, r));
    }
  }
  return rows;
}

Beampatterns beampatterns(const ChannelSet& channels, const RunResult& run, double step_deg) {
  if (!run.fitness.sca.feasible) throw DomainError("beampatterns need a feasible solution");
  const PlacedChannels pc = place(channels, run.rx, run.tx);
  const auto& sol = run.fitness.sca.solution;
  const auto grid = angle_grid(-90.0, 90.0, step_deg);
  Beampatterns b;
  for (double a : grid) {
    b.elevation_deg.push_back(rad_to_deg(a));
    b.azimuth_deg.push_back(rad_to_deg(a));
  }
  const double lambda = pc.wavelength;
  b.transmit = transmit_beampattern(sol.aggregate(), pc.tx_positions, lambda, grid, grid);
  b.sensing = receive_beampattern(sol.sensing_filter, pc.rx_positions, lambda, grid, grid);
  for (const auto& r : sol.uplink_filters) {
    b.uplink.push_back(receive_beampattern(r, pc.rx_positions, lambda, grid, grid));
  }
  return b;
}

}  // namespace maisac
