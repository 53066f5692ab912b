#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "maisac/bpso.hpp"
#include "maisac/scenario.hpp"

namespace maisac {

/// "ma" (swarm-optimized placement), "fixed" (first grid row), or "random<k>"
/// with k >= 1 (k-th seeded random feasible placement).
struct Method {
  enum class Kind { movable, fixed_linear, random_placement };
  Kind kind = Kind::movable;
  int index = 0;  // random draw number, random_placement only

  static Method parse(const std::string& name);
  std::string name() const;
};

struct RunResult {
  Method method;
  Placement rx;
  Placement tx;
  FitnessResult fitness;
  std::vector<double> sinr_ratios;  // sensing, uplink..., downlink...; empty when infeasible
  std::vector<SwarmHistoryEntry> history;  // movable only
  int fitness_evaluations = 0;
  std::uint64_t channel_checksum = 0;
  double wall_ms = 0.0;

  bool feasible() const { return fitness.sca.feasible && fitness.violations == 0; }
  /// Tr(W~) + sum p_u recomputed from the stored solution; +inf when infeasible.
  double power_w() const;
};

/// Swarm seed derived from the scenario seed, independent of the channel streams.
std::uint64_t swarm_seed(const Scenario& s);

RunResult run_single(const Scenario& s, const ChannelSet& channels, bool timing = false);
RunResult run_single(const Scenario& s, bool timing = false);
/// Fixed-linear or random placement; the SCA solver still runs.
RunResult run_baseline(const Scenario& s, const ChannelSet& channels, const Method& method,
                       bool timing = false);
RunResult run_method(const Scenario& s, const ChannelSet& channels, const Method& method,
                     bool timing = false);

/// Placement used by the fixed-linear baseline: candidates 0..N-1.
Placement fixed_linear_placement(int candidates, int elements);
/// k-th seeded random placement with no spacing violation.
std::pair<Placement, Placement> random_placement(const Scenario& s, int k);

enum class SweepVariable { sensing_db, downlink_db, paths, p_min_w };
SweepVariable parse_sweep_variable(const std::string& name);
std::string to_string(SweepVariable v);
/// Copy of `s` with the variable set to `value`.
Scenario with_value(const Scenario& s, SweepVariable v, double value);

struct SweepRow {
  std::string variable;
  double value = 0.0;
  std::string method;
  double power_w = kInfinity;
  double power_dbm = kInfinity;
  double tr_w = kInfinity;
  double sum_pu = kInfinity;
  bool feasible = false;
  int iters = 0;
  double wall_ms = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

SweepRow to_row(SweepVariable v, double value, const RunResult& r);

/// Values must be ascending. Every method at one point shares the channel
/// realization; a checksum mismatch raises NumericalError.
std::vector<SweepRow> sweep(const Scenario& s, SweepVariable v, const std::vector<double>& values,
                            const std::vector<Method>& methods, bool timing = false);

struct Beampatterns {
  std::vector<double> elevation_deg;
  std::vector<double> azimuth_deg;
  RMatrix transmit;             // a_t^H W~ a_t
  RMatrix sensing;              // |v^H a_r|^2, unit-norm v
  std::vector<RMatrix> uplink;  // |r_u^H a_r|^2, unit-norm r_u
};

/// 1-degree grid over [-90, 90] in both angles.
Beampatterns beampatterns(const ChannelSet& channels, const RunResult& run,
                          double step_deg = 1.0);

}  // namespace maisac
