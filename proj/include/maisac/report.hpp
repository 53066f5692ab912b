#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "maisac/experiments.hpp"

namespace maisac {

/// Shortest decimal form that parses back to the same double ("inf" for +inf).
std::string format_number(double v);

/// variable,value,method,power_w,power_dbm,tr_w,sum_pu,feasible,iters,wall_ms
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Throws ConfigError on a malformed header or row.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// iteration,best_fitness,mean_fitness,feasible
void write_history_csv(std::ostream& out, const std::vector<SwarmHistoryEntry>& history);

/// theta_deg,phi_deg,value with theta = elevation, phi = azimuth.
void write_beampattern_csv(std::ostream& out, const std::vector<double>& elevation_deg,
                           const std::vector<double>& azimuth_deg, const RMatrix& values);

/// Human-readable key = value summary of one run, including every SINR ratio.
void write_run_summary(std::ostream& out, const RunResult& run);

}  // namespace maisac
