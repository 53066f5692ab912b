#include "maisac/report.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace maisac {

namespace {

constexpr const char* kSweepHeader =
    "variable,value,method,power_w,power_dbm,tr_w,sum_pu,feasible,iters,wall_ms";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, int line) {
  if (text == "inf") return kInfinity;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("sweep csv line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return v;
}

int parse_count(const std::string& text, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("sweep csv line " + std::to_string(line) + ": bad integer '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericalError("number formatting failed");
  return std::string(buf, ptr);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << "\n";
  for (const auto& r : rows) {
    out << r.variable << ',' << format_number(r.value) << ',' << r.method << ','
        << format_number(r.power_w) << ',' << format_number(r.power_dbm) << ','
        << format_number(r.tr_w) << ',' << format_number(r.sum_pu) << ',' << (r.feasible ? 1 : 0)
        << ',' << r.iters << ',' << format_number(r.wall_ms) << "\n";
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw ConfigError("sweep csv: unexpected header");
  }
  std::vector<SweepRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 10) {
      throw ConfigError("sweep csv line " + std::to_string(number) + ": expected 10 columns");
    }
    SweepRow r;
    r.variable = c[0];
    r.value = parse_number(c[1], number);
    r.method = c[2];
    r.power_w = parse_number(c[3], number);
    r.power_dbm = parse_number(c[4], number);
    r.tr_w = parse_number(c[5], number);
    r.sum_pu = parse_number(c[6], number);
    if (c[7] != "0" && c[7] != "1") {
      throw ConfigError("sweep csv line " + std::to_string(number) + ": feasible must be 0 or 1");
    }
    r.feasible = c[7] == "1";
    r.iters = parse_count(c[8], number);
    r.wall_ms = parse_number(c[9], number);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_history_csv(std::ostream& out, const std::vector<SwarmHistoryEntry>& history) {
  out << "iteration,best_fitness,mean_fitness,feasible\n";
  for (const auto& h : history) {
    out << h.iteration << ',' << format_number(h.best_fitness) << ','
        << format_number(h.mean_fitness) << ',' << h.feasible << "\n";
  }
}

void write_beampattern_csv(std::ostream& out, const std::vector<double>& elevation_deg,
                           const std::vector<double>& azimuth_deg, const RMatrix& values) {
  if (values.rows() != static_cast<Eigen::Index>(elevation_deg.size()) ||
      values.cols() != static_cast<Eigen::Index>(azimuth_deg.size())) {
    throw DomainError("beampattern does not match its angle grid");
  }
  out << "theta_deg,phi_deg,value\n";
  for (std::size_t i = 0; i < elevation_deg.size(); ++i) {
    for (std::size_t j = 0; j < azimuth_deg.size(); ++j) {
      out << format_number(elevation_deg[i]) << ',' << format_number(azimuth_deg[j]) << ','
          << format_number(values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
          << "\n";
    }
  }
}

void write_run_summary(std::ostream& out, const RunResult& run) {
  auto placement = [](const Placement& p) {
    std::string s;
    for (int e = 0; e < p.element_count(); ++e) s += (e ? " " : "") + std::to_string(p.selected(e));
    return s;
  };
  out << "method = " << run.method.name() << "\n";
  out << "rx_placement = " << placement(run.rx) << "\n";
  out << "tx_placement = " << placement(run.tx) << "\n";
  out << "feasible = " << (run.feasible() ? "true" : "false") << "\n";
  out << "violations = " << run.fitness.violations << "\n";
  out << "fitness = " << format_number(run.fitness.fitness) << "\n";
  out << "power_w = " << format_number(run.power_w()) << "\n";
  const auto& sca = run.fitness.sca;
  if (sca.feasible) {
    out << "power_dbm = " << format_number(watts_to_dbm(run.power_w())) << "\n";
    out << "tr_w = " << format_number(sca.solution.transmit_power()) << "\n";
    out << "sum_pu = " << format_number(sca.solution.uplink_power_sum()) << "\n";
    for (std::size_t u = 0; u < sca.solution.uplink_power.size(); ++u) {
      out << "p_" << u + 1 << " = " << format_number(sca.solution.uplink_power[u]) << "\n";
    }
  }
  out << "sca_converged = " << (sca.converged ? "true" : "false") << "\n";
  out << "sca_iterations = " << sca.iterations << "\n";
  out << "rank_residual = " << format_number(sca.rank_residual) << "\n";
  out << "aggregate_rank_residual = " << format_number(sca.aggregate_rank_residual) << "\n";
  if (!sca.message.empty()) out << "sca_message = " << sca.message << "\n";
  for (std::size_t k = 0; k < run.sinr_ratios.size(); ++k) {
    out << "sinr_ratio_" << k << " = " << format_number(run.sinr_ratios[k]) << "\n";
  }
  out << "fitness_evaluations = " << run.fitness_evaluations << "\n";
  out << "channel_checksum = " << run.channel_checksum << "\n";
}

}  // namespace maisac
