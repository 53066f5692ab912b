#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "maisac/bpso.hpp"
#include "maisac/channel.hpp"
#include "maisac/sca.hpp"

namespace maisac {

struct AngleDeg {
  double elevation = 0.0;
  double azimuth = 0.0;
};

/// Full experiment configuration. Angles in degrees, gains and thresholds in
/// dB, noise in dBm; conversion to linear units happens in the accessors.
struct Scenario {
  // grid
  int rx_candidates = 9;
  int tx_candidates = 9;
  double spacing = 0.03;
  double d_min = 0.03;
  double tx_offset_x = 0.30;
  double tx_offset_y = 0.0;
  // arrays and users
  int rx_elements = 2;
  int tx_elements = 2;
  int uplink_users = 2;
  int downlink_users = 2;
  int paths = 3;
  // propagation
  double wavelength = 0.06;
  double noise_bs_dbm = -100.0;
  double noise_user_dbm = -100.0;
  double alpha_uplink_db = -120.0;
  double alpha_downlink_db = -120.0;
  double si_db = -110.0;
  // sensing geometry
  double target_gain_db = 9.0;  // amplitude in dB, 20 log10 |beta_0|
  AngleDeg target{30.0, 0.0};
  std::vector<double> clutter_elevation_deg{-40.0, 50.0};
  std::vector<double> clutter_azimuth_deg{0.0, 0.0};
  std::vector<double> clutter_gain_db{-9.0, -9.0};  // amplitudes
  bool randomize_angles = false;  // target and clutter drawn from the seed
  // QoS
  double sensing_db = 6.0;
  double uplink_db = -3.0;
  double downlink_db = 6.0;
  double p_min_w = 0.0;
  // solvers
  SwarmSettings swarm;
  ScaSettings sca;
  std::uint64_t seed = 1;

  void validate() const;
  ChannelParams channel_params() const;
  Thresholds thresholds() const;
  /// SCA settings with the uplink floor applied.
  ScaSettings sca_settings() const;
  CandidateGrid rx_grid() const;
  CandidateGrid tx_grid() const;
};

/// `key = value` lines; `#` starts a comment; keys are dotted
/// (e.g. `threshold.sensing_db`). Unknown keys, duplicate keys and malformed
/// values raise ConfigError with the line number.
Scenario parse_scenario(std::istream& in, const Scenario& base = {});
Scenario load_scenario(const std::string& path, const Scenario& base = {});

/// Sets one dotted key; same validation as the parser.
void set_scenario_value(Scenario& s, const std::string& key, const std::string& value);

/// Every key with its effective value, one per line, in schema order. Parsing
/// the output reproduces the scenario exactly.
std::string resolved_config(const Scenario& s);

std::vector<std::string> scenario_keys();

}  // namespace maisac
