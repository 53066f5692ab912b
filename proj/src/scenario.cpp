#include "maisac/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace maisac {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<void(Scenario&, const std::string&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

template <typename T>
Field number(std::string key, T Scenario::*member) {
  return {std::move(key),
          [member](Scenario& s, const std::string& k, const std::string& v) {
            if constexpr (std::is_same_v<T, double>) {
              s.*member = parse_double(k, v);
            } else {
              s.*member = parse_int<T>(k, v);
            }
          },
          [member](const Scenario& s) {
            if constexpr (std::is_same_v<T, double>) {
              return format_double(s.*member);
            } else {
              return std::to_string(s.*member);
            }
          }};
}

template <typename Owner, typename T>
Field nested(std::string key, Owner Scenario::*owner, T Owner::*member) {
  return {std::move(key),
          [owner, member](Scenario& s, const std::string& k, const std::string& v) {
            if constexpr (std::is_same_v<T, double>) {
              s.*owner.*member = parse_double(k, v);
            } else {
              s.*owner.*member = parse_int<T>(k, v);
            }
          },
          [owner, member](const Scenario& s) {
            if constexpr (std::is_same_v<T, double>) {
              return format_double(s.*owner.*member);
            } else {
              return std::to_string(s.*owner.*member);
            }
          }};
}

Field list(std::string key, std::vector<double> Scenario::*member) {
  return {std::move(key),
          [member](Scenario& s, const std::string& k, const std::string& v) {
            s.*member = parse_list(k, v);
          },
          [member](const Scenario& s) { return format_list(s.*member); }};
}

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(number("grid.rx_candidates", &Scenario::rx_candidates));
    f.push_back(number("grid.tx_candidates", &Scenario::tx_candidates));
    f.push_back(number("grid.spacing", &Scenario::spacing));
    f.push_back(number("grid.d_min", &Scenario::d_min));
    f.push_back(number("grid.tx_offset_x", &Scenario::tx_offset_x));
    f.push_back(number("grid.tx_offset_y", &Scenario::tx_offset_y));
    f.push_back(number("array.rx_elements", &Scenario::rx_elements));
    f.push_back(number("array.tx_elements", &Scenario::tx_elements));
    f.push_back(number("users.uplink", &Scenario::uplink_users));
    f.push_back(number("users.downlink", &Scenario::downlink_users));
    f.push_back(number("channel.paths", &Scenario::paths));
    f.push_back(number("channel.wavelength", &Scenario::wavelength));
    f.push_back(number("channel.noise_bs_dbm", &Scenario::noise_bs_dbm));
    f.push_back(number("channel.noise_user_dbm", &Scenario::noise_user_dbm));
    f.push_back(number("channel.alpha_uplink_db", &Scenario::alpha_uplink_db));
    f.push_back(number("channel.alpha_downlink_db", &Scenario::alpha_downlink_db));
    f.push_back(number("channel.si_db", &Scenario::si_db));
    f.push_back(number("sensing.target_gain_db", &Scenario::target_gain_db));
    f.push_back(nested("sensing.target_elevation_deg", &Scenario::target, &AngleDeg::elevation));
    f.push_back(nested("sensing.target_azimuth_deg", &Scenario::target, &AngleDeg::azimuth));
    f.push_back(list("sensing.clutter_elevation_deg", &Scenario::clutter_elevation_deg));
    f.push_back(list("sensing.clutter_azimuth_deg", &Scenario::clutter_azimuth_deg));
    f.push_back(list("sensing.clutter_gain_db", &Scenario::clutter_gain_db));
    f.push_back({"sensing.randomize_angles",
                 [](Scenario& s, const std::string& k, const std::string& v) {
                   s.randomize_angles = parse_bool(k, v);
                 },
                 [](const Scenario& s) { return std::string(s.randomize_angles ? "true" : "false"); }});
    f.push_back(number("threshold.sensing_db", &Scenario::sensing_db));
    f.push_back(number("threshold.uplink_db", &Scenario::uplink_db));
    f.push_back(number("threshold.downlink_db", &Scenario::downlink_db));
    f.push_back(number("threshold.p_min_w", &Scenario::p_min_w));
    f.push_back(nested("swarm.particles", &Scenario::swarm, &SwarmSettings::particles));
    f.push_back(nested("swarm.iterations", &Scenario::swarm, &SwarmSettings::iterations));
    f.push_back(nested("swarm.c1", &Scenario::swarm, &SwarmSettings::c1));
    f.push_back(nested("swarm.c2", &Scenario::swarm, &SwarmSettings::c2));
    f.push_back(nested("swarm.omega_max", &Scenario::swarm, &SwarmSettings::omega_max));
    f.push_back(nested("swarm.omega_min", &Scenario::swarm, &SwarmSettings::omega_min));
    f.push_back(nested("swarm.v_min", &Scenario::swarm, &SwarmSettings::v_min));
    f.push_back(nested("swarm.v_max", &Scenario::swarm, &SwarmSettings::v_max));
    f.push_back(nested("sca.rho_initial", &Scenario::sca, &ScaSettings::rho_initial));
    f.push_back(nested("sca.rho_growth", &Scenario::sca, &ScaSettings::rho_growth));
    f.push_back(nested("sca.rho_max", &Scenario::sca, &ScaSettings::rho_max));
    f.push_back(nested("sca.kappa", &Scenario::sca, &ScaSettings::kappa));
    f.push_back(nested("sca.epsilon", &Scenario::sca, &ScaSettings::epsilon));
    f.push_back(nested("sca.max_iterations", &Scenario::sca, &ScaSettings::max_iterations));
    f.push_back(nested("sca.max_restoration_iterations", &Scenario::sca,
                       &ScaSettings::max_restoration_iterations));
    f.push_back(nested("sca.rank_tolerance", &Scenario::sca, &ScaSettings::rank_tolerance));
    f.push_back({"sca.conic_feasibility",
                 [](Scenario& s, const std::string& k, const std::string& v) {
                   s.sca.conic.feasibility_tolerance = parse_double(k, v);
                 },
                 [](const Scenario& s) { return format_double(s.sca.conic.feasibility_tolerance); }});
    f.push_back({"sca.conic_gap",
                 [](Scenario& s, const std::string& k, const std::string& v) {
                   s.sca.conic.gap_tolerance = parse_double(k, v);
                 },
                 [](const Scenario& s) { return format_double(s.sca.conic.gap_tolerance); }});
    f.push_back({"sca.conic_max_iterations",
                 [](Scenario& s, const std::string& k, const std::string& v) {
                   s.sca.conic.max_iterations = parse_int<int>(k, v);
                 },
                 [](const Scenario& s) { return std::to_string(s.sca.conic.max_iterations); }});
    f.push_back({"seed",
                 [](Scenario& s, const std::string& k, const std::string& v) {
                   s.seed = parse_int<std::uint64_t>(k, v);
                 },
                 [](const Scenario& s) { return std::to_string(s.seed); }});
    return f;
  }();
  return fields;
}

Direction random_direction(std::uint64_t seed, std::uint64_t k) {
  std::mt19937_64 gen(derive_seed(seed, 0xA7, k));
  const double el = (unit_uniform(gen) - 0.5) * kPi;
  const double az = (unit_uniform(gen) - 0.5) * kPi;
  return {el, az};
}

}  // namespace

void Scenario::validate() const {
  auto positive = [](int v, const char* what) {
    if (v < 1) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(rx_candidates, "grid.rx_candidates");
  positive(tx_candidates, "grid.tx_candidates");
  positive(rx_elements, "array.rx_elements");
  positive(tx_elements, "array.tx_elements");
  positive(uplink_users, "users.uplink");
  positive(downlink_users, "users.downlink");
  positive(paths, "channel.paths");
  if (rx_candidates < rx_elements || tx_candidates < tx_elements) {
    throw ConfigError("each grid needs at least as many candidates as elements");
  }
  if (!(spacing > 0.0) || !(wavelength > 0.0)) {
    throw ConfigError("grid.spacing and channel.wavelength must be positive");
  }
  rx_grid();
  tx_grid();
  if (d_min < 0.0) throw ConfigError("grid.d_min must be nonnegative");
  if (clutter_elevation_deg.size() != clutter_azimuth_deg.size() ||
      clutter_elevation_deg.size() != clutter_gain_db.size()) {
    throw ConfigError("clutter elevation, azimuth and gain lists must have equal length");
  }
  auto angle_ok = [](double deg) { return deg >= -90.0 && deg <= 90.0; };
  if (!angle_ok(target.elevation) || !angle_ok(target.azimuth)) {
    throw ConfigError("target angles must lie in [-90, 90] degrees");
  }
  for (std::size_t k = 0; k < clutter_elevation_deg.size(); ++k) {
    if (!angle_ok(clutter_elevation_deg[k]) || !angle_ok(clutter_azimuth_deg[k])) {
      throw ConfigError("clutter angles must lie in [-90, 90] degrees");
    }
  }
  if (p_min_w < 0.0) throw ConfigError("threshold.p_min_w must be nonnegative");
  if (swarm.particles < 1 || swarm.iterations < 1) {
    throw ConfigError("swarm.particles and swarm.iterations must be positive");
  }
  if (!(swarm.v_min < swarm.v_max)) throw ConfigError("swarm.v_min must be below swarm.v_max");
  if (sca.max_iterations < 1 || sca.max_restoration_iterations < 1 ||
      sca.conic.max_iterations < 1) {
    throw ConfigError("solver iteration caps must be positive");
  }
}

CandidateGrid Scenario::rx_grid() const { return build_grid(rx_candidates, spacing); }
CandidateGrid Scenario::tx_grid() const { return build_grid(tx_candidates, spacing); }

ChannelParams Scenario::channel_params() const {
  validate();
  ChannelParams p;
  p.rx_grid = rx_grid();
  p.tx_grid = tx_grid();
  p.tx_offset = {tx_offset_x, tx_offset_y};
  p.rx_elements = rx_elements;
  p.tx_elements = tx_elements;
  p.uplink_users = uplink_users;
  p.downlink_users = downlink_users;
  p.paths = paths;
  p.wavelength = wavelength;
  p.noise_bs = dbm_to_watts(noise_bs_dbm);
  p.noise_user = dbm_to_watts(noise_user_dbm);
  p.alpha_uplink = db_to_linear(alpha_uplink_db);
  p.alpha_downlink = db_to_linear(alpha_downlink_db);
  p.si_power = db_to_linear(si_db);
  p.target_gain = Complex(std::pow(10.0, target_gain_db / 20.0), 0.0);
  p.target = randomize_angles ? random_direction(seed, 0)
                              : Direction{deg_to_rad(target.elevation), deg_to_rad(target.azimuth)};
  for (std::size_t k = 0; k < clutter_elevation_deg.size(); ++k) {
    const Direction d = randomize_angles ? random_direction(seed, k + 1)
                                         : Direction{deg_to_rad(clutter_elevation_deg[k]),
                                                     deg_to_rad(clutter_azimuth_deg[k])};
    p.clutter.push_back({d, Complex(std::pow(10.0, clutter_gain_db[k] / 20.0), 0.0)});
  }
  return p;
}

Thresholds Scenario::thresholds() const {
  Thresholds t;
  t.sensing = db_to_linear(sensing_db);
  t.uplink.assign(static_cast<std::size_t>(uplink_users), db_to_linear(uplink_db));
  t.downlink.assign(static_cast<std::size_t>(downlink_users), db_to_linear(downlink_db));
  return t;
}

ScaSettings Scenario::sca_settings() const {
  ScaSettings s = sca;
  s.uplink_floor_w = p_min_w;
  return s;
}

void set_scenario_value(Scenario& s, const std::string& key, const std::string& value) {
  for (const auto& f : schema()) {
    if (f.key == key) {
      f.set(s, key, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

Scenario parse_scenario(std::istream& in, const Scenario& base) {
  Scenario s = base;
  std::set<std::string> seen;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    try {
      set_scenario_value(s, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path, const Scenario& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  return parse_scenario(in, base);
}

std::string resolved_config(const Scenario& s) {
  std::string out;
  for (const auto& f : schema()) out += f.key + " = " + f.get(s) + "\n";
  return out;
}

std::vector<std::string> scenario_keys() {
  std::vector<std::string> keys;
  for (const auto& f : schema()) keys.push_back(f.key);
  return keys;
}

}  // namespace maisac
