#include "maisac/channel.hpp"

#include <cstring>
#include <random>

namespace maisac {

namespace {

double phase(Point2 delta, Direction dir, double wavelength) {
  return 2.0 * kPi *
         (delta.x * std::cos(dir.elevation) * std::sin(dir.azimuth) +
          delta.y * std::sin(dir.elevation)) /
         wavelength;
}

double uniform_angle(std::mt19937_64& gen) { return (unit_uniform(gen) - 0.5) * kPi; }

std::vector<std::vector<Direction>> draw_paths(std::uint64_t seed, std::uint64_t stream,
                                               int users, int paths) {
  std::vector<std::vector<Direction>> out(static_cast<std::size_t>(users));
  for (int u = 0; u < users; ++u) {
    for (int l = 0; l < paths; ++l) {
      std::mt19937_64 gen(derive_seed(seed, stream, static_cast<std::uint64_t>(u),
                                      static_cast<std::uint64_t>(l)));
      const double el = uniform_angle(gen);
      const double az = uniform_angle(gen);
      out[static_cast<std::size_t>(u)].push_back({el, az});
    }
  }
  return out;
}

CMatrix candidate_channels(const CandidateGrid& grid, int elements,
                           const std::vector<std::vector<Direction>>& paths, double wavelength) {
  const int users = static_cast<int>(paths.size());
  const int m = grid.count();
  CMatrix block(users, m);
  for (int u = 0; u < users; ++u) {
    for (int k = 0; k < m; ++k) {
      block(u, k) = multipath_gain(grid.position(k), grid.position(0),
                                   paths[static_cast<std::size_t>(u)], wavelength);
    }
  }
  CMatrix full(users, m * elements);
  for (int e = 0; e < elements; ++e) full.middleCols(e * m, m) = block;
  return full;
}

CMatrix assemble(const CMatrix& hat, const Placement& p, const char* what) {
  const int m = p.candidate_count();
  if (hat.cols() != static_cast<Eigen::Index>(m) * p.element_count()) {
    throw DomainError(std::string(what) + ": placement does not match channel dimensions");
  }
  CMatrix out(hat.rows(), p.element_count());
  for (int e = 0; e < p.element_count(); ++e) out.col(e) = hat.col(e * m + p.selected(e));
  return out;
}

std::vector<Point2> shifted(std::span<const Point2> pts, Point2 offset) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (auto p : pts) out.push_back(p + offset);
  return out;
}

}  // namespace

CVector steering_vector(std::span<const Point2> positions, Direction dir, double wavelength) {
  if (positions.empty()) throw DomainError("steering vector needs at least one position");
  const auto n = static_cast<Eigen::Index>(positions.size());
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  CVector a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i) = std::polar(norm, phase(positions[static_cast<std::size_t>(i)] - positions[0], dir,
                                  wavelength));
  }
  return a;
}

Complex multipath_gain(Point2 candidate, Point2 anchor, std::span<const Direction> paths,
                       double wavelength) {
  if (paths.empty()) throw DomainError("multipath gain needs at least one path");
  Complex sum{0.0, 0.0};
  for (const auto& dir : paths) sum += std::polar(1.0, phase(candidate - anchor, dir, wavelength));
  return sum;
}

ChannelSet synthesize_channels(const ChannelParams& params, std::uint64_t seed) {
  if (params.rx_elements < 1 || params.tx_elements < 1) throw ConfigError("arrays need elements");
  if (params.uplink_users < 0 || params.downlink_users < 0) throw ConfigError("user counts < 0");
  if (params.paths < 1) throw ConfigError("at least one path per user is required");
  if (params.rx_elements > params.rx_grid.count() || params.tx_elements > params.tx_grid.count()) {
    throw ConfigError("more elements than candidate positions");
  }
  ChannelSet set;
  set.params = params;
  set.angles.target = params.target;
  set.angles.clutter = params.clutter;
  set.angles.uplink_paths = draw_paths(seed, 1, params.uplink_users, params.paths);
  set.angles.downlink_paths = draw_paths(seed, 2, params.downlink_users, params.paths);
  set.ghat = candidate_channels(params.rx_grid, params.rx_elements, set.angles.uplink_paths,
                                params.wavelength);
  set.hhat = candidate_channels(params.tx_grid, params.tx_elements, set.angles.downlink_paths,
                                params.wavelength);
  return set;
}

CMatrix assemble_uplink(const CMatrix& ghat, const Placement& rx) {
  return assemble(ghat, rx, "assemble_uplink");
}

CMatrix assemble_downlink(const CMatrix& hhat, const Placement& tx) {
  return assemble(hhat, tx, "assemble_downlink");
}

CMatrix self_interference(double eta, std::span<const Point2> rx_positions,
                          std::span<const Point2> tx_positions, double wavelength) {
  const auto nr = static_cast<Eigen::Index>(rx_positions.size());
  const auto nt = static_cast<Eigen::Index>(tx_positions.size());
  CMatrix h(nr, nt);
  const double amplitude = std::sqrt(eta);
  for (Eigen::Index r = 0; r < nr; ++r) {
    for (Eigen::Index t = 0; t < nt; ++t) {
      const double d = distance(rx_positions[static_cast<std::size_t>(r)],
                                tx_positions[static_cast<std::size_t>(t)]);
      if (!(d > 0.0)) throw DomainError("self-interference needs disjoint transmit/receive arrays");
      h(r, t) = std::polar(amplitude, -2.0 * kPi * d / wavelength);
    }
  }
  return h;
}

SensingMatrices sensing_matrices(const AngleSet& angles, Complex target_gain,
                                 std::span<const Point2> rx_positions,
                                 std::span<const Point2> tx_positions, const CMatrix& hsi,
                                 double wavelength) {
  auto response = [&](Direction dir) -> CMatrix {
    return steering_vector(rx_positions, dir, wavelength) *
           steering_vector(tx_positions, dir, wavelength).adjoint();
  };
  SensingMatrices s;
  s.target = response(angles.target);
  if (hsi.rows() != s.target.rows() || hsi.cols() != s.target.cols()) {
    throw DomainError("self-interference matrix has wrong dimensions");
  }
  s.q = hsi;
  for (const auto& k : angles.clutter) s.q += k.gain * response(k.direction);
  s.c = s.q + target_gain * s.target;
  return s;
}

PlacedChannels place(const ChannelSet& channels, const Placement& rx, const Placement& tx) {
  const auto& prm = channels.params;
  if (rx.element_count() != prm.rx_elements || tx.element_count() != prm.tx_elements) {
    throw DomainError("placement element counts do not match the channel set");
  }
  PlacedChannels pc;
  pc.wavelength = prm.wavelength;
  pc.rx_positions = rx.positions(prm.rx_grid);
  pc.tx_positions = tx.positions(prm.tx_grid);

  const CMatrix g = assemble_uplink(channels.ghat, rx);
  const CMatrix h = assemble_downlink(channels.hhat, tx);
  for (Eigen::Index u = 0; u < g.rows(); ++u) {
    pc.uplink.push_back(g.row(u).transpose());
    pc.alpha_uplink.push_back(prm.alpha_uplink);
  }
  const double amp_d = std::sqrt(prm.alpha_downlink);
  for (Eigen::Index d = 0; d < h.rows(); ++d) pc.downlink.push_back(amp_d * h.row(d).transpose());

  pc.target_rx = steering_vector(pc.rx_positions, channels.angles.target, prm.wavelength);
  pc.target_tx = steering_vector(pc.tx_positions, channels.angles.target, prm.wavelength);
  pc.target_gain = prm.target_gain;
  const auto tx_world = shifted(pc.tx_positions, prm.tx_offset);
  pc.hsi = self_interference(prm.si_power, pc.rx_positions, tx_world, prm.wavelength);
  pc.sensing = sensing_matrices(channels.angles, prm.target_gain, pc.rx_positions,
                                pc.tx_positions, pc.hsi, prm.wavelength);
  pc.noise_bs = prm.noise_bs;
  pc.noise_user = prm.noise_user;
  return pc;
}

PlacedChannels rescale_power(const PlacedChannels& placed, double power_unit) {
  if (!(power_unit > 0.0)) throw DomainError("power unit must be positive");
  PlacedChannels out = placed;
  out.noise_bs /= power_unit;
  out.noise_user /= power_unit;
  return out;
}

std::uint64_t checksum(const ChannelSet& channels) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto feed_matrix = [&](const CMatrix& m) {
    feed(m.data(), static_cast<std::size_t>(m.size()) * sizeof(Complex));
  };
  feed_matrix(channels.ghat);
  feed_matrix(channels.hhat);
  auto feed_dirs = [&](const std::vector<std::vector<Direction>>& all) {
    for (const auto& user : all) {
      for (const auto& d : user) feed(&d, sizeof(Direction));
    }
  };
  feed_dirs(channels.angles.uplink_paths);
  feed_dirs(channels.angles.downlink_paths);
  const auto& p = channels.params;
  const double scalars[] = {p.wavelength, p.noise_bs,      p.noise_user,
                            p.alpha_uplink, p.alpha_downlink, p.si_power,
                            p.target_gain.real(), p.target_gain.imag(), p.tx_offset.x,
                            p.tx_offset.y};
  feed(scalars, sizeof(scalars));
  return h;
}

}  // namespace maisac
