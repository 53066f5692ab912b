#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maisac/common.hpp"
#include "maisac/geometry.hpp"

namespace maisac {

/// Elevation / azimuth pair in radians, both in [-pi/2, pi/2].
struct Direction {
  double elevation = 0.0;
  double azimuth = 0.0;
};

struct ClutterSource {
  Direction direction;
  Complex gain;  // beta_k, amplitude
};

struct AngleSet {
  Direction target;
  std::vector<ClutterSource> clutter;
  std::vector<std::vector<Direction>> uplink_paths;    // [user][path]
  std::vector<std::vector<Direction>> downlink_paths;  // [user][path]
};

/// Everything needed to synthesize one channel realization. Powers in watts,
/// gains linear.
struct ChannelParams {
  CandidateGrid rx_grid;
  CandidateGrid tx_grid;
  Point2 tx_offset{0.30, 0.0};  // transmit grid origin relative to the receive grid origin
  int rx_elements = 2;
  int tx_elements = 2;
  int uplink_users = 2;
  int downlink_users = 2;
  int paths = 3;
  double wavelength = 0.06;
  double noise_bs = 1e-13;
  double noise_user = 1e-13;
  double alpha_uplink = 1e-12;
  double alpha_downlink = 1e-12;
  Complex target_gain{std::pow(10.0, 9.0 / 20.0), 0.0};
  double si_power = 1e-11;
  Direction target;
  std::vector<ClutterSource> clutter;
};

/// One synthesized scenario realization over the full candidate grids.
struct ChannelSet {
  ChannelParams params;
  AngleSet angles;
  CMatrix ghat;  // U x (M * N_r); block n_r holds every candidate for element n_r
  CMatrix hhat;  // D x (N * N_t)
};

/// Per-element phase response; entry n = exp(j 2 pi [dx cos(el) sin(az) + dy sin(el)] / lambda) / sqrt(N)
/// with displacements measured from the first position.
CVector steering_vector(std::span<const Point2> positions, Direction dir, double wavelength);

/// Sum of unit-modulus path terms at `candidate` relative to `anchor`.
Complex multipath_gain(Point2 candidate, Point2 anchor, std::span<const Direction> paths,
                       double wavelength);

/// Path angles are drawn per (user, path) from independent counter-derived
/// streams, so the first L paths are shared by every configuration with >= L paths.
ChannelSet synthesize_channels(const ChannelParams& params, std::uint64_t seed);

/// Columns of the per-element blocks picked by the placement (G = Ghat B_r).
CMatrix assemble_uplink(const CMatrix& ghat, const Placement& rx);
/// H = Hhat B_t.
CMatrix assemble_downlink(const CMatrix& hhat, const Placement& tx);

/// [H_SI]_{r,t} = sqrt(eta) exp(-j 2 pi d_{r,t} / lambda); positions in a common frame.
CMatrix self_interference(double eta, std::span<const Point2> rx_positions,
                          std::span<const Point2> tx_positions, double wavelength);

struct SensingMatrices {
  CMatrix target;  // A(theta_0, phi_0) = a_r a_t^H
  CMatrix q;       // clutter + self-interference
  CMatrix c;       // q + beta_0 * target
};

SensingMatrices sensing_matrices(const AngleSet& angles, Complex target_gain,
                                 std::span<const Point2> rx_positions,
                                 std::span<const Point2> tx_positions, const CMatrix& hsi,
                                 double wavelength);

/// Channel quantities specialised to one pair of placements; the input to
/// every SINR / covariance computation.
struct PlacedChannels {
  std::vector<CVector> uplink;    // g_u (N_r), fading not applied
  std::vector<CVector> downlink;  // h_d (N_t), sqrt(alpha_d) applied
  std::vector<double> alpha_uplink;
  CVector target_rx;  // a_r(theta_0, phi_0)
  CVector target_tx;  // a_t(theta_0, phi_0)
  Complex target_gain;
  SensingMatrices sensing;
  CMatrix hsi;
  double noise_bs = 1.0;
  double noise_user = 1.0;
  std::vector<Point2> rx_positions;
  std::vector<Point2> tx_positions;  // transmit grid frame
  double wavelength = 0.06;

  int rx_elements() const { return static_cast<int>(target_rx.size()); }
  int tx_elements() const { return static_cast<int>(target_tx.size()); }
  int uplink_users() const { return static_cast<int>(uplink.size()); }
  int downlink_users() const { return static_cast<int>(downlink.size()); }
};

PlacedChannels place(const ChannelSet& channels, const Placement& rx, const Placement& tx);

/// Same physics with every power divided by `power_unit` (watts); SINRs are unchanged.
PlacedChannels rescale_power(const PlacedChannels& placed, double power_unit);

/// FNV-1a digest of the synthesized matrices and angles.
std::uint64_t checksum(const ChannelSet& channels);

}  // namespace maisac
