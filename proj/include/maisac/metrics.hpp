#pragma once

#include <span>
#include <vector>

#include "maisac/channel.hpp"
#include "maisac/common.hpp"

namespace maisac {

struct BeamformingSolution {
  std::vector<CMatrix> downlink;     // W_d, d = 1..D
  CMatrix sensing;                   // W_0
  std::vector<double> uplink_power;  // p_u, watts
  std::vector<CVector> beamformers;  // w_d extracted from W_d; empty until extraction
  std::vector<CVector> uplink_filters;
  CVector sensing_filter;

  /// W~ = W_0 + sum_d W_d.
  CMatrix aggregate() const;
  /// Tr(W~) + sum_u p_u.
  double total_power() const;
  double transmit_power() const;
  double uplink_power_sum() const;
};

struct CovariancePair {
  XMatrix theta;
  std::vector<XMatrix> omegas;
};

/// Theta = sum_u alpha_u p_u g_u g_u^H + Q W~ Q^H + s_r I and the per-user Omega_u.
/// Throws DomainError when W~ is not PSD (tolerance relative to its norm).
CovariancePair covariances(const PlacedChannels& pc, const CMatrix& w_total,
                           std::span<const double> uplink_power);

double sensing_sinr(const PlacedChannels& pc, const CMatrix& w_total,
                    std::span<const double> uplink_power, const CVector& v);
double uplink_sinr(const PlacedChannels& pc, const CMatrix& w_total,
                   std::span<const double> uplink_power, const CVector& r, int user);
double downlink_sinr(const PlacedChannels& pc, const BeamformingSolution& sol, int user);

/// Filters stored in the solution.
double sensing_sinr(const PlacedChannels& pc, const BeamformingSolution& sol);
double uplink_sinr(const PlacedChannels& pc, const BeamformingSolution& sol, int user);

struct Receivers {
  std::vector<CVector> uplink;  // Omega_u^{-1} sqrt(alpha_u) g_u
  CVector sensing;              // Theta^{-1} a_r(theta_0, phi_0)
};

Receivers optimal_receivers(const PlacedChannels& pc, const CMatrix& w_total,
                            std::span<const double> uplink_power);

/// SINR reached by the optimal receivers, in closed form:
/// |beta_0|^2 (a_t^H W~ a_t) a_r^H Theta^{-1} a_r and p_u alpha_u g_u^H Omega_u^{-1} g_u.
double optimal_sensing_sinr(const PlacedChannels& pc, const CMatrix& w_total,
                            std::span<const double> uplink_power);
double optimal_uplink_sinr(const PlacedChannels& pc, const CMatrix& w_total,
                           std::span<const double> uplink_power, int user);

/// Fills uplink_filters and sensing_filter with the optimal receivers.
void attach_receivers(const PlacedChannels& pc, BeamformingSolution& sol);

/// Angular sample grid in radians.
std::vector<double> angle_grid(double start_deg, double stop_deg, double step_deg);

/// a_t(el, az)^H W~ a_t(el, az); rows index elevation, columns azimuth.
RMatrix transmit_beampattern(const CMatrix& w_total, std::span<const Point2> tx_positions,
                             double wavelength, std::span<const double> elevations,
                             std::span<const double> azimuths);

/// |f^H a_r(el, az)|^2 with f scaled to unit norm.
RMatrix receive_beampattern(const CVector& filter, std::span<const Point2> rx_positions,
                            double wavelength, std::span<const double> elevations,
                            std::span<const double> azimuths);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& m);

}  // namespace maisac
