#include "maisac/metrics.hpp"

#include <Eigen/Eigenvalues>

namespace maisac {

namespace {

constexpr double kPsdTolerance = 1e-9;

void check_power(const PlacedChannels& pc, const CMatrix& w_total,
                 std::span<const double> uplink_power) {
  if (w_total.rows() != pc.tx_elements() || w_total.cols() != pc.tx_elements()) {
    throw DomainError("transmit covariance has wrong dimensions");
  }
  if (static_cast<int>(uplink_power.size()) != pc.uplink_users()) {
    throw DomainError("one uplink power per uplink user is required");
  }
  const double scale = std::max(1.0, w_total.norm());
  if (w_total.size() > 0 && min_eigenvalue(w_total) < -kPsdTolerance * scale) {
    throw DomainError("transmit covariance is not positive semidefinite");
  }
}

XMatrix user_term(const PlacedChannels& pc, std::span<const double> p, int u) {
  const XVector g = extend(pc.uplink[static_cast<std::size_t>(u)]);
  const long double scale = static_cast<long double>(pc.alpha_uplink[static_cast<std::size_t>(u)]) *
                            p[static_cast<std::size_t>(u)];
  return scale * (g * g.adjoint());
}

Eigen::LLT<XMatrix> factor(const XMatrix& m) {
  Eigen::LLT<XMatrix> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive definite");
  return llt;
}

long double quad(const XMatrix& m, const XVector& x) { return std::real(x.dot(m * x)); }

// a^H M^{-1} a for positive definite M.
long double inverse_quad(const XMatrix& m, const CVector& a) {
  const XVector x = extend(a);
  return std::real(x.dot(factor(m).solve(x)));
}

CMatrix psd_part(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  if (es.eigenvalues()(0) >= 0.0) return m;
  const RVector lambda = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

CMatrix BeamformingSolution::aggregate() const {
  CMatrix total = sensing;
  for (const auto& w : downlink) total += w;
  return total;
}

double BeamformingSolution::transmit_power() const { return std::real(aggregate().trace()); }

double BeamformingSolution::uplink_power_sum() const {
  double s = 0.0;
  for (double p : uplink_power) s += p;
  return s;
}

double BeamformingSolution::total_power() const { return transmit_power() + uplink_power_sum(); }

double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

CovariancePair covariances(const PlacedChannels& pc, const CMatrix& w_total,
                           std::span<const double> uplink_power) {
  check_power(pc, w_total, uplink_power);
  const int nr = pc.rx_elements();
  const XMatrix noise = static_cast<long double>(pc.noise_bs) * XMatrix::Identity(nr, nr);
  // Negative eigenvalues within tolerance are clipped: after the echo gain
  // they can exceed the noise floor and break positive definiteness.
  const XMatrix w = extend(psd_part(w_total));
  const XMatrix q = extend(pc.sensing.q);
  const XMatrix c = extend(pc.sensing.c);
  XMatrix users = XMatrix::Zero(nr, nr);
  for (int u = 0; u < pc.uplink_users(); ++u) users += user_term(pc, uplink_power, u);

  CovariancePair out;
  out.theta = users + q * w * q.adjoint() + noise;
  const XMatrix echo = c * w * c.adjoint() + noise;
  for (int u = 0; u < pc.uplink_users(); ++u) {
    out.omegas.push_back(users - user_term(pc, uplink_power, u) + echo);
  }
  return out;
}

double sensing_sinr(const PlacedChannels& pc, const CMatrix& w_total,
                    std::span<const double> uplink_power, const CVector& v) {
  if (v.size() != pc.rx_elements()) throw DomainError("sensing filter has wrong dimension");
  if (v.squaredNorm() == 0.0) throw DomainError("sensing filter is zero");
  const auto cov = covariances(pc, w_total, uplink_power);
  const XMatrix a = extend(pc.sensing.target);
  const XVector x = extend(v);
  const long double signal =
      std::norm(pc.target_gain) * quad(a * extend(w_total) * a.adjoint(), x);
  return static_cast<double>(signal / quad(cov.theta, x));
}

double uplink_sinr(const PlacedChannels& pc, const CMatrix& w_total,
                   std::span<const double> uplink_power, const CVector& r, int user) {
  if (user < 0 || user >= pc.uplink_users()) throw DomainError("uplink user out of range");
  if (r.size() != pc.rx_elements()) throw DomainError("uplink filter has wrong dimension");
  if (r.squaredNorm() == 0.0) throw DomainError("uplink filter is zero");
  const auto cov = covariances(pc, w_total, uplink_power);
  const XVector x = extend(r);
  const long double signal = quad(user_term(pc, uplink_power, user), x);
  return static_cast<double>(signal / quad(cov.omegas[static_cast<std::size_t>(user)], x));
}

double downlink_sinr(const PlacedChannels& pc, const BeamformingSolution& sol, int user) {
  if (user < 0 || user >= pc.downlink_users()) throw DomainError("downlink user out of range");
  if (static_cast<int>(sol.downlink.size()) != pc.downlink_users()) {
    throw DomainError("one downlink covariance per downlink user is required");
  }
  const XVector h = extend(pc.downlink[static_cast<std::size_t>(user)]);
  long double signal = 0.0L;
  long double interference = quad(extend(sol.sensing), h);
  for (int d = 0; d < pc.downlink_users(); ++d) {
    const long double v = quad(extend(sol.downlink[static_cast<std::size_t>(d)]), h);
    (d == user ? signal : interference) += v;
  }
  return static_cast<double>(signal / (interference + pc.noise_user));
}

double sensing_sinr(const PlacedChannels& pc, const BeamformingSolution& sol) {
  return sensing_sinr(pc, sol.aggregate(), sol.uplink_power, sol.sensing_filter);
}

double uplink_sinr(const PlacedChannels& pc, const BeamformingSolution& sol, int user) {
  return uplink_sinr(pc, sol.aggregate(), sol.uplink_power,
                     sol.uplink_filters.at(static_cast<std::size_t>(user)), user);
}

Receivers optimal_receivers(const PlacedChannels& pc, const CMatrix& w_total,
                            std::span<const double> uplink_power) {
  const auto cov = covariances(pc, w_total, uplink_power);
  Receivers rx;
  rx.sensing = factor(cov.theta).solve(extend(pc.target_rx)).cast<Complex>();
  for (int u = 0; u < pc.uplink_users(); ++u) {
    const auto& g = pc.uplink[static_cast<std::size_t>(u)];
    const double amp = std::sqrt(pc.alpha_uplink[static_cast<std::size_t>(u)]);
    rx.uplink.push_back(
        factor(cov.omegas[static_cast<std::size_t>(u)]).solve(extend(CVector(amp * g))).cast<Complex>());
  }
  return rx;
}

double optimal_sensing_sinr(const PlacedChannels& pc, const CMatrix& w_total,
                            std::span<const double> uplink_power) {
  const auto cov = covariances(pc, w_total, uplink_power);
  const long double fractional = inverse_quad(cov.theta, pc.target_rx);
  const XVector at = extend(pc.target_tx);
  return static_cast<double>(std::norm(pc.target_gain) * quad(extend(w_total), at) * fractional);
}

double optimal_uplink_sinr(const PlacedChannels& pc, const CMatrix& w_total,
                           std::span<const double> uplink_power, int user) {
  if (user < 0 || user >= pc.uplink_users()) throw DomainError("uplink user out of range");
  const auto cov = covariances(pc, w_total, uplink_power);
  const long double fractional =
      inverse_quad(cov.omegas[static_cast<std::size_t>(user)], pc.uplink[static_cast<std::size_t>(user)]);
  return static_cast<double>(uplink_power[static_cast<std::size_t>(user)] *
                             pc.alpha_uplink[static_cast<std::size_t>(user)] * fractional);
}

void attach_receivers(const PlacedChannels& pc, BeamformingSolution& sol) {
  auto rx = optimal_receivers(pc, sol.aggregate(), sol.uplink_power);
  sol.uplink_filters = std::move(rx.uplink);
  sol.sensing_filter = std::move(rx.sensing);
}

std::vector<double> angle_grid(double start_deg, double stop_deg, double step_deg) {
  if (!(step_deg > 0.0) || stop_deg < start_deg) throw DomainError("invalid angle grid");
  const auto n = static_cast<int>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(deg_to_rad(start_deg + i * step_deg));
  return out;
}

RMatrix transmit_beampattern(const CMatrix& w_total, std::span<const Point2> tx_positions,
                             double wavelength, std::span<const double> elevations,
                             std::span<const double> azimuths) {
  if (w_total.rows() != static_cast<Eigen::Index>(tx_positions.size())) {
    throw DomainError("transmit covariance does not match the array");
  }
  RMatrix out(static_cast<Eigen::Index>(elevations.size()),
              static_cast<Eigen::Index>(azimuths.size()));
  for (std::size_t i = 0; i < elevations.size(); ++i) {
    for (std::size_t j = 0; j < azimuths.size(); ++j) {
      const CVector a = steering_vector(tx_positions, {elevations[i], azimuths[j]}, wavelength);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::real(a.dot(w_total * a));
    }
  }
  return out;
}

RMatrix receive_beampattern(const CVector& filter, std::span<const Point2> rx_positions,
                            double wavelength, std::span<const double> elevations,
                            std::span<const double> azimuths) {
  if (filter.size() != static_cast<Eigen::Index>(rx_positions.size())) {
    throw DomainError("filter does not match the array");
  }
  const double n = filter.norm();
  if (n == 0.0) throw DomainError("receive filter is zero");
  const CVector f = filter / n;
  RMatrix out(static_cast<Eigen::Index>(elevations.size()),
              static_cast<Eigen::Index>(azimuths.size()));
  for (std::size_t i = 0; i < elevations.size(); ++i) {
    for (std::size_t j = 0; j < azimuths.size(); ++j) {
      const CVector a = steering_vector(rx_positions, {elevations[i], azimuths[j]}, wavelength);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::norm(f.dot(a));
    }
  }
  return out;
}

}  // namespace maisac
