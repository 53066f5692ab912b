#include <doctest.h>

#include "maisac/metrics.hpp"
#include "support.hpp"

using namespace maisac;
using maisac::testing::Gaussian;
using maisac::testing::relative_error;

namespace {

// Well-conditioned synthetic instance: unit noise, O(1) channels.
PlacedChannels random_instance(Gaussian& g, int nr, int nt, int users_up, int users_down) {
  PlacedChannels pc;
  for (int k = 0; k < nr; ++k) pc.rx_positions.push_back({0.03 * k, 0.0});
  for (int k = 0; k < nt; ++k) pc.tx_positions.push_back({0.03 * k, 0.03});
  for (int u = 0; u < users_up; ++u) {
    pc.uplink.push_back(g.vector(nr));
    pc.alpha_uplink.push_back(g.uniform(0.5, 2.0));
  }
  for (int d = 0; d < users_down; ++d) pc.downlink.push_back(g.vector(nt));
  pc.target_rx = g.unit_vector(nr);
  pc.target_tx = g.unit_vector(nt);
  pc.target_gain = g.complex() * 2.0;
  pc.sensing.target = pc.target_rx * pc.target_tx.adjoint();
  pc.sensing.q = 0.3 * g.matrix(nr, nt);
  pc.sensing.c = pc.sensing.q + pc.target_gain * pc.sensing.target;
  pc.hsi = CMatrix::Zero(nr, nt);
  pc.noise_bs = g.uniform(0.5, 1.5);
  pc.noise_user = g.uniform(0.5, 1.5);
  return pc;
}

std::vector<double> random_powers(Gaussian& g, int n) {
  std::vector<double> p;
  for (int k = 0; k < n; ++k) p.push_back(g.uniform(0.1, 3.0));
  return p;
}

CMatrix to_c(const XMatrix& m) { return m.cast<Complex>(); }

}  // namespace

TEST_CASE("covariances match a term-by-term sum") {
  Gaussian g(101);
  for (int k = 0; k < 30; ++k) {
    const PlacedChannels pc = random_instance(g, 3, 2, 3, 2);
    const CMatrix w = g.positive_definite(2);
    const auto p = random_powers(g, 3);
    const auto cov = covariances(pc, w, p);
    CMatrix theta = pc.noise_bs * CMatrix::Identity(3, 3) + pc.sensing.q * w * pc.sensing.q.adjoint();
    for (int u = 0; u < 3; ++u) {
      theta += pc.alpha_uplink[u] * p[u] * pc.uplink[u] * pc.uplink[u].adjoint();
    }
    CHECK(relative_error(to_c(cov.theta), theta) < 1e-13);
    for (int u = 0; u < 3; ++u) {
      CMatrix omega = pc.noise_bs * CMatrix::Identity(3, 3) + pc.sensing.c * w * pc.sensing.c.adjoint();
      for (int v = 0; v < 3; ++v) {
        if (v != u) omega += pc.alpha_uplink[v] * p[v] * pc.uplink[v] * pc.uplink[v].adjoint();
      }
      CHECK(relative_error(to_c(cov.omegas[u]), omega) < 1e-13);
    }
  }
}

TEST_CASE("zero power leaves only noise; one user sees only the echo") {
  Gaussian g(102);
  const PlacedChannels pc = random_instance(g, 2, 2, 2, 1);
  const auto cov = covariances(pc, CMatrix::Zero(2, 2), std::vector<double>{0.0, 0.0});
  CHECK(relative_error(to_c(cov.theta), pc.noise_bs * CMatrix::Identity(2, 2)) == 0.0);
  CHECK(relative_error(to_c(cov.omegas[1]), pc.noise_bs * CMatrix::Identity(2, 2)) == 0.0);

  const PlacedChannels one = random_instance(g, 2, 2, 1, 1);
  const CMatrix w = g.positive_definite(2);
  const auto c1 = covariances(one, w, std::vector<double>{5.0});
  const CMatrix expect = one.sensing.c * w * one.sensing.c.adjoint() + one.noise_bs * CMatrix::Identity(2, 2);
  CHECK(relative_error(to_c(c1.omegas[0]), expect) < 1e-14);
}

TEST_CASE("non-PSD transmit covariance and bad dimensions are rejected") {
  Gaussian g(103);
  const PlacedChannels pc = random_instance(g, 2, 2, 1, 1);
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(covariances(pc, bad, std::vector<double>{1.0}), DomainError);
  CHECK_THROWS_AS(covariances(pc, CMatrix::Identity(3, 3), std::vector<double>{1.0}), DomainError);
  CHECK_THROWS_AS(covariances(pc, CMatrix::Identity(2, 2), std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(sensing_sinr(pc, CMatrix::Identity(2, 2), std::vector<double>{1.0}, CVector::Zero(2)),
                  DomainError);
}

TEST_CASE("sensing SINR matches a Monte-Carlo expectation") {
  Gaussian g(104);
  const PlacedChannels pc = random_instance(g, 2, 2, 1, 1);
  const CMatrix w = g.positive_definite(2);
  const std::vector<double> p{0.7};
  const CVector v = g.unit_vector(2);
  const double exact = sensing_sinr(pc, w, p, v);

  Eigen::LLT<CMatrix> root(w);
  const CMatrix l = root.matrixL();
  const double sqrt_noise = std::sqrt(pc.noise_bs);
  double signal = 0.0;
  double interference = 0.0;
  constexpr int kSamples = 100000;
  for (int k = 0; k < kSamples; ++k) {
    const CVector x = l * g.vector(2);  // E[x x^H] = W
    const Complex s = v.dot(pc.target_gain * pc.sensing.target * x);
    const Complex i = v.dot(pc.sensing.q * x) +
                      v.dot(std::sqrt(pc.alpha_uplink[0] * p[0]) * pc.uplink[0] * g.complex()) +
                      v.dot(sqrt_noise * g.vector(2));
    signal += std::norm(s);
    interference += std::norm(i);
  }
  const double sampled = signal / interference;
  // Two independent sample means of roughly exponential variables: 1% is ~3 sigma.
  CHECK(sampled == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("closed-form receivers beat random unit filters") {
  Gaussian g(105);
  for (int k = 0; k < 5; ++k) {
    const PlacedChannels pc = random_instance(g, 3, 2, 2, 1);
    const CMatrix w = g.positive_definite(2);
    const auto p = random_powers(g, 2);
    const Receivers rx = optimal_receivers(pc, w, p);
    const double best_s = optimal_sensing_sinr(pc, w, p);
    CHECK(sensing_sinr(pc, w, p, rx.sensing) == doctest::Approx(best_s).epsilon(1e-12));
    for (int u = 0; u < 2; ++u) {
      CHECK(uplink_sinr(pc, w, p, rx.uplink[u], u) ==
            doctest::Approx(optimal_uplink_sinr(pc, w, p, u)).epsilon(1e-12));
    }
    for (int t = 0; t < 2000; ++t) {
      const CVector f = g.unit_vector(3);
      CHECK(sensing_sinr(pc, w, p, f) <= best_s * (1.0 + 1e-9));
      for (int u = 0; u < 2; ++u) {
        CHECK(uplink_sinr(pc, w, p, f, u) <= optimal_uplink_sinr(pc, w, p, u) * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("white interference gives the matched filter") {
  Gaussian g(106);
  PlacedChannels pc = random_instance(g, 3, 2, 1, 1);
  pc.sensing.q.setZero();
  pc.sensing.c.setZero();
  const Receivers rx = optimal_receivers(pc, CMatrix::Zero(2, 2), std::vector<double>{1.0});
  const CVector g0 = pc.uplink[0];
  const Complex ratio = rx.uplink[0](0) / g0(0);
  CHECK(relative_error(rx.uplink[0], ratio * g0) < 1e-14);
}

TEST_CASE("downlink SINR with rank-one covariances") {
  Gaussian g(107);
  const PlacedChannels pc = random_instance(g, 2, 3, 1, 2);
  BeamformingSolution sol;
  const CVector w1 = g.vector(3);
  const CVector w2 = g.vector(3);
  sol.downlink = {w1 * w1.adjoint(), w2 * w2.adjoint()};
  sol.sensing = g.positive_definite(3, 0.0);
  sol.uplink_power = {1.0};
  const CVector& h = pc.downlink[0];
  const double expect = std::norm(h.dot(w1)) /
                        (std::norm(h.dot(w2)) + std::real(h.dot(sol.sensing * h)) + pc.noise_user);
  CHECK(downlink_sinr(pc, sol, 0) == doctest::Approx(expect).epsilon(1e-13));

  sol.downlink[1].setZero();
  sol.sensing.setZero();
  CHECK(downlink_sinr(pc, sol, 0) == doctest::Approx(std::norm(h.dot(w1)) / pc.noise_user).epsilon(1e-13));
  CHECK_THROWS_AS(downlink_sinr(pc, sol, 2), DomainError);
}

TEST_CASE("total power adds the trace of the aggregate and the uplink powers") {
  BeamformingSolution sol;
  sol.sensing = 0.5 * CMatrix::Identity(2, 2);
  sol.downlink = {CMatrix::Identity(2, 2), 2.0 * CMatrix::Identity(2, 2)};
  sol.uplink_power = {0.25, 0.75};
  CHECK(sol.transmit_power() == doctest::Approx(7.0));
  CHECK(sol.uplink_power_sum() == doctest::Approx(1.0));
  CHECK(sol.total_power() == doctest::Approx(8.0));
}

TEST_CASE("beampatterns: steered peak, single-element flat response") {
  const std::vector<Point2> tx{{0.0, 0.0}, {0.03, 0.0}, {0.0, 0.03}, {0.03, 0.03}};
  const Direction look{deg_to_rad(20.0), deg_to_rad(-35.0)};
  const CVector a = steering_vector(tx, look, 0.06);
  const auto el = angle_grid(-90.0, 90.0, 1.0);
  const auto az = angle_grid(-90.0, 90.0, 1.0);
  REQUIRE(el.size() == 181);
  const RMatrix pat = transmit_beampattern(a * a.adjoint(), tx, 0.06, el, az);
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  const double peak = pat.maxCoeff(&i, &j);
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pat(110, 55) == doctest::Approx(1.0).epsilon(1e-12));  // (20, -35) on the grid

  const std::vector<Point2> single{{0.0, 0.0}};
  const RMatrix flat = receive_beampattern(CVector::Ones(1) * Complex(0.0, 3.0), single, 0.06, el, az);
  CHECK((flat.array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(receive_beampattern(CVector::Zero(1), single, 0.06, el, az), DomainError);
}
