#include "maisac/checks.hpp"

#include <sstream>

#include "maisac/experiments.hpp"
#include "maisac/report.hpp"

namespace maisac {

namespace {

class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : gen_(seed) {}
  double real() {
    const double u1 = 1.0 - unit_uniform(gen_);  // (0, 1]
    const double u2 = unit_uniform(gen_);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  Complex complex() { return {real() / std::sqrt(2.0), real() / std::sqrt(2.0)}; }
  CMatrix matrix(int r, int c) {
    CMatrix m(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = complex();
    return m;
  }
  CVector vector(int n) { return matrix(n, 1).col(0); }

 private:
  std::mt19937_64 gen_;
};

CheckResult make(std::string name, bool passed, const std::string& detail) {
  return {std::move(name), passed, detail};
}

CMatrix random_pd(Gaussian& g, int n) {
  const CMatrix a = g.matrix(n, n);
  return a * a.adjoint() + 0.1 * CMatrix::Identity(n, n);
}

Scenario reduced(const Scenario& s) {
  Scenario r = s;
  r.rx_candidates = r.tx_candidates = 4;
  r.rx_elements = r.tx_elements = 1;
  // One receive element cannot null the echo: two uplink users, or a single
  // user above about -9 dB, are infeasible at every placement.
  r.uplink_users = r.downlink_users = 1;
  r.uplink_db = -12.0;
  r.swarm.particles = 8;
  r.swarm.iterations = 10;
  return r;
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(const Scenario& s) {
  std::vector<CheckResult> out;
  const ChannelSet ch = synthesize_channels(s.channel_params(), s.seed);

  {
    double worst = 0.0;
    const auto pos = s.rx_grid().positions();
    for (double el : {-80.0, -20.0, 0.0, 35.0, 90.0}) {
      const CVector a = steering_vector(pos, {deg_to_rad(el), deg_to_rad(el / 2.0)}, s.wavelength);
      worst = std::max(worst, std::abs(a.norm() - 1.0));
    }
    out.push_back(make("steering vectors have unit norm", worst <= 1e-12,
                       "max deviation " + format_number(worst)));
  }
  {
    const int m = s.rx_candidates;
    double worst = 0.0;
    for (int e = 1; e < s.rx_elements; ++e) {
      worst = std::max(worst, (ch.ghat.middleCols(e * m, m) - ch.ghat.leftCols(m)).cwiseAbs().maxCoeff());
    }
    out.push_back(make("candidate channel blocks agree across elements", worst == 0.0,
                       "max difference " + format_number(worst)));
  }
  {
    SwarmSettings small = s.swarm;
    small.particles = std::min(small.particles, 6);
    small.iterations = std::min(small.iterations, 4);
    SwarmState swarm = init_swarm(s.rx_grid(), s.rx_elements, s.tx_grid(), s.tx_elements, s.d_min,
                                  small, swarm_seed(s));
    bool one_hot = true;
    int violations = 0;
    const auto drx = distance_matrix(s.rx_grid());
    const auto dtx = distance_matrix(s.tx_grid());
    for (const auto& p : swarm.particles) {
      const auto [rx, tx] = decode(swarm.layout, p.position);
      one_hot = one_hot && encode(swarm.layout, rx, tx) == p.position;
      violations += violation_count(rx, tx, drx, dtx, s.d_min);
    }
    out.push_back(make("initial swarm is one-hot and spacing-feasible", one_hot && violations == 0,
                       "violations " + std::to_string(violations)));

    FitnessCache cache([&](const Placement& rx, const Placement& tx) {
      return solve_fitness(ch, rx, tx, s.thresholds(), s.sca_settings(), s.d_min);
    });
    const SwarmResult res = run(swarm, cache, small);
    bool monotone = true;
    for (std::size_t j = 1; j < res.history.size(); ++j) {
      monotone = monotone && !(res.history[j].best_fitness > res.history[j - 1].best_fitness);
    }
    out.push_back(make("swarm best fitness is non-increasing", monotone,
                       "final best " + format_number(res.history.back().best_fitness)));
  }
  {
    Scenario fixed = s;
    const RunResult r = run_baseline(fixed, ch, Method::parse("fixed"));
    if (!r.fitness.sca.feasible) {
      out.push_back(make("fixed-linear solve is feasible", false, r.fitness.sca.message));
    } else {
      const auto& sol = r.fitness.sca.solution;
      double worst_ratio = kInfinity;
      for (double v : r.sinr_ratios) worst_ratio = std::min(worst_ratio, v);
      out.push_back(make("extracted solution meets every SINR threshold (1e-3 relative)",
                         worst_ratio >= 1.0 - 1e-3, "min ratio " + format_number(worst_ratio)));
      double min_eig = kInfinity;
      for (const auto& w : sol.downlink) min_eig = std::min(min_eig, min_eigenvalue(w));
      min_eig = std::min(min_eig, min_eigenvalue(sol.sensing) / std::max(1.0, sol.sensing.norm()));
      out.push_back(make("covariances are positive semidefinite", min_eig >= -1e-9,
                         "min eigenvalue " + format_number(min_eig)));
      double recomputed = std::real(sol.aggregate().trace());
      for (double p : sol.uplink_power) recomputed += p;
      const double drift = std::abs(recomputed - r.power_w()) / recomputed;
      out.push_back(make("reported power equals Tr(W~) + sum p_u", drift <= 1e-9,
                         "relative drift " + format_number(drift)));
      out.push_back(make("rank residual within tolerance",
                         r.fitness.sca.rank_residual <= s.sca.rank_tolerance,
                         "residual " + format_number(r.fitness.sca.rank_residual)));
    }
    std::stringstream ss;
    write_sweep_csv(ss, {to_row(SweepVariable::sensing_db, s.sensing_db, r)});
    const auto back = read_sweep_csv(ss);
    out.push_back(make("sweep csv round-trips exactly",
                       back.size() == 1 && back[0] == to_row(SweepVariable::sensing_db, s.sensing_db, r),
                       ""));
  }
  {
    std::stringstream ss(resolved_config(s));
    const Scenario back = parse_scenario(ss);
    out.push_back(make("resolved configuration round-trips", resolved_config(back) == resolved_config(s), ""));
  }
  return out;
}

std::vector<CheckResult> run_oracle_checks(const Scenario& s) {
  std::vector<CheckResult> out;
  Gaussian g(derive_seed(s.seed, 0x0C));

  out.push_back(make("sigmoid(2) = 0.8808", std::abs(sigmoid(2.0) - 0.8808) < 5e-5,
                     format_number(sigmoid(2.0))));
  {
    const ChannelSet ch = synthesize_channels(s.channel_params(), s.seed);
    std::mt19937_64 gen(derive_seed(s.seed, 0x0D));
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const Placement rx = random_feasible_placement(s.rx_grid(), s.rx_elements, s.d_min, gen);
      const Placement tx = random_feasible_placement(s.tx_grid(), s.tx_elements, s.d_min, gen);
      const CMatrix dense_g = ch.ghat * rx.block_matrix().cast<Complex>();
      const CMatrix dense_h = ch.hhat * tx.block_matrix().cast<Complex>();
      worst = std::max(worst, (assemble_uplink(ch.ghat, rx) - dense_g).norm() / dense_g.norm());
      worst = std::max(worst, (assemble_downlink(ch.hhat, tx) - dense_h).norm() / dense_h.norm());
    }
    out.push_back(make("channel assembly matches dense selection products", worst <= 1e-12,
                       "max relative error " + format_number(worst)));
  }
  {
    double worst = kInfinity;
    for (int k = 0; k < 50; ++k) {
      const int n = 2 + k % 3;
      const CMatrix prev = random_pd(g, n);
      const CMatrix x = random_pd(g, n);
      const CVector a = g.vector(n);
      const TaylorBound b = taylor_bound_omega(extend(prev), a, 1.0);
      const double exact = std::real(a.dot(x.llt().solve(a)));
      worst = std::min(worst, (exact - b.evaluate(extend(x))) / exact);
    }
    out.push_back(make("Taylor bound lower-bounds the matrix-fractional value", worst >= -1e-12,
                       "min relative slack " + format_number(worst)));
  }
  {
    double worst = kInfinity;
    for (int k = 0; k < 100; ++k) {
      const int n = 2 + k % 3;
      const CMatrix a = g.matrix(n, n);
      const CMatrix b = g.matrix(n, n);
      const CMatrix x = 0.5 * (a + a.adjoint());
      const CMatrix y = 0.5 * (b + b.adjoint());
      // ||Y||_2 >= ||X||_2 + <Y - X, dX> for the spectral norm of PSD-shifted inputs.
      const CMatrix xs = x + 10.0 * CMatrix::Identity(n, n);
      const CMatrix ys = y + 10.0 * CMatrix::Identity(n, n);
      const auto top = [](const CMatrix& m) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues()(m.rows() - 1);
      };
      const double slack = top(ys) - top(xs) - std::real((spectral_subgradient(xs) * (ys - xs)).trace());
      worst = std::min(worst, slack);
    }
    out.push_back(make("spectral subgradient inequality", worst >= -1e-10,
                       "min slack " + format_number(worst)));
  }
  {
    const Scenario r = reduced(s);
    const ChannelSet ch = synthesize_channels(r.channel_params(), r.seed);
    FitnessCache cache([&](const Placement& rx, const Placement& tx) {
      return solve_fitness(ch, rx, tx, r.thresholds(), r.sca_settings(), r.d_min);
    });
    double best = kInfinity;
    for (int a = 0; a < r.rx_candidates; ++a) {
      for (int b = 0; b < r.tx_candidates; ++b) {
        best = std::min(best, cache.evaluate(Placement(r.rx_candidates, {a}),
                                             Placement(r.tx_candidates, {b})).fitness);
      }
    }
    SwarmState swarm = init_swarm(r.rx_grid(), 1, r.tx_grid(), 1, r.d_min, r.swarm, swarm_seed(r));
    const SwarmResult res = run(swarm, cache, r.swarm);
    out.push_back(make("swarm reaches the exhaustive optimum on a 4x4 grid",
                       res.best.fitness == best,
                       "swarm " + format_number(res.best.fitness) + ", exhaustive " + format_number(best)));
  }
  return out;
}

}  // namespace maisac
