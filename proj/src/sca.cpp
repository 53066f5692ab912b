#include "maisac/sca.hpp"

#include <Eigen/Eigenvalues>

namespace maisac {

namespace {

// Convexified targets sit slightly above the thresholds so iterates returned
// within the conic feasibility tolerance still satisfy the true constraints.
constexpr double kThresholdMargin = 1e-6;
constexpr double kFeasibleRatio = 1.0 - 1e-9;
// Restoration iterates above this many watts stop being representable next
// to the receiver noise floor.
constexpr double kDivergedPower = 1e15;

void validate(const PlacedChannels& pc, const Thresholds& th) {
  if (!(th.sensing > 0.0) || !std::isfinite(th.sensing)) {
    throw ConfigError("sensing SINR threshold must be positive and finite");
  }
  if (static_cast<int>(th.uplink.size()) != pc.uplink_users() ||
      static_cast<int>(th.downlink.size()) != pc.downlink_users()) {
    throw ConfigError("one SINR threshold per user is required");
  }
  for (double g : th.uplink) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("uplink SINR thresholds must be positive");
  }
  for (double g : th.downlink) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("downlink SINR thresholds must be positive");
  }
}

TaylorBound make_bound(const XMatrix& prev, const CVector& a) {
  Eigen::LLT<XMatrix> llt(prev);
  if (llt.info() != Eigen::Success) throw NumericalError("expansion point is not positive definite");
  TaylorBound b;
  b.y = llt.solve(extend(a)).cast<Complex>();
  b.constant = static_cast<double>(2.0L * std::real(extend(a).dot(extend(b.y))));
  return b;
}

double quad(const CMatrix& m, const CVector& x) { return std::real(x.dot(m * x)); }

double relative_residual(const CMatrix& w) {
  const double tr = std::real(w.trace());
  return tr > 0.0 ? rank_residual(w) / tr : 0.0;
}

double max_relative_residual(const ScaState& s) {
  double r = 0.0;
  for (std::size_t d = 1; d < s.w.size(); ++d) r = std::max(r, relative_residual(s.w[d]));
  return r;
}

CMatrix project_psd(const CMatrix& m) {
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  RVector ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// W_d <- W_d h h^H W_d / (h^H W_d h), W_0 <- W~ - sum W_d. Keeps W~ and every
// h_d^H W_d h_d unchanged, hence every SINR and the power.
void reconstruct_rank_one(const PlacedChannels& pc, ScaState& s) {
  const CMatrix total = s.aggregate();
  CMatrix rest = total;
  for (int d = 1; d < static_cast<int>(s.w.size()); ++d) {
    const CVector& h = pc.downlink[static_cast<std::size_t>(d - 1)];
    CMatrix& w = s.w[static_cast<std::size_t>(d)];
    w = project_psd(w);
    const CVector wh = w * h;
    const double gain = std::real(h.dot(wh));
    w = gain > 0.0 ? CMatrix(wh * wh.adjoint() / gain) : CMatrix::Zero(w.rows(), w.cols());
    rest -= w;
  }
  s.w[0] = project_psd(rest);
}

BeamformingSolution to_solution(const ScaState& s, double unit) {
  BeamformingSolution sol;
  sol.sensing = s.w[0] * unit;
  for (std::size_t d = 1; d < s.w.size(); ++d) sol.downlink.push_back(s.w[d] * unit);
  for (double p : s.p) sol.uplink_power.push_back(p * unit);
  return sol;
}

// A covariance that is singular to working precision certifies nothing.
double min_ratio(const PlacedChannels& pc, const ScaState& s, const Thresholds& th) {
  std::vector<double> r;
  try {
    r = sinr_ratios(pc, to_solution(s, 1.0), th);
  } catch (const NumericalError&) {
    return 0.0;
  }
  double m = kInfinity;
  for (double v : r) m = std::min(m, v);
  return m;
}

ConicSolution solve_with_retry(const Subproblem& sub, const ConicSettings& settings) {
  ConicSolution sol = solve(sub.problem, settings, &sub.hint);
  if (sol.status == ConicStatus::numerical_failure) sol = solve(sub.problem, settings, nullptr);
  return sol;
}

// Minimum total downlink power meeting the downlink constraints alone.
bool downlink_only(const PlacedChannels& pc, const Thresholds& th, const ConicSettings& settings,
                   ScaState& out) {
  const int dl = pc.downlink_users();
  const int nt = pc.tx_elements();
  out.w.assign(static_cast<std::size_t>(dl + 1), CMatrix::Zero(nt, nt));
  if (dl == 0) return true;
  double scale = 0.0;
  for (int d = 0; d < dl; ++d) {
    const double hn = pc.downlink[static_cast<std::size_t>(d)].squaredNorm();
    if (!(hn > 0.0)) return false;
    scale = std::max(scale, th.downlink[static_cast<std::size_t>(d)] * pc.noise_user / hn);
  }
  ConicProblem prob;
  std::vector<HermitianVar> w;
  LinearExpr objective;
  for (int d = 0; d < dl; ++d) {
    w.push_back(prob.add_hermitian("W" + std::to_string(d + 1), nt));
    objective += prob.trace(w.back());
  }
  prob.minimize(objective);
  for (int d = 0; d < dl; ++d) {
    const CVector& h = pc.downlink[static_cast<std::size_t>(d)];
    LinearExpr row = prob.quadratic(w[static_cast<std::size_t>(d)], h) *
                     (1.0 + 1.0 / th.downlink[static_cast<std::size_t>(d)]);
    for (int e = 0; e < dl; ++e) row -= prob.quadratic(w[static_cast<std::size_t>(e)], h);
    row *= scale;
    row -= LinearExpr(pc.noise_user);
    prob.add_nonnegative(row, "downlink " + std::to_string(d + 1));
  }
  const ConicSolution sol = solve(prob, settings);
  if (sol.status != ConicStatus::optimal) return false;
  for (int d = 0; d < dl; ++d) {
    out.w[static_cast<std::size_t>(d + 1)] = project_psd(sol.value(w[static_cast<std::size_t>(d)]) * scale);
  }
  return true;
}

// Fixed-point power control with matched MVDR receivers for the current W~.
std::vector<double> uplink_power_control(const PlacedChannels& pc, const ScaState& s,
                                         const Thresholds& th, double floor) {
  const int ul = pc.uplink_users();
  std::vector<double> p(static_cast<std::size_t>(ul), 0.0);
  const CMatrix total = s.aggregate();
  for (int u = 0; u < ul; ++u) {
    const auto& g = pc.uplink[static_cast<std::size_t>(u)];
    p[static_cast<std::size_t>(u)] =
        std::max(floor, th.uplink[static_cast<std::size_t>(u)] * pc.noise_bs /
                            (pc.alpha_uplink[static_cast<std::size_t>(u)] * g.squaredNorm()));
  }
  for (int it = 0; it < 40; ++it) {
    std::vector<double> next = p;
    bool finite = true;
    for (int u = 0; u < ul; ++u) {
      const double sinr_per_watt =
          optimal_uplink_sinr(pc, total, p, u) / std::max(p[static_cast<std::size_t>(u)], 1e-300);
      const double target = th.uplink[static_cast<std::size_t>(u)] * (1.0 + 1e-3);
      next[static_cast<std::size_t>(u)] = std::max(floor, std::min(target / sinr_per_watt, 1e60));
      finite = finite && std::isfinite(next[static_cast<std::size_t>(u)]);
    }
    if (!finite) break;
    p = std::move(next);
  }
  return p;
}

}  // namespace

double TaylorBound::evaluate(const XMatrix& x) const {
  const XVector v = extend(y);
  return static_cast<double>(constant - std::real(v.dot(x * v)));
}

TaylorBound taylor_bound_theta(const XMatrix& theta_prev, const CVector& target_rx) {
  if (theta_prev.rows() != target_rx.size()) throw DomainError("dimension mismatch");
  return make_bound(theta_prev, target_rx);
}

TaylorBound taylor_bound_omega(const XMatrix& omega_prev, const CVector& g, double alpha) {
  if (omega_prev.rows() != g.size()) throw DomainError("dimension mismatch");
  if (!(alpha >= 0.0)) throw DomainError("fading factor must be nonnegative");
  return make_bound(omega_prev, std::sqrt(alpha) * g);
}

double rank_residual(const CMatrix& w) {
  if (w.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (w + w.adjoint()), Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  // Sum of all but the largest eigenvalue, i.e. Tr(W) - ||W||_2 for PSD W.
  // Eigenvalues within the solver's backward error of zero are roundoff.
  const double cutoff = static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon() *
                        std::abs(ev(ev.size() - 1));
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < ev.size(); ++i) {
    if (std::abs(ev(i)) > cutoff) sum += ev(i);
  }
  return std::max(0.0, sum);
}

CMatrix spectral_subgradient(const CMatrix& w) {
  if (w.size() == 0 || w.cwiseAbs().maxCoeff() == 0.0) return CMatrix::Zero(w.rows(), w.cols());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (w + w.adjoint()));
  const CVector u = es.eigenvectors().col(w.rows() - 1);
  return u * u.adjoint();
}

CMatrix ScaState::aggregate() const {
  CMatrix t = w.at(0);
  for (std::size_t d = 1; d < w.size(); ++d) t += w[d];
  return t;
}

double ScaState::power() const {
  double s = std::real(aggregate().trace());
  for (double v : p) s += v;
  return s;
}

ScaState Subproblem::decode(const ConicSolution& sol) const {
  ScaState s;
  for (const auto& v : w) s.w.push_back(project_psd(sol.value(v) * w_scale));
  for (std::size_t u = 0; u < p.size(); ++u) s.p.push_back(std::max(0.0, sol.value(p[u]) * p_scale[u]));
  return s;
}

double Subproblem::slack_total(const ConicSolution& sol) const {
  double s = 0.0;
  for (const auto& v : slack) s += std::max(0.0, sol.value(v));
  return s;
}

Subproblem build_subproblem(const PlacedChannels& pc, const ScaState& prev,
                            const Thresholds& th, double rho,
                            const std::vector<CMatrix>& subgradients,
                            const SubproblemOptions& opt) {
  validate(pc, th);
  const int dl = pc.downlink_users();
  const int ul = pc.uplink_users();
  const int nt = pc.tx_elements();
  if (static_cast<int>(prev.w.size()) != dl + 1 || static_cast<int>(prev.p.size()) != ul) {
    throw DomainError("expansion point does not match the user counts");
  }
  if (!subgradients.empty() && static_cast<int>(subgradients.size()) != dl) {
    throw DomainError("one subgradient per downlink user is required");
  }
  const double margin = 1.0 + opt.threshold_margin;

  Subproblem sp;
  auto& prob = sp.problem;
  const CMatrix total_prev = prev.aggregate();
  const double prev_power = std::max(prev.power(), 1e-12);
  sp.w_scale = std::max(std::real(total_prev.trace()) / (dl + 1), 1e-6);
  for (int u = 0; u < ul; ++u) {
    sp.p_scale.push_back(std::max({prev.p[static_cast<std::size_t>(u)], opt.uplink_floor, 1e-6}));
  }
  for (int d = 0; d <= dl; ++d) sp.w.push_back(prob.add_hermitian("W" + std::to_string(d), nt));
  for (int u = 0; u < ul; ++u) {
    const double lower = opt.uplink_floor / sp.p_scale[static_cast<std::size_t>(u)];
    sp.p.push_back(prob.add_scalar("p" + std::to_string(u + 1), std::max(lower, 0.0)));
  }

  auto w_quad = [&](int d, const CVector& h) {
    return prob.quadratic(sp.w[static_cast<std::size_t>(d)], h) * sp.w_scale;
  };
  auto total_quad = [&](const CVector& h) {
    LinearExpr e;
    for (int d = 0; d <= dl; ++d) e += w_quad(d, h);
    return e;
  };
  auto power = [&](int u) {
    return prob.var(sp.p[static_cast<std::size_t>(u)]) * sp.p_scale[static_cast<std::size_t>(u)];
  };
  auto add_slack = [&](const std::string& name) {
    sp.slack.push_back(prob.add_scalar(name, 0.0));
    return prob.var(sp.slack.back());
  };

  const auto cov = covariances(pc, total_prev, prev.p);

  // Sensing: f(Theta) * (a_t^H W~ a_t) >= gamma_r / |beta_0|^2.
  {
    const TaylorBound b = taylor_bound_theta(cov.theta, pc.target_rx);
    LinearExpr f(b.constant - pc.noise_bs * b.y.squaredNorm());
    for (int u = 0; u < ul; ++u) {
      const double c = pc.alpha_uplink[static_cast<std::size_t>(u)] *
                       std::norm(pc.uplink[static_cast<std::size_t>(u)].dot(b.y));
      f -= power(u) * c;
    }
    f -= total_quad(pc.sensing.q.adjoint() * b.y);
    const double target = th.sensing * margin / std::norm(pc.target_gain);
    if (opt.elastic) {
      const double s_prev = std::max(quad(total_prev, pc.target_tx), 1e-300);
      f += add_slack("slack_sensing") * (target / s_prev);
    }
    prob.add_rotated_cone(f, total_quad(pc.target_tx), {LinearExpr(std::sqrt(2.0 * target))},
                          "sensing");
  }

  // Uplink: f_u(Omega_u) * p_u >= gamma_u.
  for (int u = 0; u < ul; ++u) {
    const auto uz = static_cast<std::size_t>(u);
    const TaylorBound b =
        taylor_bound_omega(cov.omegas[uz], pc.uplink[uz], pc.alpha_uplink[uz]);
    LinearExpr f(b.constant - pc.noise_bs * b.y.squaredNorm());
    for (int v = 0; v < ul; ++v) {
      if (v == u) continue;
      const auto vz = static_cast<std::size_t>(v);
      f -= power(v) * (pc.alpha_uplink[vz] * std::norm(pc.uplink[vz].dot(b.y)));
    }
    f -= total_quad(pc.sensing.c.adjoint() * b.y);
    const double target = th.uplink[uz] * margin;
    if (opt.elastic) {
      const double p_prev = std::max(prev.p[uz], 1e-300);
      f += add_slack("slack_uplink" + std::to_string(u + 1)) * (target / p_prev);
    }
    prob.add_rotated_cone(f, power(u), {LinearExpr(std::sqrt(2.0 * target))},
                          "uplink " + std::to_string(u + 1));
  }

  // Downlink: (1 + 1/gamma_d) h^H W_d h >= h^H W~ h + sigma_d^2.
  for (int d = 1; d <= dl; ++d) {
    const auto dz = static_cast<std::size_t>(d - 1);
    const CVector& h = pc.downlink[dz];
    LinearExpr row = w_quad(d, h) * (1.0 + 1.0 / (th.downlink[dz] * margin));
    row -= total_quad(h);
    row -= LinearExpr(pc.noise_user);
    prob.add_nonnegative(row, "downlink " + std::to_string(d));
  }

  LinearExpr objective;
  for (int d = 0; d <= dl; ++d) objective += prob.trace(sp.w[static_cast<std::size_t>(d)]) * sp.w_scale;
  for (int u = 0; u < ul; ++u) objective += power(u);
  if (!subgradients.empty() && rho > 0.0) {
    for (int d = 1; d <= dl; ++d) {
      const auto& hv = sp.w[static_cast<std::size_t>(d)];
      const CMatrix dir = CMatrix::Identity(nt, nt) - subgradients[static_cast<std::size_t>(d - 1)];
      objective += prob.inner(hv, dir) * (rho * sp.w_scale);
    }
  }
  objective *= 1.0 / prev_power;
  if (opt.elastic) {
    for (const auto& s : sp.slack) objective += prob.var(s) * opt.slack_weight;
  }
  prob.minimize(objective);

  sp.hint = RVector::Zero(prob.variable_count());
  for (int d = 0; d <= dl; ++d) {
    prob.pack(sp.w[static_cast<std::size_t>(d)], prev.w[static_cast<std::size_t>(d)] / sp.w_scale,
              sp.hint);
  }
  for (int u = 0; u < ul; ++u) {
    sp.hint(sp.p[static_cast<std::size_t>(u)].index) =
        prev.p[static_cast<std::size_t>(u)] / sp.p_scale[static_cast<std::size_t>(u)];
  }
  for (const auto& s : sp.slack) sp.hint(s.index) = 1.0;
  return sp;
}

std::vector<double> sinr_ratios(const PlacedChannels& pc, const BeamformingSolution& sol,
                                const Thresholds& th) {
  const CMatrix total = sol.aggregate();
  std::vector<double> r;
  r.push_back(optimal_sensing_sinr(pc, total, sol.uplink_power) / th.sensing);
  for (int u = 0; u < pc.uplink_users(); ++u) {
    r.push_back(optimal_uplink_sinr(pc, total, sol.uplink_power, u) /
                th.uplink[static_cast<std::size_t>(u)]);
  }
  for (int d = 0; d < pc.downlink_users(); ++d) {
    r.push_back(downlink_sinr(pc, sol, d) / th.downlink[static_cast<std::size_t>(d)]);
  }
  return r;
}

ScaResult solve_beamforming(const PlacedChannels& physical, const Thresholds& th,
                            const ScaSettings& settings) {
  validate(physical, th);
  ScaResult res;
  const double unit = physical.noise_bs;
  if (!(unit > 0.0)) throw ConfigError("receiver noise power must be positive");
  const PlacedChannels pc = rescale_power(physical, unit);
  const double floor = settings.uplink_floor_w / unit;
  const int dl = pc.downlink_users();
  const int nt = pc.tx_elements();

  ScaState st;
  if (!downlink_only(pc, th, settings.conic, st)) {
    res.message = "downlink constraints are infeasible";
    return res;
  }
  {
    const double tr = std::real(st.aggregate().trace());
    st.w[0] = CMatrix::Identity(nt, nt) * (dl == 0 ? 1.0 : 1e-3 * tr / nt);
  }
  st.p = uplink_power_control(pc, st, th, floor);

  auto trace_entry = [&](int phase, int it, double objective, double rho, double slack,
                         const std::string& status) {
    ScaTraceEntry e;
    e.phase = phase;
    e.iteration = it;
    e.objective_w = objective * unit;
    e.power_w = st.power() * unit;
    e.rank_residual = max_relative_residual(st);
    e.rho = rho;
    e.slack = slack;
    e.min_sinr_ratio = min_ratio(pc, st, th);
    e.status = status;
    res.trace.push_back(e);
    return e.min_sinr_ratio;
  };

  double ratio = min_ratio(pc, st, th);
  int iterations = 0;
  for (int it = 0; ratio < 1.0 && it < settings.max_restoration_iterations; ++it) {
    SubproblemOptions opt;
    opt.elastic = true;
    opt.uplink_floor = floor;
    opt.threshold_margin = kThresholdMargin;
    const Subproblem sub = build_subproblem(pc, st, th, 0.0, {}, opt);
    const ConicSolution sol = solve_with_retry(sub, settings.conic);
    ++iterations;
    if (sol.status != ConicStatus::optimal) {
      res.message = std::string("restoration subproblem ") + to_string(sol.status) + ": " + sol.message;
      res.iterations = iterations;
      return res;
    }
    st = sub.decode(sol);
    reconstruct_rank_one(pc, st);
    ratio = trace_entry(0, it, st.power(), 0.0, sub.slack_total(sol), to_string(sol.status));
    if (!(st.power() * unit < kDivergedPower)) {
      res.message = "feasibility restoration diverged";
      res.iterations = iterations;
      return res;
    }
  }
  if (ratio < 1.0) {
    res.message = "feasibility restoration did not reach the thresholds";
    res.iterations = iterations;
    return res;
  }

  double rho = settings.rho_initial;
  double prev_obj = st.power();
  double prev_residual = max_relative_residual(st);
  res.objective_history.push_back(prev_obj * unit);
  res.rho_history.push_back(rho);
  trace_entry(1, 0, prev_obj, rho, 0.0, "start");
  for (int it = 1; it <= settings.max_iterations; ++it) {
    std::vector<CMatrix> sub_grad;
    for (int d = 1; d <= dl; ++d) sub_grad.push_back(spectral_subgradient(st.w[static_cast<std::size_t>(d)]));
    SubproblemOptions opt;
    opt.uplink_floor = floor;
    opt.threshold_margin = kThresholdMargin;
    const Subproblem sub = build_subproblem(pc, st, th, rho, sub_grad, opt);
    const ConicSolution sol = solve_with_retry(sub, settings.conic);
    ++iterations;
    if (sol.status != ConicStatus::optimal) {
      res.message = std::string("descent subproblem ") + to_string(sol.status) + ": " + sol.message;
      break;
    }
    ScaState cand = sub.decode(sol);
    double penalty = 0.0;
    for (int d = 1; d <= dl; ++d) penalty += rank_residual(cand.w[static_cast<std::size_t>(d)]);
    reconstruct_rank_one(pc, cand);
    if (min_ratio(pc, cand, th) < kFeasibleRatio) {
      res.message = "descent iterate lost feasibility; keeping the previous point";
      break;
    }
    st = std::move(cand);
    const double obj = st.power();
    const double residual = max_relative_residual(st);
    trace_entry(1, it, obj, rho, penalty, to_string(sol.status));
    res.objective_history.push_back(obj * unit);
    const bool stalled = std::abs(obj - prev_obj) <= settings.epsilon * std::max(1.0, prev_obj);
    if (residual > 0.5 * prev_residual && residual > 1e-2 * settings.rank_tolerance) {
      rho = std::min(rho * settings.rho_growth, settings.rho_max);
    }
    res.rho_history.push_back(rho);
    prev_obj = obj;
    prev_residual = residual;
    if (stalled && residual <= settings.rank_tolerance) {
      res.converged = true;
      break;
    }
  }

  // Rank-one extraction from the principal eigenpair of each W_d.
  BeamformingSolution sol = to_solution(st, unit);
  for (auto& w : sol.downlink) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (w + w.adjoint()));
    const double lambda = std::max(0.0, es.eigenvalues()(w.rows() - 1));
    const CVector v = std::sqrt(lambda) * es.eigenvectors().col(w.rows() - 1);
    sol.beamformers.push_back(v);
  }
  res.rank_residual = max_relative_residual(st);
  res.aggregate_rank_residual = relative_residual(st.aggregate());
  if (res.rank_residual <= settings.rank_tolerance) {
    for (std::size_t d = 0; d < sol.downlink.size(); ++d) {
      sol.downlink[d] = sol.beamformers[d] * sol.beamformers[d].adjoint();
    }
  } else {
    res.converged = false;
  }
  attach_receivers(physical, sol);
  res.feasible = true;
  res.iterations = iterations;
  res.power_w = sol.total_power();
  res.solution = std::move(sol);
  return res;
}

FitnessResult solve_fitness(const ChannelSet& channels, const Placement& rx, const Placement& tx,
                            const Thresholds& thresholds, const ScaSettings& settings,
                            double d_min) {
  FitnessResult out;
  out.violations = violation_count(rx, tx, distance_matrix(channels.params.rx_grid),
                                   distance_matrix(channels.params.tx_grid), d_min);
  out.sca = solve_beamforming(place(channels, rx, tx), thresholds, settings);
  out.fitness = out.sca.feasible ? out.sca.power_w + settings.kappa * out.violations : kInfinity;
  return out;
}

}  // namespace maisac
