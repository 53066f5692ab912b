#pragma once

#include <string>
#include <vector>

#include "maisac/channel.hpp"
#include "maisac/conic.hpp"
#include "maisac/geometry.hpp"
#include "maisac/metrics.hpp"

namespace maisac {

/// SINR thresholds in linear scale.
struct Thresholds {
  double sensing = 1.0;
  std::vector<double> uplink;
  std::vector<double> downlink;
};

/// Affine lower bound f(X) = constant - y^H X y of a^H X^{-1} a, tight at the
/// expansion point X_prev, with y = X_prev^{-1} a and constant = 2 Re a^H y.
/// The bound holds for any y, so rounding y to double keeps it valid.
struct TaylorBound {
  CVector y;
  double constant = 0.0;

  double evaluate(const XMatrix& x) const;
};

TaylorBound taylor_bound_theta(const XMatrix& theta_prev, const CVector& target_rx);
TaylorBound taylor_bound_omega(const XMatrix& omega_prev, const CVector& g, double alpha);

/// Tr(W) - ||W||_2; zero iff rank(W) <= 1.
double rank_residual(const CMatrix& w);
/// u u^H for a unit principal eigenvector u; zero matrix maps to zero.
CMatrix spectral_subgradient(const CMatrix& w);

/// Point of expansion for one convexified subproblem, in the solver's power unit.
struct ScaState {
  std::vector<CMatrix> w;  // [0] = W_0, [d] = W_d for d = 1..D
  std::vector<double> p;

  CMatrix aggregate() const;
  double power() const;
};

struct SubproblemOptions {
  bool elastic = false;        // slack on the sensing and uplink cones
  double slack_weight = 1e4;   // relative to the previous power
  double uplink_floor = 0.0;   // p_u >= floor, solver power unit
  double threshold_margin = 0.0;  // targets become gamma * (1 + margin)
};

/// Convexified problem around `prev`. Matrix and power coordinates are scaled
/// by the expansion point so the conic solver sees O(1) unknowns.
struct Subproblem {
  ConicProblem problem;
  std::vector<HermitianVar> w;
  std::vector<ScalarVar> p;
  std::vector<ScalarVar> slack;  // [0] sensing, [1 + u] uplink user u; elastic only
  double w_scale = 1.0;
  std::vector<double> p_scale;
  RVector hint;  // `prev` in scaled coordinates (slacks at their required level)

  ScaState decode(const ConicSolution& sol) const;
  double slack_total(const ConicSolution& sol) const;
};

/// `pc` must already be expressed in the solver power unit (noise_bs = 1).
/// `subgradients[d - 1]` is the penalty direction for W_d; empty disables the penalty.
Subproblem build_subproblem(const PlacedChannels& pc, const ScaState& prev,
                            const Thresholds& thresholds, double rho,
                            const std::vector<CMatrix>& subgradients,
                            const SubproblemOptions& options = {});

struct ScaSettings {
  double rho_initial = 1.0;
  double rho_growth = 5.0;
  double rho_max = 1e6;
  double kappa = 1e6;  // watts per violating element
  double epsilon = 1e-4;
  int max_iterations = 50;
  int max_restoration_iterations = 60;
  double uplink_floor_w = 0.0;
  double rank_tolerance = 1e-4;  // relative to Tr(W_d)
  ConicSettings conic{1e-8, 1e-9, 400};
};

struct ScaTraceEntry {
  int phase = 0;  // 0 = feasibility restoration, 1 = penalized descent
  int iteration = 0;
  double objective_w = 0.0;  // power plus rank penalty, watts
  double power_w = 0.0;
  double rank_residual = 0.0;  // max over W_d, d >= 1, relative to the trace
  double rho = 0.0;
  double slack = 0.0;
  double min_sinr_ratio = 0.0;  // min over constraints of SINR / threshold
  std::string status;
};

struct ScaResult {
  bool feasible = false;
  bool converged = false;
  int iterations = 0;
  double power_w = kInfinity;
  BeamformingSolution solution;  // watts; w_d extracted, optimal receivers attached
  double rank_residual = kInfinity;  // max over d >= 1 of residual(W_d) / Tr(W_d)
  double aggregate_rank_residual = kInfinity;  // residual(W~) / Tr(W~), informational
  std::vector<double> objective_history;  // penalized-descent objective per iteration, watts
  std::vector<double> rho_history;
  std::vector<ScaTraceEntry> trace;
  std::string message;
};

/// Penalized SCA for fixed placements; physical units in and out.
ScaResult solve_beamforming(const PlacedChannels& pc, const Thresholds& thresholds,
                            const ScaSettings& settings);

struct FitnessResult {
  double fitness = kInfinity;
  int violations = 0;
  ScaResult sca;
};

/// Tr(W~) + sum p_u + kappa * F; +inf when the thresholds are unattainable.
FitnessResult solve_fitness(const ChannelSet& channels, const Placement& rx, const Placement& tx,
                            const Thresholds& thresholds, const ScaSettings& settings,
                            double d_min);

/// Slack audit: SINR / threshold per constraint (sensing, uplink..., downlink...).
std::vector<double> sinr_ratios(const PlacedChannels& pc, const BeamformingSolution& sol,
                                const Thresholds& thresholds);

}  // namespace maisac
