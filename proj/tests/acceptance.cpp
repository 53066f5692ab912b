// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance <path-to-cli> [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "maisac/experiments.hpp"
#include "maisac/report.hpp"
#include "support.hpp"

using namespace maisac;
using maisac::testing::Gaussian;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets, pinned.
constexpr double kAssemblyTol = 1e-12;
constexpr double kReceiverSlack = 1e-9;
constexpr double kBoundTightness = 1e-12;
constexpr double kSubgradientSlack = 1e-10;
constexpr double kHistorySlack = 1e-7;
constexpr double kRankTol = 1e-4;
constexpr double kSinrViolation = 1e-3;
constexpr double kSwarmFactor = 1.05;
constexpr int kSeedsNeeded = 18;
constexpr double kStrictGain = 0.03;
// Reported powers are converged only to the SCA stopping tolerance (relative
// objective change 1e-4), so smaller dips between sweep points are solver noise.
constexpr double kMonotoneSlack = 1e-4;
constexpr double kPeakOffsetDeg = 1.0;
constexpr double kClutterSuppressionDb = 10.0;
constexpr double kClutterSeparationDeg = 20.0;
constexpr int kLocalMaxRadiusDeg = 2;

constexpr double kBudget1 = 5.0;
constexpr double kBudget2 = 60.0;
constexpr double kBudget3 = 10.0;
constexpr double kBudget5PerPlacement = 120.0;
constexpr double kBudget6 = 1800.0;
constexpr double kBudget7 = 7200.0;

const std::vector<std::uint64_t> kSweepSeeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return kInfinity;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Scenario default_scenario(std::uint64_t seed) {
  Scenario s;
  s.seed = seed;
  return s;
}

// --- 1 -------------------------------------------------------------------
Outcome channel_assembly() {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s;
  double worst = 0.0;
  for (std::uint64_t k = 1; k <= 100; ++k) {
    const ChannelSet ch = synthesize_channels(s.channel_params(), k);
    std::mt19937_64 gen(derive_seed(k, 0xAC));
    const Placement rx = random_feasible_placement(s.rx_grid(), s.rx_elements, s.d_min, gen);
    const Placement tx = random_feasible_placement(s.tx_grid(), s.tx_elements, s.d_min, gen);
    const CMatrix g = ch.ghat * rx.block_matrix().cast<Complex>();
    const CMatrix h = ch.hhat * tx.block_matrix().cast<Complex>();
    worst = std::max(worst, maisac::testing::relative_error(assemble_uplink(ch.ghat, rx), g));
    worst = std::max(worst, maisac::testing::relative_error(assemble_downlink(ch.hhat, tx), h));
  }
  const double t = seconds_since(t0);
  return {worst <= kAssemblyTol && t < kBudget1,
          "max relative error " + fmt(worst) + ", " + fmt(t) + " s"};
}

// --- 2 -------------------------------------------------------------------
Outcome receiver_optimality() {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s;
  Gaussian g(0xBEEF);
  double worst = kInfinity;
  for (std::uint64_t k = 1; k <= 50; ++k) {
    const ChannelSet ch = synthesize_channels(s.channel_params(), 1000 + k);
    const Placement rx = random_feasible_placement(s.rx_grid(), s.rx_elements, s.d_min, g.engine());
    const Placement tx = random_feasible_placement(s.tx_grid(), s.tx_elements, s.d_min, g.engine());
    const PlacedChannels pc = place(ch, rx, tx);
    const CMatrix w = g.positive_definite(s.tx_elements, 0.05) * g.uniform(0.01, 1.0);
    std::vector<double> p;
    for (int u = 0; u < s.uplink_users; ++u) p.push_back(g.uniform(0.01, 1.0));
    const double best_s = optimal_sensing_sinr(pc, w, p);
    std::vector<double> best_u;
    for (int u = 0; u < s.uplink_users; ++u) best_u.push_back(optimal_uplink_sinr(pc, w, p, u));
    for (int t = 0; t < 10000; ++t) {
      const CVector f = g.unit_vector(s.rx_elements);
      worst = std::min(worst, (best_s - sensing_sinr(pc, w, p, f)) / best_s);
      for (int u = 0; u < s.uplink_users; ++u) {
        worst = std::min(worst, (best_u[u] - uplink_sinr(pc, w, p, f, u)) / best_u[u]);
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst >= -kReceiverSlack && t < kBudget2,
          "min relative slack " + fmt(worst) + ", " + fmt(t) + " s"};
}

// --- 3 -------------------------------------------------------------------
Outcome taylor_bounds() {
  const auto t0 = std::chrono::steady_clock::now();
  Gaussian g(0x7A7);
  double worst_slack = kInfinity;
  double worst_tight = 0.0;
  auto fractional = [](const CMatrix& x, const CVector& a) { return std::real(a.dot(x.llt().solve(a))); };
  for (int k = 0; k < 500; ++k) {
    const int n = 2 + k % 3;
    const CMatrix prev = g.positive_definite(n);
    const CMatrix x = g.positive_definite(n);
    const CVector a = g.vector(n);
    const double alpha = g.uniform(0.1, 10.0);
    const TaylorBound th = taylor_bound_theta(extend(prev), a);
    const TaylorBound om = taylor_bound_omega(extend(prev), a, alpha);
    const double fx = fractional(x, a);
    const double fp = fractional(prev, a);
    worst_slack = std::min({worst_slack, (fx - th.evaluate(extend(x))) / fx,
                            (alpha * fx - om.evaluate(extend(x))) / (alpha * fx)});
    worst_tight = std::max({worst_tight, std::abs(th.evaluate(extend(prev)) - fp) / fp,
                            std::abs(om.evaluate(extend(prev)) - alpha * fp) / (alpha * fp)});
  }
  const double t = seconds_since(t0);
  return {worst_slack >= -kBoundTightness && worst_tight <= kBoundTightness && t < kBudget3,
          "min slack " + fmt(worst_slack) + ", max gap at expansion " + fmt(worst_tight) + ", " +
              fmt(t) + " s"};
}

// --- 4 -------------------------------------------------------------------
Outcome dc_machinery() {
  Gaussian g(0xDC);
  double worst_rank = 0.0;
  for (int k = 0; k < 100; ++k) {
    const CVector v = g.vector(2 + k % 3);
    worst_rank = std::max(worst_rank, rank_residual(v * v.adjoint()));
  }
  double worst_slack = kInfinity;
  auto top = [](const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(m.rows() - 1);
  };
  for (int k = 0; k < 500; ++k) {
    const int n = 2 + k % 3;
    const CMatrix x = g.hermitian(n);
    const CMatrix y = g.hermitian(n);
    worst_slack = std::min(worst_slack,
                           top(y) - top(x) - std::real((spectral_subgradient(x) * (y - x)).trace()));
  }
  return {worst_rank == 0.0 && worst_slack >= -kSubgradientSlack,
          "max rank residual " + fmt(worst_rank) + ", min subgradient slack " + fmt(worst_slack)};
}

// --- 5 -------------------------------------------------------------------
Outcome sca_behavior() {
  const Scenario s = default_scenario(1);
  const ChannelSet ch = synthesize_channels(s.channel_params(), s.seed);
  std::vector<std::pair<std::string, std::pair<Placement, Placement>>> placements;
  placements.push_back({"fixed", {fixed_linear_placement(s.rx_candidates, s.rx_elements),
                                  fixed_linear_placement(s.tx_candidates, s.tx_elements)}});
  for (int k = 1; k <= 4; ++k) placements.push_back({"random" + std::to_string(k), random_placement(s, k)});
  bool ok = true;
  int solved = 0;
  double worst_step = -kInfinity;
  double worst_rank = 0.0;
  double worst_violation = 0.0;
  double slowest = 0.0;
  for (const auto& [name, pl] : placements) {
    const auto t0 = std::chrono::steady_clock::now();
    const PlacedChannels pc = place(ch, pl.first, pl.second);
    const ScaResult r = solve_beamforming(pc, s.thresholds(), s.sca_settings());
    const double t = seconds_since(t0);
    slowest = std::max(slowest, t);
    ok = ok && t < kBudget5PerPlacement;
    if (!r.feasible) {
      // The fixed-linear placement must be solvable; others may be infeasible.
      if (name == "fixed") ok = false;
      continue;
    }
    ++solved;
    for (std::size_t k = 1; k < r.objective_history.size(); ++k) {
      worst_step = std::max(worst_step, (r.objective_history[k] - r.objective_history[k - 1]) /
                                            r.objective_history[k - 1]);
    }
    worst_rank = std::max(worst_rank, r.rank_residual);
    for (double v : sinr_ratios(pc, r.solution, s.thresholds())) {
      worst_violation = std::max(worst_violation, 1.0 - v);
    }
  }
  ok = ok && worst_step <= kHistorySlack && worst_rank <= kRankTol && worst_violation <= kSinrViolation;
  return {ok, std::to_string(solved) + "/" + std::to_string(placements.size()) +
                  " placements feasible; max step increase " + fmt(worst_step) + ", max rank residual " +
                  fmt(worst_rank) + ", max SINR shortfall " + fmt(worst_violation) + ", slowest " +
                  fmt(slowest) + " s"};
}

// --- 6 -------------------------------------------------------------------
struct ExhaustiveOutcome {
  int matched = 0;
  double worst_ratio = 0.0;
};

FitnessFunction fitness_for(const Scenario& s, const ChannelSet& ch) {
  return [&s, &ch](const Placement& rx, const Placement& tx) {
    return solve_fitness(ch, rx, tx, s.thresholds(), s.sca_settings(), s.d_min);
  };
}

// Every joint placement with distinct candidates in each array.
double exhaustive_best(const Scenario& s, FitnessCache& cache) {
  std::vector<std::vector<int>> rx_sets;
  std::vector<std::vector<int>> tx_sets;
  std::function<void(int, int, std::vector<int>&, std::vector<std::vector<int>>&)> choose =
      [&](int n, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
        if (static_cast<int>(cur.size()) == k) {
          out.push_back(cur);
          return;
        }
        for (int c = cur.empty() ? 0 : cur.back() + 1; c < n; ++c) {
          cur.push_back(c);
          choose(n, k, cur, out);
          cur.pop_back();
        }
      };
  std::vector<int> cur;
  choose(s.rx_candidates, s.rx_elements, cur, rx_sets);
  choose(s.tx_candidates, s.tx_elements, cur, tx_sets);
  double best = kInfinity;
  for (const auto& a : rx_sets) {
    for (const auto& b : tx_sets) {
      best = std::min(best, cache.evaluate(Placement(s.rx_candidates, a), Placement(s.tx_candidates, b)).fitness);
    }
  }
  return best;
}

Outcome swarm_vs_exhaustive() {
  const auto t0 = std::chrono::steady_clock::now();
  int small_hits = 0;
  int large_hits = 0;
  double worst_large = 0.0;
  int small_feasible = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    // One receive element cannot null the echo, so the 4x4 case serves one
    // user per direction at a reduced uplink target.
    Scenario s = default_scenario(seed);
    s.rx_candidates = s.tx_candidates = 4;
    s.rx_elements = s.tx_elements = 1;
    s.uplink_users = s.downlink_users = 1;
    s.uplink_db = -12.0;
    s.swarm.particles = 8;
    s.swarm.iterations = 10;
    const ChannelSet ch = synthesize_channels(s.channel_params(), s.seed);
    FitnessCache cache(fitness_for(s, ch));
    const double best = exhaustive_best(s, cache);
    if (std::isfinite(best)) ++small_feasible;
    SwarmState sw = init_swarm(s.rx_grid(), 1, s.tx_grid(), 1, s.d_min, s.swarm, swarm_seed(s));
    const SwarmResult r = run(sw, cache, s.swarm);
    if (std::isfinite(best) && r.best.fitness == best) ++small_hits;
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario s = default_scenario(seed);
    const ChannelSet ch = synthesize_channels(s.channel_params(), s.seed);
    FitnessCache cache(fitness_for(s, ch));
    const double best = exhaustive_best(s, cache);
    SwarmState sw = init_swarm(s.rx_grid(), s.rx_elements, s.tx_grid(), s.tx_elements, s.d_min, s.swarm,
                               swarm_seed(s));
    const SwarmResult r = run(sw, cache, s.swarm);
    const double ratio = r.best.fitness / best;
    if (std::isfinite(best) && ratio <= kSwarmFactor) ++large_hits;
    worst_large = std::max(worst_large, ratio);
    std::printf("    9x9 seed %2d: exhaustive %s W, swarm %s W\n", static_cast<int>(seed),
                format_number(best).c_str(), format_number(r.best.fitness).c_str());
    std::fflush(stdout);
  }
  const double t = seconds_since(t0);
  return {small_hits >= kSeedsNeeded && large_hits >= kSeedsNeeded && t < kBudget6,
          "4x4 exact in " + std::to_string(small_hits) + "/20 (" + std::to_string(small_feasible) +
              " feasible); 9x9 within 5% in " + std::to_string(large_hits) + "/20 (worst ratio " +
              fmt(worst_large) + "); " + fmt(t) + " s"};
}

// --- 7-9 -----------------------------------------------------------------
// medians[method][value index] over the sweep seeds.
std::map<std::string, std::vector<double>> sweep_medians(const Scenario& base, SweepVariable v,
                                                         const std::vector<double>& values,
                                                         const std::vector<Method>& methods) {
  std::map<std::string, std::vector<std::vector<double>>> samples;
  for (auto seed : kSweepSeeds) {
    Scenario s = base;
    s.seed = seed;
    for (const auto& row : sweep(s, v, values, methods)) {
      auto& per_value = samples[row.method];
      per_value.resize(values.size());
      const auto idx = static_cast<std::size_t>(
          std::find(values.begin(), values.end(), row.value) - values.begin());
      per_value[idx].push_back(row.power_w);
    }
  }
  std::map<std::string, std::vector<double>> out;
  for (const auto& [m, per_value] : samples) {
    for (const auto& xs : per_value) out[m].push_back(median(xs));
  }
  return out;
}

// Largest relative step against the expected direction (0 when monotone).
double worst_reversal(const std::vector<double>& v, bool increasing) {
  double worst = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double step = (v[k] - v[k - 1]) / v[k - 1];
    worst = std::max(worst, increasing ? -step : step);
  }
  return worst;
}

bool non_decreasing(const std::vector<double>& v) { return worst_reversal(v, true) <= kMonotoneSlack; }
bool non_increasing(const std::vector<double>& v) { return worst_reversal(v, false) <= kMonotoneSlack; }

std::string series(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt(x);
  return s;
}

Outcome threshold_trends() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> values = {0.0, 3.0, 6.0, 9.0, 12.0};
  const std::vector<Method> methods = {Method::parse("ma"), Method::parse("fixed")};
  bool ok = true;
  std::string detail;
  for (auto v : {SweepVariable::sensing_db, SweepVariable::downlink_db}) {
    const auto med = sweep_medians(Scenario{}, v, values, methods);
    const auto& ma = med.at("ma");
    const auto& fixed = med.at("fixed");
    int strict = 0;
    bool below = true;
    for (std::size_t k = 0; k < values.size(); ++k) {
      below = below && ma[k] <= fixed[k];
      if (ma[k] <= (1.0 - kStrictGain) * fixed[k]) ++strict;
    }
    const bool this_ok = non_decreasing(ma) && non_decreasing(fixed) && below &&
                         2 * strict >= static_cast<int>(values.size());
    ok = ok && this_ok;
    detail += to_string(v) + ": ma [" + series(ma) + "] fixed [" + series(fixed) + "] strict " +
              std::to_string(strict) + "/" + std::to_string(values.size()) + ", worst dip " +
              fmt(std::max(worst_reversal(ma, true), worst_reversal(fixed, true))) + "; ";
  }
  const double t = seconds_since(t0);
  return {ok && t < kBudget7, detail + fmt(t) + " s"};
}

Outcome path_trend() {
  const auto med = sweep_medians(Scenario{}, SweepVariable::paths, {1.0, 2.0, 3.0}, {Method::parse("ma")});
  const auto& ma = med.at("ma");
  return {non_increasing(ma), "ma median over L_p = 1, 2, 3: [" + series(ma) + "], worst rise " +
                                 fmt(worst_reversal(ma, false))};
}

Outcome uplink_floor_trend() {
  const std::vector<double> values = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  Scenario two;
  Scenario one;
  one.uplink_users = 1;
  const auto m2 = sweep_medians(two, SweepVariable::p_min_w, values, {Method::parse("ma")}).at("ma");
  const auto m1 = sweep_medians(one, SweepVariable::p_min_w, values, {Method::parse("ma")}).at("ma");
  bool cheaper = true;
  for (std::size_t k = 0; k < values.size(); ++k) cheaper = cheaper && m1[k] < m2[k];
  return {non_decreasing(m2) && non_decreasing(m1) && cheaper,
          "U=2 [" + series(m2) + "] U=1 [" + series(m1) + "], worst dip " +
              fmt(std::max(worst_reversal(m2, true), worst_reversal(m1, true)))};
}

// --- 10 ------------------------------------------------------------------
bool local_max_near(const RMatrix& m, int row, int col, int radius) {
  const auto last = m.rows() - 1;
  for (Eigen::Index i = std::max<Eigen::Index>(0, row - radius); i <= std::min<Eigen::Index>(last, row + radius); ++i) {
    for (Eigen::Index j = std::max<Eigen::Index>(0, col - radius); j <= std::min<Eigen::Index>(last, col + radius); ++j) {
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const auto a = i + di;
          const auto b = j + dj;
          if (a < 0 || b < 0 || a > last || b > last) continue;
          if (m(a, b) > m(i, j)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) return true;
    }
  }
  return false;
}

Outcome beampattern_shape() {
  const Scenario s = default_scenario(1);
  const ChannelSet ch = synthesize_channels(s.channel_params(), s.seed);
  const RunResult r = run_single(s, ch);
  if (!r.feasible()) return {false, "optimized solution is infeasible"};
  const Beampatterns b = beampatterns(ch, r);
  auto cell = [](double deg) { return static_cast<int>(std::lround(deg + 90.0)); };

  // Global maximum attained within 1 degree of the target (patterns can be
  // ridges, so compare values rather than the argmax index).
  const double peak = b.sensing.maxCoeff();
  double near_target = 0.0;
  const int te = cell(s.target.elevation);
  const int ta = cell(s.target.azimuth);
  for (int i = te - 1; i <= te + 1; ++i)
    for (int j = ta - 1; j <= ta + 1; ++j) near_target = std::max(near_target, b.sensing(i, j));
  const bool peak_ok = near_target >= peak * (1.0 - 1e-9);

  bool clutter_ok = true;
  std::string clutter;
  for (std::size_t k = 0; k < s.clutter_elevation_deg.size(); ++k) {
    const double el = s.clutter_elevation_deg[k];
    const double az = s.clutter_azimuth_deg[k];
    if (std::hypot(el - s.target.elevation, az - s.target.azimuth) <= kClutterSeparationDeg) continue;
    const double db = 10.0 * std::log10(b.sensing(cell(el), cell(az)) / peak);
    clutter_ok = clutter_ok && db <= -kClutterSuppressionDb;
    clutter += " " + fmt(db) + " dB";
  }

  const PlacedChannels pc = place(ch, r.rx, r.tx);
  int users_ok = 0;
  for (int d = 0; d < s.downlink_users; ++d) {
    const CVector& w = r.fitness.sca.solution.beamformers[static_cast<std::size_t>(d)];
    Direction strongest;
    double gain = -1.0;
    for (const auto& dir : ch.angles.downlink_paths[static_cast<std::size_t>(d)]) {
      const double v = std::norm(steering_vector(pc.tx_positions, dir, pc.wavelength).dot(w));
      if (v > gain) {
        gain = v;
        strongest = dir;
      }
    }
    if (local_max_near(b.transmit, cell(rad_to_deg(strongest.elevation)), cell(rad_to_deg(strongest.azimuth)),
                       kLocalMaxRadiusDeg)) {
      ++users_ok;
    }
  }
  const bool tx_ok = users_ok == s.downlink_users;
  return {peak_ok && clutter_ok && tx_ok,
          "p2 within 1 deg of target: " + fmt(10.0 * std::log10(near_target / peak)) + " dB of peak; clutter" +
              clutter + "; p1 local max near strongest path for " + std::to_string(users_ok) + "/" +
              std::to_string(s.downlink_users) + " users"};
}

// --- 11 ------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome cli_determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "maisac_acceptance_determinism";
  fs::remove_all(root);
  const std::string common = " --seed 7 --set swarm.particles=6 --set swarm.iterations=4";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", "run"},
      {"sweep", "sweep --var gamma_r --values 0,6 --methods ma,fixed,random1"},
      {"beampattern", "beampattern"},
  };
  int compared = 0;
  std::string mismatch;
  for (const auto& [name, args] : commands) {
    for (int rep : {1, 2}) {
      const fs::path out = root / (name + std::to_string(rep));
      const std::string cmd = "\"" + cli + "\" " + args + common + " --out \"" + out.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
    }
    for (const auto& entry : fs::directory_iterator(root / (name + "1"))) {
      const fs::path twin = root / (name + "2") / entry.path().filename();
      ++compared;
      if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) mismatch += " " + entry.path().filename().string();
    }
  }
  fs::remove_all(root);
  return {mismatch.empty() && compared > 0,
          std::to_string(compared) + " files compared" + (mismatch.empty() ? "" : "; differ:" + mismatch)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <cli path> [criteria...]\n");
    return 2;
  }
  const std::string cli = argv[1];
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"channel assembly equals dense selection products", channel_assembly},
      {"closed-form receivers beat random filters", receiver_optimality},
      {"Taylor bounds are valid and tight", taylor_bounds},
      {"rank residual and spectral subgradient", dc_machinery},
      {"SCA monotone, rank-one and feasible on the default scenario", sca_behavior},
      {"swarm matches exhaustive search", swarm_vs_exhaustive},
      {"power grows with sensing and downlink thresholds; movable beats fixed", threshold_trends},
      {"power falls as the path count grows", path_trend},
      {"power grows with the uplink floor; one user is cheaper than two", uplink_floor_trend},
      {"beampattern main lobe, clutter nulls and downlink beams", beampattern_shape},
      {"CLI outputs are byte-identical across runs", [&cli] { return cli_determinism(cli); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  [%2d] %s  (%s; %.1f s)\n", o.passed ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!o.passed) ++failed;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
