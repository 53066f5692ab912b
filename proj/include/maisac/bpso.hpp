#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "maisac/geometry.hpp"
#include "maisac/sca.hpp"

namespace maisac {

struct SwarmSettings {
  int particles = 20;
  int iterations = 50;
  double c1 = 2.0;
  double c2 = 2.0;
  double omega_max = 1.2;
  double omega_min = 0.4;
  double v_min = -4.0;
  double v_max = 4.0;
};

/// Joint encoding: rx_elements blocks of rx_candidates entries, followed by
/// tx_elements blocks of tx_candidates entries.
struct SwarmLayout {
  int rx_candidates = 0;
  int rx_elements = 0;
  int tx_candidates = 0;
  int tx_elements = 0;

  int length() const { return rx_candidates * rx_elements + tx_candidates * tx_elements; }
  int block_count() const { return rx_elements + tx_elements; }
  int block_start(int block) const;
  int block_size(int block) const;
};

RVector encode(const SwarmLayout& layout, const Placement& rx, const Placement& tx);
/// Throws DomainError unless every block is one-hot.
std::pair<Placement, Placement> decode(const SwarmLayout& layout, const RVector& position);

struct Particle {
  RVector position;
  RVector velocity;
  RVector best_position;
  double best_fitness = kInfinity;
  double fitness = kInfinity;  // at the current position
};

struct SwarmState {
  SwarmLayout layout;
  std::vector<Particle> particles;
  RVector global_best;
  double global_best_fitness = kInfinity;
  int iteration = 0;
  std::uint64_t seed = 0;
};

/// Random placements with distinct candidates and pairwise spacing >= d_min in
/// each array; fitness fields stay at +inf until `run` evaluates them.
SwarmState init_swarm(const CandidateGrid& rx_grid, int rx_elements, const CandidateGrid& tx_grid,
                      int tx_elements, double d_min, const SwarmSettings& settings,
                      std::uint64_t seed);

/// Linear decay from omega_max at j = 0 to omega_min at j = J.
double inertia(int j, int total, double omega_max, double omega_min);

/// omega v + c1 e1 (local best - b) + c2 e2 (global best - b), clamped to [v_min, v_max].
RVector velocity_update(const Particle& particle, const RVector& global_best, double omega,
                        const SwarmSettings& settings, std::mt19937_64& rng);

double sigmoid(double v);

/// Per block, a one at the argmax of sigmoid(velocity); ties go to the lowest index.
RVector position_update(const SwarmLayout& layout, const RVector& velocity);

using FitnessFunction = std::function<FitnessResult(const Placement& rx, const Placement& tx)>;

/// Memoizes a fitness function on canonical placements. The wrapped function
/// is always called with canonical placements, so hits and misses agree.
class FitnessCache {
 public:
  explicit FitnessCache(FitnessFunction fitness) : fitness_(std::move(fitness)) {}

  const FitnessResult& evaluate(const Placement& rx, const Placement& tx);
  int evaluations() const { return evaluations_; }
  int hits() const { return hits_; }
  std::size_t size() const { return cache_.size(); }

 private:
  FitnessFunction fitness_;
  std::map<std::pair<Placement, Placement>, FitnessResult> cache_;
  int evaluations_ = 0;
  int hits_ = 0;
};

struct SwarmHistoryEntry {
  int iteration = 0;  // 0 = initial evaluation
  double best_fitness = kInfinity;
  double mean_fitness = kInfinity;  // over particles with finite fitness
  int feasible = 0;                 // finite fitness and no spacing violation
};

struct SwarmResult {
  Placement rx;
  Placement tx;
  FitnessResult best;
  std::vector<SwarmHistoryEntry> history;
};

/// Evaluates the initial swarm, then performs settings.iterations synchronous
/// updates. Bests change only on strict improvement.
SwarmResult run(SwarmState& swarm, FitnessCache& cache, const SwarmSettings& settings);

}  // namespace maisac
