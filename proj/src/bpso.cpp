#include "maisac/bpso.hpp"

#include <algorithm>

namespace maisac {

namespace {

constexpr std::uint64_t kInitStream = 0xB1;
constexpr std::uint64_t kVelocityStream = 0xB2;

bool extend_feasible(const DistanceMatrix& d, double d_min, int k, std::vector<int>& chosen,
                     int next) {
  if (static_cast<int>(chosen.size()) == k) return true;
  for (int c = next; c < d.rows(); ++c) {
    bool ok = true;
    for (int s : chosen) ok = ok && d(s, c) >= d_min - 1e-12;
    if (!ok) continue;
    chosen.push_back(c);
    if (extend_feasible(d, d_min, k, chosen, c + 1)) return true;
    chosen.pop_back();
  }
  return false;
}

void check_layout(const SwarmLayout& layout, const RVector& v) {
  if (v.size() != layout.length()) throw DomainError("vector does not match the swarm layout");
}

}  // namespace

int SwarmLayout::block_start(int block) const {
  if (block < 0 || block >= block_count()) throw DomainError("block index out of range");
  return block < rx_elements ? block * rx_candidates
                             : rx_elements * rx_candidates + (block - rx_elements) * tx_candidates;
}

int SwarmLayout::block_size(int block) const {
  if (block < 0 || block >= block_count()) throw DomainError("block index out of range");
  return block < rx_elements ? rx_candidates : tx_candidates;
}

RVector encode(const SwarmLayout& layout, const Placement& rx, const Placement& tx) {
  if (rx.element_count() != layout.rx_elements || rx.candidate_count() != layout.rx_candidates ||
      tx.element_count() != layout.tx_elements || tx.candidate_count() != layout.tx_candidates) {
    throw DomainError("placement does not match the swarm layout");
  }
  RVector b = RVector::Zero(layout.length());
  for (int e = 0; e < layout.rx_elements; ++e) b(layout.block_start(e) + rx.selected(e)) = 1.0;
  for (int e = 0; e < layout.tx_elements; ++e) {
    b(layout.block_start(layout.rx_elements + e) + tx.selected(e)) = 1.0;
  }
  return b;
}

std::pair<Placement, Placement> decode(const SwarmLayout& layout, const RVector& position) {
  check_layout(layout, position);
  std::vector<int> rx;
  std::vector<int> tx;
  for (int blk = 0; blk < layout.block_count(); ++blk) {
    const auto seg = position.segment(layout.block_start(blk), layout.block_size(blk));
    int hot = -1;
    for (Eigen::Index k = 0; k < seg.size(); ++k) {
      if (seg(k) == 1.0) {
        if (hot >= 0) throw DomainError("position block has more than one active entry");
        hot = static_cast<int>(k);
      } else if (seg(k) != 0.0) {
        throw DomainError("position entries must be 0 or 1");
      }
    }
    if (hot < 0) throw DomainError("position block has no active entry");
    (blk < layout.rx_elements ? rx : tx).push_back(hot);
  }
  return {Placement(layout.rx_candidates, std::move(rx)),
          Placement(layout.tx_candidates, std::move(tx))};
}

SwarmState init_swarm(const CandidateGrid& rx_grid, int rx_elements, const CandidateGrid& tx_grid,
                      int tx_elements, double d_min, const SwarmSettings& settings,
                      std::uint64_t seed) {
  if (settings.particles < 1) throw ConfigError("swarm needs at least one particle");
  if (!(settings.v_min < settings.v_max)) throw ConfigError("velocity bounds must satisfy v_min < v_max");
  if (rx_elements < 1 || tx_elements < 1) throw ConfigError("element counts must be positive");
  const DistanceMatrix drx = distance_matrix(rx_grid);
  const DistanceMatrix dtx = distance_matrix(tx_grid);
  std::vector<int> scratch;
  if (!extend_feasible(drx, d_min, rx_elements, scratch, 0)) {
    throw ConfigError("receive grid cannot host the elements at the minimum spacing");
  }
  scratch.clear();
  if (!extend_feasible(dtx, d_min, tx_elements, scratch, 0)) {
    throw ConfigError("transmit grid cannot host the elements at the minimum spacing");
  }

  SwarmState s;
  s.layout = {rx_grid.count(), rx_elements, tx_grid.count(), tx_elements};
  s.seed = seed;
  for (int i = 0; i < settings.particles; ++i) {
    std::mt19937_64 gen(derive_seed(seed, kInitStream, static_cast<std::uint64_t>(i)));
    const Placement rx = random_feasible_placement(rx_grid, rx_elements, d_min, gen);
    const Placement tx = random_feasible_placement(tx_grid, tx_elements, d_min, gen);
    Particle p;
    p.position = encode(s.layout, rx, tx);
    p.velocity.resize(s.layout.length());
    for (Eigen::Index k = 0; k < p.velocity.size(); ++k) {
      p.velocity(k) = settings.v_min + (settings.v_max - settings.v_min) * unit_uniform(gen);
    }
    p.best_position = p.position;
    s.particles.push_back(std::move(p));
  }
  s.global_best = s.particles.front().position;
  return s;
}

double inertia(int j, int total, double omega_max, double omega_min) {
  if (total < 1) throw DomainError("iteration count must be positive");
  return (omega_max - omega_min) * static_cast<double>(total - j) / total + omega_min;
}

RVector velocity_update(const Particle& particle, const RVector& global_best, double omega,
                        const SwarmSettings& settings, std::mt19937_64& rng) {
  const auto n = particle.position.size();
  if (particle.velocity.size() != n || particle.best_position.size() != n ||
      global_best.size() != n) {
    throw DomainError("particle vectors have mismatched lengths");
  }
  const double e1 = unit_uniform(rng);
  const double e2 = unit_uniform(rng);
  RVector v = omega * particle.velocity +
              settings.c1 * e1 * (particle.best_position - particle.position) +
              settings.c2 * e2 * (global_best - particle.position);
  return v.cwiseMax(settings.v_min).cwiseMin(settings.v_max);
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

RVector position_update(const SwarmLayout& layout, const RVector& velocity) {
  check_layout(layout, velocity);
  RVector b = RVector::Zero(layout.length());
  for (int blk = 0; blk < layout.block_count(); ++blk) {
    const int start = layout.block_start(blk);
    int best = 0;
    double best_s = sigmoid(velocity(start));
    for (int k = 1; k < layout.block_size(blk); ++k) {
      const double s = sigmoid(velocity(start + k));
      if (s > best_s) {
        best_s = s;
        best = k;
      }
    }
    b(start + best) = 1.0;
  }
  return b;
}

const FitnessResult& FitnessCache::evaluate(const Placement& rx, const Placement& tx) {
  auto key = std::make_pair(rx.canonical(), tx.canonical());
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  ++evaluations_;
  FitnessResult r = fitness_(key.first, key.second);
  return cache_.emplace(std::move(key), std::move(r)).first->second;
}

SwarmResult run(SwarmState& swarm, FitnessCache& cache, const SwarmSettings& settings) {
  if (settings.iterations < 1) throw ConfigError("swarm needs at least one iteration");
  if (swarm.particles.empty()) throw DomainError("swarm has no particles");
  SwarmResult out;

  auto evaluate_all = [&](int j) {
    SwarmHistoryEntry h;
    h.iteration = j;
    double sum = 0.0;
    int finite = 0;
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
      Particle& p = swarm.particles[i];
      const auto [rx, tx] = decode(swarm.layout, p.position);
      const FitnessResult* r = nullptr;
      try {
        r = &cache.evaluate(rx, tx);
      } catch (const std::exception& e) {
        throw NumericalError("fitness evaluation failed at iteration " + std::to_string(j) +
                             ", particle " + std::to_string(i) + ": " + e.what());
      }
      p.fitness = r->fitness;
      if (std::isfinite(r->fitness)) {
        sum += r->fitness;
        ++finite;
        if (r->violations == 0) ++h.feasible;
      }
      if (p.fitness < p.best_fitness) {
        p.best_fitness = p.fitness;
        p.best_position = p.position;
      }
    }
    // Single synchronization point: particles are scanned in index order.
    for (const Particle& p : swarm.particles) {
      if (p.best_fitness < swarm.global_best_fitness) {
        swarm.global_best_fitness = p.best_fitness;
        swarm.global_best = p.best_position;
      }
    }
    h.best_fitness = swarm.global_best_fitness;
    h.mean_fitness = finite > 0 ? sum / finite : kInfinity;
    out.history.push_back(h);
  };

  evaluate_all(swarm.iteration);
  for (int j = 0; j < settings.iterations; ++j) {
    const double omega = inertia(j, settings.iterations, settings.omega_max, settings.omega_min);
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
      Particle& p = swarm.particles[i];
      std::mt19937_64 rng(derive_seed(swarm.seed, kVelocityStream,
                                      static_cast<std::uint64_t>(swarm.iteration + j),
                                      static_cast<std::uint64_t>(i)));
      p.velocity = velocity_update(p, swarm.global_best, omega, settings, rng);
    }
    for (Particle& p : swarm.particles) p.position = position_update(swarm.layout, p.velocity);
    evaluate_all(swarm.iteration + j + 1);
  }
  swarm.iteration += settings.iterations;

  const auto [rx, tx] = decode(swarm.layout, swarm.global_best);
  out.rx = rx.canonical();
  out.tx = tx.canonical();
  out.best = cache.evaluate(out.rx, out.tx);
  return out;
}

}  // namespace maisac
