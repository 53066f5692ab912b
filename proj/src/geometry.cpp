#include "maisac/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace maisac {

namespace {
// Distances are sums of products of grid multiples; exact ties at D_min
// must count as satisfied.
constexpr double kDistanceSlack = 1e-12;
}  // namespace

CandidateGrid::CandidateGrid(std::vector<Point2> positions, double spacing)
    : positions_(std::move(positions)), spacing_(spacing) {
  if (positions_.empty()) throw ConfigError("candidate grid needs at least one position");
  if (!(spacing_ > 0.0)) throw ConfigError("candidate spacing must be positive");
  std::set<std::pair<double, double>> seen;
  for (const auto& p : positions_) {
    if (!seen.emplace(p.x, p.y).second) throw ConfigError("candidate positions must be distinct");
  }
}

CandidateGrid build_grid(int count, double spacing) {
  if (count <= 0) throw ConfigError("candidate count must be positive");
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
  if (side * side != count) {
    throw ConfigError("candidate count " + std::to_string(count) +
                      " is not a perfect square; supply explicit coordinates");
  }
  std::vector<Point2> positions;
  positions.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    positions.push_back({(k % side) * spacing, (k / side) * spacing});
  }
  return CandidateGrid(std::move(positions), spacing);
}

DistanceMatrix distance_matrix(const CandidateGrid& grid) {
  const int n = grid.count();
  DistanceMatrix d = DistanceMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = distance(grid.position(i), grid.position(j));
    }
  }
  return d;
}

Placement::Placement(int candidate_count, std::vector<int> selected)
    : candidate_count_(candidate_count), selected_(std::move(selected)) {
  if (candidate_count_ <= 0) throw DomainError("placement needs a positive candidate count");
  if (selected_.empty()) throw DomainError("placement needs at least one element");
  for (int s : selected_) {
    if (s < 0 || s >= candidate_count_) throw DomainError("selected candidate out of range");
  }
}

Placement Placement::from_selection_matrix(const RMatrix& selection) {
  std::vector<int> selected;
  for (Eigen::Index col = 0; col < selection.cols(); ++col) {
    int hot = -1;
    for (Eigen::Index row = 0; row < selection.rows(); ++row) {
      const double v = selection(row, col);
      if (v == 1.0) {
        if (hot >= 0) throw DomainError("selection column has more than one entry set");
        hot = static_cast<int>(row);
      } else if (v != 0.0) {
        throw DomainError("selection entries must be 0 or 1");
      }
    }
    if (hot < 0) throw DomainError("selection column has no entry set");
    selected.push_back(hot);
  }
  return Placement(static_cast<int>(selection.rows()), std::move(selected));
}

RMatrix Placement::selection_matrix() const {
  RMatrix b = RMatrix::Zero(candidate_count_, element_count());
  for (int e = 0; e < element_count(); ++e) b(selected(e), e) = 1.0;
  return b;
}

RMatrix Placement::block_matrix() const {
  const int m = candidate_count_;
  RMatrix b = RMatrix::Zero(m * element_count(), element_count());
  for (int e = 0; e < element_count(); ++e) b(e * m + selected(e), e) = 1.0;
  return b;
}

std::vector<Point2> Placement::positions(const CandidateGrid& grid) const {
  if (grid.count() != candidate_count_) throw DomainError("placement does not match grid size");
  std::vector<Point2> out;
  out.reserve(selected_.size());
  for (int s : selected_) out.push_back(grid.position(s));
  return out;
}

bool Placement::distinct() const {
  std::vector<int> sorted = selected_;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

Placement Placement::canonical() const {
  std::vector<int> sorted = selected_;
  std::sort(sorted.begin(), sorted.end());
  return Placement(candidate_count_, std::move(sorted));
}

double pairwise_element_distance(const Placement& placement, const DistanceMatrix& distances,
                                 int i, int j) {
  if (i == j) throw DomainError("pairwise distance needs two different elements");
  if (distances.rows() != placement.candidate_count()) {
    throw DomainError("distance matrix does not match placement");
  }
  const RMatrix b = placement.selection_matrix();
  return b.col(i).dot(distances * b.col(j));
}

int array_violations(const Placement& p, const DistanceMatrix& d, double d_min) {
  const int n = p.element_count();
  std::vector<bool> bad(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool collide = p.selected(i) == p.selected(j);
      if (collide || d(p.selected(i), p.selected(j)) < d_min - kDistanceSlack) {
        bad[static_cast<std::size_t>(i)] = true;
        bad[static_cast<std::size_t>(j)] = true;
      }
    }
  }
  return static_cast<int>(std::count(bad.begin(), bad.end(), true));
}

int violation_count(const Placement& rx, const Placement& tx, const DistanceMatrix& rx_distances,
                    const DistanceMatrix& tx_distances, double d_min) {
  return array_violations(rx, rx_distances, d_min) + array_violations(tx, tx_distances, d_min);
}

Placement random_feasible_placement(const CandidateGrid& grid, int elements, double d_min,
                                    std::mt19937_64& gen) {
  const int n = grid.count();
  if (elements < 1 || elements > n) throw ConfigError("grid cannot host the requested elements");
  const DistanceMatrix d = distance_matrix(grid);
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first `elements` entries are a uniform draw
    // without replacement.
    for (int i = 0; i < elements; ++i) {
      const int j = i + static_cast<int>(unit_uniform(gen) * (n - i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    Placement p(n, std::vector<int>(pool.begin(), pool.begin() + elements));
    if (array_violations(p, d, d_min) == 0) return p;
  }
  throw NumericalError("rejection sampling found no feasible placement");
}

}  // namespace maisac
