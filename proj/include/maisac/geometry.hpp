#pragma once

#include <random>
#include <span>
#include <vector>

#include "maisac/common.hpp"

namespace maisac {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend bool operator==(Point2, Point2) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Discrete candidate positions for the elements of one antenna array.
class CandidateGrid {
 public:
  CandidateGrid() = default;
  /// Throws ConfigError when positions repeat or the list is empty.
  CandidateGrid(std::vector<Point2> positions, double spacing);

  int count() const { return static_cast<int>(positions_.size()); }
  double spacing() const { return spacing_; }
  const std::vector<Point2>& positions() const { return positions_; }
  Point2 position(int k) const { return positions_.at(static_cast<std::size_t>(k)); }

 private:
  std::vector<Point2> positions_;
  double spacing_ = 0.0;
};

/// Row-major square grid anchored at the origin: position k = ((k mod s) l, floor(k / s) l).
CandidateGrid build_grid(int count, double spacing);

using DistanceMatrix = RMatrix;

DistanceMatrix distance_matrix(const CandidateGrid& grid);

/// Selection of one candidate per antenna element.
///
/// Stored as one candidate index per element; `selection_matrix()` gives the
/// binary candidates-by-elements form whose columns are one-hot, and
/// `block_matrix()` the block-diagonal (candidates*elements)-by-elements form
/// used to pick columns out of the per-element channel blocks.
class Placement {
 public:
  Placement() = default;
  Placement(int candidate_count, std::vector<int> selected);

  /// Throws DomainError unless every column is one-hot with 0/1 entries.
  static Placement from_selection_matrix(const RMatrix& selection);

  int candidate_count() const { return candidate_count_; }
  int element_count() const { return static_cast<int>(selected_.size()); }
  int selected(int element) const { return selected_.at(static_cast<std::size_t>(element)); }
  const std::vector<int>& selected() const { return selected_; }

  RMatrix selection_matrix() const;
  RMatrix block_matrix() const;
  std::vector<Point2> positions(const CandidateGrid& grid) const;

  /// True when no candidate is selected twice.
  bool distinct() const;
  /// Same physical configuration with element labels ordered by candidate index.
  Placement canonical() const;

  friend bool operator==(const Placement&, const Placement&) = default;
  friend auto operator<=>(const Placement&, const Placement&) = default;

 private:
  int candidate_count_ = 0;
  std::vector<int> selected_;
};

/// b_i^T D b_j for elements i != j; throws DomainError when i == j.
double pairwise_element_distance(const Placement& placement, const DistanceMatrix& distances,
                                 int i, int j);

/// Elements of one array that sit closer than `d_min` to another of its elements.
int array_violations(const Placement& placement, const DistanceMatrix& distances, double d_min);

/// Uniform draw over placements of one array with distinct candidates and no
/// spacing violation (rejection sampling).
Placement random_feasible_placement(const CandidateGrid& grid, int elements, double d_min,
                                    std::mt19937_64& gen);

/// Number of elements (across both arrays) that sit closer than `d_min` to
/// another element of the same array. A collision counts both elements.
int violation_count(const Placement& rx, const Placement& tx, const DistanceMatrix& rx_distances,
                    const DistanceMatrix& tx_distances, double d_min);

}  // namespace maisac
