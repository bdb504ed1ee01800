#pragma once

#include <Eigen/Dense>

#include <vector>

namespace bsvgd {

struct AssignmentResult {
  /// permutation[row] = column assigned to that row.
  std::vector<Eigen::Index> permutation;
  /// Sum of cost(row, permutation[row]), accumulated in row order.
  double total_cost = 0.0;
};

/// Exact minimum-cost perfect matching on a square matrix, O(n^3) shortest
/// augmenting paths with dual potentials (Hungarian method).
AssignmentResult solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace bsvgd
