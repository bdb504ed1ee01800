#include "bsvgd/assignment.hpp"

#include "bsvgd/core.hpp"

#include <limits>

namespace bsvgd {

AssignmentResult solve_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw InvalidArgument("assignment cost matrix must be square");
  if (!cost.allFinite()) throw InvalidArgument("assignment cost matrix has non-finite entries");
  const Eigen::Index n = cost.rows();
  AssignmentResult result;
  if (n == 0) return result;

  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> c = cost;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual root of each augmenting tree.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n + 1);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1);
  std::vector<Eigen::Index> row_of(static_cast<std::size_t>(n + 1), 0);
  std::vector<Eigen::Index> way(static_cast<std::size_t>(n + 1), 0);
  Eigen::VectorXd min_slack(n + 1);
  std::vector<char> used(static_cast<std::size_t>(n + 1));

  for (Eigen::Index i = 1; i <= n; ++i) {
    row_of[0] = i;
    Eigen::Index j0 = 0;
    min_slack.setConstant(inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Eigen::Index i0 = row_of[static_cast<std::size_t>(j0)];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double reduced = c(i0 - 1, j - 1) - u(i0) - v(j);
        if (reduced < min_slack(j)) {
          min_slack(j) = reduced;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (min_slack(j) < delta) {
          delta = min_slack(j);
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u(row_of[static_cast<std::size_t>(j)]) += delta;
          v(j) -= delta;
        } else {
          min_slack(j) -= delta;
        }
      }
      j0 = j1;
    } while (row_of[static_cast<std::size_t>(j0)] != 0);
    do {
      const Eigen::Index j1 = way[static_cast<std::size_t>(j0)];
      row_of[static_cast<std::size_t>(j0)] = row_of[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  result.permutation.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index j = 1; j <= n; ++j)
    result.permutation[static_cast<std::size_t>(row_of[static_cast<std::size_t>(j)] - 1)] = j - 1;
  for (Eigen::Index i = 0; i < n; ++i) result.total_cost += cost(i, result.permutation[static_cast<std::size_t>(i)]);
  return result;
}

}  // namespace bsvgd
