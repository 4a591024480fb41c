#include <limits>
#include <stdexcept>

#include "edgematch/kernels.hpp"

namespace edgematch {

// Shortest augmenting path (Jonker-Volgenant style) with potentials; exact
// for dense matrices. Internally minimizes -weights.
std::vector<int> max_assignment(const Eigen::MatrixXd& weights) {
  const int n = static_cast<int>(weights.rows());
  const int m = static_cast<int>(weights.cols());
  if (n == 0) return {};
  if (n > m) throw std::invalid_argument("max_assignment: needs rows <= cols");
  if (!weights.allFinite()) throw std::invalid_argument("max_assignment: non-finite entries");

  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, INF);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = INF;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = -weights(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> result(n, -1);
  for (int j = 1; j <= m; ++j)
    if (match[j] != 0) result[match[j] - 1] = j - 1;
  return result;
}

}  // namespace edgematch
