#include <Eigen/Eigenvalues>

#include "edgematch/kernels.hpp"

namespace edgematch {

SymEig sym_eig(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const int n = static_cast<int>(sym.rows());
  SymEig out;
  out.vectors.resize(n, n);
  out.values.resize(n);
  // Eigen sorts ascending; flip to descending.
  for (int i = 0; i < n; ++i) {
    out.values[i] = es.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  // Deterministic sign: make the largest-magnitude component positive
  // (first such index on ties).
  for (int i = 0; i < n; ++i) {
    int arg = 0;
    double best = -1;
    for (int r = 0; r < n; ++r) {
      const double a = std::abs(out.vectors(r, i));
      if (a > best + 1e-14) {
        best = a;
        arg = r;
      }
    }
    if (out.vectors(arg, i) < 0) out.vectors.col(i) *= -1.0;
  }
  return out;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace edgematch
