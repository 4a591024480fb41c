#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace edgematch {

enum class SolveStatus { Optimal, Infeasible, MaxIter, NumericalFailure };

std::string to_string(SolveStatus s);

// ---------------------------------------------------------------------------
// Linear programming: min c.x s.t. Ax = b, x >= 0 (dense two-phase simplex).

struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd equality_matrix;
  Eigen::VectorXd equality_rhs;
};

struct SolveReport {
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;
  Eigen::VectorXd primal;
  double dual_objective = -std::numeric_limits<double>::infinity();
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  std::string diagnostic;
};

SolveReport solve_lp(const LinearProgram& lp, double tol = 1e-8, int max_pivots = 200000);

// Fixed-column text dump for cross-checking against external solvers.
void dump_lp(const LinearProgram& lp, std::ostream& os);

// ---------------------------------------------------------------------------
// Block-diagonal semidefinite programming:
// min sum_b <C_b, X_b>  s.t.  sum_b <A_{p,b}, X_b> = rhs_p,  X_b >= 0.

struct SdpEntry {
  int block;
  int row, col;  // row <= col; off-diagonal entries act symmetrically
  double value;
};

struct SdpConstraint {
  std::vector<SdpEntry> entries;
  double rhs;
};

struct BlockSDP {
  std::vector<int> block_dims;
  std::vector<Eigen::MatrixXd> cost;  // one symmetric matrix per block
  std::vector<SdpConstraint> constraints;
};

struct SdpReport {
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd dual;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  std::string diagnostic;
};

SdpReport solve_block_sdp(const BlockSDP& sdp, double tol = 1e-6, int max_iter = 200);

// Sparse block triplet text dump.
void dump_sdp(const BlockSDP& sdp, std::ostream& os);

// ---------------------------------------------------------------------------
// Dense symmetric eigendecomposition, eigenvalues descending, deterministic
// eigenvector signs (largest component positive).

struct SymEig {
  Eigen::MatrixXd vectors;  // columns
  Eigen::VectorXd values;
};

SymEig sym_eig(const Eigen::MatrixXd& m);

// ---------------------------------------------------------------------------
// Optimal assignment: injective row -> column map maximizing the selected
// sum of a non-negative n x m matrix, n <= m.

std::vector<int> max_assignment(const Eigen::MatrixXd& weights);

}  // namespace edgematch
