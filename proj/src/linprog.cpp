#include <Eigen/LU>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "edgematch/kernels.hpp"

namespace edgematch {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr int kRefactorEvery = 50;

// Dense two-phase tableau simplex over equality constraints with x >= 0.
// Entering: most negative reduced cost (Bland's rule after a degenerate
// streak, which cannot cycle). Leaving: two-pass ratio test that prefers
// large pivot elements among near-minimal ratios. The tableau is rebuilt
// from a fresh basis factorization every 50 pivots and before any claim of
// optimality or infeasibility.
struct Simplex {
  Eigen::MatrixXd A;  // m x (n + m): original columns then artificials
  Eigen::VectorXd b;
  Eigen::MatrixXd T;
  Eigen::VectorXd x_b;
  std::vector<int> basis;
  std::vector<char> in_basis;
  int m, n;
  int pivots = 0;
  int degenerate_streak = 0;
  bool bland = false;

  Simplex(const Eigen::MatrixXd& eq, const Eigen::VectorXd& rhs)
      : m(static_cast<int>(eq.rows())), n(static_cast<int>(eq.cols())) {
    A.resize(m, n + m);
    A.leftCols(n) = eq;
    A.rightCols(m).setIdentity();
    b = rhs;
    for (int i = 0; i < m; ++i)
      if (b[i] < 0) {
        A.row(i) *= -1.0;
        b[i] = -b[i];
      }
    T = A;
    x_b = b;
    basis.resize(m);
    in_basis.assign(n + m, 0);
    for (int i = 0; i < m; ++i) {
      basis[i] = n + i;
      in_basis[n + i] = 1;
    }
  }

  bool basis_sane = true;

  void refactor() {
    Eigen::MatrixXd B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = A.col(basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    basis_sane = diag.minCoeff() > 1e-13 * std::max(1.0, diag.maxCoeff());
    T = lu.solve(A);
    x_b = lu.solve(b);
    for (int i = 0; i < m; ++i)
      if (x_b[i] < 0 && x_b[i] > -1e-7) x_b[i] = 0;
  }

  Eigen::VectorXd reduced_costs(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb[i] = cost[basis[i]];
    return cost - T.transpose() * cb;
  }

  void pivot(int row, int col) {
    const double p = T(row, col);
    T.row(row) /= p;
    x_b[row] /= p;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = T(i, col);
      if (f == 0.0) continue;
      T.row(i) -= f * T.row(row);
      x_b[i] -= f * x_b[row];
      if (x_b[i] < 0 && x_b[i] > -1e-9) x_b[i] = 0;
    }
    in_basis[basis[row]] = 0;
    in_basis[col] = 1;
    basis[row] = col;
    if (++pivots % kRefactorEvery == 0) refactor();
  }

  std::vector<int> entering_candidates(const Eigen::VectorXd& d, int limit, double tol) const {
    std::vector<int> cands;
    for (int j = 0; j < limit; ++j)
      if (!in_basis[j] && d[j] < -tol) cands.push_back(j);
    if (bland) return cands;  // already in index order
    std::sort(cands.begin(), cands.end(), [&](int a, int b) { return d[a] < d[b]; });
    if (cands.size() > 40) cands.resize(40);
    return cands;
  }

  // Two-pass (Harris style) ratio test; returns (row, pivot magnitude).
  std::pair<int, double> select_leaving(int enter) const {
    double theta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= kPivotEps) continue;
      theta = std::min(theta, std::max(x_b[i], 0.0) / a);
    }
    if (!std::isfinite(theta)) return {-1, 0.0};
    const double slack = 1e-8 * (1.0 + theta);
    int leave = -1;
    double best_pivot = 0;
    for (int i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= kPivotEps) continue;
      if (std::max(x_b[i], 0.0) / a <= theta + slack && a > best_pivot) {
        best_pivot = a;
        leave = i;
      }
    }
    return {leave, best_pivot};
  }

  enum class RunResult { OptimalLike, Unbounded, PivotLimit, LostFeasibility };

  RunResult run(const Eigen::VectorXd& cost, bool allow_artificials, int max_pivots) {
    const int limit = allow_artificials ? n + m : n;
    while (true) {
      if (pivots >= max_pivots) return RunResult::PivotLimit;
      if (!basis_sane) return RunResult::LostFeasibility;
      Eigen::VectorXd d = reduced_costs(cost);
      std::vector<int> cands = entering_candidates(d, limit, 1e-9);
      if (cands.empty()) {
        // Verify against a fresh factorization before accepting.
        refactor();
        if (!basis_sane || x_b.minCoeff() < -1e-6) return RunResult::LostFeasibility;
        d = reduced_costs(cost);
        cands = entering_candidates(d, limit, 1e-9);
        if (cands.empty()) return RunResult::OptimalLike;
      }

      // Only pivot on healthy elements; columns offering nothing better than
      // a near-zero pivot are unusable numerically.
      int enter = -1, leave = -1;
      bool saw_ray = false;
      for (int j : cands) {
        auto [row, piv] = select_leaving(j);
        if (row < 0) {
          saw_ray = true;
          continue;
        }
        if (piv >= 1e-7) {
          enter = j;
          leave = row;
          break;
        }
      }
      if (enter < 0 && !bland) {
        // Widen the scan to every improving column before giving up.
        for (int j = 0; j < limit && enter < 0; ++j) {
          if (in_basis[j] || d[j] >= -1e-9) continue;
          auto [row, piv] = select_leaving(j);
          if (row < 0)
            saw_ray = true;
          else if (piv >= 1e-7) {
            enter = j;
            leave = row;
          }
        }
      }
      if (enter < 0) {
        if (saw_ray) return RunResult::Unbounded;
        refactor();
        if (!basis_sane || x_b.minCoeff() < -1e-6) return RunResult::LostFeasibility;
        d = reduced_costs(cost);
        cands = entering_candidates(d, limit, 1e-9);
        for (int j : cands) {
          auto [row, piv] = select_leaving(j);
          if (row >= 0 && piv >= 1e-7) {
            enter = j;
            leave = row;
            break;
          }
        }
        if (enter < 0) return RunResult::OptimalLike;
      }
      // In phase 2 a basic artificial pinned at zero leaves as soon as the
      // entering column touches its row, so it can never regrow.
      if (!allow_artificials) {
        double best = 1e-6;
        for (int i = 0; i < m; ++i)
          if (basis[i] >= n && std::abs(T(i, enter)) > best && x_b[i] <= 1e-9) {
            best = std::abs(T(i, enter));
            leave = i;
          }
      }

      const double ratio = std::max(x_b[leave], 0.0) / std::abs(T(leave, enter));
      if (ratio <= 1e-12) {
        if (++degenerate_streak > 2000) bland = true;
      } else {
        degenerate_streak = 0;
      }
      pivot(leave, enter);
    }
  }
};

// Drops linearly dependent equality rows (Gauss-Jordan with partial
// pivoting); throws nothing, flags inconsistency instead.
struct RowFilter {
  std::vector<int> keep;
  bool inconsistent = false;
};

RowFilter independent_rows(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  RowFilter out;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  std::vector<int> pivots;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd r = A.row(i);
    double v = b[i];
    const double scale = std::max(r.cwiseAbs().maxCoeff(), 1e-300);
    r /= scale;
    v /= scale;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const double f = r[pivots[k]] / rows[k][pivots[k]];
      if (f != 0.0) {
        r -= f * rows[k];
        v -= f * rhs[k];
      }
    }
    int piv = 0;
    const double mx = r.cwiseAbs().maxCoeff(&piv);
    if (mx > 5e-13) {
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const double f = rows[k][piv] / r[piv];
        if (f != 0.0) {
          rows[k] -= f * r;
          rhs[k] -= f * v;
        }
      }
      rows.push_back(r);
      rhs.push_back(v);
      pivots.push_back(piv);
      out.keep.push_back(i);
    } else if (std::abs(v) > 1e-8) {
      out.inconsistent = true;
      out.keep.push_back(i);  // keep it; the solver will report infeasible
    }
  }
  (void)n;
  return out;
}

}  // namespace

SolveReport solve_lp(const LinearProgram& lp, double tol, int max_pivots) {
  SolveReport report;
  const int m0 = static_cast<int>(lp.equality_matrix.rows());
  const int n = static_cast<int>(lp.equality_matrix.cols());
  if (lp.equality_rhs.size() != m0 || lp.objective.size() != n) {
    report.diagnostic = "dimension mismatch";
    return report;
  }
  if (!lp.equality_matrix.allFinite() || !lp.equality_rhs.allFinite() ||
      !lp.objective.allFinite()) {
    report.diagnostic = "non-finite data";
    return report;
  }

  // Drop dependent rows, then equilibrate rows and columns.
  const RowFilter filter = independent_rows(lp.equality_matrix, lp.equality_rhs);
  const int m = static_cast<int>(filter.keep.size());
  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m), row_scale(m), col_scale(n);
  for (int i = 0; i < m; ++i) {
    A.row(i) = lp.equality_matrix.row(filter.keep[i]);
    b[i] = lp.equality_rhs[filter.keep[i]];
    double s = A.row(i).cwiseAbs().maxCoeff();
    if (s < 1e-300) s = 1.0;
    row_scale[i] = s;
    A.row(i) /= s;
    b[i] /= s;
  }
  for (int j = 0; j < n; ++j) {
    double s = A.col(j).cwiseAbs().maxCoeff();
    if (s < 1e-12) s = 1.0;
    col_scale[j] = s;
    A.col(j) /= s;
  }

  // Deterministic cost perturbations break the heavy degeneracy of
  // assignment-style polytopes without touching feasibility.
  auto noise = [](int j) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL * (j + 1);
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    return double(h % 1000003) / 1000003.0;
  };
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  for (int i = 0; i < m; ++i) phase1[n + i] = 1.0 + 1e-7 * noise(i);
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  for (int j = 0; j < n; ++j) phase2[j] = lp.objective[j] / col_scale[j];
  const double cscale = std::max(1.0, phase2.cwiseAbs().maxCoeff());
  Eigen::VectorXd phase2_pert = phase2;
  for (int j = 0; j < n; ++j) phase2_pert[j] += 1e-9 * cscale * noise(j + m);

  // Feasibility loss restarts the whole solve once under Bland's rule.
  Simplex sx(A, b);
  for (int attempt = 0;; ++attempt) {
    if (attempt > 0) {
      sx = Simplex(A, b);
      sx.bland = true;
    }
    const Simplex::RunResult r1 = sx.run(phase1, true, max_pivots);
    if (getenv("EM_LP_DEBUG")) fprintf(stderr, "[lp] attempt=%d r1=%d pivots=%d minxb=%g bland=%d\n", attempt, (int)r1, sx.pivots, sx.x_b.minCoeff(), (int)sx.bland);
    if (r1 == Simplex::RunResult::LostFeasibility && attempt == 0) continue;
    double infeas = 0;
    for (int i = 0; i < m; ++i)
      if (sx.basis[i] >= n) infeas += std::max(sx.x_b[i], 0.0);
    if (r1 == Simplex::RunResult::PivotLimit) {
      report.status = SolveStatus::MaxIter;
      report.iterations = sx.pivots;
      report.diagnostic = "pivot limit reached in phase 1";
      return report;
    }
    if (r1 == Simplex::RunResult::LostFeasibility) {
      report.status = SolveStatus::NumericalFailure;
      report.iterations = sx.pivots;
      report.diagnostic = "primal feasibility lost in phase 1";
      return report;
    }
    if (infeas > tol * (1.0 + b.cwiseAbs().maxCoeff())) {
      report.status = SolveStatus::Infeasible;
      report.iterations = sx.pivots;
      report.objective = infeas;
      report.diagnostic = "phase-1 optimum positive";
      return report;
    }
    // Drive basic artificials out, pivoting on the largest available element.
    for (int i = 0; i < sx.m; ++i) {
      if (sx.basis[i] < n) continue;
      int col = -1;
      double best = 1e-6;
      for (int j = 0; j < n; ++j)
        if (!sx.in_basis[j] && std::abs(sx.T(i, j)) > best) {
          best = std::abs(sx.T(i, j));
          col = j;
        }
      if (col >= 0) sx.pivot(i, col);
    }
    sx.refactor();

    Simplex::RunResult r2 = sx.run(phase2_pert, false, max_pivots);
    if (r2 == Simplex::RunResult::OptimalLike) r2 = sx.run(phase2, false, max_pivots);
    if (getenv("EM_LP_DEBUG")) fprintf(stderr, "[lp] attempt=%d r2=%d pivots=%d minxb=%g\n", attempt, (int)r2, sx.pivots, sx.x_b.minCoeff());
    if (r2 == Simplex::RunResult::LostFeasibility && attempt == 0) continue;
    report.iterations = sx.pivots;
    if (r2 == Simplex::RunResult::Unbounded) {
      report.status = SolveStatus::NumericalFailure;
      report.diagnostic = "problem is unbounded below";
      return report;
    }
    if (r2 == Simplex::RunResult::LostFeasibility) {
      report.status = SolveStatus::NumericalFailure;
      report.diagnostic = "primal feasibility lost in phase 2";
      return report;
    }
    if (r2 == Simplex::RunResult::PivotLimit) {
      report.status = SolveStatus::MaxIter;
      report.diagnostic = "pivot limit reached in phase 2";
    }
    break;
  }

  // Precise recompute of the final basic solution and the dual certificate.
  Eigen::MatrixXd B(m, m);
  for (int i = 0; i < m; ++i) B.col(i) = sx.A.col(sx.basis[i]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  const Eigen::VectorXd xb = lu.solve(sx.b);
  Eigen::VectorXd cb(m);
  for (int i = 0; i < m; ++i) cb[i] = phase2[sx.basis[i]];
  const Eigen::VectorXd y_scaled = lu.transpose().solve(cb);

  report.primal = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (sx.basis[i] < n)
      report.primal[sx.basis[i]] = std::max(xb[i], 0.0) / col_scale[sx.basis[i]];
  report.objective = lp.objective.dot(report.primal);

  // Map duals back to the original (unfiltered, unscaled) rows.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m0);
  for (int i = 0; i < m; ++i) y[filter.keep[i]] = y_scaled[i] / row_scale[i];
  report.dual_objective = lp.equality_rhs.dot(y);

  const Eigen::VectorXd resid = lp.equality_matrix * report.primal - lp.equality_rhs;
  report.primal_residual =
      resid.cwiseAbs().maxCoeff() / (1.0 + lp.equality_rhs.cwiseAbs().maxCoeff());
  const Eigen::VectorXd slack = lp.objective - lp.equality_matrix.transpose() * y;
  report.dual_residual = std::max(0.0, -slack.minCoeff());
  report.gap =
      std::abs(report.objective - report.dual_objective) / (1.0 + std::abs(report.objective));

  if (report.status == SolveStatus::MaxIter) {
    // keep the pivot-limit status set inside the loop
  } else if (report.primal_residual <= tol && report.dual_residual <= 10 * tol &&
             report.gap <= 10 * tol) {
    report.status = SolveStatus::Optimal;
  } else {
    report.status = SolveStatus::NumericalFailure;
    report.diagnostic = "optimality certificates out of tolerance";
  }
  return report;
}

void dump_lp(const LinearProgram& lp, std::ostream& os) {
  const int m = static_cast<int>(lp.equality_matrix.rows());
  const int n = static_cast<int>(lp.equality_matrix.cols());
  os << "LP min n=" << n << " m=" << m << "\n";
  os << "c";
  for (int j = 0; j < n; ++j) os << " " << lp.objective[j];
  os << "\n";
  for (int i = 0; i < m; ++i) {
    os << "row " << i;
    for (int j = 0; j < n; ++j) os << " " << lp.equality_matrix(i, j);
    os << " = " << lp.equality_rhs[i] << "\n";
  }
}

}  // namespace edgematch
