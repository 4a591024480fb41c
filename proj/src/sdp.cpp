#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <ostream>

#include "edgematch/kernels.hpp"

namespace edgematch {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using Blocks = std::vector<MatrixXd>;

double inner(const Blocks& a, const Blocks& b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i].array() * b[i].array()).sum();
  return acc;
}

double constraint_value(const SdpConstraint& con, const Blocks& x) {
  double acc = 0;
  for (const auto& e : con.entries) {
    const double v = x[e.block](e.row, e.col);
    acc += e.row == e.col ? e.value * v : 2.0 * e.value * v;
  }
  return acc;
}

void add_scaled_constraint(Blocks& target, const SdpConstraint& con, double scale) {
  for (const auto& e : con.entries) {
    target[e.block](e.row, e.col) += scale * e.value;
    if (e.row != e.col) target[e.block](e.col, e.row) += scale * e.value;
  }
}

// Symmetric square root and inverse square root with eigenvalue clamping.
MatrixXd sym_pow(const MatrixXd& m, double power, double clamp = 1e-14) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  VectorXd d = es.eigenvalues().cwiseMax(clamp);
  VectorXd dp = d.array().pow(power);
  return es.eigenvectors() * dp.asDiagonal() * es.eigenvectors().transpose();
}

// Largest alpha in (0, 1] with X + alpha D psd (with a safety fraction).
double step_length(const MatrixXd& x, const MatrixXd& d) {
  const MatrixXd xi = sym_pow(x, -0.5);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(xi * d * xi);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return 1.0;
  return std::min(1.0, -1.0 / lmin);
}

struct State {
  Blocks X, S;
  VectorXd y;
};

}  // namespace

SdpReport solve_block_sdp(const BlockSDP& sdp, double tol, int max_iter) {
  SdpReport report;
  const int nb = static_cast<int>(sdp.block_dims.size());
  const int m = static_cast<int>(sdp.constraints.size());
  if (static_cast<int>(sdp.cost.size()) != nb) {
    report.diagnostic = "cost/block count mismatch";
    return report;
  }
  Blocks C(nb);
  for (int b = 0; b < nb; ++b) {
    if (sdp.cost[b].rows() != sdp.block_dims[b] || sdp.cost[b].cols() != sdp.block_dims[b]) {
      report.diagnostic = "cost dimension mismatch";
      return report;
    }
    C[b] = 0.5 * (sdp.cost[b] + sdp.cost[b].transpose());
  }
  VectorXd rhs(m);
  for (int p = 0; p < m; ++p) rhs[p] = sdp.constraints[p].rhs;

  double data_scale = 1.0;
  for (const auto& c : C) data_scale = std::max(data_scale, c.cwiseAbs().maxCoeff());
  if (m > 0) data_scale = std::max(data_scale, rhs.cwiseAbs().maxCoeff());

  State st;
  st.X.resize(nb);
  st.S.resize(nb);
  for (int b = 0; b < nb; ++b) {
    st.X[b] = MatrixXd::Identity(sdp.block_dims[b], sdp.block_dims[b]) * std::max(10.0, data_scale);
    st.S[b] = MatrixXd::Identity(sdp.block_dims[b], sdp.block_dims[b]) * std::max(10.0, data_scale);
  }
  st.y = VectorXd::Zero(m);

  const double total_dim = [&] {
    double n = 0;
    for (int d : sdp.block_dims) n += d;
    return std::max(n, 1.0);
  }();

  auto evaluate = [&](const State& s, double* pres, double* dres, double* gap, double* pobj,
                      double* dobj) {
    VectorXd rp(m);
    for (int p = 0; p < m; ++p) rp[p] = rhs[p] - constraint_value(sdp.constraints[p], s.X);
    double rd = 0, cn = 1;
    for (int b = 0; b < nb; ++b) cn = std::max(cn, C[b].norm());
    Blocks Rd(nb);
    for (int b = 0; b < nb; ++b) Rd[b] = C[b] - s.S[b];
    for (int p = 0; p < m; ++p) add_scaled_constraint(Rd, sdp.constraints[p], -s.y[p]);
    for (int b = 0; b < nb; ++b) rd = std::max(rd, Rd[b].cwiseAbs().maxCoeff());
    *pobj = inner(C, s.X);
    *dobj = rhs.dot(s.y);
    *pres = (m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0) / (1.0 + (m > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0));
    *dres = rd / (1.0 + cn);
    *gap = std::abs(inner(s.X, s.S)) / (1.0 + std::abs(*pobj) + std::abs(*dobj));
  };

  State best = st;
  double best_score = std::numeric_limits<double>::infinity();
  int iter = 0;
  std::string failure;

  for (iter = 0; iter < max_iter; ++iter) {
    double pres, dres, gap, pobj, dobj;
    evaluate(st, &pres, &dres, &gap, &pobj, &dobj);
    const double score = std::max({pres, dres, gap});
    if (score < best_score) {
      best_score = score;
      best = st;
    }
    if (pres <= tol && dres <= tol && gap <= tol) break;

    // Residuals.
    VectorXd rp(m);
    for (int p = 0; p < m; ++p) rp[p] = rhs[p] - constraint_value(sdp.constraints[p], st.X);
    Blocks Rd(nb);
    for (int b = 0; b < nb; ++b) Rd[b] = C[b] - st.S[b];
    for (int p = 0; p < m; ++p) add_scaled_constraint(Rd, sdp.constraints[p], -st.y[p]);

    const double mu = inner(st.X, st.S) / total_dim;

    // Nesterov-Todd scaling point per block: W S W = X.
    Blocks W(nb), Sinv(nb);
    bool scale_ok = true;
    for (int b = 0; b < nb; ++b) {
      const MatrixXd xh = sym_pow(st.X[b], 0.5);
      const MatrixXd mid = sym_pow(xh * st.S[b] * xh, -0.5);
      W[b] = xh * mid * xh;
      Sinv[b] = sym_pow(st.S[b], -1.0);
      if (!W[b].allFinite() || !Sinv[b].allFinite()) scale_ok = false;
    }
    if (!scale_ok) {
      failure = "scaling matrices not finite";
      break;
    }

    // Schur complement M[p][q] = sum_b <A_p, W A_q W>.
    MatrixXd M = MatrixXd::Zero(m, m);
    std::vector<Blocks> WAqW(m);
    for (int q = 0; q < m; ++q) {
      Blocks Aq(nb);
      for (int b = 0; b < nb; ++b) Aq[b] = MatrixXd::Zero(sdp.block_dims[b], sdp.block_dims[b]);
      add_scaled_constraint(Aq, sdp.constraints[q], 1.0);
      Blocks G(nb);
      for (int b = 0; b < nb; ++b) G[b] = W[b] * Aq[b] * W[b];
      WAqW[q] = std::move(G);
      for (int p = 0; p < m; ++p) M(p, q) = constraint_value(sdp.constraints[p], WAqW[q]);
    }
    M = 0.5 * (M + M.transpose());

    Eigen::LDLT<MatrixXd> ldlt;
    double ridge = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
      MatrixXd Mr = M;
      if (ridge > 0) Mr.diagonal().array() += ridge * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
      ldlt.compute(Mr);
      if (ldlt.info() == Eigen::Success &&
          (m == 0 || ldlt.solve(VectorXd::Ones(m)).allFinite())) {
        if (ridge > 0 || m == 0) break;
        // accept unridged factorization
        break;
      }
      ridge = ridge == 0 ? 1e-13 : ridge * 100;
    }

    auto solve_direction = [&](const Blocks& Rc, VectorXd* dy, Blocks* dX, Blocks* dS) {
      Blocks WRdW(nb);
      for (int b = 0; b < nb; ++b) WRdW[b] = W[b] * Rd[b] * W[b];
      VectorXd rhs_v(m);
      for (int p = 0; p < m; ++p)
        rhs_v[p] = rp[p] - constraint_value(sdp.constraints[p], Rc) +
                   constraint_value(sdp.constraints[p], WRdW);
      *dy = m > 0 ? VectorXd(ldlt.solve(rhs_v)) : VectorXd(0);
      dS->assign(nb, MatrixXd());
      dX->assign(nb, MatrixXd());
      Blocks At(nb);
      for (int b = 0; b < nb; ++b) At[b] = MatrixXd::Zero(sdp.block_dims[b], sdp.block_dims[b]);
      for (int p = 0; p < m; ++p) add_scaled_constraint(At, sdp.constraints[p], (*dy)[p]);
      for (int b = 0; b < nb; ++b) {
        (*dS)[b] = Rd[b] - At[b];
        MatrixXd dx = Rc[b] - W[b] * (*dS)[b] * W[b];
        (*dX)[b] = 0.5 * (dx + dx.transpose());
      }
    };

    // Predictor (affine scaling).
    Blocks Rc_aff(nb);
    for (int b = 0; b < nb; ++b) Rc_aff[b] = -st.X[b];
    VectorXd dy_aff;
    Blocks dX_aff, dS_aff;
    solve_direction(Rc_aff, &dy_aff, &dX_aff, &dS_aff);

    double ap = 1.0, ad = 1.0;
    for (int b = 0; b < nb; ++b) {
      ap = std::min(ap, step_length(st.X[b], dX_aff[b]));
      ad = std::min(ad, step_length(st.S[b], dS_aff[b]));
    }
    double mu_aff = 0;
    for (int b = 0; b < nb; ++b)
      mu_aff += ((st.X[b] + 0.98 * ap * dX_aff[b]).array() *
                 (st.S[b] + 0.98 * ad * dS_aff[b]).array())
                    .sum();
    mu_aff = std::max(mu_aff / total_dim, 0.0);
    const double sigma = std::clamp(std::pow(mu_aff / std::max(mu, 1e-300), 3.0), 1e-6, 0.99);

    // Corrector.
    Blocks Rc(nb);
    for (int b = 0; b < nb; ++b) Rc[b] = sigma * mu * Sinv[b] - st.X[b];
    VectorXd dy;
    Blocks dX, dS;
    solve_direction(Rc, &dy, &dX, &dS);

    ap = ad = 1.0;
    for (int b = 0; b < nb; ++b) {
      ap = std::min(ap, step_length(st.X[b], dX[b]));
      ad = std::min(ad, step_length(st.S[b], dS[b]));
    }
    ap = std::min(1.0, 0.98 * ap);
    ad = std::min(1.0, 0.98 * ad);

    bool finite = std::isfinite(ap) && std::isfinite(ad);
    for (int b = 0; b < nb && finite; ++b)
      finite = dX[b].allFinite() && dS[b].allFinite();
    if (!finite || (m > 0 && !dy.allFinite())) {
      failure = "direction not finite";
      break;
    }

    for (int b = 0; b < nb; ++b) {
      st.X[b] += ap * dX[b];
      st.S[b] += ad * dS[b];
      st.X[b] = 0.5 * (st.X[b] + st.X[b].transpose());
      st.S[b] = 0.5 * (st.S[b] + st.S[b].transpose());
    }
    st.y += ad * dy;

    if (ap < 1e-10 && ad < 1e-10) {
      failure = "step lengths collapsed";
      break;
    }
  }

  double pres, dres, gap, pobj, dobj;
  evaluate(st, &pres, &dres, &gap, &pobj, &dobj);
  if (std::max({pres, dres, gap}) > best_score) {
    st = best;
    evaluate(st, &pres, &dres, &gap, &pobj, &dobj);
  }

  report.blocks = st.X;
  report.dual = st.y;
  report.objective = pobj;
  report.primal_residual = pres;
  report.dual_residual = dres;
  report.gap = gap;
  report.iterations = iter;
  if (pres <= tol && dres <= tol && gap <= tol) {
    report.status = SolveStatus::Optimal;
  } else if (!failure.empty()) {
    report.status = SolveStatus::NumericalFailure;
    report.diagnostic = failure;
  } else {
    report.status = SolveStatus::MaxIter;
    report.diagnostic = "iteration limit reached; best iterate returned";
  }
  return report;
}

void dump_sdp(const BlockSDP& sdp, std::ostream& os) {
  os << "SDP blocks";
  for (int d : sdp.block_dims) os << " " << d;
  os << "\n";
  for (std::size_t b = 0; b < sdp.cost.size(); ++b)
    for (int i = 0; i < sdp.cost[b].rows(); ++i)
      for (int j = i; j < sdp.cost[b].cols(); ++j)
        if (sdp.cost[b](i, j) != 0)
          os << "C " << b << " " << i << " " << j << " " << sdp.cost[b](i, j) << "\n";
  for (std::size_t p = 0; p < sdp.constraints.size(); ++p) {
    for (const auto& e : sdp.constraints[p].entries)
      os << "A " << p << " " << e.block << " " << e.row << " " << e.col << " " << e.value << "\n";
    os << "b " << p << " " << sdp.constraints[p].rhs << "\n";
  }
}

}  // namespace edgematch
