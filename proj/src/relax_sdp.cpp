#include "edgematch/relax_sdp.hpp"

#include <cmath>
#include <functional>

#include "edgematch/errors.hpp"

namespace edgematch {

std::string to_string(SdpPipelineStatus s) {
  switch (s) {
    case SdpPipelineStatus::Converged: return "converged";
    case SdpPipelineStatus::MaxIter: return "max_iter";
    case SdpPipelineStatus::ExtractionFailed: return "extraction_failed";
    case SdpPipelineStatus::ValidationFailed: return "validation_failed";
  }
  return "unknown";
}

int MomentStructure::value_of(const Monomial& m) const {
  const auto it = monomial_to_value.find({m.kx, m.ky});
  if (it == monomial_to_value.end())
    throw std::invalid_argument("moment structure does not contain monomial (" +
                                std::to_string(m.kx) + "," + std::to_string(m.ky) + ")");
  return it->second;
}

MomentStructure build_moment_structure(int K, int dimension) {
  if (K < 1) throw std::invalid_argument("build_moment_structure: K >= 1");
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("build_moment_structure: dimension must be 1 or 2");
  MomentStructure st;
  st.K = K;
  st.dimension = dimension;
  st.matrix_dim = dimension == 1 ? K + 1 : 2 * K + 1;

  // Exponents of the monomial vector (1, x, .., x^K [, y, .., y^K]).
  std::vector<std::pair<int, int>> basis(st.matrix_dim);
  basis[0] = {0, 0};
  for (int p = 1; p <= K; ++p) basis[p] = {p, 0};
  if (dimension == 2)
    for (int q = 1; q <= K; ++q) basis[K + q] = {0, q};

  st.position_value.resize(st.matrix_dim, st.matrix_dim);
  for (int i = 0; i < st.matrix_dim; ++i)
    for (int j = i; j < st.matrix_dim; ++j) {
      const std::pair<int, int> mono{basis[i].first + basis[j].first,
                                     basis[i].second + basis[j].second};
      auto it = st.monomial_to_value.find(mono);
      if (it == st.monomial_to_value.end()) {
        const int id = static_cast<int>(st.value_monomials.size());
        it = st.monomial_to_value.emplace(mono, id).first;
        st.value_monomials.push_back(mono == std::pair<int, int>{0, 0}
                                         ? Monomial{}
                                         : Monomial::multi_index(mono.first, mono.second));
        st.representative.push_back({i, j});
      }
      st.position_value(i, j) = it->second;
      st.position_value(j, i) = it->second;
    }
  // The constant is id 0 via the (0,0) visit order.
  st.value_monomials[0].family = Monomial::Family::RealMultiIndex;
  st.value_monomials[0].kx = 0;
  st.value_monomials[0].ky = 0;
  return st;
}

namespace {

// Literal-weight entry: contributes w * Z(r,c) to <A, Z>.
SdpEntry literal(int block, int r, int c, double w) {
  if (r > c) std::swap(r, c);
  return {block, r, c, r == c ? w : 0.5 * w};
}

// Gauss-Jordan filter over the constraint list (in order), dropping dependent
// rows after checking rhs consistency.
std::vector<SdpConstraint> independent_rows(const std::vector<SdpConstraint>& cons,
                                            int total_cols,
                                            const std::function<int(const SdpEntry&)>& col_of) {
  std::vector<SdpConstraint> kept;
  std::vector<Eigen::VectorXd> echelon;  // mutually reduced rows
  std::vector<double> echelon_rhs;
  std::vector<int> pivots;
  for (const auto& con : cons) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(total_cols);
    for (const auto& e : con.entries) row[col_of(e)] += e.row == e.col ? e.value : 2.0 * e.value;
    double rhs = con.rhs;
    const double scale = row.cwiseAbs().maxCoeff();
    if (scale > 0) {
      row /= scale;
      rhs /= scale;
    }
    for (std::size_t k = 0; k < echelon.size(); ++k) {
      const double f = row[pivots[k]] / echelon[k][pivots[k]];
      if (f != 0.0) {
        row -= f * echelon[k];
        rhs -= f * echelon_rhs[k];
      }
    }
    int piv = 0;
    const double mx = row.cwiseAbs().maxCoeff(&piv);
    if (mx > 1e-9) {
      for (std::size_t k = 0; k < echelon.size(); ++k) {
        const double f = echelon[k][piv] / row[piv];
        if (f != 0.0) {
          echelon[k] -= f * row;
          echelon_rhs[k] -= f * rhs;
        }
      }
      echelon.push_back(row);
      echelon_rhs.push_back(rhs);
      pivots.push_back(piv);
      kept.push_back(con);
    } else if (std::abs(rhs) > 1e-7) {
      throw UnsolvableError("sdp_iterate: inconsistent puzzle equations");
    }
  }
  return kept;
}

}  // namespace

SdpIterationResult sdp_iterate(const PolySystem& system, const MomentStructure& structure,
                               const std::vector<Eigen::MatrixXd>& W, double sdp_tol) {
  if (system.family != Monomial::Family::RealMultiIndex)
    throw std::invalid_argument("sdp_iterate: system must use the real multi-index family");
  if (system.rotation_copies != 1)
    throw std::invalid_argument("sdp_iterate: rotation-augmented systems are not supported");
  const int n = system.piece_count;
  const int D = structure.matrix_dim;
  const int V = static_cast<int>(structure.value_monomials.size());
  if (!W.empty() && static_cast<int>(W.size()) != n)
    throw std::invalid_argument("sdp_iterate: weight count mismatch");

  BlockSDP sdp;
  // Moment blocks first, then one 1x1 slack per non-constant moment value.
  for (int i = 0; i < n; ++i) sdp.block_dims.push_back(D);
  for (int i = 0; i < n; ++i)
    for (int v = 1; v < V; ++v) sdp.block_dims.push_back(1);
  auto slack_block = [&](int piece, int value) { return n + piece * (V - 1) + (value - 1); };

  sdp.cost.resize(sdp.block_dims.size());
  for (std::size_t b = 0; b < sdp.block_dims.size(); ++b)
    sdp.cost[b] = Eigen::MatrixXd::Zero(sdp.block_dims[b], sdp.block_dims[b]);
  for (int i = 0; i < n && !W.empty(); ++i) sdp.cost[i] = W[i];

  std::vector<SdpConstraint> cons;
  for (int i = 0; i < n; ++i) {
    // Pin the constant entry.
    cons.push_back({{literal(i, 0, 0, 1.0)}, 1.0});
    // Chain all positions of one moment value.
    for (int v = 0; v < V; ++v) {
      std::vector<std::pair<int, int>> positions;
      for (int r = 0; r < D; ++r)
        for (int c = r; c < D; ++c)
          if (structure.position_value(r, c) == v) positions.push_back({r, c});
      for (std::size_t t = 0; t + 1 < positions.size(); ++t) {
        SdpConstraint eqc;
        eqc.entries.push_back(literal(i, positions[t].first, positions[t].second, 1.0));
        eqc.entries.push_back(literal(i, positions[t + 1].first, positions[t + 1].second, -1.0));
        eqc.rhs = 0.0;
        cons.push_back(std::move(eqc));
      }
    }
    // Non-negativity of every moment entry via a slack.
    for (int v = 1; v < V; ++v) {
      const auto [r, c] = structure.representative[v];
      SdpConstraint nn;
      nn.entries.push_back(literal(i, r, c, 1.0));
      nn.entries.push_back(literal(slack_block(i, v), 0, 0, -1.0));
      nn.rhs = 0.0;
      cons.push_back(std::move(nn));
    }
  }
  // Puzzle equations on representative entries.
  for (const auto& eq : system.equations) {
    SdpConstraint pc;
    for (const auto& t : eq.terms) {
      const int v = structure.value_of(t.monomial);
      const auto [r, c] = structure.representative[v];
      pc.entries.push_back(literal(t.piece - 1, r, c, t.coeff.real()));
    }
    pc.rhs = -eq.constant.real();
    cons.push_back(std::move(pc));
  }

  // Drop linearly dependent rows (puzzle equations routinely contain them).
  const int moment_cols = n * D * (D + 1) / 2;
  const int total_cols = moment_cols + n * (V - 1);
  auto col_of = [&](const SdpEntry& e) {
    if (e.block < n) return e.block * D * (D + 1) / 2 + e.row * D - e.row * (e.row - 1) / 2 +
                            (e.col - e.row);
    return moment_cols + (e.block - n);
  };
  sdp.constraints = independent_rows(cons, total_cols, col_of);

  SdpReport report = solve_block_sdp(sdp, sdp_tol);
  if (report.status == SolveStatus::NumericalFailure)
    throw NumericalError("sdp_iterate: " + report.diagnostic);

  SdpIterationResult out;
  out.Z.assign(report.blocks.begin(), report.blocks.begin() + n);
  out.objective = 0;
  for (int i = 0; i < n && !W.empty(); ++i)
    out.objective += (W[i].array() * out.Z[i].array()).sum();
  out.report = std::move(report);
  return out;
}

std::vector<Eigen::MatrixXd> update_weights(const std::vector<Eigen::MatrixXd>& Z) {
  std::vector<Eigen::MatrixXd> W;
  W.reserve(Z.size());
  for (const auto& z : Z) {
    const SymEig es = sym_eig(z);
    Eigen::VectorXd d = Eigen::VectorXd::Ones(z.rows());
    d[0] = 0.0;  // drop the top eigendirection
    W.push_back(es.vectors * d.asDiagonal() * es.vectors.transpose());
  }
  return W;
}

Placement extract_locations(const std::vector<Eigen::MatrixXd>& Z,
                            const MomentStructure& structure, const AffineTransform& normalization,
                            double rank_tol) {
  if (structure.dimension != 2)
    throw std::invalid_argument("extract_locations: needs a 2-D moment structure");
  Placement placement;
  std::string gaps;
  bool ok = true;
  for (std::size_t i = 0; i < Z.size(); ++i) {
    const SymEig es = sym_eig(Z[i]);
    const double l1 = std::max(es.values[0], 1e-300);
    const double ratio = std::max(es.values[1], 0.0) / l1;
    gaps += (i ? " " : "") + std::to_string(ratio);
    if (ratio > rank_tol) ok = false;
  }
  if (!ok)
    throw NumericalError("extract_locations: blocks are not rank one (lambda2/lambda1 per block: " +
                         gaps + ")");
  const int px = structure.representative[structure.monomial_to_value.at({1, 0})].second;
  const int py = structure.representative[structure.monomial_to_value.at({0, 1})].second;
  for (const auto& z : Z) {
    const double tx = z(0, px), ty = z(0, py);
    if (tx <= 0 || ty <= 0)
      throw NumericalError("extract_locations: non-positive first-order moment");
    placement.translations.push_back(normalization.invert(Vec2(std::log(tx), std::log(ty))));
    placement.orientations.push_back(Turn());
  }
  return placement;
}

std::vector<Eigen::MatrixXd> planted_moment_matrices(const PolySystem& system,
                                                     const MomentStructure& structure,
                                                     const Placement& placement) {
  std::vector<Eigen::MatrixXd> Z;
  for (const auto& t_world : placement.translations) {
    const Vec2 t = system.normalization.apply(t_world);
    Eigen::VectorXd v(structure.matrix_dim);
    v[0] = 1.0;
    for (int p = 1; p <= structure.K; ++p) v[p] = std::exp(double(p) * t.x());
    if (structure.dimension == 2)
      for (int q = 1; q <= structure.K; ++q) v[structure.K + q] = std::exp(double(q) * t.y());
    Z.push_back(v * v.transpose());
  }
  return Z;
}

SdpSolveResult solve_sdp_pipeline(const Puzzle& puzzle, const SdpSolveOptions& opts) {
  AssembleOptions aopts;
  aopts.family = Monomial::Family::RealMultiIndex;
  aopts.mode = opts.mode;
  aopts.degree_cap = opts.K;
  const PolySystem system = build_system(puzzle, aopts);
  const MomentStructure structure = build_moment_structure(opts.K, 2);
  const int n = puzzle.piece_count();

  RelaxSDPState state;
  std::vector<Eigen::MatrixXd> W;  // empty = zero weights

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    SdpIterationResult it = sdp_iterate(system, structure, W, opts.sdp_tol);
    state.iteration = iter;
    state.Z = it.Z;
    W = update_weights(it.Z);
    state.W = W;
    double defect = 0;
    for (int i = 0; i < n; ++i) defect += (W[i].array() * it.Z[i].array()).sum();
    state.objective_history.push_back(defect);
    if (opts.keep_trace) {
      std::vector<Eigen::VectorXd> eigs;
      for (const auto& z : it.Z) eigs.push_back(sym_eig(z).values);
      state.eigen_history.push_back(std::move(eigs));
    }
    if (defect <= opts.eps_scale * n) {
      state.status = SdpPipelineStatus::Converged;
      break;
    }
    if (iter == opts.max_iter) state.status = SdpPipelineStatus::MaxIter;
  }

  if (state.status != SdpPipelineStatus::Converged) return {std::nullopt, std::move(state)};

  try {
    Placement placement =
        extract_locations(state.Z, structure, system.normalization, opts.rank_tol);
    if (!validate_solution(puzzle, placement, opts.validate_tol).is_valid) {
      state.status = SdpPipelineStatus::ValidationFailed;
      state.diagnostic = "extracted placement failed geometric validation";
      return {std::nullopt, std::move(state)};
    }
    return {std::move(placement), std::move(state)};
  } catch (const NumericalError& e) {
    state.status = SdpPipelineStatus::ExtractionFailed;
    state.diagnostic = e.what();
    return {std::nullopt, std::move(state)};
  }
}

}  // namespace edgematch
