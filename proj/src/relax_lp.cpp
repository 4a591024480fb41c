#include "edgematch/relax_lp.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "edgematch/errors.hpp"

namespace edgematch {

std::string to_string(RelaxStatus s) {
  switch (s) {
    case RelaxStatus::Running: return "running";
    case RelaxStatus::PermutationFound: return "permutation_found";
    case RelaxStatus::Stalled: return "stalled";
    case RelaxStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

namespace {

std::complex<double> monomial_at(const Monomial& m, const Vec2& u) {
  if (m.family == Monomial::Family::ComplexPower) return std::exp(double(m.k) * to_complex(u));
  return std::exp(double(m.kx) * u.x() + double(m.ky) * u.y());
}

void fill_rows(PresetVandermonde& vm) {
  const int M = static_cast<int>(vm.locations.size());
  const int C = static_cast<int>(vm.columns.size());
  vm.Y.resize(M, C);
  for (int a = 0; a < M; ++a)
    for (int c = 0; c < C; ++c) vm.Y(a, c) = monomial_at(vm.columns[c], vm.locations[a]);
  for (int a = 0; a < M; ++a)
    for (int b = a + 1; b < M; ++b)
      if ((vm.Y.row(a) - vm.Y.row(b)).cwiseAbs().maxCoeff() < 1e-12)
        throw std::invalid_argument("build_vandermonde: duplicate preset locations");
}

}  // namespace

PresetVandermonde build_vandermonde(const std::vector<Vec2>& presets, int K,
                                    Monomial::Family family) {
  if (K < 1) throw std::invalid_argument("build_vandermonde: K >= 1 required");
  PresetVandermonde vm;
  vm.locations = presets;
  vm.family = family;
  vm.degree = K;
  if (family == Monomial::Family::ComplexPower) {
    for (int k = 1; k <= K; ++k) vm.columns.push_back(Monomial::complex_power(k));
  } else {
    vm.columns = multi_indices_up_to(K);
  }
  for (int m = 0; m < static_cast<int>(presets.size()); ++m) vm.candidate_of.push_back({m, 0});
  fill_rows(vm);
  return vm;
}

PresetVandermonde build_vandermonde_rotations(const std::vector<Vec2>& presets, int r,
                                              const PolySystem& system) {
  PresetVandermonde vm;
  vm.family = system.family;
  vm.rotation_copies = r;
  std::set<Monomial> monos;
  for (const auto& eq : system.equations)
    for (const auto& t : eq.terms) monos.insert(t.monomial);
  vm.columns.assign(monos.begin(), monos.end());
  for (const auto& c : vm.columns) vm.degree = std::max(vm.degree, c.total_degree());
  for (int m = 0; m < static_cast<int>(presets.size()); ++m)
    for (int rho = 0; rho < r; ++rho) {
      vm.locations.push_back(rotate(presets[m], -Turn(rho, r).radians()));
      vm.candidate_of.push_back({m, rho});
    }
  fill_rows(vm);
  return vm;
}

LpIteration lp_iterate(const PolySystem& system, const PresetVandermonde& vm,
                       const Eigen::MatrixXd& P_prev, double lp_tol) {
  const int n = system.piece_count;
  const int M = static_cast<int>(vm.locations.size());
  const int presets = M / std::max(vm.rotation_copies, 1);
  if (P_prev.size() != 0 && (P_prev.rows() != n || P_prev.cols() != M))
    throw std::invalid_argument("lp_iterate: P_prev has wrong shape");

  std::map<Monomial, int> col_of;
  for (int c = 0; c < static_cast<int>(vm.columns.size()); ++c) col_of[vm.columns[c]] = c;

  const bool complex_rows = system.family == Monomial::Family::ComplexPower;
  int eq_rows = 0;
  for (std::size_t e = 0; e < system.equations.size(); ++e) eq_rows += complex_rows ? 2 : 1;

  const int vars = n * M;
  const int rows = n + presets + eq_rows;
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(vars);
  if (P_prev.size() != 0)
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < M; ++a) lp.objective[i * M + a] = -P_prev(i, a);
  lp.equality_matrix = Eigen::MatrixXd::Zero(rows, vars);
  lp.equality_rhs = Eigen::VectorXd::Zero(rows);

  int row = 0;
  for (int i = 0; i < n; ++i, ++row) {
    for (int a = 0; a < M; ++a) lp.equality_matrix(row, i * M + a) = 1.0;
    lp.equality_rhs[row] = 1.0;
  }
  for (int m = 0; m < presets; ++m, ++row) {
    for (int a = 0; a < M; ++a)
      if (vm.candidate_of[a].first == m)
        for (int i = 0; i < n; ++i) lp.equality_matrix(row, i * M + a) = 1.0;
    lp.equality_rhs[row] = 1.0;
  }
  // Raw equation rows as [coeffs | -rhs] vectors.
  Eigen::MatrixXd raw(eq_rows, vars + 1);
  int raw_count = 0;
  for (const auto& eq : system.equations) {
    Eigen::RowVectorXcd coeff = Eigen::RowVectorXcd::Zero(vars);
    for (const auto& t : eq.terms) {
      const auto it = col_of.find(t.monomial);
      if (it == col_of.end())
        throw std::logic_error("lp_iterate: system monomial missing from Vandermonde columns");
      const int i = t.piece - 1;
      for (int a = 0; a < M; ++a) coeff[i * M + a] += t.coeff * vm.Y(a, it->second);
    }
    double scale = std::max(coeff.cwiseAbs().maxCoeff(), std::abs(eq.constant));
    if (scale < 1e-14) continue;
    raw.row(raw_count).head(vars) = coeff.real() / scale;
    raw(raw_count, vars) = eq.constant.real() / scale;
    ++raw_count;
    if (complex_rows) {
      raw.row(raw_count).head(vars) = coeff.imag() / scale;
      raw(raw_count, vars) = eq.constant.imag() / scale;
      ++raw_count;
    }
  }
  raw.conservativeResize(raw_count, vars + 1);

  // High-degree Vandermonde rows are nearly dependent on lower-degree ones;
  // replace the block by an orthonormal basis of its row space, which keeps
  // the same solution set and conditions the simplex.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(raw.transpose());
  qr.setThreshold(1e-12);
  const int rank = static_cast<int>(qr.rank());
  const Eigen::MatrixXd thinQ =
      qr.householderQ() * Eigen::MatrixXd::Identity(vars + 1, rank);
  for (int k = 0; k < rank; ++k, ++row) {
    lp.equality_matrix.row(row) = thinQ.col(k).head(vars).transpose();
    lp.equality_rhs[row] = -thinQ(vars, k);
  }
  lp.equality_matrix.conservativeResize(row, vars);
  lp.equality_rhs.conservativeResize(row);

  SolveReport report = solve_lp(lp, lp_tol);
  if (report.status == SolveStatus::Infeasible)
    throw UnsolvableError(
        "lp_iterate: representation excludes all placements (modeling bug or over-capped degree)");
  if (report.status != SolveStatus::Optimal)
    throw NumericalError("lp_iterate: LP solve failed: " + report.diagnostic);

  LpIteration out;
  out.P.resize(n, M);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < M; ++a) out.P(i, a) = report.primal[i * M + a];
  out.objective = P_prev.size() != 0 ? (P_prev.array() * out.P.array()).sum() : 0.0;
  out.report = std::move(report);
  return out;
}

namespace {

// Snap to an exact 0/1 assignment; rows map to distinct preset cells.
std::optional<std::vector<int>> snap_assignment(const Eigen::MatrixXd& P,
                                                const std::vector<std::pair<int, int>>& cand_of,
                                                double tol) {
  const int n = static_cast<int>(P.rows());
  const int M = static_cast<int>(P.cols());
  std::vector<int> pick(n, -1);
  std::vector<char> cell_used(M, 0);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < M; ++a) {
      const double v = P(i, a);
      if (std::abs(v - 1.0) <= tol) {
        if (pick[i] >= 0) return std::nullopt;
        pick[i] = a;
      } else if (std::abs(v) > tol) {
        return std::nullopt;
      }
    }
    if (pick[i] < 0) return std::nullopt;
    const int cell = cand_of.empty() ? pick[i] : cand_of[pick[i]].first;
    if (cell_used[cell]) return std::nullopt;
    cell_used[cell] = 1;
  }
  return pick;
}

std::vector<std::pair<int, int>> identity_candidates(int M) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < M; ++a) out.push_back({a, 0});
  return out;
}

// Optimal assignment of pieces to preset cells; in rotation mode each cell
// offers its best copy.
std::vector<int> assignment_rounding(const Eigen::MatrixXd& P,
                                     const std::vector<std::pair<int, int>>& cand_of,
                                     int presets) {
  const int n = static_cast<int>(P.rows());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, presets);
  Eigen::MatrixXi arg = Eigen::MatrixXi::Zero(n, presets);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < static_cast<int>(P.cols()); ++a) {
      const auto [cell, rho] = cand_of[a];
      (void)rho;
      if (P(i, a) > Q(i, cell)) {
        Q(i, cell) = P(i, a);
        arg(i, cell) = a;
      }
    }
  const std::vector<int> cells = max_assignment(Q);
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = arg(i, cells[i]);
  return pick;
}

}  // namespace

std::optional<std::vector<int>> round_to_permutation(const Eigen::MatrixXd& P, double tol) {
  return snap_assignment(P, identity_candidates(static_cast<int>(P.cols())), tol);
}

std::optional<std::vector<int>> round_to_permutation(
    const Eigen::MatrixXd& P, double tol,
    const std::function<bool(const std::vector<int>&)>& feasible) {
  auto cand = identity_candidates(static_cast<int>(P.cols()));
  if (auto snapped = snap_assignment(P, cand, tol)) return snapped;
  auto rounded = assignment_rounding(P, cand, static_cast<int>(P.cols()));
  if (feasible(rounded)) return rounded;
  return std::nullopt;
}

namespace {

Eigen::MatrixXd random_bistochastic(int n, int M, int presets, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Eigen::MatrixXd D(n, M);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < M; ++a)
      D(i, a) = 0.1 + double(rng() % 1000003) / 1000003.0;
  // Sinkhorn-style balancing of rows and preset-cell groups.
  const int copies = M / presets;
  for (int pass = 0; pass < 30; ++pass) {
    for (int i = 0; i < n; ++i) D.row(i) /= D.row(i).sum();
    for (int m = 0; m < presets; ++m) {
      double s = 0;
      for (int rho = 0; rho < copies; ++rho) s += D.col(m * copies + rho).sum();
      for (int rho = 0; rho < copies; ++rho) D.col(m * copies + rho) /= s;
    }
  }
  return D;
}

}  // namespace

LpSolveResult solve_preset(const Puzzle& puzzle, const LpSolveOptions& opts) {
  if (!puzzle.preset_locations)
    throw std::invalid_argument("solve_preset: puzzle has no preset locations");
  const auto& presets_raw = *puzzle.preset_locations;
  const int n = puzzle.piece_count();
  if (static_cast<int>(presets_raw.size()) != n)
    throw std::invalid_argument("solve_preset: preset count must equal piece count");

  const int r = puzzle.rotation_order;
  const bool rotated = r > 1;
  const Monomial::Family family =
      rotated ? Monomial::Family::RealMultiIndex : opts.family;

  Puzzle work = rotated ? augment_rotations(puzzle, r) : puzzle;
  auto [normalized, tf] = normalize_coordinates(work);
  AssembleOptions aopts;
  aopts.family = family;
  aopts.mode = opts.mode;
  aopts.degree_cap = opts.degree_cap;
  PolySystem system = assemble_system(normalized, completeness_degrees(normalized), aopts, tf);

  int K = 1;
  for (const auto& [key, deg] : system.degrees) K = std::max(K, deg);

  std::vector<Vec2> presets_norm(presets_raw.size());
  for (std::size_t m = 0; m < presets_raw.size(); ++m) presets_norm[m] = tf.apply(presets_raw[m]);
  PresetVandermonde vm = rotated ? build_vandermonde_rotations(presets_norm, r, system)
                                 : build_vandermonde(presets_norm, K, family);

  const int M = static_cast<int>(vm.locations.size());

  RelaxLPState state;
  state.degree_used = K;
  state.truncated = system.truncated;

  auto decode = [&](const std::vector<int>& pick) {
    Placement placement;
    for (int i = 0; i < n; ++i) {
      const auto [cell, rho] = vm.candidate_of[pick[i]];
      placement.translations.push_back(presets_raw[cell]);
      placement.orientations.push_back(Turn(rho, std::max(r, 1)));
    }
    return placement;
  };
  auto is_valid = [&](const std::vector<int>& pick) {
    return validate_solution(puzzle, decode(pick)).is_valid;
  };

  Eigen::MatrixXd P_prev = Eigen::MatrixXd::Zero(n, M);
  Eigen::MatrixXd objective_ref = P_prev;  // may carry the stall perturbation
  int stall = 0;
  bool perturbed = false;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    LpIteration it = lp_iterate(system, vm, objective_ref, opts.lp_tol);
    state.iteration = iter;
    state.P = it.P;
    state.objective_history.push_back((P_prev.array() * it.P.array()).sum());
    if (opts.keep_trace) state.trace.push_back(it.P);

    std::optional<std::vector<int>> pick =
        snap_assignment(it.P, vm.candidate_of, opts.tol_round);
    if (!pick) {
      auto rounded = assignment_rounding(it.P, vm.candidate_of, n);
      if (is_valid(rounded)) pick = rounded;
    }
    if (pick && is_valid(*pick)) {
      state.status = RelaxStatus::PermutationFound;
      return {decode(*pick), std::move(state)};
    }

    const auto hist = state.objective_history;
    const bool improving =
        hist.size() < 2 || hist.back() > hist[hist.size() - 2] + 1e-9;
    stall = improving ? 0 : stall + 1;
    P_prev = it.P;
    objective_ref = it.P;
    if (stall >= 3) {
      if (!perturbed) {
        perturbed = true;
        state.perturbed_at = iter;
        objective_ref = it.P + 1e-3 * random_bistochastic(n, M, n, opts.seed);
        stall = 0;
      } else {
        state.status = RelaxStatus::Stalled;
        return {std::nullopt, std::move(state)};
      }
    }
  }
  state.status = RelaxStatus::MaxIter;
  return {std::nullopt, std::move(state)};
}

}  // namespace edgematch
