#pragma once

#include <functional>
#include <optional>

#include "edgematch/algebra.hpp"
#include "edgematch/kernels.hpp"

namespace edgematch {

// Rows are candidate locations, columns the monomials of S = exp(s) up to
// degree K. With rotations the candidates are R(-rho) s_m for every preset
// cell m and copy rho, and the column set is closed under quarter turns.
struct PresetVandermonde {
  std::vector<Vec2> locations;  // normalized candidate locations
  Monomial::Family family = Monomial::Family::ComplexPower;
  int degree = 0;
  std::vector<Monomial> columns;
  Eigen::MatrixXcd Y;
  // Candidate -> (preset index, rotation copy); identity for plain puzzles.
  std::vector<std::pair<int, int>> candidate_of;
  int rotation_copies = 1;
};

PresetVandermonde build_vandermonde(const std::vector<Vec2>& presets, int K,
                                    Monomial::Family family);

// Rotation-aware variant: candidates rotate(-rho/r) s_m, columns drawn from
// the system's term monomials.
PresetVandermonde build_vandermonde_rotations(const std::vector<Vec2>& presets, int r,
                                              const PolySystem& system);

struct LpIteration {
  Eigen::MatrixXd P;
  double objective;  // <P_prev, P>
  SolveReport report;
};

// One solve of the linearized program: maximize <P_prev, P> over assignment
// constraints and the puzzle equations on X = P Y. P_prev = 0 gives the plain
// feasibility relaxation.
LpIteration lp_iterate(const PolySystem& system, const PresetVandermonde& vm,
                       const Eigen::MatrixXd& P_prev, double lp_tol = 1e-8);

// Exact {0,1} snap. Returns the permutation when every entry is within tol of
// 0 or 1 and the pattern is an assignment.
std::optional<std::vector<int>> round_to_permutation(const Eigen::MatrixXd& P, double tol);

// Snap first; otherwise fall back to the optimal assignment, accepted only
// when `feasible` validates it.
std::optional<std::vector<int>> round_to_permutation(
    const Eigen::MatrixXd& P, double tol,
    const std::function<bool(const std::vector<int>&)>& feasible);

enum class RelaxStatus { Running, PermutationFound, Stalled, MaxIter };

std::string to_string(RelaxStatus s);

struct RelaxLPState {
  Eigen::MatrixXd P;
  int iteration = 0;
  std::vector<double> objective_history;
  RelaxStatus status = RelaxStatus::Running;
  std::vector<Eigen::MatrixXd> trace;  // P after each iteration
  int perturbed_at = -1;               // iteration at which the stall kick happened
  int degree_used = 0;
  bool truncated = false;
};

struct LpSolveOptions {
  int max_iter = 100;
  double tol_round = 1e-6;
  int degree_cap = 12;
  std::uint64_t seed = 0;
  Monomial::Family family = Monomial::Family::ComplexPower;
  CoeffMode mode = CoeffMode::Point;
  double lp_tol = 1e-8;
  bool keep_trace = true;
};

struct LpSolveResult {
  std::optional<Placement> placement;
  RelaxLPState state;
};

// The full preset-location pipeline: assemble, build the Vandermonde data,
// iterate from P = 0 until a validated permutation, a stall, or max_iter.
// Puzzles with rotation_order > 1 run through the augmented formulation and
// decode per-piece orientations.
LpSolveResult solve_preset(const Puzzle& puzzle, const LpSolveOptions& opts = {});

}  // namespace edgematch
