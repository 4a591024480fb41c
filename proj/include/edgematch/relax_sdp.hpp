#pragma once

#include <optional>

#include "edgematch/algebra.hpp"
#include "edgematch/kernels.hpp"

namespace edgematch {

// Index map of the per-piece moment matrix: dimension K+1 in one dimension
// (a Hankel matrix), 2K+1 in two (Hankel diagonal blocks in Tx and Ty plus a
// mixed block). Positions sharing a monomial are constrained equal and the
// (0,0) entry is pinned to 1.
struct MomentStructure {
  int K = 0;
  int dimension = 2;
  int matrix_dim = 0;
  std::vector<Monomial> value_monomials;              // id 0 is the constant
  Eigen::MatrixXi position_value;                     // (row,col) -> value id
  std::vector<std::pair<int, int>> representative;    // value id -> (row<=col)
  std::map<std::pair<int, int>, int> monomial_to_value;  // (kx,ky) -> id

  int value_of(const Monomial& m) const;
};

MomentStructure build_moment_structure(int K, int dimension);

struct SdpIterationResult {
  std::vector<Eigen::MatrixXd> Z;
  double objective;  // sum_i <W_i, Z_i> under the weights used in the solve
  SdpReport report;
};

// One solve of the weighted SDP: minimize sum <W_i, Z_i> over moment-structured,
// entrywise non-negative, PSD blocks satisfying the puzzle equations.
// Empty `W` means all-zero weights (the plain feasibility relaxation).
SdpIterationResult sdp_iterate(const PolySystem& system, const MomentStructure& structure,
                               const std::vector<Eigen::MatrixXd>& W, double sdp_tol = 1e-6);

// W_i = V_i diag(0,1,...,1) V_i^T, eigenvalues descending, so <W_i, Z_i>
// sums every eigenvalue of Z_i except the largest.
std::vector<Eigen::MatrixXd> update_weights(const std::vector<Eigen::MatrixXd>& Z);

// Reads first-order moments off numerically rank-one blocks and inverts the
// exponential map; placement returned in original coordinates.
Placement extract_locations(const std::vector<Eigen::MatrixXd>& Z,
                            const MomentStructure& structure, const AffineTransform& normalization,
                            double rank_tol = 1e-4);

// Exact rank-one moment matrices of a placement (original coordinates),
// feasible by construction for every iteration's SDP.
std::vector<Eigen::MatrixXd> planted_moment_matrices(const PolySystem& system,
                                                     const MomentStructure& structure,
                                                     const Placement& placement);

enum class SdpPipelineStatus { Converged, MaxIter, ExtractionFailed, ValidationFailed };

std::string to_string(SdpPipelineStatus s);

struct RelaxSDPState {
  std::vector<Eigen::MatrixXd> Z;
  std::vector<Eigen::MatrixXd> W;
  int iteration = 0;
  std::vector<double> objective_history;  // rank-one defect after each solve
  std::vector<std::vector<Eigen::VectorXd>> eigen_history;  // per iteration, per block
  SdpPipelineStatus status = SdpPipelineStatus::MaxIter;
  std::string diagnostic;
};

struct SdpSolveOptions {
  int max_iter = 60;
  double eps_scale = 1e-6;  // stop when the defect drops below eps_scale * N
  int K = 3;
  CoeffMode mode = CoeffMode::PathIntegral;
  double sdp_tol = 1e-6;
  double validate_tol = 1e-3;
  double rank_tol = 1e-4;
  bool keep_trace = true;
};

struct SdpSolveResult {
  std::optional<Placement> placement;
  RelaxSDPState state;
};

// Algorithm: W = 0, then alternate weighted solves and weight updates until
// the rank-one defect is below eps; extract and validate. Needs no preset
// locations.
SdpSolveResult solve_sdp_pipeline(const Puzzle& puzzle, const SdpSolveOptions& opts = {});

}  // namespace edgematch
