#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "edgematch/geometry.hpp"

namespace edgematch {

// A single exponential monomial T^k. The complex-power family identifies the
// plane with C and uses integer powers of T = exp(t); the real family uses
// multi-indices k = (kx, ky) on T = exp(t) element-wise. Multi-indices may
// turn negative inside rotation-augmented systems.
struct Monomial {
  enum class Family { ComplexPower, RealMultiIndex };

  Family family = Family::ComplexPower;
  int k = 1;           // complex power, >= 1
  int kx = 0, ky = 0;  // real multi-index

  static Monomial complex_power(int k);
  static Monomial multi_index(int kx, int ky);

  int total_degree() const;
  // The monomial whose exponent is this one rotated by -rho/r of a turn;
  // only quarter- and half-turn rotations keep multi-indices integral.
  Monomial rotated_back(int rho, int r) const;

  bool operator==(const Monomial& o) const;
  bool operator<(const Monomial& o) const;
};

// All multi-indices of total degree 1..K in the Appendix-style order
// (degree ascending, x-power descending): Tx, Ty, Tx^2, TxTy, Ty^2, ...
std::vector<Monomial> multi_indices_up_to(int K);

enum class CoeffMode { Point, PathIntegral };

// Point mode: exp of the monomial evaluated at the edge offset. Path mode:
// the closed-form line integral of the same exponential along the edge
// segment (contour form for the complex family, arc length for the real one).
std::complex<double> edge_coefficient(const EdgeElement& edge, const Monomial& monomial,
                                      CoeffMode mode);

struct PolyTerm {
  int piece = 0;  // 1-based piece index
  Monomial monomial;
  std::complex<double> coeff;
};

struct PolyEquation {
  TypeKey type;
  Monomial monomial;  // generating monomial; terms carry rotated copies of it
  std::vector<PolyTerm> terms;
  std::complex<double> constant = 0.0;  // frame contribution

  // Dense per-piece coefficients; valid for systems without rotation copies.
  std::vector<std::complex<double>> dense_coeffs(int piece_count) const;
};

struct PolySystem {
  std::vector<PolyEquation> equations;
  AffineTransform normalization;
  std::map<TypeKey, int> degrees;
  Monomial::Family family = Monomial::Family::ComplexPower;
  CoeffMode mode = CoeffMode::Point;
  int piece_count = 0;
  int rotation_copies = 1;
  bool truncated = false;  // degrees were capped: representation may be incomplete
};

// K(c,theta): the number of edges of each canonical type, pieces and frame
// counted together.
std::map<TypeKey, int> completeness_degrees(const Puzzle& puzzle);

struct AssembleOptions {
  Monomial::Family family = Monomial::Family::ComplexPower;
  CoeffMode mode = CoeffMode::Point;
  int degree_cap = 12;
  bool equilibrate = true;  // rescale each equation to unit max coefficient
};

// Assembles the equation family of the given (already normalized) puzzle;
// `normalization` is recorded on the system so placements in original
// coordinates can be evaluated against it.
PolySystem assemble_system(const Puzzle& puzzle, const std::map<TypeKey, int>& degrees,
                           const AssembleOptions& opts = {},
                           const AffineTransform& normalization = {});

// normalize_coordinates + completeness degrees + assemble in one step.
PolySystem build_system(const Puzzle& puzzle, const AssembleOptions& opts = {});

// Max over equations of |sum_i a_i T_i^k + a_0| / (1 + sum_i |a_i T_i^k|),
// with the placement given in original coordinates.
double residual(const PolySystem& system, const Placement& placement);

// Value of every equation at the placement (original coordinates).
std::vector<std::complex<double>> equation_values(const PolySystem& system,
                                                  const Placement& placement);

struct LinearSystem {
  Eigen::MatrixXd matrix;  // rows: 2 per edge type; cols: 2N (x,y per piece)
  Eigen::VectorXd rhs;
  std::vector<TypeKey> types;
};

// The linear representation: one vector equation per edge type.
LinearSystem linear_representation(const Puzzle& puzzle);

// Replaces the puzzle by r rotated, rigidly linked copies of itself so that
// orientation search reduces to translation. The result is an assembly
// artifact (rotation_copies = r) consumed by assemble_system and the preset
// pipeline, not a geometric puzzle.
Puzzle augment_rotations(const Puzzle& puzzle, int r);

// Inverts the augmentation substitution t = R(-phi) t_hat: finds the unique
// copy whose rotation brings t inside the original frame region.
std::pair<Turn, Vec2> recover_orientation(const Vec2& t, const Frame& frame, int r,
                                          double tol = 1e-9);

// Plain-text export, one equation per line, stable ordering.
void export_system(const PolySystem& system, std::ostream& os);

}  // namespace edgematch
