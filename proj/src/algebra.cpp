#include "edgematch/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "edgematch/errors.hpp"

namespace edgematch {

Monomial Monomial::complex_power(int k) {
  if (k < 1) throw std::invalid_argument("complex-power monomial needs k >= 1");
  Monomial m;
  m.family = Family::ComplexPower;
  m.k = k;
  return m;
}

Monomial Monomial::multi_index(int kx, int ky) {
  if (std::abs(kx) + std::abs(ky) < 1)
    throw std::invalid_argument("multi-index monomial needs total degree >= 1");
  Monomial m;
  m.family = Family::RealMultiIndex;
  m.kx = kx;
  m.ky = ky;
  return m;
}

int Monomial::total_degree() const {
  return family == Family::ComplexPower ? k : std::abs(kx) + std::abs(ky);
}

Monomial Monomial::rotated_back(int rho, int r) const {
  rho = ((rho % r) + r) % r;
  if (rho == 0) return *this;
  if (family == Family::ComplexPower)
    throw std::invalid_argument("complex-power monomials do not close under rotation");
  // Rotation by -rho/r turn; integral only for half and quarter turns.
  if (r % 2 == 0 && rho == r / 2) return multi_index(-kx, -ky);
  if (r % 4 == 0) {
    if (rho == r / 4) return multi_index(ky, -kx);        // -90 degrees
    if (rho == 3 * r / 4) return multi_index(-ky, kx);    // +90 degrees
  }
  throw std::invalid_argument("rotation order must divide 4 for multi-index systems");
}

bool Monomial::operator==(const Monomial& o) const {
  if (family != o.family) return false;
  return family == Family::ComplexPower ? k == o.k : (kx == o.kx && ky == o.ky);
}

bool Monomial::operator<(const Monomial& o) const {
  if (family != o.family) return family < o.family;
  if (family == Family::ComplexPower) return k < o.k;
  if (total_degree() != o.total_degree()) return total_degree() < o.total_degree();
  if (kx != o.kx) return kx > o.kx;  // x-power descending within a degree
  return ky > o.ky;
}

std::vector<Monomial> multi_indices_up_to(int K) {
  std::vector<Monomial> out;
  for (int d = 1; d <= K; ++d)
    for (int kx = d; kx >= 0; --kx) out.push_back(Monomial::multi_index(kx, d - kx));
  return out;
}

std::complex<double> edge_coefficient(const EdgeElement& edge, const Monomial& monomial,
                                      CoeffMode mode) {
  if (monomial.family == Monomial::Family::ComplexPower) {
    const double k = monomial.k;
    const std::complex<double> a = to_complex(edge.endpoints[0]);
    const std::complex<double> b = to_complex(edge.endpoints[1]);
    if (mode == CoeffMode::Point) return std::exp(k * to_complex(edge.offset));
    return (std::exp(k * b) - std::exp(k * a)) / k;
  }
  const Vec2 kvec(monomial.kx, monomial.ky);
  if (mode == CoeffMode::Point) return std::exp(kvec.dot(edge.offset));
  const Vec2 a = edge.endpoints[0];
  const Vec2 d = edge.endpoints[1] - a;
  const double kd = kvec.dot(d);
  const double len = d.norm();
  // Arc-length integral of exp(k.u) along a + tau d; analytic limit at kd = 0.
  if (std::abs(kd) < 1e-12) return len * std::exp(kvec.dot(a)) * (1.0 + 0.5 * kd);
  return len * std::exp(kvec.dot(a)) * (std::expm1(kd) / kd);
}

std::map<TypeKey, int> completeness_degrees(const Puzzle& puzzle) {
  std::map<TypeKey, int> counts;
  auto tally = [&](const EdgeElement& e) {
    auto [key, sign] = canonical_edge_type(e);
    if (sign > 0) counts[key] += 1;
  };
  for (const auto& e : puzzle.frame.edges) tally(e);
  for (const auto& p : puzzle.pieces)
    for (const auto& e : p.edges) tally(e);
  return counts;
}

namespace {

std::vector<Monomial> generating_monomials(Monomial::Family family, int degree) {
  if (family == Monomial::Family::ComplexPower) {
    std::vector<Monomial> out;
    for (int k = 1; k <= degree; ++k) out.push_back(Monomial::complex_power(k));
    return out;
  }
  return multi_indices_up_to(degree);
}

}  // namespace

PolySystem assemble_system(const Puzzle& puzzle, const std::map<TypeKey, int>& degrees,
                           const AssembleOptions& opts, const AffineTransform& normalization) {
  if (!balanced_edge_types(puzzle))
    throw UnsolvableError("assemble_system: unbalanced edge-type counts");
  const int r = puzzle.rotation_copies;
  if (r > 1 && opts.family == Monomial::Family::ComplexPower)
    throw std::invalid_argument(
        "assemble_system: rotation-augmented systems require the real multi-index family");

  // The counter-clockwise boundary convention already encodes the indicator
  // sign in the traversal direction of the complex contour integral, so that
  // mode sums unsigned integrals.
  const bool signless =
      opts.mode == CoeffMode::PathIntegral && opts.family == Monomial::Family::ComplexPower;

  PolySystem system;
  system.normalization = normalization;
  system.family = opts.family;
  system.mode = opts.mode;
  system.piece_count = puzzle.piece_count();
  system.rotation_copies = r;

  for (const auto& [key, full_degree] : degrees) {
    const int degree = std::min(full_degree, opts.degree_cap);
    if (degree < full_degree) system.truncated = true;
    system.degrees[key] = degree;
    for (const auto& base : generating_monomials(opts.family, degree)) {
      PolyEquation eq;
      eq.type = key;
      eq.monomial = base;

      std::map<std::pair<int, Monomial>, std::complex<double>> acc;
      auto add_edge = [&](int piece_index, const EdgeElement& e) {
        auto [ekey, sign] = canonical_edge_type(e);
        if (ekey != key) return;
        const std::complex<double> c =
            (signless ? 1.0 : double(sign)) * edge_coefficient(e, base, opts.mode);
        if (piece_index == 0) {
          eq.constant += c;
        } else {
          acc[{piece_index, base.rotated_back(e.rot_copy, std::max(r, 1))}] += c;
        }
      };
      for (const auto& e : puzzle.frame.edges) add_edge(0, e);
      for (int i = 0; i < puzzle.piece_count(); ++i)
        for (const auto& e : puzzle.pieces[i].edges) add_edge(i + 1, e);

      for (const auto& [pk, c] : acc) eq.terms.push_back({pk.first, pk.second, c});

      double scale = std::abs(eq.constant);
      for (const auto& t : eq.terms) scale = std::max(scale, std::abs(t.coeff));
      if (scale < 1e-14) continue;  // dead equation, everything cancelled
      if (opts.equilibrate) {
        eq.constant /= scale;
        for (auto& t : eq.terms) t.coeff /= scale;
      }
      system.equations.push_back(std::move(eq));
    }
  }
  return system;
}

PolySystem build_system(const Puzzle& puzzle, const AssembleOptions& opts) {
  auto [normalized, tf] = normalize_coordinates(puzzle);
  return assemble_system(normalized, completeness_degrees(normalized), opts, tf);
}

std::vector<std::complex<double>> PolyEquation::dense_coeffs(int piece_count) const {
  std::vector<std::complex<double>> out(piece_count, 0.0);
  for (const auto& t : terms) {
    if (!(t.monomial == monomial))
      throw std::logic_error("dense_coeffs: equation carries rotated monomials");
    out[t.piece - 1] += t.coeff;
  }
  return out;
}

namespace {

std::complex<double> monomial_value(const Monomial& m, const Vec2& t) {
  if (m.family == Monomial::Family::ComplexPower)
    return std::exp(double(m.k) * to_complex(t));
  return std::exp(double(m.kx) * t.x() + double(m.ky) * t.y());
}

}  // namespace

std::vector<std::complex<double>> equation_values(const PolySystem& system,
                                                  const Placement& placement) {
  if (static_cast<int>(placement.translations.size()) != system.piece_count)
    throw std::invalid_argument("equation_values: placement length mismatch");
  std::vector<Vec2> t(placement.translations.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = system.normalization.apply(placement.translations[i]);
  std::vector<std::complex<double>> values;
  values.reserve(system.equations.size());
  for (const auto& eq : system.equations) {
    std::complex<double> v = eq.constant;
    for (const auto& term : eq.terms) v += term.coeff * monomial_value(term.monomial, t[term.piece - 1]);
    values.push_back(v);
  }
  return values;
}

double residual(const PolySystem& system, const Placement& placement) {
  if (static_cast<int>(placement.translations.size()) != system.piece_count)
    throw std::invalid_argument("residual: placement length mismatch");
  std::vector<Vec2> t(placement.translations.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = system.normalization.apply(placement.translations[i]);
  double worst = 0;
  for (const auto& eq : system.equations) {
    std::complex<double> v = eq.constant;
    double mag = 0;
    for (const auto& term : eq.terms) {
      const std::complex<double> tv = term.coeff * monomial_value(term.monomial, t[term.piece - 1]);
      v += tv;
      mag += std::abs(tv);
    }
    worst = std::max(worst, std::abs(v) / (1.0 + mag));
  }
  return worst;
}

LinearSystem linear_representation(const Puzzle& puzzle) {
  if (!balanced_edge_types(puzzle))
    throw UnsolvableError("linear_representation: unbalanced edge-type counts");
  const int n = puzzle.piece_count();
  std::map<TypeKey, std::pair<Eigen::VectorXd, Vec2>> rows;
  auto row_for = [&](const TypeKey& key) -> std::pair<Eigen::VectorXd, Vec2>& {
    auto it = rows.find(key);
    if (it == rows.end())
      it = rows.emplace(key, std::make_pair(Eigen::VectorXd::Zero(2 * n), Vec2::Zero())).first;
    return it->second;
  };
  for (const auto& e : puzzle.frame.edges) {
    auto [key, sign] = canonical_edge_type(e);
    row_for(key).second -= double(sign) * e.offset;
  }
  for (int i = 0; i < n; ++i)
    for (const auto& e : puzzle.pieces[i].edges) {
      auto [key, sign] = canonical_edge_type(e);
      auto& [coeffs, rhs] = row_for(key);
      coeffs[2 * i] += sign;       // same multiplier on x and y of t_i
      coeffs[2 * i + 1] += sign;
      rhs -= double(sign) * e.offset;
    }

  LinearSystem out;
  out.matrix.resize(2 * static_cast<int>(rows.size()), 2 * n);
  out.matrix.setZero();
  out.rhs.resize(2 * static_cast<int>(rows.size()));
  int ridx = 0;
  for (const auto& [key, row] : rows) {
    out.types.push_back(key);
    for (int i = 0; i < n; ++i) {
      out.matrix(2 * ridx, 2 * i) = row.first[2 * i];
      out.matrix(2 * ridx + 1, 2 * i + 1) = row.first[2 * i + 1];
    }
    out.rhs[2 * ridx] = row.second.x();
    out.rhs[2 * ridx + 1] = row.second.y();
    ++ridx;
  }
  return out;
}

Puzzle augment_rotations(const Puzzle& puzzle, int r) {
  if (r < 1) throw std::invalid_argument("augment_rotations: r >= 1 required");
  if (r == 1) return puzzle;
  for (const auto& piece : puzzle.pieces)
    for (const auto& e : piece.edges)
      if (r % e.orientation.den != 0)
        throw std::invalid_argument(
            "augment_rotations: edge orientations must be multiples of 1/r turn");
  for (const auto& e : puzzle.frame.edges)
    if (r % e.orientation.den != 0)
      throw std::invalid_argument(
          "augment_rotations: frame orientations must be multiples of 1/r turn");

  // Rotated frame copies must not overlap; otherwise orientation recovery
  // is ambiguous.
  std::vector<std::vector<Vec2>> regions;
  for (int rho = 0; rho < r; ++rho) {
    std::vector<Vec2> reg;
    const double ang = Turn(rho, r).radians();
    for (const auto& v : puzzle.frame.region) reg.push_back(rotate(v, ang));
    regions.push_back(std::move(reg));
  }
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      if (polygons_interiors_overlap(regions[a], regions[b]))
        throw std::invalid_argument(
            "augment_rotations: rotated frame copies overlap; translate the frame away from the "
            "origin first");

  Puzzle out;
  out.rotation_order = 1;
  out.rotation_copies = r;
  out.preset_locations = puzzle.preset_locations;

  // Frame: union of the r rotated copies. The stored region is the bounding
  // box of the union (used only for normalization).
  Vec2 lo = regions[0][0], hi = lo;
  for (int rho = 0; rho < r; ++rho) {
    const double ang = Turn(rho, r).radians();
    for (const auto& e : puzzle.frame.edges) {
      EdgeElement copy = e;
      copy.offset = rotate(e.offset, ang);
      copy.endpoints = {rotate(e.endpoints[0], ang), rotate(e.endpoints[1], ang)};
      copy.orientation = e.orientation + Turn(rho, r);
      copy.rot_copy = rho;
      out.frame.edges.push_back(copy);
    }
    for (const auto& v : regions[rho]) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  out.frame.region = {lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};

  for (const auto& piece : puzzle.pieces) {
    Piece aug;
    aug.id = piece.id;
    aug.vertices = piece.vertices;  // copy-0 outline, for reference only
    for (int rho = 0; rho < r; ++rho) {
      const double ang = Turn(rho, r).radians();
      for (const auto& e : piece.edges) {
        EdgeElement copy = e;
        copy.offset = rotate(e.offset, ang);
        copy.endpoints = {rotate(e.endpoints[0], ang), rotate(e.endpoints[1], ang)};
        copy.orientation = e.orientation + Turn(rho, r);
        copy.rot_copy = rho;
        aug.edges.push_back(copy);
      }
    }
    out.pieces.push_back(std::move(aug));
  }
  return out;
}

std::pair<Turn, Vec2> recover_orientation(const Vec2& t, const Frame& frame, int r, double tol) {
  for (int rho = 0; rho < r; ++rho) {
    const Turn phi(rho, r);
    const Vec2 candidate = rotate(t, phi.radians());
    if (point_in_polygon(candidate, frame.region, tol)) return {phi, candidate};
  }
  throw NumericalError("recover_orientation: no rotated copy of the frame contains the point");
}

void export_system(const PolySystem& system, std::ostream& os) {
  auto put = [&os](const std::complex<double>& c) { os << " " << c.real() << " " << c.imag(); };
  for (const auto& eq : system.equations) {
    os << eq.type.first << " " << eq.type.second.str() << " ";
    if (eq.monomial.family == Monomial::Family::ComplexPower)
      os << "k " << eq.monomial.k;
    else
      os << "kxy " << eq.monomial.kx << "," << eq.monomial.ky;
    put(eq.constant);
    if (system.rotation_copies == 1) {
      for (const auto& c : eq.dense_coeffs(system.piece_count)) put(c);
    } else {
      for (const auto& t : eq.terms) {
        os << " p" << t.piece << ":" << t.monomial.kx << "," << t.monomial.ky;
        put(t.coeff);
      }
    }
    os << "\n";
  }
}

}  // namespace edgematch
