#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edgematch/turn.hpp"
#include "edgematch/vec.hpp"

namespace edgematch {

// One polygon side. `endpoints` run in the counter-clockwise boundary order of
// the owning piece (clockwise for frame edges, whose normals point inward), so
// the outward normal is the segment direction rotated a quarter turn clockwise.
// `offset` is the segment midpoint; for pieces it is relative to the piece
// center, for frame edges it is absolute.
struct EdgeElement {
  Vec2 offset;
  std::array<Vec2, 2> endpoints;
  int color = 0;
  Turn orientation;
  // Copy index of a rotation-augmented puzzle; 0 in ordinary puzzles.
  int rot_copy = 0;

  static EdgeElement between(const Vec2& a, const Vec2& b, int color);
  double length() const { return (endpoints[1] - endpoints[0]).norm(); }
};

struct Piece {
  int id = 0;
  std::vector<Vec2> vertices;  // closed simple polygon, counter-clockwise, centroid at origin
  std::vector<EdgeElement> edges;
};

struct Frame {
  std::vector<Vec2> region;  // simple polygon, counter-clockwise, absolute coordinates
  std::vector<EdgeElement> edges;
};

struct Puzzle {
  Frame frame;
  std::vector<Piece> pieces;
  int rotation_order = 1;  // 1 = translation only
  std::optional<std::vector<Vec2>> preset_locations;
  // Number of rotated copies baked in by augmentation; 1 for plain puzzles.
  int rotation_copies = 1;

  int piece_count() const { return static_cast<int>(pieces.size()); }
};

struct Placement {
  std::vector<Vec2> translations;
  std::vector<Turn> orientations;  // all zero when rotation_order == 1

  static Placement translations_only(std::vector<Vec2> t) {
    Placement p;
    p.orientations.assign(t.size(), Turn());
    p.translations = std::move(t);
    return p;
  }
};

struct ValidityReport {
  struct Unmatched {
    int piece_id;    // 0 = frame
    int edge_index;
    std::string reason;
  };
  bool is_valid = false;
  std::vector<Unmatched> unmatched_edges;
  double max_position_error = 0.0;
};

// Uniform scale + shift, used to bring puzzles into the [-1/2,1/2]^2 box
// before any exponential is evaluated.
struct AffineTransform {
  double scale = 1.0;
  Vec2 shift = Vec2::Zero();

  Vec2 apply(const Vec2& p) const { return scale * p + shift; }
  Vec2 apply_vector(const Vec2& v) const { return scale * v; }
  Vec2 invert(const Vec2& p) const { return (p - shift) / scale; }
  bool is_identity() const { return scale == 1.0 && shift.isZero(0.0); }
  AffineTransform inverse() const { return {1.0 / scale, -shift / scale}; }
};

using TypeKey = std::pair<int, Turn>;  // (color, canonical orientation in [0, 1/2))

// Canonical representative of {(c,th),(c,th+1/2)} and the sign of this edge
// relative to it: +1 when the edge carries the canonical orientation.
std::pair<TypeKey, int> canonical_edge_type(const EdgeElement& edge);

// Checks that every edge element, after placing its piece, pairs with exactly
// one opposite edge (same color, opposite orientation, coincident midpoints,
// equal length); frame edges take part in the pairing.
ValidityReport validate_solution(const Puzzle& puzzle, const Placement& placement,
                                 double tol = 1e-6);

// Rescales so the frame bounding box fits in [-1/2,1/2]^2 (centered); pieces,
// presets and the planted placement transform along.
std::pair<Puzzle, AffineTransform> normalize_coordinates(const Puzzle& puzzle);

// Structural invariant checks; throw ParseError naming the offending piece.
void check_piece(const Piece& piece, double tol = 1e-9);
void check_frame(const Frame& frame, double tol = 1e-9);
void check_puzzle(const Puzzle& puzzle, double tol = 1e-9);

// True when every canonical edge type has as many +1 as -1 edges
// (pieces and frame counted together).
bool balanced_edge_types(const Puzzle& puzzle);

double polygon_area(const std::vector<Vec2>& poly);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly, double tol = 1e-9);
bool polygons_interiors_overlap(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

}  // namespace edgematch
