#include "edgematch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "edgematch/errors.hpp"

namespace edgematch {

namespace {

// Exact turn for an axis-aligned or otherwise rational-angle direction.
// Falls back to the nearest fraction over the global resolution q = 360.
Turn direction_turn(const Vec2& dir) {
  const double angle = std::atan2(dir.y(), dir.x()) / (2.0 * std::numbers::pi);
  constexpr std::int64_t q = 360;
  const auto n = static_cast<std::int64_t>(std::llround(angle * q));
  Turn t(n, q);
  if ((t.unit() - dir.normalized()).norm() > 1e-9)
    throw std::invalid_argument("edge direction is not representable at resolution 1/360 turn");
  return t;
}

}  // namespace

EdgeElement EdgeElement::between(const Vec2& a, const Vec2& b, int color) {
  EdgeElement e;
  e.endpoints = {a, b};
  e.offset = 0.5 * (a + b);
  e.color = color;
  e.orientation = direction_turn(rot_cw90(b - a));
  return e;
}

std::pair<TypeKey, int> canonical_edge_type(const EdgeElement& edge) {
  if (edge.orientation.in_lower_half()) return {{edge.color, edge.orientation}, +1};
  return {{edge.color, edge.orientation + Turn::half()}, -1};
}

namespace {

struct PlacedEdge {
  int piece_id;  // 0 = frame
  int edge_index;
  Vec2 mid;
  double length;
  int color;
  Turn orientation;
};

}  // namespace

ValidityReport validate_solution(const Puzzle& puzzle, const Placement& placement, double tol) {
  const auto n = puzzle.pieces.size();
  if (placement.translations.size() != n || placement.orientations.size() != n)
    throw std::invalid_argument("validate_solution: placement length does not match piece count");
  if (tol <= 0) throw std::invalid_argument("validate_solution: tol must be positive");

  std::vector<PlacedEdge> edges;
  for (std::size_t j = 0; j < puzzle.frame.edges.size(); ++j) {
    const auto& e = puzzle.frame.edges[j];
    edges.push_back({0, static_cast<int>(j), e.offset, e.length(), e.color, e.orientation});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& piece = puzzle.pieces[i];
    const Vec2 t = placement.translations[i];
    const Turn phi = placement.orientations[i];
    const double rad = phi.radians();
    for (std::size_t j = 0; j < piece.edges.size(); ++j) {
      const auto& e = piece.edges[j];
      edges.push_back({piece.id, static_cast<int>(j), t + rotate(e.offset, rad), e.length(),
                       e.color, e.orientation + phi});
    }
  }

  ValidityReport report;
  std::vector<char> matched(edges.size(), 0);
  for (std::size_t a = 0; a < edges.size(); ++a) {
    if (matched[a]) continue;
    // Nearest compatible partner by midpoint distance.
    std::size_t best = edges.size();
    double best_d = tol;
    for (std::size_t b = 0; b < edges.size(); ++b) {
      if (b == a || matched[b]) continue;
      if (edges[b].color != edges[a].color) continue;
      if (edges[b].orientation != edges[a].orientation.opposite()) continue;
      if (std::abs(edges[b].length - edges[a].length) > tol) continue;
      const double d = (edges[b].mid - edges[a].mid).norm();
      if (d <= best_d) {
        best_d = d;
        best = b;
      }
    }
    if (best == edges.size()) {
      // Distinguish "nothing nearby" from "nearby but off position".
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < edges.size(); ++b) {
        if (b == a || matched[b]) continue;
        if (edges[b].color != edges[a].color) continue;
        if (edges[b].orientation != edges[a].orientation.opposite()) continue;
        if (std::abs(edges[b].length - edges[a].length) > tol) continue;
        nearest = std::min(nearest, (edges[b].mid - edges[a].mid).norm());
      }
      std::string reason = std::isfinite(nearest)
                               ? "position error " + std::to_string(nearest)
                               : "no compatible counterpart";
      report.unmatched_edges.push_back({edges[a].piece_id, edges[a].edge_index, reason});
    } else {
      matched[a] = matched[best] = 1;
      report.max_position_error = std::max(report.max_position_error, best_d);
    }
  }
  report.is_valid = report.unmatched_edges.empty() && report.max_position_error <= tol;
  return report;
}

std::pair<Puzzle, AffineTransform> normalize_coordinates(const Puzzle& puzzle) {
  if (puzzle.frame.region.empty()) throw std::invalid_argument("normalize: empty frame region");
  Vec2 lo = puzzle.frame.region.front(), hi = lo;
  for (const auto& v : puzzle.frame.region) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Vec2 extent = hi - lo;
  const double w = std::max(extent.x(), extent.y());
  if (w <= 0) throw std::invalid_argument("normalize: degenerate (zero-area) frame");
  AffineTransform tf;
  tf.scale = 1.0 / w;
  tf.shift = -tf.scale * 0.5 * (lo + hi);

  Puzzle out = puzzle;
  for (auto& v : out.frame.region) v = tf.apply(v);
  for (auto& e : out.frame.edges) {
    e.offset = tf.apply(e.offset);
    e.endpoints = {tf.apply(e.endpoints[0]), tf.apply(e.endpoints[1])};
  }
  for (auto& piece : out.pieces) {
    for (auto& v : piece.vertices) v = tf.apply_vector(v);
    for (auto& e : piece.edges) {
      e.offset = tf.apply_vector(e.offset);
      e.endpoints = {tf.apply_vector(e.endpoints[0]), tf.apply_vector(e.endpoints[1])};
    }
  }
  if (out.preset_locations)
    for (auto& s : *out.preset_locations) s = tf.apply(s);
  return {std::move(out), tf};
}

double polygon_area(const std::vector<Vec2>& poly) {
  double acc = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    acc += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * acc;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly, double tol) {
  // On-boundary counts as inside.
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[j];
    const Vec2& b = poly[i];
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    if (len2 > 0) {
      const double u = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
      if ((a + u * d - p).norm() <= tol) return true;
    }
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  const double scale = std::max({1.0, a.norm(), b.norm(), c.norm()});
  if (std::abs(v) <= 1e-12 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool segments_cross_properly(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orient_sign(a, b, c), o2 = orient_sign(a, b, d);
  const int o3 = orient_sign(c, d, a), o4 = orient_sign(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace

bool polygons_interiors_overlap(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (segments_cross_properly(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]))
        return true;
  // Strict containment of a vertex (off-boundary by a margin).
  auto strictly_inside = [](const Vec2& p, const std::vector<Vec2>& poly) {
    if (!point_in_polygon(p, poly, 0.0)) return false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      const Vec2 d = poly[i] - poly[j];
      const double len2 = d.squaredNorm();
      if (len2 == 0) continue;
      const double u = std::clamp((p - poly[j]).dot(d) / len2, 0.0, 1.0);
      if ((poly[j] + u * d - p).norm() <= 1e-9) return false;
    }
    return true;
  };
  for (const auto& v : a)
    if (strictly_inside(v, b)) return true;
  for (const auto& v : b)
    if (strictly_inside(v, a)) return true;
  // Centroid probe catches identical polygons.
  Vec2 ca = Vec2::Zero();
  for (const auto& v : a) ca += v;
  ca /= double(a.size());
  if (strictly_inside(ca, b)) return true;
  return false;
}

namespace {

void check_edge_chain(const std::vector<EdgeElement>& edges, const std::vector<Vec2>& poly,
                      const std::string& what, double tol) {
  if (edges.empty()) throw ParseError(what + ": no edges");
  const double scale = std::max(1.0, std::sqrt(std::abs(polygon_area(poly))));
  for (std::size_t j = 0; j < edges.size(); ++j) {
    const auto& e = edges[j];
    if ((0.5 * (e.endpoints[0] + e.endpoints[1]) - e.offset).norm() > tol * scale)
      throw ParseError(what + ": edge " + std::to_string(j) + " offset is not the midpoint");
    const Vec2 d = e.endpoints[1] - e.endpoints[0];
    if (d.norm() <= tol) throw ParseError(what + ": edge " + std::to_string(j) + " degenerate");
    if ((rot_cw90(d.normalized()) - e.orientation.unit()).norm() > 1e-7)
      throw ParseError(what + ": edge " + std::to_string(j) +
                       " orientation is not the boundary normal");
  }
  double chained = 0;
  for (std::size_t j = 0; j < edges.size(); ++j) {
    const auto& next = edges[(j + 1) % edges.size()];
    if ((edges[j].endpoints[1] - next.endpoints[0]).norm() > tol * scale)
      throw ParseError(what + ": edges " + std::to_string(j) + "," +
                       std::to_string((j + 1) % edges.size()) + " do not chain");
    chained += edges[j].length();
  }
  double perimeter = 0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    perimeter += (poly[(i + 1) % poly.size()] - poly[i]).norm();
  if (std::abs(chained - perimeter) > 1e-7 * std::max(1.0, perimeter))
    throw ParseError(what + ": edges do not cover the polygon boundary");
}

}  // namespace

void check_piece(const Piece& piece, double tol) {
  const std::string what = "piece " + std::to_string(piece.id);
  if (piece.vertices.size() < 3) throw ParseError(what + ": fewer than 3 vertices");
  if (polygon_area(piece.vertices) <= 0) throw ParseError(what + ": polygon not counter-clockwise");
  Vec2 centroid = Vec2::Zero();
  for (const auto& v : piece.vertices) centroid += v;
  centroid /= double(piece.vertices.size());
  if (centroid.norm() > 1e-7) throw ParseError(what + ": vertex centroid is not the origin");
  for (std::size_t i = 0; i < piece.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < piece.vertices.size(); ++j) {
      if (j == i + 1 || (i == 0 && j + 1 == piece.vertices.size())) continue;
      if (segments_cross_properly(piece.vertices[i], piece.vertices[(i + 1) % piece.vertices.size()],
                                  piece.vertices[j], piece.vertices[(j + 1) % piece.vertices.size()]))
        throw ParseError(what + ": polygon is not simple");
    }
  check_edge_chain(piece.edges, piece.vertices, what, tol);
}

void check_frame(const Frame& frame, double tol) {
  if (frame.region.size() < 3) throw ParseError("frame: fewer than 3 region vertices");
  if (polygon_area(frame.region) <= 0) throw ParseError("frame: region not counter-clockwise");
  // Frame edges traverse the boundary clockwise, so their normals point inward.
  check_edge_chain(frame.edges, frame.region, "frame", tol);
}

bool balanced_edge_types(const Puzzle& puzzle) {
  std::map<TypeKey, int> balance;
  auto tally = [&](const EdgeElement& e) {
    auto [key, sign] = canonical_edge_type(e);
    balance[key] += sign;
  };
  for (const auto& e : puzzle.frame.edges) tally(e);
  for (const auto& p : puzzle.pieces)
    for (const auto& e : p.edges) tally(e);
  for (const auto& [key, count] : balance)
    if (count != 0) return false;
  return true;
}

void check_puzzle(const Puzzle& puzzle, double tol) {
  // Rotation-augmented puzzles are assembly artifacts; their pieces are unions
  // of rotated copies and do not satisfy the simple-polygon invariants.
  if (puzzle.rotation_copies > 1) return;
  check_frame(puzzle.frame, tol);
  double pieces_area = 0;
  for (const auto& p : puzzle.pieces) {
    check_piece(p, tol);
    pieces_area += polygon_area(p.vertices);
  }
  const double frame_area = polygon_area(puzzle.frame.region);
  if (std::abs(pieces_area - frame_area) > 1e-9 * std::max(1.0, frame_area))
    throw ParseError("puzzle: total piece area does not equal frame area");
  if (puzzle.rotation_order == 1 && !balanced_edge_types(puzzle))
    throw UnsolvableError("puzzle: unbalanced edge-type counts (unsolvable)");
}

}  // namespace edgematch
