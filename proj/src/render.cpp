#include "edgematch/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace edgematch {

namespace {

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                          "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
                          "#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

const char* color_for(int c) { return kPalette[((c % 15) + 15) % 15]; }

struct Box {
  Vec2 lo = Vec2(1e300, 1e300), hi = Vec2(-1e300, -1e300);
  void add(const Vec2& v) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
};

class SvgWriter {
 public:
  SvgWriter(const Box& box, double ppu) : ppu_(ppu), box_(box) {
    width_ = (box.hi.x() - box.lo.x()) * ppu + 2 * margin_;
    height_ = (box.hi.y() - box.lo.y()) * ppu + 2 * margin_;
  }

  // SVG y-axis points down; flip so puzzles render in math orientation.
  double px(const Vec2& v) const { return (v.x() - box_.lo.x()) * ppu_ + margin_; }
  double py(const Vec2& v) const { return (box_.hi.y() - v.y()) * ppu_ + margin_; }

  void polygon(const std::vector<Vec2>& pts, const std::string& fill,
               const std::string& stroke, double stroke_w, double opacity = 1.0) {
    body_ << "<polygon points=\"";
    for (const auto& p : pts) body_ << px(p) << "," << py(p) << " ";
    body_ << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\"" << stroke_w
          << "\"";
    if (opacity < 1.0) body_ << " fill-opacity=\"" << opacity << "\"";
    body_ << "/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
          << "\" fill=\"" << fill << "\"/>\n";
  }

  std::string finish() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width_
        << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_
        << "\">\n";
    out << body_.str();
    out << "</svg>\n";
    return out.str();
  }

 private:
  double ppu_, width_, height_;
  double margin_ = 8.0;
  Box box_;
  std::ostringstream body_;
};

void draw_piece(SvgWriter& svg, const Piece& piece, const Vec2& t, const Turn& phi,
                const RenderOptions& opts, double opacity = 1.0) {
  const double rad = phi.radians();
  std::vector<Vec2> outline;
  for (const auto& v : piece.vertices) outline.push_back(t + rotate(v, rad));
  if (opts.style == RenderStyle::Pieces) {
    svg.polygon(outline, color_for(piece.id), "#333333", 1.0, opacity);
    return;
  }
  // One triangle per edge, colored by edge color (square tiles become the
  // classic four-triangle diagram).
  for (const auto& e : piece.edges) {
    std::vector<Vec2> tri = {t, t + rotate(e.endpoints[0], rad), t + rotate(e.endpoints[1], rad)};
    svg.polygon(tri, color_for(e.color), "#222222", 0.5, opacity);
  }
  svg.polygon(outline, "none", "#000000", 1.2, 1.0);
}

Box puzzle_box(const Puzzle& puzzle, bool with_shelf) {
  Box box;
  for (const auto& v : puzzle.frame.region) box.add(v);
  if (with_shelf) {
    // Shelf area to the right of the frame, one slot per piece.
    const double w = box.hi.x() - box.lo.x();
    double span = 0;
    for (const auto& p : puzzle.pieces) {
      Box pb;
      for (const auto& v : p.vertices) pb.add(v);
      span = std::max(span, pb.hi.x() - pb.lo.x());
    }
    const int per_row = std::max<int>(1, static_cast<int>(std::ceil(std::sqrt(
                                             double(puzzle.pieces.size())))));
    box.add(Vec2(box.hi.x() + 0.5 + per_row * (span + 0.3), box.lo.y()));
    box.add(Vec2(box.lo.x(),
                 box.lo.y() + std::ceil(double(puzzle.pieces.size()) / per_row) * (span + 0.3)));
    (void)w;
  }
  return box;
}

}  // namespace

std::string render_puzzle_svg(const Puzzle& puzzle, const Placement* placement,
                              const RenderOptions& opts) {
  const bool scrambled = placement == nullptr;
  Box box = puzzle_box(puzzle, scrambled);
  SvgWriter svg(box, opts.pixels_per_unit);

  std::vector<Vec2> frame_outline = puzzle.frame.region;
  svg.polygon(frame_outline, "none", "#000000", 2.0);
  // Frame edge markers: thin triangles pointing inward.
  for (const auto& e : puzzle.frame.edges) {
    const Vec2 tip = e.offset + 0.18 * e.length() * e.orientation.unit();
    svg.polygon({e.endpoints[0], e.endpoints[1], tip}, color_for(e.color), "#222222", 0.5);
  }

  if (scrambled) {
    // Deterministic shelf layout in piece order.
    double slot = 0;
    for (const auto& p : puzzle.pieces) {
      Box pb;
      for (const auto& v : p.vertices) pb.add(v);
      slot = std::max(slot, std::max(pb.hi.x() - pb.lo.x(), pb.hi.y() - pb.lo.y()));
    }
    slot += 0.3;
    const int per_row =
        std::max<int>(1, static_cast<int>(std::ceil(std::sqrt(double(puzzle.pieces.size())))));
    const Vec2 base(box.hi.x() - per_row * slot + slot / 2, box.lo.y() + slot / 2);
    for (std::size_t i = 0; i < puzzle.pieces.size(); ++i) {
      const Vec2 t = base + Vec2((i % per_row) * slot, (i / per_row) * slot);
      draw_piece(svg, puzzle.pieces[i], t, Turn(), opts);
    }
  } else {
    for (std::size_t i = 0; i < puzzle.pieces.size(); ++i)
      draw_piece(svg, puzzle.pieces[i], placement->translations[i],
                 placement->orientations[i], opts);
    if (opts.show_rotation_copies && puzzle.rotation_order > 1) {
      const int r = puzzle.rotation_order;
      for (int rho = 1; rho < r; ++rho) {
        const double ang = Turn(rho, r).radians();
        for (std::size_t i = 0; i < puzzle.pieces.size(); ++i) {
          const Vec2 t = rotate(placement->translations[i], ang);
          const Turn phi = placement->orientations[i] + Turn(rho, r);
          draw_piece(svg, puzzle.pieces[i], t, phi, opts, 0.25);
        }
      }
    }
  }
  return svg.finish();
}

std::string render_matrix_strip_svg(const std::vector<Eigen::MatrixXd>& trace) {
  if (trace.empty()) return "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"/>\n";
  const double cell = 6.0, gap = 12.0;
  double x_off = gap;
  double height = 0;
  std::ostringstream body;
  for (const auto& P : trace) {
    for (int i = 0; i < P.rows(); ++i)
      for (int j = 0; j < P.cols(); ++j) {
        const int g = static_cast<int>(std::clamp(P(i, j), 0.0, 1.0) * 255.0);
        body << "<rect x=\"" << x_off + j * cell << "\" y=\"" << gap + i * cell << "\" width=\""
             << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << g << "," << g << "," << g
             << ")\"/>\n";
      }
    x_off += P.cols() * cell + gap;
    height = std::max(height, gap * 2 + P.rows() * cell);
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << x_off
      << "\" height=\"" << height << "\">\n"
      << body.str() << "</svg>\n";
  return out.str();
}

std::string render_placement_strip_svg(const Puzzle& puzzle, const std::vector<Placement>& steps,
                                       const RenderOptions& opts) {
  std::ostringstream frames;
  double x_off = 0;
  Box box;
  for (const auto& v : puzzle.frame.region) box.add(v);
  const double w = (box.hi.x() - box.lo.x()) * opts.pixels_per_unit + 16;
  const double h = (box.hi.y() - box.lo.y()) * opts.pixels_per_unit + 16;
  for (const auto& step : steps) {
    frames << "<g transform=\"translate(" << x_off << ",0)\">\n"
           << render_puzzle_svg(puzzle, &step, opts) << "</g>\n";
    x_off += w + 10;
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << x_off
      << "\" height=\"" << h << "\">\n"
      << frames.str() << "</svg>\n";
  return out.str();
}

}  // namespace edgematch
