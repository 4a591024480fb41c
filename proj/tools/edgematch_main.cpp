#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgematch/algebra.hpp"
#include "edgematch/errors.hpp"
#include "edgematch/generate.hpp"
#include "edgematch/io.hpp"
#include "edgematch/oracle.hpp"
#include "edgematch/relax_lp.hpp"
#include "edgematch/relax_sdp.hpp"
#include "edgematch/render.hpp"

namespace em = edgematch;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitUnsolved = 3;
constexpr int kExitNumerical = 4;

struct SolveOutcome {
  bool solved = false;
  std::string status;
  int iterations = 0;
  std::vector<double> objective_history;
  int perturbed_at = -1;
  em::Placement placement;
  std::vector<Eigen::MatrixXd> lp_trace;
};

SolveOutcome run_lp(const em::Puzzle& puzzle, const em::LpSolveOptions& opts) {
  SolveOutcome out;
  em::LpSolveResult res = em::solve_preset(puzzle, opts);
  out.status = em::to_string(res.state.status);
  out.iterations = res.state.iteration;
  out.objective_history = res.state.objective_history;
  out.perturbed_at = res.state.perturbed_at;
  out.lp_trace = res.state.trace;
  if (res.placement) {
    out.solved = true;
    out.placement = *res.placement;
  }
  return out;
}

SolveOutcome run_sdp(const em::Puzzle& puzzle, const em::SdpSolveOptions& opts) {
  SolveOutcome out;
  em::SdpSolveResult res = em::solve_sdp_pipeline(puzzle, opts);
  out.status = em::to_string(res.state.status);
  out.iterations = res.state.iteration;
  out.objective_history = res.state.objective_history;
  if (res.placement) {
    out.solved = true;
    out.placement = *res.placement;
  }
  return out;
}

SolveOutcome run_brute(const em::Puzzle& puzzle) {
  SolveOutcome out;
  em::SolutionSet set = em::brute_force_solve(puzzle);
  out.status = set.placements.empty() ? "no_solution" : "solved";
  out.iterations = 0;
  if (!set.placements.empty()) {
    out.solved = true;
    out.placement = set.placements.front();  // first canonical solution
  }
  return out;
}

json report_json(const std::string& method, const SolveOutcome& out, bool valid) {
  json j{{"schema_version", 1},
         {"method", method},
         {"status", out.status},
         {"iterations", out.iterations},
         {"objective_history", out.objective_history},
         {"solved", out.solved},
         {"valid", valid}};
  if (out.perturbed_at >= 0) j["perturbed_at"] = out.perturbed_at;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw em::ParseError("cannot open for writing: " + path);
  f << text;
}

int worker_count() {
  if (const char* env = std::getenv("EDGEMATCH_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgematch: algebraic edge-matching puzzle encoder and solver"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a puzzle instance");
  int rows = 4, cols = 4, colors = 4, rotations = 1;
  std::uint64_t seed = 0;
  std::string gen_type = "grid", out_path = "puzzle.json";
  gen->add_option("--rows", rows, "grid rows");
  gen->add_option("--cols", cols, "grid columns");
  gen->add_option("--colors", colors, "number of edge colors");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--rotations", rotations, "rotation order r (scrambles orientations)");
  gen->add_option("--type", gen_type, "grid | two-solution | dissection");
  gen->add_option("--out", out_path, "output puzzle file");

  // solve
  auto* solve = app.add_subcommand("solve", "solve a puzzle file");
  std::string puzzle_path, method = "lp", placement_out, report_out, trace_svg;
  int max_iter = 0;
  double tol = 0;
  int degree_cap = 12;
  std::uint64_t solve_seed = 0;
  solve->add_option("puzzle", puzzle_path, "puzzle file")->required();
  solve->add_option("--method", method, "lp | sdp | brute");
  solve->add_option("--max-iter", max_iter, "iteration limit (0 = default)");
  solve->add_option("--tol", tol, "solver tolerance (0 = default)");
  solve->add_option("--degree-cap", degree_cap, "polynomial degree cap");
  solve->add_option("--seed", solve_seed, "seed for the stall perturbation");
  solve->add_option("--out", placement_out, "placement output file");
  solve->add_option("--report", report_out, "run report output file");
  solve->add_option("--trace-svg", trace_svg, "iteration strip SVG output");

  // verify
  auto* verify = app.add_subcommand("verify", "check a placement against a puzzle");
  std::string verify_puzzle, verify_placement;
  double verify_tol = 1e-6;
  verify->add_option("puzzle", verify_puzzle, "puzzle file")->required();
  verify->add_option("--placement", verify_placement, "placement file (default: planted)");
  verify->add_option("--tol", verify_tol, "position tolerance");

  // render
  auto* render = app.add_subcommand("render", "emit an SVG figure");
  std::string render_puzzle, render_placement, render_out = "out.svg", style = "triangles";
  bool augmented = false;
  render->add_option("puzzle", render_puzzle, "puzzle file")->required();
  render->add_option("--placement", render_placement, "placement file (default: scrambled view)");
  render->add_option("--out", render_out, "output SVG file");
  render->add_option("--style", style, "triangles | pieces");
  render->add_flag("--rotation-copies", augmented, "overlay rotated copies with transparency");

  // bench
  auto* bench = app.add_subcommand("bench", "run a seeded batch and summarize");
  int bench_rows = 4, bench_cols = 4, bench_colors = 4, bench_count = 10;
  std::uint64_t bench_seed = 0;
  std::string bench_method = "lp", bench_out;
  int bench_max_iter = 0;
  bench->add_option("--rows", bench_rows, "grid rows");
  bench->add_option("--cols", bench_cols, "grid columns");
  bench->add_option("--colors", bench_colors, "number of edge colors");
  bench->add_option("--count", bench_count, "number of instances");
  bench->add_option("--seed", bench_seed, "base seed");
  bench->add_option("--method", bench_method, "lp | sdp");
  bench->add_option("--max-iter", bench_max_iter, "iteration limit (0 = default)");
  bench->add_option("--out", bench_out, "report output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (gen->parsed()) {
      em::Puzzle puzzle;
      em::Placement planted;
      if (gen_type == "grid") {
        std::tie(puzzle, planted) = em::generate_grid_puzzle(rows, cols, colors, seed);
      } else if (gen_type == "two-solution") {
        std::tie(puzzle, planted) = em::make_two_solution_puzzle();
      } else if (gen_type == "dissection") {
        std::tie(puzzle, planted) = em::make_rect_dissection();
      } else {
        std::cerr << "unknown --type " << gen_type << "\n";
        return kExitParse;
      }
      if (rotations > 1)
        std::tie(puzzle, planted) = em::scramble_orientations(puzzle, planted, rotations, seed);
      em::save_puzzle(out_path, puzzle, &planted);
      std::cout << "wrote " << out_path << " (" << puzzle.piece_count() << " pieces)\n";
      return kExitOk;
    }

    if (solve->parsed()) {
      const em::PuzzleFile pf = em::load_puzzle(puzzle_path);
      const auto t0 = std::chrono::steady_clock::now();
      SolveOutcome out;
      if (method == "lp") {
        em::LpSolveOptions opts;
        if (max_iter > 0) opts.max_iter = max_iter;
        if (tol > 0) opts.tol_round = tol;
        opts.degree_cap = degree_cap;
        opts.seed = solve_seed;
        out = run_lp(pf.puzzle, opts);
      } else if (method == "sdp") {
        em::SdpSolveOptions opts;
        if (max_iter > 0) opts.max_iter = max_iter;
        if (tol > 0) opts.sdp_tol = tol;
        opts.K = std::min(degree_cap, 6);
        out = run_sdp(pf.puzzle, opts);
      } else if (method == "brute") {
        out = run_brute(pf.puzzle);
      } else {
        std::cerr << "unknown --method " << method << "\n";
        return kExitParse;
      }
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      bool valid = false;
      if (out.solved)
        valid = em::validate_solution(pf.puzzle, out.placement).is_valid;
      if (out.solved && !placement_out.empty()) em::save_placement(placement_out, out.placement);
      if (!report_out.empty())
        write_text(report_out, report_json(method, out, valid).dump(2) + "\n");
      if (!trace_svg.empty() && !out.lp_trace.empty())
        write_text(trace_svg, em::render_matrix_strip_svg(out.lp_trace));
      std::cout << "status=" << out.status << " iterations=" << out.iterations
                << " valid=" << (valid ? "yes" : "no") << " wall_ms=" << ms << "\n";
      return out.solved && valid ? kExitOk : kExitUnsolved;
    }

    if (verify->parsed()) {
      const em::PuzzleFile pf = em::load_puzzle(verify_puzzle);
      em::Placement placement;
      if (!verify_placement.empty()) {
        placement = em::load_placement(verify_placement);
      } else if (pf.planted) {
        placement = *pf.planted;
      } else {
        std::cerr << "no placement given and puzzle has no planted solution\n";
        return kExitParse;
      }
      const em::ValidityReport report = em::validate_solution(pf.puzzle, placement, verify_tol);
      std::cout << (report.is_valid ? "valid" : "invalid")
                << " max_position_error=" << report.max_position_error
                << " unmatched=" << report.unmatched_edges.size() << "\n";
      for (const auto& u : report.unmatched_edges)
        std::cout << "  piece " << u.piece_id << " edge " << u.edge_index << ": " << u.reason
                  << "\n";
      return report.is_valid ? kExitOk : kExitUnsolved;
    }

    if (render->parsed()) {
      const em::PuzzleFile pf = em::load_puzzle(render_puzzle);
      em::RenderOptions opts;
      opts.style = style == "pieces" ? em::RenderStyle::Pieces : em::RenderStyle::Triangles;
      opts.show_rotation_copies = augmented;
      std::string svg;
      if (!render_placement.empty()) {
        const em::Placement placement = em::load_placement(render_placement);
        svg = em::render_puzzle_svg(pf.puzzle, &placement, opts);
      } else if (pf.planted) {
        svg = em::render_puzzle_svg(pf.puzzle, &*pf.planted, opts);
      } else {
        svg = em::render_puzzle_svg(pf.puzzle, nullptr, opts);
      }
      write_text(render_out, svg);
      std::cout << "wrote " << render_out << "\n";
      return kExitOk;
    }

    if (bench->parsed()) {
      struct Row {
        std::uint64_t seed;
        std::string status;
        int iterations;
        bool valid;
        long long wall_ms;
      };
      std::vector<Row> results(bench_count);
      std::atomic<int> next{0};
      const int threads = std::min(worker_count(), std::max(bench_count, 1));
      auto work = [&] {
        for (int i = next.fetch_add(1); i < bench_count; i = next.fetch_add(1)) {
          const std::uint64_t s = bench_seed + i;
          auto [puzzle, planted] =
              em::generate_grid_puzzle(bench_rows, bench_cols, bench_colors, s);
          const auto t0 = std::chrono::steady_clock::now();
          SolveOutcome out;
          try {
            if (bench_method == "sdp") {
              em::SdpSolveOptions opts;
              if (bench_max_iter > 0) opts.max_iter = bench_max_iter;
              out = run_sdp(puzzle, opts);
            } else {
              em::LpSolveOptions opts;
              if (bench_max_iter > 0) opts.max_iter = bench_max_iter;
              opts.seed = s;
              out = run_lp(puzzle, opts);
            }
          } catch (const std::exception& e) {
            out.status = std::string("error: ") + e.what();
          }
          const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
          const bool valid =
              out.solved && em::validate_solution(puzzle, out.placement).is_valid;
          results[i] = {s, out.status, out.iterations, valid, ms};
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work);
      for (auto& t : pool) t.join();

      int ok = 0;
      std::vector<int> iters;
      std::vector<long long> times;
      for (const auto& r : results) {
        if (r.valid) {
          ok++;
          iters.push_back(r.iterations);
        }
        times.push_back(r.wall_ms);
      }
      std::sort(iters.begin(), iters.end());
      std::sort(times.begin(), times.end());
      std::cout << "instances=" << bench_count << " solved=" << ok << " success_rate="
                << (bench_count ? double(ok) / bench_count : 0.0)
                << " median_iterations=" << (iters.empty() ? 0 : iters[iters.size() / 2])
                << " median_wall_ms=" << (times.empty() ? 0 : times[times.size() / 2]) << "\n";
      if (!bench_out.empty()) {
        json rows = json::array();
        for (const auto& r : results)
          rows.push_back({{"seed", r.seed},
                          {"status", r.status},
                          {"iterations", r.iterations},
                          {"valid", r.valid}});
        json j{{"schema_version", 1},
               {"method", bench_method},
               {"rows", bench_rows},
               {"cols", bench_cols},
               {"colors", bench_colors},
               {"results", rows}};
        write_text(bench_out, j.dump(2) + "\n");
      }
      return kExitOk;
    }
  } catch (const em::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const em::UnsolvableError& e) {
    std::cerr << "unsolvable: " << e.what() << "\n";
    return kExitUnsolved;
  } catch (const em::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
