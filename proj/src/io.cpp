#include "edgematch/io.hpp"

#include <fstream>

#include <json.hpp>

#include "edgematch/errors.hpp"

namespace edgematch {

using json = nlohmann::json;

namespace {

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec2 vec_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("expected [x, y] at " + where);
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

json turn_json(const Turn& t) { return json::array({t.num, t.den}); }

Turn turn_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ParseError("expected orientation [num, den] at " + where);
  return Turn(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
}

json edge_json(const EdgeElement& e) {
  json j{{"endpoints", json::array({vec_json(e.endpoints[0]), vec_json(e.endpoints[1])})},
         {"color", e.color},
         {"orientation", turn_json(e.orientation)}};
  if (e.rot_copy != 0) j["copy"] = e.rot_copy;
  return j;
}

EdgeElement edge_from(const json& j, const std::string& where) {
  if (!j.contains("endpoints") || !j["endpoints"].is_array() || j["endpoints"].size() != 2)
    throw ParseError("edge without two endpoints at " + where);
  EdgeElement e;
  e.endpoints = {vec_from(j["endpoints"][0], where), vec_from(j["endpoints"][1], where)};
  e.offset = 0.5 * (e.endpoints[0] + e.endpoints[1]);
  if (!j.contains("color") || !j["color"].is_number_integer())
    throw ParseError("edge without integer color at " + where);
  e.color = j["color"].get<int>();
  if (!j.contains("orientation")) throw ParseError("edge without orientation at " + where);
  e.orientation = turn_from(j["orientation"], where);
  if (j.contains("copy")) e.rot_copy = j["copy"].get<int>();
  return e;
}

json placement_json(const Placement& p) {
  json t = json::array(), o = json::array();
  for (const auto& v : p.translations) t.push_back(vec_json(v));
  for (const auto& phi : p.orientations) o.push_back(turn_json(phi));
  return json{{"translations", t}, {"orientations", o}};
}

Placement placement_from(const json& j) {
  if (!j.contains("translations")) throw ParseError("placement without translations");
  Placement p;
  int k = 0;
  for (const auto& v : j["translations"])
    p.translations.push_back(vec_from(v, "translations[" + std::to_string(k++) + "]"));
  if (j.contains("orientations")) {
    k = 0;
    for (const auto& o : j["orientations"])
      p.orientations.push_back(turn_from(o, "orientations[" + std::to_string(k++) + "]"));
  } else {
    p.orientations.assign(p.translations.size(), Turn());
  }
  if (p.orientations.size() != p.translations.size())
    throw ParseError("placement translations/orientations length mismatch");
  return p;
}

}  // namespace

std::string puzzle_to_json(const Puzzle& puzzle, const Placement* planted) {
  json frame{{"region", json::array()}, {"edges", json::array()}};
  for (const auto& v : puzzle.frame.region) frame["region"].push_back(vec_json(v));
  for (const auto& e : puzzle.frame.edges) frame["edges"].push_back(edge_json(e));

  json pieces = json::array();
  for (const auto& p : puzzle.pieces) {
    json jp{{"id", p.id}, {"vertices", json::array()}, {"edges", json::array()}};
    for (const auto& v : p.vertices) jp["vertices"].push_back(vec_json(v));
    for (const auto& e : p.edges) jp["edges"].push_back(edge_json(e));
    pieces.push_back(std::move(jp));
  }

  json root{{"frame", std::move(frame)},
            {"pieces", std::move(pieces)},
            {"rotation_order", puzzle.rotation_order}};
  if (puzzle.rotation_copies != 1) root["rotation_copies"] = puzzle.rotation_copies;
  if (puzzle.preset_locations) {
    json presets = json::array();
    for (const auto& s : *puzzle.preset_locations) presets.push_back(vec_json(s));
    root["preset_locations"] = std::move(presets);
  }
  if (planted) root["planted"] = placement_json(*planted);
  return root.dump(2);
}

PuzzleFile puzzle_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("puzzle file is not valid JSON: ") + e.what());
  }
  if (!root.contains("frame") || !root.contains("pieces"))
    throw ParseError("puzzle file must contain 'frame' and 'pieces'");

  PuzzleFile out;
  const auto& jf = root["frame"];
  if (!jf.contains("region")) throw ParseError("frame without region");
  int k = 0;
  for (const auto& v : jf["region"])
    out.puzzle.frame.region.push_back(vec_from(v, "frame.region[" + std::to_string(k++) + "]"));
  k = 0;
  for (const auto& e : jf["edges"])
    out.puzzle.frame.edges.push_back(edge_from(e, "frame.edges[" + std::to_string(k++) + "]"));

  for (const auto& jp : root["pieces"]) {
    Piece piece;
    if (!jp.contains("id") || !jp["id"].is_number_integer())
      throw ParseError("piece without integer id");
    piece.id = jp["id"].get<int>();
    const std::string where = "piece " + std::to_string(piece.id);
    for (const auto& v : jp["vertices"]) piece.vertices.push_back(vec_from(v, where));
    k = 0;
    for (const auto& e : jp["edges"])
      piece.edges.push_back(edge_from(e, where + ".edges[" + std::to_string(k++) + "]"));
    out.puzzle.pieces.push_back(std::move(piece));
  }

  if (root.contains("rotation_order")) out.puzzle.rotation_order = root["rotation_order"].get<int>();
  if (root.contains("rotation_copies"))
    out.puzzle.rotation_copies = root["rotation_copies"].get<int>();
  if (root.contains("preset_locations")) {
    std::vector<Vec2> presets;
    k = 0;
    for (const auto& s : root["preset_locations"])
      presets.push_back(vec_from(s, "preset_locations[" + std::to_string(k++) + "]"));
    out.puzzle.preset_locations = std::move(presets);
  }
  if (root.contains("planted")) out.planted = placement_from(root["planted"]);

  check_puzzle(out.puzzle);
  return out;
}

void save_puzzle(const std::string& path, const Puzzle& puzzle, const Placement* planted) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open for writing: " + path);
  f << puzzle_to_json(puzzle, planted) << "\n";
}

PuzzleFile load_puzzle(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open puzzle file: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return puzzle_from_json(text);
}

std::string placement_to_json(const Placement& placement) {
  return placement_json(placement).dump(2);
}

Placement placement_from_json(const std::string& text) {
  try {
    return placement_from(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("placement file is not valid JSON: ") + e.what());
  }
}

void save_placement(const std::string& path, const Placement& placement) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open for writing: " + path);
  f << placement_to_json(placement) << "\n";
}

Placement load_placement(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open placement file: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return placement_from_json(text);
}

}  // namespace edgematch
