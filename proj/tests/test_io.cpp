#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "golden.hpp"
#include "support.hpp"

using namespace panolayout;
using pltest::fixture;

namespace {

const ImageGrid kGrid{1024, 512};

template <class F>
std::size_t parse_error_location(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.location();
  }
  ADD_FAILURE() << "expected ParseError";
  return std::size_t(-1);
}

template <class F>
std::string parse_error_message(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected ParseError";
  return {};
}

// --- numbers --------------------------------------------------------------------------------

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

// --- signal files ---------------------------------------------------------------------------

TEST(SignalFile, RoundTripIsBitExact) {
  const auto& s = fixture(RoomFamily::t_room, 1).rendered.signal;
  const auto text = emit_signal_file(s);
  EXPECT_EQ(text.rfind("PANOSIG1", 0), 0u);
  EXPECT_EQ(parse_signal_file(text), s);
}

TEST(SignalFile, WellFormedSmallFile) {
  const auto s = parse_signal_file("PANOSIG1 4\n0 1 0.5 0\n0.5 0.5 0.5 0.5\n-0.5 -0.5 -0.5 -0.5\n");
  EXPECT_EQ(s.width(), 4);
  EXPECT_EQ(s.y_p[2], 0.5);
  EXPECT_EQ(s.y_f[3], -0.5);
}

TEST(SignalFile, OutOfRangeNamesColumn) {
  const std::string text = "PANOSIG1 4\n0 0 0 1.5\n0.5 0.5 0.5 0.5\n-0.5 -0.5 -0.5 -0.5\n";
  const auto msg = parse_error_message([&] { parse_signal_file(text); });
  EXPECT_NE(msg.find("column 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("y_p"), std::string::npos) << msg;
  EXPECT_EQ(parse_error_location([&] { parse_signal_file(text); }), text.find("1.5"));
}

TEST(SignalFile, Truncated) {
  const std::string text = "PANOSIG1 4\n0 0 0 0\n0.5 0.5\n";
  const auto msg = parse_error_message([&] { parse_signal_file(text); });
  EXPECT_NE(msg.find("truncated"), std::string::npos) << msg;
  EXPECT_EQ(parse_error_location([&] { parse_signal_file(text); }), text.size());
}

TEST(SignalFile, OtherErrors) {
  EXPECT_EQ(parse_error_location([] { parse_signal_file("PANOSIG2 4\n"); }), 0u);
  EXPECT_THROW(parse_signal_file(""), ParseError);
  EXPECT_THROW(parse_signal_file("PANOSIG1 5\n"), ParseError);
  EXPECT_THROW(parse_signal_file("PANOSIG1 2\n"), ParseError);
  EXPECT_THROW(parse_signal_file("PANOSIG1 four\n"), ParseError);
  const std::string nonnum = "PANOSIG1 4\n0 0 x 0\n";
  EXPECT_EQ(parse_error_location([&] { parse_signal_file(nonnum); }), nonnum.find('x'));
  const std::string trailing = "PANOSIG1 4\n0 0 0 0\n0.5 0.5 0.5 0.5\n-0.5 -0.5 -0.5 -0.5\n7\n";
  EXPECT_EQ(parse_error_location([&] { parse_signal_file(trailing); }), trailing.size() - 2);
  // The ceiling must be above the horizon and the floor below it.
  EXPECT_THROW(parse_signal_file("PANOSIG1 4\n0 0 0 0\n0 0.5 0.5 0.5\n-0.5 -0.5 -0.5 -0.5\n"), ParseError);
  EXPECT_THROW(parse_signal_file("PANOSIG1 4\n0 0 0 0\n0.5 0.5 0.5 0.5\n-0.5 -0.5 -0.5 0.1\n"), ParseError);
}

// --- corner txt -----------------------------------------------------------------------------

TEST(CornerTxt, FourCorners) {
  const std::string text =
      "100 150\n100 380\n"
      "356.2 140\n356 390\n"
      "\n"
      "612 150\n612 380\n"
      "868 145\n868.4 385\n";
  const auto f = parse_corner_txt(text, kGrid);
  ASSERT_EQ(f.corners.size(), 4u);
  EXPECT_DOUBLE_EQ(f.corners[1].column, 356.1);
  EXPECT_DOUBLE_EQ(f.corners[1].ceiling_row, 140.0);
  EXPECT_DOUBLE_EQ(f.corners[1].floor_row, 390.0);
  EXPECT_FALSE(f.corners[0].kind.has_value());
  const auto again = parse_corner_txt(emit_corner_txt(f), kGrid);
  ASSERT_EQ(again.corners.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(again.corners[i].column, f.corners[i].column);
}

TEST(CornerTxt, CrLfAccepted) {
  EXPECT_EQ(parse_corner_txt("1 2\r\n1 300\r\n", kGrid).corners.size(), 1u);
}

TEST(CornerTxt, ErrorsCarryLineNumbers) {
  // Seven lines: the last is unpaired.
  std::string odd;
  for (int i = 0; i < 7; ++i) odd += std::to_string(100 * (i / 2) + 10) + (i % 2 ? " 380\n" : " 150\n");
  EXPECT_EQ(parse_error_location([&] { parse_corner_txt(odd, kGrid); }), 7u);
  EXPECT_EQ(parse_error_location([&] { parse_corner_txt("10 150\n10 abc\n", kGrid); }), 2u);
  EXPECT_EQ(parse_error_location([&] { parse_corner_txt("10 150\n12 380\n", kGrid); }), 2u);
  EXPECT_EQ(parse_error_location([&] { parse_corner_txt("50 150\n50 380\n20 150\n20 380\n", kGrid); }), 3u);
  EXPECT_EQ(parse_error_location([&] { parse_corner_txt("10 150 3\n10 380\n", kGrid); }), 1u);
  EXPECT_EQ(parse_error_location([&] { parse_corner_txt("10 150\n10 600\n", kGrid); }), 2u);
  EXPECT_EQ(parse_error_location([&] { parse_corner_txt("10 380\n10 150\n", kGrid); }), 2u);
  EXPECT_EQ(parse_error_location([&] { parse_corner_txt("\n\n10\n", kGrid); }), 3u);
}

TEST(CornerTxt, OracleLayoutRoundTrip) {
  const auto& truth = fixture(RoomFamily::hexagon, 2).rendered.truth;
  const auto txt = emit_corner_txt(to_layout_file(truth));
  auto file = parse_corner_txt(txt, kGrid);
  file.camera_height = truth.camera.camera_height;
  const auto back = to_visible_layout(file);
  EXPECT_GT(iou_2d(back, truth), 0.999);
  EXPECT_NEAR(back.room_height, truth.room_height, 1e-9);
}

TEST(CornerTxt, KindsInferredForAdjacentPairs) {
  const auto& truth = fixture(RoomFamily::l_room, 2).rendered.truth;
  auto file = parse_corner_txt(emit_corner_txt(to_layout_file(truth)), kGrid);
  file.camera_height = truth.camera.camera_height;
  const auto back = to_visible_layout(file);
  EXPECT_EQ(back.occlusion_pair_count(), 1u);
  ASSERT_EQ(back.corners.size(), truth.corners.size());
  for (std::size_t i = 0; i < back.corners.size(); ++i) EXPECT_EQ(back.corners[i].kind, truth.corners[i].kind);
}

TEST(Structured3D, ConvertsJunctionList) {
  const std::string s3d =
      "612 380\n100 150\n612 150\n100 380\n"
      "356 390\n356.2 140\n";
  const auto txt = convert_structured3d_layout(s3d, kGrid);
  EXPECT_EQ(txt, "100 150\n100 380\n356.1 140\n356.1 390\n612 150\n612 380\n");
  EXPECT_EQ(parse_corner_txt(txt, kGrid).corners.size(), 3u);
  EXPECT_THROW(convert_structured3d_layout("1 2\n", kGrid), ParseError);
  EXPECT_THROW(convert_structured3d_layout("1 2\n40 300\n", kGrid), ParseError);
}

// --- layout json ----------------------------------------------------------------------------

TEST(LayoutJson, RoundTripFixtureCorpus) {
  for (auto fam : kAllFamilies) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto& f = fixture(fam, seed);
      const auto& truth = f.rendered.truth;
      const auto full = f.room.camera_frame_polygon();
      const auto file = parse_layout_json(emit_layout_json(truth, full));
      EXPECT_EQ(file.full_polygon, full);
      const auto back = to_visible_layout(file);
      ASSERT_EQ(back.corners.size(), truth.corners.size());
      EXPECT_NEAR(back.room_height, truth.room_height, 1e-9);
      EXPECT_EQ(back.camera.camera_height, truth.camera.camera_height);
      for (std::size_t i = 0; i < truth.corners.size(); ++i) {
        EXPECT_NEAR(back.corners[i].column, truth.corners[i].column, 1e-9);
        EXPECT_NEAR(back.corners[i].floor_lat, truth.corners[i].floor_lat, 1e-9);
        EXPECT_NEAR(back.corners[i].ceil_lat, truth.corners[i].ceil_lat, 1e-9);
        EXPECT_EQ(back.corners[i].kind, truth.corners[i].kind);
      }
    }
  }
}

TEST(LayoutJson, Shape) {
  const auto text = emit_layout_json(fixture(RoomFamily::square, 0).rendered.truth);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["format_version"], 1);
  EXPECT_EQ(j["grid"]["width"], 1024);
  EXPECT_EQ(j["corners"].size(), 4u);
  EXPECT_EQ(j["corners"][0]["kind"], "visible");
  EXPECT_FALSE(j.contains("full_polygon"));
  EXPECT_EQ(text.back(), '\n');
}

TEST(LayoutJson, StrictParsing) {
  const std::string ok = emit_layout_json(fixture(RoomFamily::square, 0).rendered.truth);
  auto j = nlohmann::json::parse(ok);
  j["extra"] = 1;
  EXPECT_NE(parse_error_message([&] { parse_layout_json(j.dump()); }).find("extra"), std::string::npos);
  j = nlohmann::json::parse(ok);
  j["corners"][0]["colour"] = "red";
  EXPECT_THROW(parse_layout_json(j.dump()), ParseError);
  j = nlohmann::json::parse(ok);
  j["format_version"] = 2;
  EXPECT_THROW(parse_layout_json(j.dump()), ParseError);
  j = nlohmann::json::parse(ok);
  j["corners"][1]["kind"] = "sideways";
  EXPECT_THROW(parse_layout_json(j.dump()), ParseError);
  j = nlohmann::json::parse(ok);
  j["corners"][1]["column"] = "12";
  EXPECT_THROW(parse_layout_json(j.dump()), ParseError);
  j = nlohmann::json::parse(ok);
  j["grid"]["width"] = 1023;
  EXPECT_THROW(parse_layout_json(j.dump()), ParseError);
  j = nlohmann::json::parse(ok);
  j["full_polygon"] = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  EXPECT_THROW(parse_layout_json(j.dump()), ParseError);
  const std::string broken = "{\"format_version\": 1,, }";
  EXPECT_EQ(parse_error_location([&] { parse_layout_json(broken); }), broken.find(",,") + 2);
}

// --- ply ------------------------------------------------------------------------------------

struct Mesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::size_t, 3>> faces;
};

Mesh read_ply(const std::string& text) {
  std::istringstream in(text);
  std::string line, word;
  std::size_t nv = 0, nf = 0;
  while (std::getline(in, line) && line != "end_header") {
    std::istringstream ls(line);
    ls >> word;
    if (word == "element") {
      ls >> word;
      (word == "vertex" ? nv : nf) = 0;
      ls >> (word == "vertex" ? nv : nf);
    }
  }
  Mesh m;
  for (std::size_t i = 0; i < nv; ++i) {
    std::array<double, 3> v{};
    in >> v[0] >> v[1] >> v[2];
    m.vertices.push_back(v);
  }
  for (std::size_t i = 0; i < nf; ++i) {
    int k = 0;
    std::array<std::size_t, 3> f{};
    in >> k >> f[0] >> f[1] >> f[2];
    EXPECT_EQ(k, 3);
    m.faces.push_back(f);
  }
  EXPECT_TRUE(in);
  return m;
}

// Directed edges used by exactly one face (the mesh boundary).
std::multiset<std::pair<std::size_t, std::size_t>> open_edges(const Mesh& m) {
  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  for (const auto& f : m.faces) {
    for (int k = 0; k < 3; ++k) ++directed[{f[std::size_t(k)], f[std::size_t((k + 1) % 3)]}];
  }
  std::multiset<std::pair<std::size_t, std::size_t>> open;
  for (const auto& [e, count] : directed) {
    EXPECT_EQ(count, 1) << "edge used twice in the same direction";
    if (!directed.count({e.second, e.first})) open.insert(e);
  }
  return open;
}

TEST(Ply, SquareIsClosedBox) {
  const auto& truth = fixture(RoomFamily::square, 0).rendered.truth;
  const auto m = read_ply(emit_ply(truth));
  EXPECT_EQ(m.vertices.size(), 8u);
  EXPECT_EQ(m.faces.size(), 12u);
  EXPECT_TRUE(open_edges(m).empty());
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(m.vertices[i][2], 0.0);
    EXPECT_EQ(m.vertices[i + 4][2], truth.room_height);
  }
}

TEST(Ply, LRoomLeavesOcclusionWallOpen) {
  const auto& truth = fixture(RoomFamily::l_room, 0).rendered.truth;
  const auto m = read_ply(emit_ply(truth));
  const std::size_t n = truth.corners.size();
  EXPECT_EQ(m.vertices.size(), 2 * n);
  // n-1 walls, two caps of n-2 triangles each.
  EXPECT_EQ(m.faces.size(), 2 * (n - 1) + 2 * (n - 2));
  // The hole is the quad spanned by the near/far corners on floor and ceiling.
  EXPECT_EQ(open_edges(m).size(), 4u);
}

TEST(Triangulate, CoversPolygonArea) {
  for (auto fam : kAllFamilies) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto poly = fixture(fam, seed).rendered.truth.floor_polygon();
      const auto tris = triangulate(poly);
      ASSERT_EQ(tris.size(), poly.size() - 2);
      double area = 0.0;
      for (const auto& t : tris) {
        const double a = 0.5 * cross(poly[t[1]] - poly[t[0]], poly[t[2]] - poly[t[0]]);
        EXPECT_GT(a, 0.0);
        area += a;
      }
      EXPECT_NEAR(area, signed_area(poly), 1e-9 * signed_area(poly));
    }
  }
}

// --- svg ------------------------------------------------------------------------------------

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

TEST(Svg, SquareGolden) {
  const auto svg = emit_svg_topdown(fixture(RoomFamily::square, 0).rendered.truth);
  EXPECT_EQ(count(svg, "<line "), 4u);
  EXPECT_EQ(count(svg, "stroke-dasharray"), 0u);
  pltest::expect_golden("square_0.svg", svg);
}

TEST(Svg, LRoomGoldenHasOneDashedEdge) {
  const auto& truth = fixture(RoomFamily::l_room, 0).rendered.truth;
  const auto svg = emit_svg_topdown(truth);
  EXPECT_EQ(count(svg, "<line "), truth.corners.size());
  EXPECT_EQ(count(svg, "stroke-dasharray=\"6 4\""), 1u);
  EXPECT_EQ(count(svg, "class=\"camera\""), 1u);
  pltest::expect_golden("l_room_0.svg", svg);
}

TEST(Svg, OverlayDrawsBothLayers) {
  const auto& truth = fixture(RoomFamily::t_room, 0).rendered.truth;
  const auto svg = emit_svg_topdown(truth, truth);
  EXPECT_EQ(count(svg, "<g "), 2u);
  EXPECT_EQ(count(svg, "stroke-dasharray"), 4u);
  EXPECT_LT(svg.find("#2a9d3a"), svg.find("#c8372d"));
}

// --- reports --------------------------------------------------------------------------------

TEST(Report, CsvAndTable) {
  std::vector<ReportRow> rows = {{"a", {0.9, 0.8, 0.01, 0.02, 0.5, 0.6, 0.7}},
                                 {"b", {0.7, 0.6, 0.03, 0.04, 0.7, 0.8, 0.9}}};
  const auto csv = emit_report_csv(rows);
  const auto lines = detail::split_lines(csv);
  ASSERT_GE(lines.size(), 4u);
  EXPECT_EQ(lines[0], "stem,iou2d,iou3d,corner_error,pixel_error,junction_f,wireframe_f,plane_f");
  EXPECT_EQ(lines[1], "a,0.9,0.8,0.01,0.02,0.5,0.6,0.7");
  EXPECT_EQ(lines[3].substr(0, 8), "mean,0.8");
  const auto table = emit_report_table(rows);
  EXPECT_NE(table.find("mean"), std::string::npos);
  EXPECT_NE(table.find("0.8000"), std::string::npos);
  EXPECT_EQ(emit_report_csv({}), "stem,iou2d,iou3d,corner_error,pixel_error,junction_f,wireframe_f,plane_f\n");
}

// --- run config -----------------------------------------------------------------------------

TEST(RunConfigFile, DefaultsAndRoundTrip) {
  const auto c = parse_run_config("{}");
  EXPECT_EQ(c.mode, PostprocessMode::ensemble);
  EXPECT_EQ(c.iou_resolution, 2048);
  RunConfig custom;
  custom.mode = PostprocessMode::two_d_only;
  custom.detect.jump_ratio = 1.3;
  custom.regime = Regime::non_visible;
  custom.matching = CornerMatching::greedy;
  custom.wireframe_verticals = false;
  custom.render_formats = {"ply"};
  const auto text = emit_run_config(custom);
  EXPECT_EQ(emit_run_config(parse_run_config(text)), text);
}

TEST(RunConfigFile, RejectsUnknownAndInvalid) {
  EXPECT_NE(parse_error_message([] { parse_run_config(R"({"moode": "2d_only"})"); }).find("moode"),
            std::string::npos);
  EXPECT_THROW(parse_run_config(R"({"detect": {"jump": 1.2}})"), ParseError);
  EXPECT_THROW(parse_run_config(R"({"mode": "4d"})"), ParseError);
  EXPECT_THROW(parse_run_config(R"({"detect": {"jump_ratio": 0.9}})"), ParseError);
  EXPECT_THROW(parse_run_config(R"({"camera_height": -1})"), ParseError);
  EXPECT_THROW(parse_run_config(R"({"render_formats": ["obj"]})"), ParseError);
  EXPECT_THROW(parse_run_config(R"({"iou_resolution": 2})"), ParseError);
  EXPECT_THROW(parse_run_config(R"([1, 2])"), ParseError);
}

// --- mutation fuzzing -----------------------------------------------------------------------

// Every single-byte mutation either parses into a valid value or raises ParseError.
template <class Parse, class Check>
void fuzz(const std::string& seed_text, int trials, std::uint64_t seed, Parse parse, Check check) {
  std::mt19937_64 rng(seed);
  const std::string alphabet = "0123456789.-+eE \n\tx{}[]\",:";
  for (int t = 0; t < trials; ++t) {
    std::string s = seed_text;
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
    switch (rng() % 3) {
      case 0: s[pos] = alphabet[rng() % alphabet.size()]; break;
      case 1: s.erase(pos, 1); break;
      default: s.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
    }
    try {
      check(parse(s));
    } catch (const ParseError&) {
    } catch (const std::exception& e) {
      ADD_FAILURE() << "unexpected exception: " << e.what() << " for mutation at " << pos;
    }
  }
}

TEST(Fuzz, SignalParser) {
  const auto text = emit_signal_file(fixture(RoomFamily::square, 0, 64).rendered.signal);
  fuzz(text, 1000, 1, parse_signal_file, [](const BoundarySignal& s) { s.validate(); });
}

TEST(Fuzz, CornerTxtParser) {
  const auto text = emit_corner_txt(to_layout_file(fixture(RoomFamily::l_room, 0).rendered.truth));
  fuzz(text, 1000, 2, [](const std::string& s) { return parse_corner_txt(s, kGrid); },
       [](const LayoutFile& f) { f.validate(); });
}

TEST(Fuzz, LayoutJsonParser) {
  const auto text = emit_layout_json(fixture(RoomFamily::l_room, 0).rendered.truth);
  fuzz(text, 1000, 3, parse_layout_json, [](const LayoutFile& f) { f.validate(); });
}

TEST(Fuzz, RunConfigParser) {
  fuzz(emit_run_config(RunConfig{}), 1000, 4, parse_run_config, [](const RunConfig& c) { c.detect.validate(); });
}

}  // namespace
