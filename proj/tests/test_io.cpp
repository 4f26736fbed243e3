#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

#include "core/presets.hpp"
#include "flow/characteristic.hpp"
#include "io/artifacts.hpp"
#include "io/config.hpp"
#include "surface/level.hpp"

using namespace srmin;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// JSON pointer of the ConfigError a config text provokes.
std::string pointer_of(const std::string& text) {
  try {
    (void)io::parse_config(text);
  } catch (const io::ConfigError& e) {
    return e.pointer();
  }
  return "<no error>";
}

SurfaceMesh tiny_mesh(bool with_phi) {
  SurfaceMesh m;
  m.n_s = 2;
  m.n_t = 3;
  m.svals = {0.0, 1.0};
  m.tvals = {0.0, 0.5, 1.0};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      m.vertices.push_back({double(i), 0.5 * double(j), 0.1});
  if (with_phi) m.phi = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  return m;
}

}  // namespace

TEST_CASE("preset configs build the advertised structures") {
  const io::RunConfig h1 = io::parse_config(R"json({"structure": {"preset": "heisenberg"}})json");
  REQUIRE(h1.built != nullptr);
  CHECK(h1.built->dim() == 3);
  CHECK(h1.structure.m == 1);
  CHECK(h1.built->chart().names() == std::vector<std::string>{"x", "y", "z"});
  const StructuralConstants c = h1.built->structural_constants(h1.built->reference_point());
  CHECK(c.at(0, 1, 2) == 1.0);

  const io::RunConfig h2 =
      io::parse_config(R"json({"structure": {"preset": "heisenberg", "m": 2}})json");
  CHECK(h2.built->dim() == 5);

  const io::RunConfig e2 = io::parse_config(R"json({"structure": {"preset": "rototranslation"}})json");
  CHECK(e2.built->dim() == 3);
  const StructuralConstants ce = e2.built->structural_constants(e2.built->reference_point());
  CHECK(ce.at(0, 1, 2) == 1.0);
  CHECK(ce.at(1, 2, 0) == 1.0);
}

TEST_CASE("custom structures parse chart, frame, and reference point") {
  const io::RunConfig c = io::parse_config(R"json({
    "structure": {
      "chart": ["x", "y", "z"],
      "frame": [["1", "0", "y/2"], ["0", "1", "-x/2"]]
    }
  })json");
  REQUIRE(c.built != nullptr);
  CHECK(c.built->dim() == 3);
  CHECK(c.structure.preset.empty());
  const StructuralConstants sc = c.built->structural_constants(c.built->reference_point());
  CHECK(sc.at(0, 1, 2) == 1.0);
  CHECK(c.built->reference_point()[0] == 0.0);

  const io::RunConfig shifted = io::parse_config(R"json({
    "structure": {
      "chart": ["x", "y", "z"],
      "frame": [["1", "0", "y/2"], ["0", "1", "-x/2"]],
      "reference_point": [0.5, -1.0, 2.0]
    }
  })json");
  CHECK(shifted.built->reference_point()[0] == 0.5);
  CHECK(shifted.built->reference_point()[2] == 2.0);
}

TEST_CASE("defaults are filled and the minimal echo is frozen") {
  const io::RunConfig c = io::parse_config(R"json({
    "structure": {"preset": "rototranslation"},
    "surface": {"F": "x*cos(z) + y*sin(z)"},
    "sweep": {"gamma": ["0", "cos(s)", "sin(s)"], "phi0": "s",
              "s_range": [0, 6.283185307179586], "t_range": [-1.5, 1.5]},
    "geodesic": {"q0": [0, 0, 0], "psi0": 0.5, "t_range": [0, 2]}
  })json");
  REQUIRE(c.surface);
  CHECK(c.surface->level == 0.0);
  REQUIRE(c.sweep);
  CHECK(c.sweep->n_s == 64);
  CHECK(c.sweep->n_t == 200);
  CHECK(c.sweep->h == 1e-3);
  CHECK_FALSE(c.sweep->box.has_value());
  REQUIRE(c.geodesic);
  CHECK(c.geodesic->u3 == 0.0);
  CHECK(c.geodesic->h == 1e-3);
  CHECK(c.output_dir == "out");

  const io::RunConfig minimal = io::parse_config(R"json({"structure": {"preset": "heisenberg"}})json");
  const std::string expected =
      "{\n"
      "  \"output_dir\": \"out\",\n"
      "  \"structure\": {\n"
      "    \"m\": 1,\n"
      "    \"preset\": \"heisenberg\"\n"
      "  }\n"
      "}\n";
  CHECK(io::effective_config_json(minimal) == expected);
}

TEST_CASE("the effective config echo is a fixed point of parsing") {
  const std::string text = R"json({
    "structure": {"chart": ["x", "y", "z"],
                  "frame": [["1", "0", "y/2"], ["0", "1", "-x/2"]]},
    "surface": {"F": "z - x*y"},
    "sweep": {"gamma": ["0", "cos(s)", "sin(s)"], "phi0": "s",
              "s_range": [0, 6.283185307179586], "n_s": 8,
              "t_range": [-1.5, 1.5], "n_t": 17, "h": 0.01,
              "box": {"lo": [-4, -4, -4], "hi": [4, 4, 4]}},
    "geodesic": {"q0": [0.25, 0, -1], "psi0": 0.5, "t_range": [0, 2]},
    "search_box": {"lo": [-1, -1, -1], "hi": [1, 1, 1]},
    "output_dir": "runs/a"
  })json";
  const io::RunConfig c1 = io::parse_config(text);
  const std::string echo1 = io::effective_config_json(c1);
  CHECK(!echo1.empty());
  CHECK(echo1.back() == '\n');

  const io::RunConfig c2 = io::parse_config(echo1);
  CHECK(io::effective_config_json(c2) == echo1);

  // Defaults materialized in the echo, raw expressions preserved.
  const json j = json::parse(echo1);
  CHECK(j["sweep"]["n_s"] == 8);
  CHECK(j["geodesic"]["u3"] == 0.0);
  CHECK(j["geodesic"]["h"] == 1e-3);
  CHECK(j["structure"]["reference_point"] == json::array({0.0, 0.0, 0.0}));
  CHECK(j["structure"]["frame"][0][2] == "y/2");
  CHECK(j["sweep"]["phi0"] == "s");
  CHECK(c2.sweep->box.has_value());
  CHECK(c2.sweep->box->hi[1] == 4.0);
  CHECK(c2.search_box->lo[2] == -1.0);
  CHECK(c2.output_dir == "runs/a");
}

TEST_CASE("schema violations carry json pointers") {
  CHECK(pointer_of("not json") == "/");
  CHECK(pointer_of("[1, 2]") == "/");
  CHECK(pointer_of("{}") == "/");
  CHECK(pointer_of(R"json({"structure": {"preset": "heisenberg"}, "bogus": 1})json") == "/bogus");
  CHECK(pointer_of(R"json({"structure": {"preset": "nil"}})json") == "/structure/preset");
  CHECK(pointer_of(R"json({"structure": {"preset": "heisenberg", "chart": ["x"]}})json") ==
        "/structure/chart");
  CHECK(pointer_of(R"json({"structure": {"preset": "rototranslation", "m": 2}})json") ==
        "/structure/m");
  CHECK(pointer_of(R"json({"structure": {"preset": "heisenberg", "m": 0}})json") == "/structure/m");
  CHECK(pointer_of(R"json({"structure": {"preset": "heisenberg", "m": 2.5}})json") == "/structure/m");
  CHECK(pointer_of(R"json({"structure": {"preset": "heisenberg", "m": 99}})json") == "/structure/m");
  CHECK(pointer_of(R"json({"structure": {"chart": ["x", "x", "z"],
                                     "frame": [["1","0","0"], ["0","1","0"]]}})json") ==
        "/structure/chart");
  CHECK(pointer_of(R"json({"structure": {"chart": ["x", "y", "z"]}})json") == "/structure");
  CHECK(pointer_of(R"json({"structure": {"chart": ["x", "y", "z"],
                                     "frame": [["1", "0", "0"]]}})json") == "/structure/frame");
  CHECK(pointer_of(R"json({"structure": {"chart": ["x", "y", "z"],
                                     "frame": [["1", "0"], ["0", "1", "0"]]}})json") ==
        "/structure/frame/0");
  CHECK(pointer_of(R"json({"structure": {"chart": ["x", "y", "z"],
                                     "frame": [["1", "0", 7], ["0", "1", "0"]]}})json") ==
        "/structure/frame/0/2");
  CHECK(pointer_of(R"json({"structure": {"chart": ["x", "y", "z"],
                                     "frame": [["1", "0", "0"], ["0", "1", "0"]],
                                     "reference_point": [0, 0]}})json") ==
        "/structure/reference_point");

  const std::string h1 = R"json("structure": {"preset": "heisenberg"})json";
  CHECK(pointer_of("{" + h1 + R"json(, "surface": {"level": 0}})json") == "/surface");
  CHECK(pointer_of("{" + h1 + R"json(, "surface": {"F": "z", "extra": 1}})json") ==
        "/surface/extra");
  CHECK(pointer_of("{" + h1 + R"json(, "sweep": {"gamma": ["0", "s"], "phi0": "0",
        "s_range": [0, 1], "t_range": [0, 1]}})json") == "/sweep/gamma");
  CHECK(pointer_of("{" + h1 + R"json(, "sweep": {"gamma": ["0", "s", "0"], "phi0": "0",
        "s_range": [1, 0], "t_range": [0, 1]}})json") == "/sweep/s_range");
  CHECK(pointer_of("{" + h1 + R"json(, "sweep": {"gamma": ["0", "s", "0"], "phi0": "0",
        "s_range": [0, 1], "t_range": [1, 1]}})json") == "/sweep/t_range");
  CHECK(pointer_of("{" + h1 + R"json(, "sweep": {"gamma": ["0", "s", "0"], "phi0": "0",
        "s_range": [0, 1], "t_range": [0, 1], "n_t": 1}})json") == "/sweep/n_t");
  CHECK(pointer_of("{" + h1 + R"json(, "sweep": {"gamma": ["0", "s", "0"], "phi0": "0",
        "s_range": [0, 1], "t_range": [0, 1], "n_s": 2.5}})json") == "/sweep/n_s");
  CHECK(pointer_of("{" + h1 + R"json(, "sweep": {"gamma": ["0", "s", "0"], "phi0": "0",
        "s_range": [0, 1], "t_range": [0, 1], "h": 0}})json") == "/sweep/h");
  CHECK(pointer_of("{" + h1 + R"json(, "sweep": {"gamma": ["0", "s", "0"], "phi0": "0",
        "s_range": [0, 1], "t_range": [0, 1],
        "box": {"lo": [1, 0, 0], "hi": [0, 1, 1]}}})json") == "/sweep/box");
  CHECK(pointer_of("{" + h1 + R"json(, "geodesic": {"q0": [0, 0], "psi0": 0,
        "t_range": [0, 1]}})json") == "/geodesic/q0");
  CHECK(pointer_of("{" + h1 + R"json(, "geodesic": {"psi0": 0, "t_range": [0, 1]}})json") ==
        "/geodesic");
  CHECK(pointer_of("{" + h1 + R"json(, "search_box": {"lo": [0, 0, 0], "hi": [1, -1, 1]}})json") ==
        "/search_box");
  CHECK(pointer_of("{" + h1 + R"json(, "output_dir": ""})json") == "/output_dir");

  // Blocks that only make sense on a 3-dimensional chart.
  const std::string h2 = R"json("structure": {"preset": "heisenberg", "m": 2})json";
  CHECK(pointer_of("{" + h2 + R"json(, "sweep": {"gamma": ["0", "s", "0"], "phi0": "0",
        "s_range": [0, 1], "t_range": [0, 1]}})json") == "/sweep");
  CHECK(pointer_of("{" + h2 + R"json(, "geodesic": {"q0": [0, 0, 0], "psi0": 0,
        "t_range": [0, 1]}})json") == "/geodesic");
  CHECK(pointer_of("{" + h2 + R"json(, "search_box": {"lo": [0,0,0], "hi": [1,1,1]}})json") ==
        "/search_box");

  // what() leads with the pointer.
  try {
    (void)io::parse_config(R"json({"structure": {"preset": "nil"}})json");
    CHECK(false);
  } catch (const io::ConfigError& e) {
    CHECK(std::string(e.what()).rfind("/structure/preset: ", 0) == 0);
  }
}

TEST_CASE("expression errors point at the offending string") {
  CHECK(pointer_of(R"json({"structure": {"chart": ["x", "y", "z"],
                                     "frame": [["1", "0", "y +"], ["0", "1", "0"]]}})json") ==
        "/structure/frame/0/2");
  CHECK(pointer_of(R"json({"structure": {"chart": ["x", "y", "z"],
                                     "frame": [["1", "0", "w"], ["0", "1", "0"]]}})json") ==
        "/structure/frame/0/2");
  const std::string h1 = R"json("structure": {"preset": "heisenberg"})json";
  CHECK(pointer_of("{" + h1 + R"json(, "surface": {"F": "z - "}})json") == "/surface/F");
  CHECK(pointer_of("{" + h1 + R"json(, "surface": {"F": "w"}})json") == "/surface/F");
  CHECK(pointer_of("{" + h1 + R"json(, "sweep": {"gamma": ["0", "x", "0"], "phi0": "0",
        "s_range": [0, 1], "t_range": [0, 1]}})json") == "/sweep/gamma/1");
  CHECK(pointer_of("{" + h1 + R"json(, "sweep": {"gamma": ["0", "s", "0"], "phi0": "s*",
        "s_range": [0, 1], "t_range": [0, 1]}})json") == "/sweep/phi0");
}

TEST_CASE("obj output is a frozen byte format") {
  const std::string expected =
      "v 0 0 0.10000000000000001\n"
      "v 0 0.5 0.10000000000000001\n"
      "v 0 1 0.10000000000000001\n"
      "v 1 0 0.10000000000000001\n"
      "v 1 0.5 0.10000000000000001\n"
      "v 1 1 0.10000000000000001\n"
      "f 1 4 5 2\n"
      "f 2 5 6 3\n";
  CHECK(io::obj_from_mesh(tiny_mesh(false)) == expected);

  SurfaceMesh strip = tiny_mesh(false);
  strip.n_s = 1;
  strip.svals = {0.0};
  strip.vertices.resize(3);
  const std::string obj = io::obj_from_mesh(strip);
  CHECK(obj.find("f ") == std::string::npos);
  CHECK(obj.find("v 0 1 0.1") != std::string::npos);

  // Identical sweeps produce identical bytes.
  const auto s = heisenberg_structure(1);
  io::SweepBlock block;
  block.gamma = {"0", "cos(s)", "sin(s)"};
  block.phi0 = "s";
  block.s_range = {0.0, 2.0 * kPi};
  block.n_s = 5;
  block.t_range = {-1.0, 1.0};
  block.n_t = 9;
  block.h = 0.01;
  const SurfaceMesh m1 = sweep_surface(*s, io::make_sweep_spec(block));
  const SurfaceMesh m2 = sweep_surface(*s, io::make_sweep_spec(block));
  const std::string o1 = io::obj_from_mesh(m1);
  CHECK(o1 == io::obj_from_mesh(m2));
  CHECK(o1.substr(0, 2) == "v ");
}

TEST_CASE("csv output uses shortest round-trip floats") {
  const std::string expected =
      "s,t,x,y,z,phi\n"
      "0,0,0,0,0.1,0\n"
      "0,0.5,0,0.5,0.1,0.5\n"
      "0,1,0,1,0.1,1\n"
      "1,0,1,0,0.1,1.5\n"
      "1,0.5,1,0.5,0.1,2\n"
      "1,1,1,1,0.1,2.5\n";
  CHECK(io::csv_from_mesh(tiny_mesh(true)) == expected);
  CHECK(io::csv_from_mesh(tiny_mesh(false)).substr(0, 10) == "s,t,x,y,z\n");

  GeodesicTrajectory tr;
  tr.t = {0.0, 0.25};
  tr.states = {{{0.0, 1.0, -0.5}, 0.1, 2.0}, {{0.25, 1.0, -0.5}, 0.75, 2.0}};
  const std::string g =
      "t,x,y,z,psi,u3\n"
      "0,0,1,-0.5,0.1,2\n"
      "0.25,0.25,1,-0.5,0.75,2\n";
  CHECK(io::csv_from_geodesic(tr) == g);
}

TEST_CASE("structure report freezes the canonical tables") {
  const auto e2 = rototranslation_structure();
  const std::string text = io::structure_report(*e2);
  CHECK(text == io::structure_report(*e2));  // deterministic bytes
  const json j = json::parse(text);
  CHECK(j["chart"] == json::array({"x", "y", "z"}));
  CHECK(j["dim"] == 3);
  CHECK(j["reference_point"] == json::array({0.0, 0.0, 0.0}));
  CHECK(j["frame"].size() == 2);
  CHECK(j["omega"].size() == 3);
  CHECK(j["reeb"].size() == 3);
  CHECK(j["constants"][0][1][2] == 1.0);
  CHECK(j["constants"][1][0][2] == -1.0);
  CHECK(j["constants"][1][2][0] == 1.0);
  CHECK(j["constants"][2][1][0] == -1.0);
  CHECK(j["constants"][0][1][0] == 0.0);

  const json h = json::parse(io::structure_report(*heisenberg_structure(1)));
  CHECK(h["constants"][0][1][2] == 1.0);
  CHECK(h["constants"][1][2][0] == 0.0);
  CHECK((h["orientation"] == 1 || h["orientation"] == -1));
}

TEST_CASE("residual report samples the surface deterministically") {
  const SearchBox box{{-2.0, -2.0, -2.0}, {2.0, 2.0, 2.0}};

  SUBCASE("flat plane") {
    const auto s = heisenberg_structure(1);
    const LevelSurfaceAnalyzer an(s, io::make_level_surface({"z", 0.0}, s->chart()));
    const std::string text = io::residual_report(an, box, 11, 40);
    CHECK(text == io::residual_report(an, box, 11, 40));
    const json j = json::parse(text);
    CHECK(j["count"] == 40);
    CHECK(j["samples"].size() == 40);
    CHECK(j["max_abs_residual"].get<double>() <= 1e-10);
    for (const json& row : j["samples"]) {
      const auto q = row["q"].get<std::array<double, 3>>();
      CHECK(std::abs(an.level_value(q)) <= 1e-11);
      CHECK(row["d1"].get<double>() >= 0.1);
      CHECK(std::abs(row["residual"].get<double>()) <= 1e-10);
    }
  }

  SUBCASE("helicoidal plane family") {
    const auto s = rototranslation_structure();
    const LevelSurfaceAnalyzer an(
        s, io::make_level_surface({"x*cos(z) + y*sin(z)", 0.0}, s->chart()));
    const json j = json::parse(io::residual_report(an, box, 3, 30));
    CHECK(j["count"] == 30);
    CHECK(j["max_abs_residual"].get<double>() <= 1e-10);
  }
}

TEST_CASE("characteristic point report classifies the plane origin") {
  const auto s = heisenberg_structure(1);
  const LevelSurfaceAnalyzer an(s, io::make_level_surface({"z", 0.0}, s->chart()));
  const SearchBox box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
  const json j = json::parse(io::charpoints_report(an, box));
  REQUIRE(j["count"] == 1);
  const json& p = j["points"][0];
  for (int i = 0; i < 3; ++i) CHECK(std::abs(p["location"][i].get<double>()) <= 1e-9);
  CHECK(p["kind"] == "isolated");
  CHECK(p["index"] == 1);
  CHECK(p["det_a"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(p["a"][0][0].get<double>() == doctest::Approx(0.0).scale(1).epsilon(1e-9));
  CHECK(p["a"][0][1].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p["a"][1][0].get<double>() == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("classification reports freeze the group cases") {
  const json h = json::parse(io::classify_report(*heisenberg_structure(1), 0));
  CHECK(h["case"] == "d");
  CHECK(h["all_angles"] == true);
  CHECK(h["phi_star"].empty());
  CHECK(std::abs(h["compatibility_residual"].get<double>()) <= 1e-12);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(h["jacobi_residuals"][i].get<double>()) <= 1e-12);

  const json e = json::parse(io::classify_report(*rototranslation_structure(), 7));
  CHECK(e["case"] == "c");
  CHECK(e["all_angles"] == false);
  REQUIRE(e["phi_star"].size() == 4);
  for (int k = 0; k < 4; ++k)
    CHECK(e["phi_star"][k].get<double>() ==
          doctest::Approx(k * kPi / 2).scale(1).epsilon(1e-12));
}

TEST_CASE("error envelopes and config files round through disk") {
  const std::string expected =
      "{\n"
      "  \"error\": {\n"
      "    \"kind\": \"config\",\n"
      "    \"message\": \"boom\"\n"
      "  }\n"
      "}\n";
  CHECK(io::error_report("config", "boom") == expected);

  const std::string path = "io_roundtrip_tmp.json";
  {
    std::ofstream out(path, std::ios::binary);
    out << R"json({"structure": {"preset": "rototranslation"}, "output_dir": "d"})json";
  }
  const io::RunConfig c = io::load_config(path);
  CHECK(c.built->dim() == 3);
  CHECK(c.output_dir == "d");
  std::remove(path.c_str());

  try {
    (void)io::load_config("definitely_missing_config.json");
    CHECK(false);
  } catch (const io::ConfigError& e) {
    CHECK(e.pointer() == "/");
  }
}
