#include "io/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "core/presets.hpp"
#include "expr/parser.hpp"

namespace srmin::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& what) {
  throw ConfigError(ptr, what);
}

void check_keys(const json& obj, const std::string& ptr,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) fail(ptr + "/" + it.key(), "unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& ptr, const char* key) {
  const json* v = find(obj, key);
  if (!v) fail(ptr, std::string("missing required key '") + key + "'");
  return *v;
}

std::string string_at(const json& v, const std::string& ptr) {
  if (!v.is_string()) fail(ptr, "expected a string");
  return v.get<std::string>();
}

double number_at(const json& v, const std::string& ptr) {
  if (!v.is_number()) fail(ptr, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(ptr, "expected a finite number");
  return d;
}

std::size_t count_at(const json& v, const std::string& ptr, std::size_t lo) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(ptr, "expected an integer");
  const long long n = v.get<long long>();
  if (n < static_cast<long long>(lo))
    fail(ptr, "must be at least " + std::to_string(lo));
  return static_cast<std::size_t>(n);
}

std::array<double, 2> range_at(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.size() != 2) fail(ptr, "expected [begin, end]");
  return {number_at(v[0], ptr + "/0"), number_at(v[1], ptr + "/1")};
}

std::array<double, 3> vec3_at(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.size() != 3) fail(ptr, "expected 3 numbers");
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = number_at(v[i], ptr + "/" + std::to_string(i));
  return out;
}

template <class Box>
Box box_at(const json& v, const std::string& ptr) {
  if (!v.is_object()) fail(ptr, "expected an object with lo and hi");
  check_keys(v, ptr, {"lo", "hi"});
  Box box;
  box.lo = vec3_at(require(v, ptr, "lo"), ptr + "/lo");
  box.hi = vec3_at(require(v, ptr, "hi"), ptr + "/hi");
  for (int i = 0; i < 3; ++i)
    if (box.lo[i] > box.hi[i]) fail(ptr, "lo must not exceed hi");
  return box;
}

StructureSpec parse_structure(const json& v) {
  const std::string ptr = "/structure";
  if (!v.is_object()) fail(ptr, "expected an object");
  StructureSpec spec;
  if (find(v, "preset")) {
    check_keys(v, ptr, {"preset", "m"});
    spec.preset = string_at(*find(v, "preset"), ptr + "/preset");
    if (const json* m = find(v, "m")) {
      if (spec.preset != "heisenberg")
        fail(ptr + "/m", "only applies to the heisenberg preset");
      spec.m = static_cast<int>(count_at(*m, ptr + "/m", 1));
    }
    return spec;
  }
  check_keys(v, ptr, {"chart", "frame", "reference_point"});
  const json& chart = require(v, ptr, "chart");
  if (!chart.is_array() || chart.empty()) fail(ptr + "/chart", "expected coordinate names");
  for (std::size_t i = 0; i < chart.size(); ++i)
    spec.chart.push_back(string_at(chart[i], ptr + "/chart/" + std::to_string(i)));

  const json& frame = require(v, ptr, "frame");
  if (!frame.is_array() || frame.size() + 1 != spec.chart.size())
    fail(ptr + "/frame", "expected " + std::to_string(spec.chart.size() - 1) +
                             " horizontal fields");
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const std::string fptr = ptr + "/frame/" + std::to_string(i);
    if (!frame[i].is_array() || frame[i].size() != spec.chart.size())
      fail(fptr, "expected " + std::to_string(spec.chart.size()) + " component expressions");
    std::vector<std::string> comps;
    for (std::size_t j = 0; j < frame[i].size(); ++j)
      comps.push_back(string_at(frame[i][j], fptr + "/" + std::to_string(j)));
    spec.frame.push_back(std::move(comps));
  }

  if (const json* ref = find(v, "reference_point")) {
    if (!ref->is_array() || ref->size() != spec.chart.size())
      fail(ptr + "/reference_point",
           "expected " + std::to_string(spec.chart.size()) + " numbers");
    for (std::size_t i = 0; i < ref->size(); ++i)
      spec.reference_point.push_back(
          number_at((*ref)[i], ptr + "/reference_point/" + std::to_string(i)));
  }
  return spec;
}

SweepBlock parse_sweep(const json& v) {
  const std::string ptr = "/sweep";
  if (!v.is_object()) fail(ptr, "expected an object");
  check_keys(v, ptr, {"gamma", "phi0", "s_range", "n_s", "t_range", "n_t", "h", "box"});
  SweepBlock b;

  const json& gamma = require(v, ptr, "gamma");
  if (!gamma.is_array() || gamma.size() != 3)
    fail(ptr + "/gamma", "expected 3 component expressions in s");
  for (int i = 0; i < 3; ++i)
    b.gamma[i] = string_at(gamma[i], ptr + "/gamma/" + std::to_string(i));
  b.phi0 = string_at(require(v, ptr, "phi0"), ptr + "/phi0");

  b.s_range = range_at(require(v, ptr, "s_range"), ptr + "/s_range");
  if (b.s_range[1] < b.s_range[0]) fail(ptr + "/s_range", "end must not precede begin");
  b.t_range = range_at(require(v, ptr, "t_range"), ptr + "/t_range");
  if (!(b.t_range[1] > b.t_range[0])) fail(ptr + "/t_range", "end must exceed begin");

  if (const json* n = find(v, "n_s")) b.n_s = count_at(*n, ptr + "/n_s", 1);
  if (const json* n = find(v, "n_t")) b.n_t = count_at(*n, ptr + "/n_t", 2);
  if (const json* h = find(v, "h")) {
    b.h = number_at(*h, ptr + "/h");
    if (!(b.h > 0.0)) fail(ptr + "/h", "must be positive");
  }
  if (const json* box = find(v, "box")) b.box = box_at<ChartBox>(*box, ptr + "/box");
  return b;
}

GeodesicBlock parse_geodesic(const json& v) {
  const std::string ptr = "/geodesic";
  if (!v.is_object()) fail(ptr, "expected an object");
  check_keys(v, ptr, {"q0", "psi0", "u3", "t_range", "h"});
  GeodesicBlock b;
  b.q0 = vec3_at(require(v, ptr, "q0"), ptr + "/q0");
  b.psi0 = number_at(require(v, ptr, "psi0"), ptr + "/psi0");
  if (const json* u = find(v, "u3")) b.u3 = number_at(*u, ptr + "/u3");
  b.t_range = range_at(require(v, ptr, "t_range"), ptr + "/t_range");
  if (const json* h = find(v, "h")) {
    b.h = number_at(*h, ptr + "/h");
    if (!(b.h > 0.0)) fail(ptr + "/h", "must be positive");
  }
  return b;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", e.what());
  }
  if (!j.is_object()) fail("/", "expected a JSON object");
  check_keys(j, "", {"structure", "surface", "sweep", "geodesic", "search_box", "output_dir"});

  RunConfig config;
  config.structure = parse_structure(require(j, "/", "structure"));
  config.built = build_structure(config.structure);

  if (const json* s = find(j, "surface")) {
    if (!s->is_object()) fail("/surface", "expected an object");
    check_keys(*s, "/surface", {"F", "level"});
    SurfaceSpec spec;
    spec.f = string_at(require(*s, "/surface", "F"), "/surface/F");
    if (const json* l = find(*s, "level")) spec.level = number_at(*l, "/surface/level");
    (void)make_level_surface(spec, config.built->chart());  // validate now
    config.surface = std::move(spec);
  }

  if (const json* w = find(j, "sweep")) {
    if (config.built->dim() != 3) fail("/sweep", "requires a 3-dimensional structure");
    SweepBlock block = parse_sweep(*w);
    (void)make_sweep_spec(block);  // validate gamma and phi0 now
    config.sweep = std::move(block);
  }

  if (const json* g = find(j, "geodesic")) {
    if (config.built->dim() != 3) fail("/geodesic", "requires a 3-dimensional structure");
    config.geodesic = parse_geodesic(*g);
  }

  if (const json* b = find(j, "search_box")) {
    if (config.built->dim() != 3) fail("/search_box", "requires a 3-dimensional structure");
    config.search_box = box_at<SearchBox>(*b, "/search_box");
  }

  if (const json* o = find(j, "output_dir")) {
    config.output_dir = string_at(*o, "/output_dir");
    if (config.output_dir.empty()) fail("/output_dir", "must not be empty");
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("/", "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string effective_config_json(const RunConfig& config) {
  json j;
  json s;
  if (!config.structure.preset.empty()) {
    s["preset"] = config.structure.preset;
    if (config.structure.preset == "heisenberg") s["m"] = config.structure.m;
  } else {
    s["chart"] = config.structure.chart;
    s["frame"] = config.structure.frame;
    if (config.structure.reference_point.empty())
      s["reference_point"] = std::vector<double>(config.structure.chart.size(), 0.0);
    else
      s["reference_point"] = config.structure.reference_point;
  }
  j["structure"] = std::move(s);

  if (config.surface)
    j["surface"] = {{"F", config.surface->f}, {"level", config.surface->level}};

  if (config.sweep) {
    const SweepBlock& b = *config.sweep;
    json w;
    w["gamma"] = b.gamma;
    w["phi0"] = b.phi0;
    w["s_range"] = b.s_range;
    w["n_s"] = b.n_s;
    w["t_range"] = b.t_range;
    w["n_t"] = b.n_t;
    w["h"] = b.h;
    if (b.box) w["box"] = {{"lo", b.box->lo}, {"hi", b.box->hi}};
    j["sweep"] = std::move(w);
  }

  if (config.geodesic) {
    const GeodesicBlock& b = *config.geodesic;
    j["geodesic"] = {{"q0", b.q0},
                     {"psi0", b.psi0},
                     {"u3", b.u3},
                     {"t_range", b.t_range},
                     {"h", b.h}};
  }

  if (config.search_box)
    j["search_box"] = {{"lo", config.search_box->lo}, {"hi", config.search_box->hi}};

  j["output_dir"] = config.output_dir;
  return j.dump(2) + "\n";
}

std::shared_ptr<const SRStructure> build_structure(const StructureSpec& spec) {
  if (!spec.preset.empty()) {
    if (spec.preset == "heisenberg") {
      try {
        return heisenberg_structure(spec.m);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("/structure/m", e.what());
      }
    }
    if (spec.preset == "rototranslation") return rototranslation_structure();
    throw ConfigError("/structure/preset", "unknown preset '" + spec.preset + "'");
  }

  expr::Chart chart;
  try {
    chart = expr::Chart(spec.chart);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/structure/chart", e.what());
  }
  std::vector<VectorFieldExpr> frame;
  for (std::size_t i = 0; i < spec.frame.size(); ++i) {
    VectorFieldExpr f;
    for (std::size_t k = 0; k < spec.frame[i].size(); ++k) {
      try {
        f.components.push_back(expr::parse_expression(spec.frame[i][k], chart));
      } catch (const expr::ParseError& e) {
        throw ConfigError(
            "/structure/frame/" + std::to_string(i) + "/" + std::to_string(k), e.what());
      }
    }
    frame.push_back(std::move(f));
  }
  SRStructure::Options opts;
  opts.reference_point = spec.reference_point;
  try {
    return SRStructure::build(std::move(chart), std::move(frame), std::move(opts));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("/structure", e.what());
  }
}

SweepSpec make_sweep_spec(const SweepBlock& block) {
  static const expr::Chart s_chart(std::vector<std::string>{"s"});
  SweepSpec spec;
  for (int i = 0; i < 3; ++i) {
    try {
      spec.gamma[i] = expr::parse_expression(block.gamma[i], s_chart);
    } catch (const expr::ParseError& e) {
      throw ConfigError("/sweep/gamma/" + std::to_string(i), e.what());
    }
  }
  try {
    spec.phi0 = expr::parse_expression(block.phi0, s_chart);
  } catch (const expr::ParseError& e) {
    throw ConfigError("/sweep/phi0", e.what());
  }
  spec.s_begin = block.s_range[0];
  spec.s_end = block.s_range[1];
  spec.n_s = block.n_s;
  spec.t_begin = block.t_range[0];
  spec.t_end = block.t_range[1];
  spec.n_t = block.n_t;
  spec.h = block.h;
  spec.box = block.box;
  return spec;
}

LevelSurface make_level_surface(const SurfaceSpec& spec, const expr::Chart& chart) {
  LevelSurface surf;
  try {
    surf.f = expr::parse_expression(spec.f, chart);
  } catch (const expr::ParseError& e) {
    throw ConfigError("/surface/F", e.what());
  }
  surf.level = spec.level;
  return surf;
}

}  // namespace srmin::io
