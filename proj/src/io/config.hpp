#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/structure.hpp"
#include "flow/characteristic.hpp"
#include "surface/level.hpp"

namespace srmin::io {

/* Configuration faults carry the JSON pointer of the offending node, so
   callers can print actionable messages. */
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(std::move(pointer)) {}

  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/* Raw (string-level) description of the structure: either a named preset
   or a custom chart + frame. Exactly one source. */
struct StructureSpec {
  std::string preset;  // "heisenberg" | "rototranslation"; empty = custom
  int m = 1;           // heisenberg only
  std::vector<std::string> chart;
  std::vector<std::vector<std::string>> frame;
  std::vector<double> reference_point;  // empty = chart origin
};

struct SurfaceSpec {
  std::string f;
  double level = 0.0;
};

/* Sweep block as written in the config; expressions are in the single
   symbol s. Compiled against the flow module by make_sweep_spec. */
struct SweepBlock {
  std::array<std::string, 3> gamma;
  std::string phi0;
  std::array<double, 2> s_range{0.0, 1.0};
  std::size_t n_s = 64;
  std::array<double, 2> t_range{-1.0, 1.0};
  std::size_t n_t = 200;
  double h = 1e-3;
  std::optional<ChartBox> box;
};

struct GeodesicBlock {
  std::array<double, 3> q0{};
  double psi0 = 0.0;
  double u3 = 0.0;
  std::array<double, 2> t_range{0.0, 1.0};
  double h = 1e-3;
};

struct RunConfig {
  StructureSpec structure;
  std::optional<SurfaceSpec> surface;
  std::optional<SweepBlock> sweep;
  std::optional<GeodesicBlock> geodesic;
  std::optional<SearchBox> search_box;
  std::string output_dir = "out";

  // Built once during parsing; every expression in the config is already
  // validated against the right chart.
  std::shared_ptr<const SRStructure> built;
};

/* Parse and fully validate a JSON config: schema (unknown keys rejected,
   pointers in error messages), expression syntax, and structure
   construction. Defaults are filled (h = 1e-3, n_s = 64, n_t = 200). */
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/* The effective config: every default materialized, raw expression
   strings preserved. Parsing the result reproduces the config (and echoes
   byte-identically). Two-space indented JSON with a trailing newline. */
std::string effective_config_json(const RunConfig& config);

// Instantiate the structure described by a (validated) spec.
std::shared_ptr<const SRStructure> build_structure(const StructureSpec& spec);

// Compile the sweep block against the one-symbol chart (s).
SweepSpec make_sweep_spec(const SweepBlock& block);

// Parse the level-surface block against the structure's chart.
LevelSurface make_level_surface(const SurfaceSpec& spec, const expr::Chart& chart);

}  // namespace srmin::io
