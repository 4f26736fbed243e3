#include "srmin/srmin.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <utility>

#include "core/structure.hpp"
#include "expr/ast.hpp"
#include "expr/parser.hpp"
#include "flow/characteristic.hpp"
#include "geodesic/geodesic.hpp"
#include "io/artifacts.hpp"
#include "io/config.hpp"
#include "surface/level.hpp"

namespace {

thread_local std::string g_last_error;

srmin_status fail(srmin_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Exceptions never cross the C boundary; every entry point funnels here.
template <class Fn>
srmin_status guarded(Fn&& fn) {
  try {
    const srmin_status status = fn();
    if (status == SRMIN_OK) g_last_error.clear();
    return status;
  } catch (const srmin::io::ConfigError& e) {
    return fail(SRMIN_ERR_CONFIG, e.what());
  } catch (const srmin::expr::ParseError& e) {
    return fail(SRMIN_ERR_PARSE, e.what());
  } catch (const srmin::expr::EvalError& e) {
    return fail(SRMIN_ERR_EVAL, e.what());
  } catch (const srmin::NumericError& e) {
    return fail(SRMIN_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SRMIN_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(SRMIN_ERR_INTERNAL, e.what());
  }
}

srmin_status copy_out(const std::string& text, char** out) {
  char* buf = static_cast<char*>(std::malloc(text.size() + 1));
  if (!buf) return fail(SRMIN_ERR_INTERNAL, "out of memory");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  *out = buf;
  return SRMIN_OK;
}

bool bad(const void* p) { return p == nullptr; }

const srmin::io::RunConfig& cfg(const srmin_config* config);

}  // namespace

struct srmin_config {
  srmin::io::RunConfig run;
};

namespace {

const srmin::io::RunConfig& cfg(const srmin_config* config) { return config->run; }

/* The analyzer for the config's surface block, or a CONFIG failure when
   the block (or the search box, when required) is missing. */
srmin_status make_analyzer(const srmin::io::RunConfig& run, bool need_box,
                           std::unique_ptr<srmin::LevelSurfaceAnalyzer>& out) {
  if (!run.surface) return fail(SRMIN_ERR_CONFIG, "/surface: block required for this run");
  if (need_box && !run.search_box)
    return fail(SRMIN_ERR_CONFIG, "/search_box: block required for this run");
  if (run.built->dim() != 3)
    return fail(SRMIN_ERR_CONFIG, "/surface: requires a 3-dimensional structure");
  out = std::make_unique<srmin::LevelSurfaceAnalyzer>(
      run.built, srmin::io::make_level_surface(*run.surface, run.built->chart()));
  return SRMIN_OK;
}

}  // namespace

extern "C" {

const char* srmin_status_name(srmin_status status) {
  switch (status) {
    case SRMIN_OK: return "ok";
    case SRMIN_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case SRMIN_ERR_CONFIG: return "config";
    case SRMIN_ERR_PARSE: return "parse";
    case SRMIN_ERR_EVAL: return "eval";
    case SRMIN_ERR_NUMERIC: return "numeric";
    case SRMIN_ERR_IO: return "io";
    case SRMIN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* srmin_version(void) { return "0.1.0"; }

const char* srmin_last_error(void) { return g_last_error.c_str(); }

void srmin_string_free(char* s) { std::free(s); }

srmin_status srmin_config_parse(const char* json_text, srmin_config** out) {
  if (bad(json_text) || bad(out))
    return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto handle = std::make_unique<srmin_config>();
    handle->run = srmin::io::parse_config(json_text);
    *out = handle.release();
    return SRMIN_OK;
  });
}

srmin_status srmin_config_load(const char* path, srmin_config** out) {
  if (bad(path) || bad(out)) return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto handle = std::make_unique<srmin_config>();
    handle->run = srmin::io::load_config(path);
    *out = handle.release();
    return SRMIN_OK;
  });
}

void srmin_config_free(srmin_config* config) { delete config; }

srmin_status srmin_config_effective_json(const srmin_config* config, char** json_out) {
  if (bad(config) || bad(json_out))
    return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { return copy_out(srmin::io::effective_config_json(cfg(config)), json_out); });
}

srmin_status srmin_config_output_dir(const srmin_config* config, char** out) {
  if (bad(config) || bad(out)) return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { return copy_out(cfg(config).output_dir, out); });
}

srmin_status srmin_config_set_output_dir(srmin_config* config, const char* dir) {
  if (bad(config) || bad(dir)) return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  if (*dir == '\0') return fail(SRMIN_ERR_CONFIG, "/output_dir: must not be empty");
  return guarded([&] {
    config->run.output_dir = dir;
    return SRMIN_OK;
  });
}

srmin_status srmin_run_structure(const srmin_config* config, char** json_out) {
  if (bad(config) || bad(json_out))
    return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded(
      [&] { return copy_out(srmin::io::structure_report(*cfg(config).built), json_out); });
}

srmin_status srmin_run_residual(const srmin_config* config, uint64_t seed, size_t samples,
                                char** json_out) {
  if (bad(config) || bad(json_out))
    return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::unique_ptr<srmin::LevelSurfaceAnalyzer> an;
    const srmin_status status = make_analyzer(cfg(config), true, an);
    if (status != SRMIN_OK) return status;
    const std::size_t n = samples ? samples : 200;
    return copy_out(srmin::io::residual_report(*an, *cfg(config).search_box, seed, n),
                    json_out);
  });
}

srmin_status srmin_run_charpoints(const srmin_config* config, char** json_out) {
  if (bad(config) || bad(json_out))
    return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::unique_ptr<srmin::LevelSurfaceAnalyzer> an;
    const srmin_status status = make_analyzer(cfg(config), true, an);
    if (status != SRMIN_OK) return status;
    return copy_out(srmin::io::charpoints_report(*an, *cfg(config).search_box), json_out);
  });
}

srmin_status srmin_run_sweep(const srmin_config* config, char** obj_out, char** csv_out) {
  if (bad(config) || (bad(obj_out) && bad(csv_out)))
    return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const srmin::io::RunConfig& run = cfg(config);
    if (!run.sweep) return fail(SRMIN_ERR_CONFIG, "/sweep: block required for this run");
    const srmin::SurfaceMesh mesh =
        srmin::sweep_surface(*run.built, srmin::io::make_sweep_spec(*run.sweep));
    if (obj_out) {
      const srmin_status status = copy_out(srmin::io::obj_from_mesh(mesh), obj_out);
      if (status != SRMIN_OK) return status;
    }
    if (csv_out) {
      const srmin_status status = copy_out(srmin::io::csv_from_mesh(mesh), csv_out);
      if (status != SRMIN_OK) {
        if (obj_out) {
          srmin_string_free(*obj_out);
          *obj_out = nullptr;
        }
        return status;
      }
    }
    return SRMIN_OK;
  });
}

srmin_status srmin_run_geodesic(const srmin_config* config, char** csv_out) {
  if (bad(config) || bad(csv_out))
    return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const srmin::io::RunConfig& run = cfg(config);
    if (!run.geodesic)
      return fail(SRMIN_ERR_CONFIG, "/geodesic: block required for this run");
    const srmin::io::GeodesicBlock& b = *run.geodesic;
    srmin::GeodesicState s0;
    s0.q = b.q0;
    s0.psi = b.psi0;
    s0.u3 = b.u3;
    const srmin::GeodesicTrajectory tr =
        srmin::integrate_geodesic(*run.built, s0, b.t_range[0], b.t_range[1], b.h);
    return copy_out(srmin::io::csv_from_geodesic(tr), csv_out);
  });
}

srmin_status srmin_run_classify(const srmin_config* config, uint64_t seed, char** json_out) {
  if (bad(config) || bad(json_out))
    return fail(SRMIN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const srmin::io::RunConfig& run = cfg(config);
    if (run.built->dim() != 3)
      return fail(SRMIN_ERR_CONFIG, "/structure: classify requires a 3-dimensional structure");
    return copy_out(srmin::io::classify_report(*run.built, seed), json_out);
  });
}

}  // extern "C"
