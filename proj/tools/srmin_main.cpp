#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "srmin/srmin.h"

namespace fs = std::filesystem;

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void emit_error(const std::string& kind, const std::string& message) {
  std::fprintf(stderr, "{\"error\": {\"kind\": \"%s\", \"message\": \"%s\"}}\n",
               json_escape(kind).c_str(), json_escape(message).c_str());
}

// 2 = configuration at fault, 3 = the computation failed.
int exit_code_for(srmin_status status) {
  return (status == SRMIN_ERR_CONFIG || status == SRMIN_ERR_PARSE) ? 2 : 3;
}

int report_status(srmin_status status) {
  emit_error(srmin_status_name(status), srmin_last_error());
  return exit_code_for(status);
}

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { srmin_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct OwnedConfig {
  srmin_config* c = nullptr;
  ~OwnedConfig() { srmin_config_free(c); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ruled surfaces, curvature residuals, and characteristic points\n"
               "of contact sub-Riemannian structures on 3-dimensional charts."};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  int m = 1;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON run configuration file");
  app.add_option("--preset", preset, "structure preset: heisenberg | rototranslation");
  CLI::Option* m_opt =
      app.add_option("--m", m, "Heisenberg index (only with --preset heisenberg)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "seed for sampled runs (residual, classify)");

  app.add_subcommand("structure", "frame, one-form, Reeb field, structural constants");
  app.add_subcommand("residual", "curvature residual at sampled surface points");
  app.add_subcommand("charpoints", "characteristic points of the surface, classified");
  app.add_subcommand("sweep", "integrate the sweep block into an OBJ/CSV patch");
  app.add_subcommand("geodesic", "integrate the geodesic block into a CSV table");
  app.add_subcommand("classify", "group case and closed-form geodesic angles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("config", e.what());
    return 2;
  }

  if (!config_path.empty() && !preset.empty()) {
    emit_error("config", "--config and --preset are mutually exclusive");
    return 2;
  }
  if (config_path.empty() && preset.empty()) {
    emit_error("config", "one of --config or --preset is required");
    return 2;
  }

  OwnedConfig config;
  srmin_status status;
  if (!config_path.empty()) {
    status = srmin_config_load(config_path.c_str(), &config.c);
  } else {
    std::string text = "{\"structure\": {\"preset\": \"" + json_escape(preset) + "\"";
    if (m_opt->count() > 0) text += ", \"m\": " + std::to_string(m);
    text += "}}";
    status = srmin_config_parse(text.c_str(), &config.c);
  }
  if (status != SRMIN_OK) return report_status(status);

  if (!out_dir.empty()) {
    status = srmin_config_set_output_dir(config.c, out_dir.c_str());
    if (status != SRMIN_OK) return report_status(status);
  }

  OwnedString dir;
  status = srmin_config_output_dir(config.c, &dir.p);
  if (status != SRMIN_OK) return report_status(status);
  const fs::path out_root = dir.str();

  std::error_code ec;
  fs::create_directories(out_root, ec);
  if (ec) {
    emit_error("io", "cannot create output directory '" + out_root.string() +
                         "': " + ec.message());
    return 3;
  }

  OwnedString echo;
  status = srmin_config_effective_json(config.c, &echo.p);
  if (status != SRMIN_OK) return report_status(status);
  if (!write_file(out_root / "effective_config.json", echo.str())) {
    emit_error("io", "cannot write effective_config.json");
    return 3;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::string artifact;  // single-file subcommands
  std::string filename;

  if (command == "structure") {
    OwnedString text;
    status = srmin_run_structure(config.c, &text.p);
    if (status != SRMIN_OK) return report_status(status);
    artifact = text.str();
    filename = "structure.json";
  } else if (command == "residual") {
    OwnedString text;
    status = srmin_run_residual(config.c, seed, 0, &text.p);
    if (status != SRMIN_OK) return report_status(status);
    artifact = text.str();
    filename = "residual.json";
  } else if (command == "charpoints") {
    OwnedString text;
    status = srmin_run_charpoints(config.c, &text.p);
    if (status != SRMIN_OK) return report_status(status);
    artifact = text.str();
    filename = "charpoints.json";
  } else if (command == "classify") {
    OwnedString text;
    status = srmin_run_classify(config.c, seed, &text.p);
    if (status != SRMIN_OK) return report_status(status);
    artifact = text.str();
    filename = "classify.json";
  } else if (command == "geodesic") {
    OwnedString text;
    status = srmin_run_geodesic(config.c, &text.p);
    if (status != SRMIN_OK) return report_status(status);
    artifact = text.str();
    filename = "geodesic.csv";
  } else {  // sweep
    OwnedString obj, csv;
    status = srmin_run_sweep(config.c, &obj.p, &csv.p);
    if (status != SRMIN_OK) return report_status(status);
    if (!write_file(out_root / "sweep.obj", obj.str()) ||
        !write_file(out_root / "sweep.csv", csv.str())) {
      emit_error("io", "cannot write sweep artifacts");
      return 3;
    }
    return 0;
  }

  if (!write_file(out_root / filename, artifact)) {
    emit_error("io", "cannot write " + filename);
    return 3;
  }
  return 0;
}
