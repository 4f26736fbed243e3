#include "io/artifacts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/sampling.hpp"
#include "expr/ast.hpp"

namespace srmin::io {

namespace {

using nlohmann::json;

}  // namespace

std::string obj_from_mesh(const SurfaceMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertex_count() * 72 + mesh.cell_count() * 32);
  char line[160];
  for (const auto& p : mesh.vertices) {
    std::snprintf(line, sizeof line, "v %.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out += line;
  }
  for (std::size_t i = 0; i + 1 < mesh.n_s; ++i)
    for (std::size_t j = 0; j + 1 < mesh.n_t; ++j) {
      std::snprintf(line, sizeof line, "f %zu %zu %zu %zu\n", mesh.idx(i, j) + 1,
                    mesh.idx(i + 1, j) + 1, mesh.idx(i + 1, j + 1) + 1,
                    mesh.idx(i, j + 1) + 1);
      out += line;
    }
  return out;
}

std::string csv_from_mesh(const SurfaceMesh& mesh) {
  const bool has_phi = !mesh.phi.empty();
  std::string out = has_phi ? "s,t,x,y,z,phi\n" : "s,t,x,y,z\n";
  for (std::size_t i = 0; i < mesh.n_s; ++i)
    for (std::size_t j = 0; j < mesh.n_t; ++j) {
      const auto& p = mesh.at(i, j);
      out += expr::format_double(mesh.svals[i]);
      out += ',';
      out += expr::format_double(mesh.tvals[j]);
      out += ',';
      out += expr::format_double(p[0]);
      out += ',';
      out += expr::format_double(p[1]);
      out += ',';
      out += expr::format_double(p[2]);
      if (has_phi) {
        out += ',';
        out += expr::format_double(mesh.phi[mesh.idx(i, j)]);
      }
      out += '\n';
    }
  return out;
}

std::string csv_from_geodesic(const GeodesicTrajectory& tr) {
  std::string out = "t,x,y,z,psi,u3\n";
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    const GeodesicState& st = tr.states[k];
    out += expr::format_double(tr.t[k]);
    out += ',';
    out += expr::format_double(st.q[0]);
    out += ',';
    out += expr::format_double(st.q[1]);
    out += ',';
    out += expr::format_double(st.q[2]);
    out += ',';
    out += expr::format_double(st.psi);
    out += ',';
    out += expr::format_double(st.u3);
    out += '\n';
  }
  return out;
}

std::string structure_report(const SRStructure& s) {
  const expr::Chart& chart = s.chart();
  json j;
  j["chart"] = chart.names();
  j["dim"] = s.dim();
  j["orientation"] = s.orientation();
  j["reference_point"] =
      std::vector<double>(s.reference_point().begin(), s.reference_point().end());

  json frame = json::array();
  for (std::size_t i = 0; i < s.frame_size(); ++i) {
    json f = json::array();
    for (const auto& c : s.frame_field(i).components)
      f.push_back(expr::to_string(c, chart));
    frame.push_back(std::move(f));
  }
  j["frame"] = std::move(frame);

  json omega = json::array();
  for (const auto& c : s.one_form()) omega.push_back(expr::to_string(c, chart));
  j["omega"] = std::move(omega);

  json reeb = json::array();
  for (const auto& c : s.reeb_field().components)
    reeb.push_back(expr::to_string(c, chart));
  j["reeb"] = std::move(reeb);

  const StructuralConstants c = s.structural_constants(s.reference_point());
  json table = json::array();
  for (std::size_t a = 0; a < c.n; ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < c.n; ++b) {
      json col = json::array();
      for (std::size_t k = 0; k < c.n; ++k) col.push_back(c.at(a, b, k));
      row.push_back(std::move(col));
    }
    table.push_back(std::move(row));
  }
  j["constants"] = std::move(table);
  return j.dump(2) + "\n";
}

std::string residual_report(const LevelSurfaceAnalyzer& an, const SearchBox& box,
                            std::uint64_t seed, std::size_t samples) {
  const expr::ExprPtr& f = an.surface().f;
  const std::array<expr::ExprPtr, 3> grad = {expr::differentiate(f, 0),
                                             expr::differentiate(f, 1),
                                             expr::differentiate(f, 2)};
  SampleRng rng(seed);
  json rows = json::array();
  double worst = 0.0;
  std::size_t kept = 0;

  const std::size_t budget = samples * 50;
  for (std::size_t attempt = 0; attempt < budget && kept < samples; ++attempt) {
    std::array<double, 3> q{};
    for (int i = 0; i < 3; ++i) q[i] = rng.uniform(box.lo[i], box.hi[i]);
    try {
      bool on_surface = false;
      for (int it = 0; it < 50; ++it) {
        const double r = an.level_value(q);
        if (std::abs(r) <= 1e-12) {
          on_surface = true;
          break;
        }
        std::array<double, 3> g{};
        double g2 = 0.0;
        for (int i = 0; i < 3; ++i) {
          g[i] = expr::evaluate(grad[i], q);
          g2 += g[i] * g[i];
        }
        if (g2 < 1e-16) break;  // stationary level function, cannot project
        for (int i = 0; i < 3; ++i) q[i] -= r * g[i] / g2;
      }
      if (!on_surface) continue;
      bool inside = true;
      for (int i = 0; i < 3; ++i)
        inside = inside && q[i] >= box.lo[i] && q[i] <= box.hi[i];
      if (!inside) continue;
      const double d1 = an.d1(q);
      if (d1 < 0.1) continue;  // too close to a characteristic point

      const double res = an.minimal_residual(q);
      worst = std::max(worst, std::abs(res));
      rows.push_back({{"q", q}, {"d1", d1}, {"residual", res}});
      ++kept;
    } catch (const expr::EvalError&) {
      continue;  // sample outside the domain of F
    }
  }

  json j;
  j["level"] = an.surface().level;
  j["count"] = kept;
  j["max_abs_residual"] = worst;
  j["samples"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string charpoints_report(const LevelSurfaceAnalyzer& an, const SearchBox& box) {
  json pts = json::array();
  for (const auto& p : an.find_characteristic_points(box)) {
    const CharPointReport rep = an.classify_characteristic_point(p);
    json r;
    r["location"] = rep.location;
    r["a"] = rep.a;
    r["det_a"] = rep.det_a;
    r["trace_a"] = rep.trace_a;
    r["kind"] = rep.kind == CharPointReport::Kind::Isolated
                    ? "isolated"
                    : "singular-curve-candidate";
    if (rep.index) r["index"] = *rep.index;
    pts.push_back(std::move(r));
  }
  json j;
  j["count"] = pts.size();
  j["points"] = std::move(pts);
  return j.dump(2) + "\n";
}

std::string classify_report(const SRStructure& s, std::uint64_t seed) {
  const ClassificationReport rep = classify_group_case(s, seed);
  json j;
  j["case"] = std::string(1, group_case_label(rep.group_case));
  j["all_angles"] = rep.phi.all_angles;
  j["phi_star"] = rep.phi.angles;
  j["compatibility_residual"] = rep.compatibility_residual;
  j["jacobi_residuals"] = rep.jacobi;
  return j.dump(2) + "\n";
}

std::string error_report(const std::string& kind, const std::string& message) {
  json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  return j.dump(2) + "\n";
}

}  // namespace srmin::io
