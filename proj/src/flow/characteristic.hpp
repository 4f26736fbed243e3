#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "core/structure.hpp"
#include "expr/ast.hpp"
#include "surface/mesh.hpp"

namespace srmin {

// Reduce an angle to [0, 2*pi).
double wrap_angle(double a);

/* Point of the extended space M x S^1: a chart point plus the direction
   angle of the horizontal field e = cos(phi) X_1 + sin(phi) X_2. */
struct ExtendedState {
  std::array<double, 3> q{};
  double phi = 0.0;  // wrapped to [0, 2*pi) in stored trajectories
};

struct ChartBox {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};

  bool contains(const std::array<double, 3>& p) const {
    for (int i = 0; i < 3; ++i)
      if (!(p[i] >= lo[i] && p[i] <= hi[i])) return false;
    return true;
  }
};

struct CharacteristicTrajectory {
  std::vector<double> t;
  std::vector<ExtendedState> states;
  bool truncated = false;  // stopped early at the chart box
};

/* Time derivative of the characteristic system at one state,
   laid out as (dq[0], dq[1], dq[2], dphi):
     dq   = cos(phi) X_1(q) + sin(phi) X_2(q)
     dphi = -cos(phi) c_12^1(q) - sin(phi) c_12^2(q). */
std::array<double, 4> characteristic_rhs(const SRStructure& s, const ExtendedState& state);

/* Fixed-step RK4 from t_begin to t_end (either order); every internal step
   is recorded, step size |t_end - t_begin|/ceil(span/h). With a box the
   integration stops before the first state outside it and the trajectory
   is marked truncated; recorded states always lie inside the box. */
CharacteristicTrajectory integrate_characteristic(
    const SRStructure& s, const ExtendedState& s0, double t_begin, double t_end,
    double h = 1e-3, const std::optional<ChartBox>& box = std::nullopt);

/* Characteristic through q0 at constant angle phi for the flat m=1 frame:
   a straight line, x = x0 + t cos(phi), y = y0 + t sin(phi), with the
   constant vertical rate z' = (y0 cos(phi) - x0 sin(phi))/2. */
std::array<double, 3> closed_form_h1(const std::array<double, 3>& q0, double phi, double t);

/* Characteristic for the rototranslation frame: z = z0 + t sin(phi) with a
   circular arc in (x, y); |sin(phi)| < 1e-12 falls back to the straight
   branch inside the plane z = z0. */
std::array<double, 3> closed_form_e2(const std::array<double, 3>& q0, double phi, double t);

/* Initial curve and sampling schedule for sweep_surface. gamma components
   and phi0 are expressions in the single symbol s (coordinate 0). */
struct SweepSpec {
  std::array<expr::ExprPtr, 3> gamma;
  expr::ExprPtr phi0;
  double s_begin = 0.0, s_end = 1.0;
  std::size_t n_s = 64;
  double t_begin = -1.0, t_end = 1.0;
  std::size_t n_t = 200;
  double h = 1e-3;
  std::optional<ChartBox> box;
};

/* Integrate one characteristic per sampled s and assemble the quad mesh,
   with per-vertex phi. When 0 lies in [t_begin, t_end] the t grid gets a
   node exactly there (mesh.t_zero_index) and that column holds gamma(s)
   bitwise. A strip that leaves the box or hits a frame singularity keeps
   its last good node value for the remaining nodes and is marked in
   strip_flags. Fold flags mark both cells of any edge across which the
   averaged-edge cell normal reverses (projection-singularity candidates). */
SurfaceMesh sweep_surface(const SRStructure& s, const SweepSpec& spec);

/* True when |c_12^1| and |c_12^2| stay within 1e-10 at 100 points sampled
   uniformly in the box; phi is then constant along every characteristic
   and the swept surface is ruled by them. */
bool ruled_condition(const SRStructure& s, const ChartBox& box, std::uint64_t seed = 0);

}  // namespace srmin
