#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/structure.hpp"
#include "flow/characteristic.hpp"

namespace srmin {

/* State of the normal extremal system on the unit-covector cylinder:
   u1 = cos(psi), u2 = sin(psi) are the horizontal covector components,
   u3 the transverse one. */
struct GeodesicState {
  std::array<double, 3> q{};
  double psi = 0.0;
  double u3 = 0.0;
};

struct GeodesicTrajectory {
  std::vector<double> t;
  std::vector<GeodesicState> states;  // psi stored wrapped to [0, 2*pi)
  bool truncated = false;
};

/* Time derivative (dq[0..2], dpsi, du3) at a state:
     dq   = u1 X_1 + u2 X_2
     dpsi = -u3 - (u1 c_12^1 + u2 c_12^2)
     du3  = c_31^1 (u1^2 - u2^2) + (c_32^1 + c_31^2) u1 u2
   with the structural constants evaluated at q. */
std::array<double, 5> geodesic_rhs(const SRStructure& s, const GeodesicState& state);

/* Classic fixed-step RK4, step size h, from t_begin to t_end (either
   direction). When a box is given the trajectory stops at the last
   recorded state inside it and is marked truncated. */
GeodesicTrajectory integrate_geodesic(const SRStructure& s, const GeodesicState& s0,
                                      double t_begin, double t_end, double h = 1e-3,
                                      const std::optional<ChartBox>& box = std::nullopt);

/* Sampled curve point with its chart-space velocity. */
struct PathSample {
  double t = 0.0;
  std::array<double, 3> q{};
  std::array<double, 3> v{};
};

/* Samples of a geodesic with velocities rebuilt from the frame. */
std::vector<PathSample> geodesic_path(const SRStructure& s, const GeodesicTrajectory& tr);

/* Trapezoidal arc length in the frame metric. Every velocity must
   decompose in the canonical frame with |transverse part| <= 1e-6,
   otherwise the path is not horizontal and a NumericError is thrown. */
double sr_length(const SRStructure& s, std::span<const PathSample> path);

/* Left side of the condition for the characteristic with direction angle
   phi through q to be a geodesic:
     c_31^1 cos(2 phi) + (c_32^1 + c_31^2)/2 sin(2 phi). */
double angle_condition_residual(const SRStructure& s, std::span<const double> q, double phi);

struct PhiStar {
  bool all_angles = false;     // condition degenerates: every angle works
  std::vector<double> angles;  // sorted, in [0, 2*pi); empty when all_angles
};

/* Angles solving the condition above for a constant structural tensor,
   and the pointwise version evaluated at q. */
PhiStar phi_star(const StructuralConstants& c);
PhiStar phi_star(const SRStructure& s, std::span<const double> q);

enum class GroupCase { A, B, C, D };

char group_case_label(GroupCase c);  // 'a'..'d'

struct ClassificationReport {
  GroupCase group_case = GroupCase::D;
  PhiStar phi;                          // directions whose characteristics are geodesic
  double compatibility_residual = 0.0;  // structural-constant identity for cases a/b
  std::array<double, 3> jacobi{};       // Jacobi identity residuals from the group gate
};

/* Decision table on a constant structural tensor. Coefficients count as
   zero within 1e-10; cases a/b are driven by c_12, cases c/d by the
   angle condition. compatibility_residual reports
     c_13^1 ((c_12^1)^2 - (c_12^2)^2) + c_12^1 c_12^2 (c_23^1 + c_13^2),
   which vanishes whenever the tensor comes from a group structure. */
ClassificationReport classify_from_constants(const StructuralConstants& c);

/* As above for a left-invariant structure. The constants are verified
   position independent through jacobi_residuals(seed); a structure with
   varying constants throws NumericError. */
ClassificationReport classify_group_case(const SRStructure& s, std::uint64_t seed = 0);

struct GeodesicCheck {
  bool geodesic = false;
  double max_u3_source = 0.0;    // sup |du3 right side| along the curve
  double max_angle_defect = 0.0; // sup |c_12 term + dphi/dt| along the curve
};

/* Decide whether a characteristic polyline is a geodesic by identifying
   psi with phi and u3 with 0: both defects must stay within 1e-8.
   phi is unwrapped and differentiated on the recorded grid (5-point
   stencils inside, 3-point next to the ends; the two end nodes carry no
   angle-defect estimate). */
GeodesicCheck is_characteristic_geodesic(const SRStructure& s,
                                         const CharacteristicTrajectory& tr);

}  // namespace srmin
