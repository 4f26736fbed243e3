#pragma once

#include <array>
#include <functional>

#include "core/structure.hpp"
#include "surface/mesh.hpp"

namespace srmin {

/* Area of the mesh measured by the maximal horizontal projection of the
   canonical volume: each cell contributes |mu(nu, e_s, e_t)| where nu is the
   horizontal unit normal, evaluated orientation-free as
   sqrt(mu(X1,e_s,e_t)^2 + mu(X2,e_s,e_t)^2) at the cell center.
   Throws NumericError if the mesh carries a d1 channel with a
   characteristic vertex. */
double horizontal_area(const SRStructure& s, const SurfaceMesh& mesh);

/* Canonical volume swept by flowing the mesh for time epsilon along
   cos(phi) X1 + sin(phi) X2 (phi frozen per vertex), divided by epsilon.
   Converges to the integral of |<nu, X^phi>| over the surface, so it is
   maximal exactly when phi follows the horizontal normal. phi comes from
   the mesh's phi channel when present, otherwise from phi_of. */
double cylinder_volume_rate(
    const SRStructure& s, const SurfaceMesh& mesh,
    const std::function<double(const std::array<double, 3>&)>& phi_of, double epsilon);

}  // namespace srmin
