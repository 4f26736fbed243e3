#pragma once

#include <memory>

#include "core/structure.hpp"

namespace srmin {

/* Heisenberg group H^m on the chart (x1..x2m, t):
   X_i = d/dx_i + (x_{i+m}/2) d/dt, X_{i+m} = d/dx_{i+m} - (x_i/2) d/dt. */
std::shared_ptr<const SRStructure> heisenberg_structure(int m);

/* Roto-translation group on (x, y, z):
   X_1 = cos z d/dx + sin z d/dy, X_2 = d/dz. */
std::shared_ptr<const SRStructure> rototranslation_structure();

}  // namespace srmin
