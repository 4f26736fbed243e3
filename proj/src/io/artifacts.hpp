#pragma once

#include <cstdint>
#include <string>

#include "geodesic/geodesic.hpp"
#include "surface/level.hpp"
#include "surface/mesh.hpp"

namespace srmin::io {

/* Wavefront OBJ for a structured quad mesh: vertices row-major in s, one
   quad per cell, counter-clockwise in (s, t). Coordinates print with 17
   significant digits, so identical meshes produce identical bytes. */
std::string obj_from_mesh(const SurfaceMesh& mesh);

/* Per-vertex CSV in vertex order. Columns s,t,x,y,z and phi when the
   channel is present; floats in shortest round-trip form. */
std::string csv_from_mesh(const SurfaceMesh& mesh);

// Per-node CSV (t,x,y,z,psi,u3) of a geodesic trajectory.
std::string csv_from_geodesic(const GeodesicTrajectory& tr);

/* Chart, frame, normalized one-form, Reeb field, and the structural
   constants at the reference point, as indented JSON. */
std::string structure_report(const SRStructure& s);

/* Draw points in `box`, Newton-project them onto the level set along its
   chart gradient, keep the ones clear of characteristic points
   (d1 >= 0.1), and report the curvature residual at each. Sampling is
   fully determined by the seed. */
std::string residual_report(const LevelSurfaceAnalyzer& an, const SearchBox& box,
                            std::uint64_t seed, std::size_t samples = 200);

// Characteristic points in `box` with their classification.
std::string charpoints_report(const LevelSurfaceAnalyzer& an, const SearchBox& box);

/* Group case, closed-form geodesic angles, and the residuals backing the
   constant-tensor assumption. */
std::string classify_report(const SRStructure& s, std::uint64_t seed);

// Machine-readable error envelope: {"error": {"kind", "message"}}.
std::string error_report(const std::string& kind, const std::string& message);

}  // namespace srmin::io
