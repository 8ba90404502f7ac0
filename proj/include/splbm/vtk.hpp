#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "splbm/fields.hpp"

namespace splbm {

/// Legacy ASCII STRUCTURED_POINTS snapshot with a density scalar and a
/// velocity vector over the full padded grid; nodes outside the geometry and
/// solid nodes are written as zeros.
void write_vtk(std::ostream& out, const FieldData& f, std::array<int, 3> padded_dims,
               const std::string& title = "splbm snapshot");
void write_vtk_file(const std::string& path, const FieldData& f,
                    std::array<int, 3> padded_dims,
                    const std::string& title = "splbm snapshot");

/// CSV probe export of all non-solid nodes: x,y[,z],rho,ux,uy[,uz].
void write_csv(std::ostream& out, const FieldData& f);
void write_csv_file(const std::string& path, const FieldData& f);

}  // namespace splbm
