#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mesh.hpp"

namespace pnp {

// Legacy ASCII VTK export (UNSTRUCTURED_GRID, cell type 10) with optional
// per-vertex scalar fields. Throws IoError if the file cannot be written.
void write_vtk(const Mesh& mesh, const std::string& path,
               std::span<const std::pair<std::string, std::span<const double>>> fields = {});

} // namespace pnp
