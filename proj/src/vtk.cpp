#include "vtk.hpp"

#include <cstdio>

#include "errors.hpp"

namespace pnp {

void write_vtk(const Mesh& mesh, const std::string& path,
               std::span<const std::pair<std::string, std::span<const double>>> fields) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open " + path + " for writing");

    std::fprintf(f, "# vtk DataFile Version 3.0\n");
    std::fprintf(f, "pnp box mesh level %d\n", mesh.level());
    std::fprintf(f, "ASCII\n");
    std::fprintf(f, "DATASET UNSTRUCTURED_GRID\n");
    std::fprintf(f, "POINTS %d double\n", mesh.vertex_count());
    for (const Vec3& x : mesh.vertices())
        std::fprintf(f, "%.17g %.17g %.17g\n", x[0], x[1], x[2]);

    const int nt = mesh.tet_count();
    std::fprintf(f, "CELLS %d %d\n", nt, 5 * nt);
    for (const auto& t : mesh.tets())
        std::fprintf(f, "4 %d %d %d %d\n", t[0], t[1], t[2], t[3]);
    std::fprintf(f, "CELL_TYPES %d\n", nt);
    for (int t = 0; t < nt; ++t) std::fprintf(f, "10\n");

    if (!fields.empty()) {
        std::fprintf(f, "POINT_DATA %d\n", mesh.vertex_count());
        for (const auto& [name, values] : fields) {
            if (static_cast<int>(values.size()) != mesh.vertex_count()) {
                std::fclose(f);
                throw IoError("field '" + name + "' length does not match vertex count");
            }
            std::fprintf(f, "SCALARS %s double 1\n", name.c_str());
            std::fprintf(f, "LOOKUP_TABLE default\n");
            for (double v : values) std::fprintf(f, "%.17g\n", v);
        }
    }
    if (std::fclose(f) != 0) throw IoError("error closing " + path);
}

} // namespace pnp
