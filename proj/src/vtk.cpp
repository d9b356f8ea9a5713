#include "chns/vtk.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chns {

namespace {

void append_number(std::string& out, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

void write_vtk(const Mesh& mesh, const std::vector<NamedField>& fields,
               const std::string& path) {
    const int nv = mesh.n_vertices();
    std::string out;
    out.reserve(static_cast<size_t>(nv) * 64);
    out += "# vtk DataFile Version 3.0\nphase field snapshot\nASCII\n";
    out += "DATASET UNSTRUCTURED_GRID\n";
    out += "POINTS " + std::to_string(nv) + " double\n";
    for (const Vec2& v : mesh.vertices()) {
        append_number(out, v.x);
        out += ' ';
        append_number(out, v.y);
        out += " 0\n";
    }
    const int nt = mesh.n_triangles();
    out += "CELLS " + std::to_string(nt) + " " + std::to_string(4 * nt) + "\n";
    for (const auto& t : mesh.triangles()) {
        out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
               std::to_string(t[2]) + "\n";
    }
    out += "CELL_TYPES " + std::to_string(nt) + "\n";
    for (int t = 0; t < nt; ++t) out += "5\n";

    out += "POINT_DATA " + std::to_string(nv) + "\n";
    for (const NamedField& nf : fields) {
        if (!nf.field || !nf.field->dofmap) {
            throw std::invalid_argument("write_vtk: field '" + nf.name + "' is empty");
        }
        const ElementKind kind = nf.field->dofmap->kind();
        if (kind == ElementKind::P2_vector2) {
            out += "VECTORS " + nf.name + " double\n";
            // Node ordering puts the vertices first; components interleaved.
            for (int i = 0; i < nv; ++i) {
                append_number(out, nf.field->coeffs[2 * i]);
                out += ' ';
                append_number(out, nf.field->coeffs[2 * i + 1]);
                out += " 0\n";
            }
        } else {
            out += "SCALARS " + nf.name + " double 1\nLOOKUP_TABLE default\n";
            for (int i = 0; i < nv; ++i) {
                append_number(out, nf.field->coeffs[i]);
                out += '\n';
            }
        }
    }

    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("write_vtk: cannot open " + tmp);
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        if (!f) throw std::runtime_error("write_vtk: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace chns
