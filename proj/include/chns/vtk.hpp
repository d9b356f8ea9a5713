#pragma once

#include <string>

#include "chns/assembly.hpp"

namespace chns {

struct NamedField {
    std::string name;
    const Field* field = nullptr;
};

/// Legacy ASCII unstructured-grid file with one point-data block per
/// field. Scalars come from P1 coefficients; vector fields are sampled at
/// the mesh vertices. The file is written to a temporary path and renamed
/// into place; byte output is deterministic.
void write_vtk(const Mesh& mesh, const std::vector<NamedField>& fields,
               const std::string& path);

} // namespace chns
