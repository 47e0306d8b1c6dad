#include <iomanip>
#include <ostream>

#include "fvvisc/errors.hpp"
#include "fvvisc/mesh.hpp"

namespace fvvisc {

void write_vtk(std::ostream& out, const Mesh3D& mesh, std::span<const CellField> fields,
               const std::string& title) {
  constexpr int kVtkTetra = 10;
  for (const auto& field : fields) {
    if (static_cast<Index>(field.values.size()) != mesh.num_cells()) {
      throw InvalidArgument("write_vtk: field '" + field.name + "' has " +
                            std::to_string(field.values.size()) + " values, mesh has " +
                            std::to_string(mesh.num_cells()) + " cells");
    }
    if (field.name.empty() || field.name.find(' ') != std::string::npos) {
      throw InvalidArgument("write_vtk: field names must be non-empty and contain no spaces");
    }
  }

  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << "# vtk DataFile Version 2.0\n";
  out << (title.empty() ? std::string("fvvisc") : title.substr(0, 255)) << "\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  out << std::setprecision(17);
  for (const Vec3& p : mesh.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';

  out << "CELLS " << mesh.num_cells() << ' ' << 5 * mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells()) {
    out << 4 << ' ' << c.vertices[0] << ' ' << c.vertices[1] << ' ' << c.vertices[2] << ' '
        << c.vertices[3] << '\n';
  }
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (Index c = 0; c < mesh.num_cells(); ++c) out << kVtkTetra << '\n';

  if (!fields.empty()) {
    out << "CELL_DATA " << mesh.num_cells() << '\n';
    for (const auto& field : fields) {
      out << "SCALARS " << field.name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (double v : field.values) out << v << '\n';
    }
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace fvvisc
