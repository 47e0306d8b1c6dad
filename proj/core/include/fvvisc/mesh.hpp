#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fvvisc/types.hpp"

namespace fvvisc {

// ---------------------------------------------------------------------------
// One-dimensional grid on [0, 1]
// ---------------------------------------------------------------------------

/// Cell-centered grid on [0, 1]. Cell j spans [nodes[j], nodes[j+1]]; its
/// center is the midpoint of the two nodes.
class Grid1D {
 public:
  /// Validates the node list (strictly increasing, 0 first, 1 last, at least
  /// three cells) and derives centers and widths.
  explicit Grid1D(std::vector<double> nodes);

  Index num_cells() const noexcept { return static_cast<Index>(centers_.size()); }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> centers() const noexcept { return centers_; }
  std::span<const double> widths() const noexcept { return widths_; }

  double center(Index j) const { return centers_[static_cast<std::size_t>(j)]; }
  double width(Index j) const { return widths_[static_cast<std::size_t>(j)]; }

  /// Coordinate of the face between cell j and cell j+1.
  double face_between(Index j) const { return nodes_[static_cast<std::size_t>(j) + 1]; }

 private:
  std::vector<double> nodes_;
  std::vector<double> centers_;
  std::vector<double> widths_;
};

/// Uniform grid when `regular`; otherwise interior nodes are shifted from
/// their uniform positions by a seeded amount in [-perturbation/n, perturbation/n].
Grid1D generate_grid_1d(Index n, bool regular, double perturbation = 0.3, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Tetrahedral mesh
// ---------------------------------------------------------------------------

struct TetCell {
  std::array<Index, 4> vertices{};
  Vec3 centroid = Vec3::Zero();
  double volume = 0.0;
};

/// Triangular face. The scaled normal points out of the owner cell and its
/// magnitude is the face area.
struct TriFace {
  std::array<Index, 3> vertices{};
  Index owner = kNoNeighbor;
  Index neighbor = kNoNeighbor;
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  Vec3 unit_normal = Vec3::Zero();
  double area = 0.0;

  bool is_boundary() const noexcept { return neighbor == kNoNeighbor; }
};

/// Face connectivity before geometry is computed; neighbor == kNoNeighbor
/// marks a boundary face.
struct FaceConnectivity {
  std::array<Index, 3> vertices{};
  Index owner = kNoNeighbor;
  Index neighbor = kNoNeighbor;
};

/// Immutable tetrahedral mesh with precomputed geometry.
class Mesh3D {
 public:
  /// Builds faces from tet connectivity. Each tet must be positively oriented
  /// (vertex 3 on the positive side of face 0-1-2); otherwise DegenerateMesh.
  static Mesh3D from_tets(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> tets);

  /// Same, with the face list supplied explicitly. Owner/neighbor order
  /// decides normal orientation only.
  static Mesh3D from_faces(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> tets,
                           std::vector<FaceConnectivity> faces);

  Index num_vertices() const noexcept { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const noexcept { return static_cast<Index>(cells_.size()); }
  Index num_faces() const noexcept { return static_cast<Index>(faces_.size()); }

  std::span<const Vec3> vertices() const noexcept { return vertices_; }
  std::span<const TetCell> cells() const noexcept { return cells_; }
  std::span<const TriFace> faces() const noexcept { return faces_; }

  const TetCell& cell(Index j) const { return cells_[static_cast<std::size_t>(j)]; }
  const TriFace& face(Index f) const { return faces_[static_cast<std::size_t>(f)]; }

  /// The four faces of cell j.
  const std::array<Index, 4>& cell_faces(Index j) const {
    return cell_faces_[static_cast<std::size_t>(j)];
  }

  /// True for cells owning at least one boundary face.
  bool boundary_adjacent(Index j) const {
    return boundary_adjacent_[static_cast<std::size_t>(j)] != 0;
  }

  /// Outward scaled normal of face f as seen from cell j (j must touch f).
  Vec3 outward_normal(Index f, Index j) const {
    const TriFace& fc = face(f);
    return fc.owner == j ? fc.normal : Vec3(-fc.normal);
  }

  /// Cell on the other side of face f from cell j, or kNoNeighbor.
  Index across(Index f, Index j) const {
    const TriFace& fc = face(f);
    return fc.owner == j ? fc.neighbor : fc.owner;
  }

  double total_volume() const;

  /// |sum of outward scaled normals| / (sum of face areas) for cell j.
  double closure_defect(Index j) const;

  /// Connectivity view of the faces, for rebuilding a mesh with edits.
  std::vector<FaceConnectivity> face_connectivity() const;
  std::vector<std::array<Index, 4>> tet_connectivity() const;

 private:
  Mesh3D() = default;
  void compute_geometry();

  std::vector<Vec3> vertices_;
  std::vector<TetCell> cells_;
  std::vector<TriFace> faces_;
  std::vector<std::array<Index, 4>> cell_faces_;
  std::vector<std::uint8_t> boundary_adjacent_;
};

/// Perturbed cube [0, length]^3 split into n^3 hexes and 6 tets per hex.
/// Interior vertices move by at most perturbation * (length / n) per
/// coordinate; boundary vertices are fixed.
Mesh3D generate_tet_mesh(Index n, double perturbation = 0.3, std::uint64_t seed = 1,
                         double length = 0.5);

/// Signed volume of the tet (a, b, c, d); positive when d lies on the side of
/// (b - a) x (c - a).
double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// ---------------------------------------------------------------------------
// Legacy VTK export
// ---------------------------------------------------------------------------

struct CellField {
  std::string name;
  std::vector<double> values;
};

/// Writes an ASCII legacy VTK 2.0 unstructured grid of tetrahedra (cell type 10),
/// followed by optional scalar cell data.
void write_vtk(std::ostream& out, const Mesh3D& mesh, std::span<const CellField> fields = {},
               const std::string& title = "fvvisc tetrahedral mesh");

}  // namespace fvvisc
