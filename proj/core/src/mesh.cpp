#include "fvvisc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fvvisc/errors.hpp"
#include "random.hpp"

namespace fvvisc {

// ---------------------------------------------------------------------------
// Grid1D
// ---------------------------------------------------------------------------

Grid1D::Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 4) {
    throw InvalidArgument("Grid1D: need at least 3 cells (4 nodes), got " +
                          std::to_string(nodes_.size()) + " nodes");
  }
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0) {
    throw InvalidArgument("Grid1D: nodes must start at 0 and end at 1");
  }
  const std::size_t n = nodes_.size() - 1;
  centers_.resize(n);
  widths_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(nodes_[j + 1] > nodes_[j])) {
      throw InvalidArgument("Grid1D: nodes must be strictly increasing (node " +
                            std::to_string(j + 1) + ")");
    }
    centers_[j] = 0.5 * (nodes_[j] + nodes_[j + 1]);
    widths_[j] = nodes_[j + 1] - nodes_[j];
  }
}

Grid1D generate_grid_1d(Index n, bool regular, double perturbation, std::uint64_t seed) {
  if (n < 3) {
    throw InvalidArgument("generate_grid_1d: n must be >= 3, got " + std::to_string(n));
  }
  if (!(perturbation >= 0.0 && perturbation < 0.5)) {
    throw InvalidArgument("generate_grid_1d: perturbation must lie in [0, 0.5)");
  }
  const auto cells = static_cast<std::size_t>(n);
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> nodes(cells + 1);
  detail::SplitMix64 rng(detail::mix_seed(seed, cells));
  nodes.front() = 0.0;
  nodes.back() = 1.0;
  for (std::size_t i = 1; i < cells; ++i) {
    const double base = static_cast<double>(i) * h;
    nodes[i] = regular ? base : base + perturbation * h * rng.symmetric();
  }
  return Grid1D(std::move(nodes));
}

// ---------------------------------------------------------------------------
// Mesh3D
// ---------------------------------------------------------------------------

double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

namespace {

// Local faces of a tet, each listed opposite vertex i.
constexpr std::array<std::array<int, 3>, 4> kTetFaces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

std::vector<FaceConnectivity> derive_faces(std::span<const std::array<Index, 4>> tets) {
  struct Entry {
    std::array<Index, 3> key;
    std::array<Index, 3> verts;
    Index cell;
  };
  std::vector<Entry> entries;
  entries.reserve(tets.size() * 4);
  for (std::size_t c = 0; c < tets.size(); ++c) {
    for (const auto& lf : kTetFaces) {
      std::array<Index, 3> verts{tets[c][static_cast<std::size_t>(lf[0])],
                                 tets[c][static_cast<std::size_t>(lf[1])],
                                 tets[c][static_cast<std::size_t>(lf[2])]};
      std::array<Index, 3> key = verts;
      std::sort(key.begin(), key.end());
      entries.push_back({key, verts, static_cast<Index>(c)});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.cell < b.cell;
  });

  std::vector<FaceConnectivity> faces;
  faces.reserve(entries.size() / 2 + tets.size());
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    if (j - i > 2) {
      throw DegenerateMesh(entries[i].cell, "Mesh3D: face shared by more than two cells at cell " +
                                                std::to_string(entries[i].cell));
    }
    FaceConnectivity fc;
    fc.vertices = entries[i].verts;
    fc.owner = entries[i].cell;
    fc.neighbor = (j - i == 2) ? entries[i + 1].cell : kNoNeighbor;
    faces.push_back(fc);
    i = j;
  }
  return faces;
}

}  // namespace

Mesh3D Mesh3D::from_tets(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> tets) {
  auto faces = derive_faces(tets);
  return from_faces(std::move(vertices), std::move(tets), std::move(faces));
}

Mesh3D Mesh3D::from_faces(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> tets,
                          std::vector<FaceConnectivity> faces) {
  Mesh3D mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.cells_.resize(tets.size());
  for (std::size_t c = 0; c < tets.size(); ++c) {
    for (Index v : tets[c]) {
      if (v < 0 || v >= mesh.num_vertices()) {
        throw InvalidArgument("Mesh3D: cell " + std::to_string(c) + " references vertex " +
                              std::to_string(v) + " out of range");
      }
    }
    mesh.cells_[c].vertices = tets[c];
  }
  mesh.faces_.resize(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& fc = faces[f];
    if (fc.owner < 0 || fc.owner >= mesh.num_cells() || fc.neighbor >= mesh.num_cells() ||
        fc.neighbor == fc.owner) {
      throw InvalidArgument("Mesh3D: face " + std::to_string(f) + " has invalid owner/neighbor");
    }
    mesh.faces_[f].vertices = fc.vertices;
    mesh.faces_[f].owner = fc.owner;
    mesh.faces_[f].neighbor = fc.neighbor;
  }
  mesh.compute_geometry();
  return mesh;
}

void Mesh3D::compute_geometry() {
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto& cell = cells_[c];
    const Vec3& a = vertices_[static_cast<std::size_t>(cell.vertices[0])];
    const Vec3& b = vertices_[static_cast<std::size_t>(cell.vertices[1])];
    const Vec3& p = vertices_[static_cast<std::size_t>(cell.vertices[2])];
    const Vec3& d = vertices_[static_cast<std::size_t>(cell.vertices[3])];
    cell.volume = signed_tet_volume(a, b, p, d);
    if (!(cell.volume > 0.0)) {
      std::ostringstream msg;
      msg << "Mesh3D: cell " << c << " has nonpositive volume " << cell.volume;
      throw DegenerateMesh(static_cast<Index>(c), msg.str());
    }
    cell.centroid = 0.25 * (a + b + p + d);
  }

  cell_faces_.assign(cells_.size(), {kNoNeighbor, kNoNeighbor, kNoNeighbor, kNoNeighbor});
  std::vector<int> filled(cells_.size(), 0);
  auto attach = [&](Index c, Index f) {
    auto& slot = filled[static_cast<std::size_t>(c)];
    if (slot >= 4) {
      throw DegenerateMesh(c, "Mesh3D: cell " + std::to_string(c) + " has more than 4 faces");
    }
    cell_faces_[static_cast<std::size_t>(c)][static_cast<std::size_t>(slot++)] = f;
  };

  for (std::size_t f = 0; f < faces_.size(); ++f) {
    auto& face = faces_[f];
    const Vec3& a = vertices_[static_cast<std::size_t>(face.vertices[0])];
    const Vec3& b = vertices_[static_cast<std::size_t>(face.vertices[1])];
    const Vec3& p = vertices_[static_cast<std::size_t>(face.vertices[2])];
    face.centroid = (a + b + p) / 3.0;
    face.normal = 0.5 * (b - a).cross(p - a);
    if ((face.centroid - cell(face.owner).centroid).dot(face.normal) < 0.0) {
      face.normal = -face.normal;
      std::swap(face.vertices[1], face.vertices[2]);
    }
    face.area = face.normal.norm();
    if (!(face.area > 0.0)) {
      throw DegenerateMesh(face.owner, "Mesh3D: zero-area face " + std::to_string(f) +
                                           " on cell " + std::to_string(face.owner));
    }
    face.unit_normal = face.normal / face.area;
    attach(face.owner, static_cast<Index>(f));
    if (!face.is_boundary()) attach(face.neighbor, static_cast<Index>(f));
  }

  boundary_adjacent_.assign(cells_.size(), 0);
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (filled[c] != 4) {
      throw DegenerateMesh(static_cast<Index>(c), "Mesh3D: cell " + std::to_string(c) +
                                                      " has " + std::to_string(filled[c]) +
                                                      " faces, expected 4");
    }
  }
  for (const auto& face : faces_) {
    if (face.is_boundary()) boundary_adjacent_[static_cast<std::size_t>(face.owner)] = 1;
  }
}

double Mesh3D::total_volume() const {
  return std::accumulate(cells_.begin(), cells_.end(), 0.0,
                         [](double s, const TetCell& c) { return s + c.volume; });
}

double Mesh3D::closure_defect(Index j) const {
  Vec3 sum = Vec3::Zero();
  double area = 0.0;
  for (Index f : cell_faces(j)) {
    sum += outward_normal(f, j);
    area += face(f).area;
  }
  return sum.norm() / area;
}

std::vector<FaceConnectivity> Mesh3D::face_connectivity() const {
  std::vector<FaceConnectivity> out(faces_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    out[f] = {faces_[f].vertices, faces_[f].owner, faces_[f].neighbor};
  }
  return out;
}

std::vector<std::array<Index, 4>> Mesh3D::tet_connectivity() const {
  std::vector<std::array<Index, 4>> out(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) out[c] = cells_[c].vertices;
  return out;
}

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

Mesh3D generate_tet_mesh(Index n, double perturbation, std::uint64_t seed, double length) {
  if (n < 2) {
    throw InvalidArgument("generate_tet_mesh: n must be >= 2, got " + std::to_string(n));
  }
  if (!(perturbation >= 0.0 && perturbation < 0.5)) {
    throw InvalidArgument("generate_tet_mesh: perturbation must lie in [0, 0.5)");
  }
  if (!(length > 0.0)) {
    throw InvalidArgument("generate_tet_mesh: length must be positive");
  }
  const Index np = n + 1;
  const double h = length / static_cast<double>(n);
  auto vid = [np](Index i, Index j, Index k) { return i + np * (j + np * k); };

  std::vector<Vec3> base(static_cast<std::size_t>(np) * np * np);
  std::vector<Vec3> offset(base.size(), Vec3::Zero());
  detail::SplitMix64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(n)));
  for (Index k = 0; k < np; ++k) {
    for (Index j = 0; j < np; ++j) {
      for (Index i = 0; i < np; ++i) {
        const auto v = static_cast<std::size_t>(vid(i, j, k));
        base[v] = Vec3(i * h, j * h, k * h);
        const bool interior = i > 0 && i < n && j > 0 && j < n && k > 0 && k < n;
        const Vec3 draw(rng.symmetric(), rng.symmetric(), rng.symmetric());
        if (interior) offset[v] = perturbation * h * draw;
      }
    }
  }

  // Kuhn split: every tet follows a monotone path from corner 000 to 111, so
  // neighboring hexes agree on their shared face diagonals.
  constexpr std::array<std::array<int, 3>, 6> kPerms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<Index, 4>> tets;
  tets.reserve(static_cast<std::size_t>(6) * n * n * n);
  for (Index k = 0; k < n; ++k) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        for (const auto& perm : kPerms) {
          std::array<Index, 3> corner{i, j, k};
          std::array<Index, 4> tet{};
          tet[0] = vid(corner[0], corner[1], corner[2]);
          for (int s = 0; s < 3; ++s) {
            ++corner[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
            tet[static_cast<std::size_t>(s) + 1] = vid(corner[0], corner[1], corner[2]);
          }
          const auto& a = base[static_cast<std::size_t>(tet[0])];
          const auto& b = base[static_cast<std::size_t>(tet[1])];
          const auto& c = base[static_cast<std::size_t>(tet[2])];
          const auto& d = base[static_cast<std::size_t>(tet[3])];
          if (signed_tet_volume(a, b, c, d) < 0.0) std::swap(tet[1], tet[2]);
          tets.push_back(tet);
        }
      }
    }
  }

  // Shrink the displacement of any vertex touching a poorly shaped tet until
  // every tet keeps a fraction of its unperturbed volume.
  const double min_volume = 0.1 * h * h * h / 6.0;
  std::vector<Vec3> coords(base.size());
  for (int round = 0; round < 60; ++round) {
    for (std::size_t v = 0; v < base.size(); ++v) coords[v] = base[v] + offset[v];
    std::vector<std::uint8_t> shrink(base.size(), 0);
    bool any = false;
    for (const auto& t : tets) {
      const double vol = signed_tet_volume(
          coords[static_cast<std::size_t>(t[0])], coords[static_cast<std::size_t>(t[1])],
          coords[static_cast<std::size_t>(t[2])], coords[static_cast<std::size_t>(t[3])]);
      if (vol < min_volume) {
        any = true;
        for (Index v : t) shrink[static_cast<std::size_t>(v)] = 1;
      }
    }
    if (!any) break;
    for (std::size_t v = 0; v < base.size(); ++v) {
      if (shrink[v]) offset[v] *= 0.5;
    }
  }
  for (std::size_t v = 0; v < base.size(); ++v) coords[v] = base[v] + offset[v];

  return Mesh3D::from_tets(std::move(coords), std::move(tets));
}

}  // namespace fvvisc
