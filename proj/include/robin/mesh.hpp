#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "robin/domain.hpp"

namespace robin {

/// Linear triangulation of a simply connected planar domain.
///
/// Triangles are counterclockwise. The boundary is a single closed loop:
/// boundary_nodes lists it counterclockwise and boundary edge i joins
/// boundary_nodes[i] to boundary_nodes[i + 1] (cyclically).
struct Mesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<int> boundary_nodes;
  std::vector<double> areas;
  double h = 0.0;

  /// Recomputes element areas and boundary bookkeeping, then checks every invariant
  /// (positive areas, closed boundary loop). Throws MeshError on violation.
  void finalize();

  std::size_t node_count() const { return nodes.size(); }
  double area() const;
  double perimeter() const;
  double edge_length(std::size_t edge) const;
  /// Outward unit normal of a boundary edge.
  Point edge_normal(std::size_t edge) const;
  bool is_boundary(int node) const { return boundary_flag_[node]; }
  /// Position of a node in boundary_nodes, or -1 for interior nodes.
  int boundary_index(int node) const { return boundary_pos_[node]; }
  /// Average element area.
  double mean_element_area() const { return area() / triangles.size(); }

  /// Triangle containing p and its barycentric coordinates; returns -1 if none.
  int locate(const Point& p, std::array<double, 3>& bary) const;

 private:
  std::vector<char> boundary_flag_;
  std::vector<int> boundary_pos_;
};

/// Boundary-conforming Delaunay triangulation with target edge length h.
/// Boundary nodes lie on the analytic boundary (star) or polygon edges; star
/// boundaries are equidistributed in arc length. Interior nodes come from a
/// hexagonal lattice, relaxed by Laplacian smoothing. Throws MeshError when the
/// minimum angle stays below 20 degrees.
Mesh triangulate(const DomainSpec& spec, double h);

/// Maps a mesh of the star domain `from` onto the star domain `to` by the radial
/// stretch x -> x rho_to(theta) / rho_from(theta). Topology is unchanged, so
/// quantities computed on the result vary smoothly with the target boundary.
Mesh deform_star_mesh(const Mesh& base, const DomainSpec& from, const DomainSpec& to);

double min_angle_degrees(const Mesh& mesh);

/// Delaunay triangulation of a point set (Bowyer-Watson); counterclockwise triangles.
std::vector<std::array<int, 3>> delaunay_triangulation(std::span<const Point> points);

/// Plain-text format:
///   <N> nodes <T> triangles <B> boundary-edges
///   N lines "x y", T lines "i j k", B lines "a b" (0-based indices).
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

}  // namespace robin
