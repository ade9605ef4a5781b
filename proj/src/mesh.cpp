#include "robin/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "robin/error.hpp"

namespace robin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Boundary loop of the domain, counterclockwise. For star domains theta holds the
// polar angle of each node (unwrapped, increasing).
struct BoundaryLoop {
  std::vector<Point> pts;
  std::vector<double> theta;
};

// Inverts the arc-length map of a star boundary by Newton iteration.
double theta_at_arclength(const DomainSpec& spec, double target, double guess_lo, double guess_hi, double s_lo) {
  double t = guess_lo + (guess_hi - guess_lo) * 0.5;
  double lo = guess_lo, hi = guess_hi;
  for (int it = 0; it < 60; ++it) {
    const double s = s_lo + spec.arc_length(guess_lo, t);
    const double f = s - target;
    if (std::abs(f) < 1e-14) break;
    if (f > 0) hi = t;
    else lo = t;
    double next = t - f / spec.boundary_tangent(t).norm();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  return t;
}

BoundaryLoop make_boundary(const DomainSpec& spec, double h) {
  BoundaryLoop loop;
  if (spec.is_star()) {
    const double per = spec.perimeter();
    const int n = std::max(12, int(std::ceil(per / h)));
    // Cumulative arc length on a fine grid, then Newton inside the bracketing cell.
    const int fine = std::max(4096, 16 * n);
    std::vector<double> cum(fine + 1, 0.0);
    for (int i = 0; i < fine; ++i)
      cum[i + 1] = cum[i] + spec.arc_length(kTwoPi * i / fine, kTwoPi * (i + 1) / fine);
    const double total = cum[fine];
    int cell = 0;
    for (int k = 0; k < n; ++k) {
      const double target = total * k / n;
      while (cell < fine - 1 && cum[cell + 1] < target) ++cell;
      const double t0 = kTwoPi * cell / fine, t1 = kTwoPi * (cell + 1) / fine;
      const double t = (k == 0) ? 0.0 : theta_at_arclength(spec, target, t0, t1, cum[cell]);
      loop.theta.push_back(t);
      loop.pts.push_back(spec.boundary_point(t));
    }
    return loop;
  }
  const auto& v = spec.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % v.size()];
    const int m = std::max(1, int(std::ceil((b - a).norm() / h - 1e-9)));
    for (int k = 0; k < m; ++k) loop.pts.push_back(a + (b - a) * (double(k) / m));
  }
  return loop;
}

bool inside_loop(const std::vector<Point>& poly, const Point& p) {
  bool inside = false;
  const auto n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

// Uniform grid over boundary segments for distance queries.
class SegmentGrid {
 public:
  SegmentGrid(const std::vector<Point>& poly, double cell) : poly_(poly), cell_(cell) {
    lo_ = poly[0];
    Point hi = poly[0];
    for (const auto& p : poly) {
      lo_ = lo_.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    nx_ = int((hi.x() - lo_.x()) / cell_) + 1;
    ny_ = int((hi.y() - lo_.y()) / cell_) + 1;
    cells_.resize(std::size_t(nx_) * ny_);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point& a = poly[i];
      const Point& b = poly[(i + 1) % poly.size()];
      const int x0 = cx(std::min(a.x(), b.x())), x1 = cx(std::max(a.x(), b.x()));
      const int y0 = cy(std::min(a.y(), b.y())), y1 = cy(std::max(a.y(), b.y()));
      for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y) cells_[std::size_t(y) * nx_ + x].push_back(int(i));
    }
  }

  // Distance to the boundary, exact whenever it is below `cell`.
  double distance(const Point& p) const {
    double best = 2.0 * cell_;
    const int x = cx(p.x()), y = cy(p.y());
    for (int i = std::max(0, x - 1); i <= std::min(nx_ - 1, x + 1); ++i)
      for (int j = std::max(0, y - 1); j <= std::min(ny_ - 1, y + 1); ++j)
        for (int s : cells_[std::size_t(j) * nx_ + i])
          best = std::min(best, segment_distance(p, poly_[s], poly_[(s + 1) % poly_.size()]));
    return best;
  }

 private:
  int cx(double x) const { return std::clamp(int((x - lo_.x()) / cell_), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(int((y - lo_.y()) / cell_), 0, ny_ - 1); }

  const std::vector<Point>& poly_;
  double cell_;
  Point lo_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

std::vector<std::array<int, 3>> interior_triangles(const std::vector<Point>& pts, const std::vector<Point>& poly) {
  auto all = delaunay_triangulation(pts);
  std::vector<std::array<int, 3>> kept;
  kept.reserve(all.size());
  for (const auto& t : all) {
    const Point c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    if (inside_loop(poly, c)) kept.push_back(t);
  }
  return kept;
}

bool boundary_conforms(const std::vector<std::array<int, 3>>& tris, std::size_t nb) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : tris)
    for (int i = 0; i < 3; ++i) edges.emplace(t[i], t[(i + 1) % 3]);
  for (std::size_t i = 0; i < nb; ++i)
    if (!edges.count({int(i), int((i + 1) % nb)})) return false;
  return true;
}

double triangle_min_angle(const Point& a, const Point& b, const Point& c) {
  auto ang = [](const Point& p, const Point& q, const Point& r) {
    const Point u = q - p, v = r - p;
    return std::atan2(std::abs(cross(u, v)), u.dot(v));
  };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)}) * 180.0 / std::numbers::pi;
}

}  // namespace

void Mesh::finalize() {
  areas.resize(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tr = triangles[t];
    const double a = 0.5 * cross(nodes[tr[1]] - nodes[tr[0]], nodes[tr[2]] - nodes[tr[0]]);
    if (!(a > 0.0)) throw MeshError("mesh: triangle " + std::to_string(t) + " has non-positive area");
    areas[t] = a;
  }
  const std::size_t nb = boundary_edges.size();
  if (nb < 3) throw MeshError("mesh: boundary has fewer than three edges");
  boundary_nodes.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    if (boundary_edges[i][1] != boundary_edges[(i + 1) % nb][0])
      throw MeshError("mesh: boundary edges do not form a closed loop");
    boundary_nodes[i] = boundary_edges[i][0];
  }
  boundary_flag_.assign(nodes.size(), 0);
  boundary_pos_.assign(nodes.size(), -1);
  for (std::size_t i = 0; i < nb; ++i) {
    boundary_flag_[boundary_nodes[i]] = 1;
    boundary_pos_[boundary_nodes[i]] = int(i);
  }
}

double Mesh::area() const {
  double s = 0.0;
  for (double a : areas) s += a;
  return s;
}

double Mesh::perimeter() const {
  double s = 0.0;
  for (std::size_t e = 0; e < boundary_edges.size(); ++e) s += edge_length(e);
  return s;
}

double Mesh::edge_length(std::size_t e) const {
  return (nodes[boundary_edges[e][1]] - nodes[boundary_edges[e][0]]).norm();
}

Point Mesh::edge_normal(std::size_t e) const {
  const Point d = nodes[boundary_edges[e][1]] - nodes[boundary_edges[e][0]];
  return Point(d.y(), -d.x()) / d.norm();
}

int Mesh::locate(const Point& p, std::array<double, 3>& bary) const {
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const Point& a = nodes[triangles[t][0]];
    const Point& b = nodes[triangles[t][1]];
    const Point& c = nodes[triangles[t][2]];
    const double l1 = 0.5 * cross(c - b, p - b) / areas[t];
    const double l2 = 0.5 * cross(a - c, p - c) / areas[t];
    const double l3 = 1.0 - l1 - l2;
    constexpr double eps = -1e-12;
    if (l1 >= eps && l2 >= eps && l3 >= eps) {
      bary = {l1, l2, l3};
      return int(t);
    }
  }
  return -1;
}

Mesh triangulate(const DomainSpec& spec, double h) {
  spec.validate();
  if (!(h > 0.0) || !(h < spec.diameter() / 4.0))
    throw PreconditionError("triangulate: need 0 < h < diameter / 4");

  BoundaryLoop loop = make_boundary(spec, h);
  std::vector<Point>& poly = loop.pts;

  // Split boundary edges until every one of them is a Delaunay edge.
  std::vector<Point> interior;
  std::vector<std::array<int, 3>> tris;
  std::vector<Point> pts;
  auto rebuild = [&]() {
    pts = poly;
    pts.insert(pts.end(), interior.begin(), interior.end());
    tris = interior_triangles(pts, poly);
  };
  auto filter_interior = [&](double keep_out) {
    SegmentGrid grid(poly, 1.5 * h);
    std::vector<Point> kept;
    for (const auto& p : interior)
      if (inside_loop(poly, p) && grid.distance(p) >= keep_out) kept.push_back(p);
    interior.swap(kept);
  };

  {
    Point lo = poly[0], hi = poly[0];
    for (const auto& p : poly) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double dy = h * std::sqrt(3.0) / 2.0;
    // Lattice anchored at the origin so nested or perturbed domains share nodes.
    const int j0 = int(std::floor(lo.y() / dy)) - 1, j1 = int(std::ceil(hi.y() / dy)) + 1;
    const int i0 = int(std::floor(lo.x() / h)) - 1, i1 = int(std::ceil(hi.x() / h)) + 1;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) interior.emplace_back((i + 0.5 * (j & 1)) * h, j * dy);
    filter_interior(0.6 * h);
  }

  for (int pass = 0;; ++pass) {
    rebuild();
    if (boundary_conforms(tris, poly.size())) break;
    if (pass > 8) throw MeshError("triangulate: boundary recovery failed");
    // Refine every boundary edge that is missing.
    std::set<std::pair<int, int>> edges;
    for (const auto& t : tris)
      for (int i = 0; i < 3; ++i) edges.emplace(t[i], t[(i + 1) % 3]);
    std::vector<Point> np;
    std::vector<double> nt;
    const std::size_t nb = poly.size();
    for (std::size_t i = 0; i < nb; ++i) {
      np.push_back(poly[i]);
      if (!loop.theta.empty()) nt.push_back(loop.theta[i]);
      if (edges.count({int(i), int((i + 1) % nb)})) continue;
      if (spec.is_star()) {
        const double t0 = loop.theta[i];
        const double t1 = (i + 1 < nb) ? loop.theta[i + 1] : kTwoPi;
        const double tm = 0.5 * (t0 + t1);
        np.push_back(spec.boundary_point(tm));
        nt.push_back(tm);
      } else {
        np.push_back(0.5 * (poly[i] + poly[(i + 1) % nb]));
      }
    }
    poly.swap(np);
    loop.theta.swap(nt);
    filter_interior(0.55 * h);
  }

  // Laplacian smoothing of interior nodes followed by re-triangulation.
  for (int iter = 0; iter < 6; ++iter) {
    const std::size_t nb = poly.size();
    std::vector<Point> sum(pts.size(), Point::Zero());
    std::vector<int> cnt(pts.size(), 0);
    for (const auto& t : tris)
      for (int i = 0; i < 3; ++i) {
        const int a = t[i], b = t[(i + 1) % 3];
        sum[a] += pts[b];
        ++cnt[a];
        sum[b] += pts[a];
        ++cnt[b];
      }
    SegmentGrid grid(poly, 1.5 * h);
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const std::size_t node = nb + k;
      if (cnt[node] == 0) continue;
      const Point target = sum[node] / cnt[node];
      if (inside_loop(poly, target) && grid.distance(target) >= 0.55 * h) interior[k] = target;
    }
    rebuild();
    if (!boundary_conforms(tris, nb)) throw MeshError("triangulate: smoothing broke boundary conformity");
  }

  // Drop lattice points that ended up outside every kept triangle.
  std::vector<int> used(pts.size(), 0);
  for (const auto& t : tris)
    for (int v : t) used[v] = 1;
  std::vector<int> remap(pts.size(), -1);
  Mesh mesh;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!used[i]) continue;
    remap[i] = int(mesh.nodes.size());
    mesh.nodes.push_back(pts[i]);
  }
  for (const auto& t : tris) mesh.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  const std::size_t nb = poly.size();
  for (std::size_t i = 0; i < nb; ++i) mesh.boundary_edges.push_back({remap[i], remap[(i + 1) % nb]});
  mesh.h = h;
  mesh.finalize();

  const double angle = min_angle_degrees(mesh);
  if (angle < 20.0) {
    std::ostringstream msg;
    msg << "triangulate: minimum angle " << angle << " deg below 20 deg at h = " << h;
    throw MeshError(msg.str());
  }
  return mesh;
}

Mesh deform_star_mesh(const Mesh& base, const DomainSpec& from, const DomainSpec& to) {
  if (!from.is_star() || !to.is_star()) throw PreconditionError("deform_star_mesh: star domains required");
  Mesh out = base;
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    const Point& p = base.nodes[i];
    const double r = p.norm();
    if (r == 0.0) continue;
    const double t = std::atan2(p.y(), p.x());
    if (base.is_boundary(int(i))) {
      out.nodes[i] = to.boundary_point(t);
    } else {
      out.nodes[i] = p * (to.star.radius(t) / from.star.radius(t));
    }
  }
  out.finalize();
  return out;
}

double min_angle_degrees(const Mesh& mesh) {
  double m = 180.0;
  for (const auto& t : mesh.triangles)
    m = std::min(m, triangle_min_angle(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]));
  return m;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << mesh.nodes.size() << " nodes " << mesh.triangles.size() << " triangles " << mesh.boundary_edges.size()
      << " boundary-edges\n";
  out.precision(17);
  for (const auto& p : mesh.nodes) out << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) out << e[0] << ' ' << e[1] << '\n';
}

Mesh read_mesh(std::istream& in) {
  std::size_t n = 0, t = 0, b = 0;
  std::string w1, w2, w3;
  if (!(in >> n >> w1 >> t >> w2 >> b >> w3) || w1 != "nodes" || w2 != "triangles" || w3 != "boundary-edges")
    throw MeshError("read_mesh: malformed header");
  Mesh mesh;
  mesh.nodes.resize(n);
  for (auto& p : mesh.nodes)
    if (!(in >> p.x() >> p.y())) throw MeshError("read_mesh: truncated node block");
  mesh.triangles.resize(t);
  for (auto& tr : mesh.triangles)
    if (!(in >> tr[0] >> tr[1] >> tr[2])) throw MeshError("read_mesh: truncated triangle block");
  mesh.boundary_edges.resize(b);
  for (auto& e : mesh.boundary_edges)
    if (!(in >> e[0] >> e[1])) throw MeshError("read_mesh: truncated boundary block");
  for (const auto& tr : mesh.triangles)
    for (int v : tr)
      if (v < 0 || std::size_t(v) >= n) throw MeshError("read_mesh: triangle index out of range");
  double hmax = 0.0;
  for (const auto& tr : mesh.triangles)
    for (int i = 0; i < 3; ++i) hmax = std::max(hmax, (mesh.nodes[tr[i]] - mesh.nodes[tr[(i + 1) % 3]]).norm());
  mesh.h = hmax;
  mesh.finalize();
  return mesh;
}

}  // namespace robin
