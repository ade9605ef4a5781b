#include <algorithm>
#include <cmath>
#include <numeric>

#include "robin/error.hpp"
#include "robin/mesh.hpp"

namespace robin {

namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[i] lies across the edge opposite v[i]
  bool alive = true;
};

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when d lies inside the circumcircle of the counterclockwise triangle abc.
long double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const long double adx = a.x() - d.x(), ady = a.y() - d.y();
  const long double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const long double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

class Triangulator {
 public:
  explicit Triangulator(std::vector<Point> pts) : pts_(std::move(pts)) {}

  std::vector<std::array<int, 3>> run(std::size_t real_count) {
    const std::size_t n = real_count;
    Point lo = pts_[0], hi = pts_[0];
    for (std::size_t i = 0; i < n; ++i) {
      lo = lo.cwiseMin(pts_[i]);
      hi = hi.cwiseMax(pts_[i]);
    }
    const Point c = 0.5 * (lo + hi);
    const double span = std::max((hi - lo).maxCoeff(), 1e-12);
    const double big = 20.0 * span;
    pts_.push_back(c + Point(-big, -big));
    pts_.push_back(c + Point(big, -big));
    pts_.push_back(c + Point(0.0, big));
    tris_.push_back({{int(n), int(n + 1), int(n + 2)}, {-1, -1, -1}, true});
    mark_.assign(1, 0);

    // Insertion along a serpentine sweep keeps point location walks short.
    const int bins = std::max(1, int(std::sqrt(double(n) / 2.0)));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto bin_of = [&](int i) { return std::min(bins - 1, int((pts_[i].y() - lo.y()) / span * bins)); };
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const int ba = bin_of(a), bb = bin_of(b);
      if (ba != bb) return ba < bb;
      return (ba % 2 == 0) ? pts_[a].x() < pts_[b].x() : pts_[a].x() > pts_[b].x();
    });
    for (int idx : order) insert(idx);

    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= int(n) || t.v[1] >= int(n) || t.v[2] >= int(n)) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  int locate(const Point& p) {
    int t = last_;
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tr = tris_[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + rot_++) % 3;
        if (side(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], p) < 0.0 && tr.nb[i] >= 0) {
          t = tr.nb[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const Tri& tr = tris_[i];
      if (!tr.alive) continue;
      if (side(tr.v[0], tr.v[1], p) >= 0 && side(tr.v[1], tr.v[2], p) >= 0 && side(tr.v[2], tr.v[0], p) >= 0)
        return int(i);
    }
    throw MeshError("delaunay: point location failed");
  }

  // Orientation of p against the directed edge (a, b), evaluated in a canonical
  // vertex order so that the two sides of an edge never disagree.
  double side(int a, int b, const Point& p) const {
    return a < b ? orient(pts_[a], pts_[b], p) : -orient(pts_[b], pts_[a], p);
  }

  bool in_cavity(int t) const { return t >= 0 && mark_[t] == stamp_; }

  void insert(int pi) {
    const Point& p = pts_[pi];
    const int t0 = locate(p);
    ++stamp_;
    cavity_.clear();
    cavity_.push_back(t0);
    mark_[t0] = stamp_;
    for (std::size_t q = 0; q < cavity_.size(); ++q) {
      const Tri& tr = tris_[cavity_[q]];
      for (int i = 0; i < 3; ++i) {
        const int nb = tr.nb[i];
        if (nb < 0 || mark_[nb] == stamp_) continue;
        const Tri& o = tris_[nb];
        if (incircle(pts_[o.v[0]], pts_[o.v[1]], pts_[o.v[2]], p) > 0.0L) {
          mark_[nb] = stamp_;
          cavity_.push_back(nb);
        }
      }
    }

    // The cavity must be star-shaped from p; grow it across any edge p cannot see.
    struct Edge {
      int a, b, outer;
    };
    std::vector<Edge> rim;
    for (;;) {
      rim.clear();
      int grow = -1;
      for (int t : cavity_) {
        const Tri& tr = tris_[t];
        for (int i = 0; i < 3; ++i) {
          if (in_cavity(tr.nb[i])) continue;
          const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
          if (side(a, b, p) <= 0.0 && tr.nb[i] >= 0) grow = tr.nb[i];
          rim.push_back({a, b, tr.nb[i]});
        }
      }
      if (grow < 0) break;
      mark_[grow] = stamp_;
      cavity_.push_back(grow);
    }

    for (int t : cavity_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }
    std::vector<int> created;
    created.reserve(rim.size());
    for (const auto& e : rim) {
      int slot;
      if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
      } else {
        slot = int(tris_.size());
        tris_.emplace_back();
        mark_.push_back(0);
      }
      tris_[slot] = Tri{{e.a, e.b, pi}, {-1, -1, e.outer}, true};
      mark_[slot] = 0;
      if (e.outer >= 0) {
        Tri& o = tris_[e.outer];
        for (int i = 0; i < 3; ++i) {
          const int oa = o.v[(i + 1) % 3], ob = o.v[(i + 2) % 3];
          if (oa == e.b && ob == e.a) o.nb[i] = slot;
        }
      }
      created.push_back(slot);
    }
    // New triangle (a, b, p): across (b, p) is the one starting at b, across (p, a) the one ending at a.
    for (std::size_t i = 0; i < created.size(); ++i) {
      Tri& t = tris_[created[i]];
      for (std::size_t j = 0; j < created.size(); ++j) {
        if (i == j) continue;
        const Tri& s = tris_[created[j]];
        if (s.v[0] == t.v[1]) t.nb[0] = created[j];
        if (s.v[1] == t.v[0]) t.nb[1] = created[j];
      }
    }
    last_ = created.front();
  }

  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  std::vector<int> mark_;
  std::vector<int> free_;
  std::vector<int> cavity_;
  int stamp_ = 0;
  int last_ = 0;
  unsigned rot_ = 0;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulation(std::span<const Point> points) {
  if (points.size() < 3) return {};
  Triangulator tri(std::vector<Point>(points.begin(), points.end()));
  return tri.run(points.size());
}

}  // namespace robin
