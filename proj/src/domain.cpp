#include "robin/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "robin/error.hpp"

namespace robin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kGrid = 4096;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

double polygon_signed_area(const std::vector<Point>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr double kGlX[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                            0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double kGlW[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                            0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace

double FourierSeries::value(double t) const {
  double s = 0.0;
  for (std::size_t k = 0; k < cos.size(); ++k) s += cos[k] * std::cos(k * t);
  for (std::size_t k = 1; k < sin.size(); ++k) s += sin[k] * std::sin(k * t);
  return s;
}

double FourierSeries::d1(double t) const {
  double s = 0.0;
  for (std::size_t k = 1; k < cos.size(); ++k) s -= cos[k] * k * std::sin(k * t);
  for (std::size_t k = 1; k < sin.size(); ++k) s += sin[k] * k * std::cos(k * t);
  return s;
}

double FourierSeries::d2(double t) const {
  double s = 0.0;
  for (std::size_t k = 1; k < cos.size(); ++k) s -= cos[k] * double(k * k) * std::cos(k * t);
  for (std::size_t k = 1; k < sin.size(); ++k) s -= sin[k] * double(k * k) * std::sin(k * t);
  return s;
}

double StarShape::radius(double t) const {
  double base;
  if (ellipse) {
    const double a = ellipse->a, b = ellipse->b;
    const double c = std::cos(t), s = std::sin(t);
    base = a * b / std::sqrt(b * b * c * c + a * a * s * s);
  } else {
    double sum = 1.0;
    for (std::size_t k = 0; k < cos.size(); ++k) sum += cos[k] * std::cos((k + 1) * t);
    for (std::size_t k = 0; k < sin.size(); ++k) sum += sin[k] * std::sin((k + 1) * t);
    base = R * sum;
  }
  return base + offset.value(t);
}

double StarShape::radius_d1(double t) const {
  double base;
  if (ellipse) {
    const double a = ellipse->a, b = ellipse->b;
    const double D = b * b * std::pow(std::cos(t), 2) + a * a * std::pow(std::sin(t), 2);
    const double dD = (a * a - b * b) * std::sin(2.0 * t);
    base = -0.5 * a * b * std::pow(D, -1.5) * dD;
  } else {
    double sum = 0.0;
    for (std::size_t k = 0; k < cos.size(); ++k) sum -= cos[k] * (k + 1) * std::sin((k + 1) * t);
    for (std::size_t k = 0; k < sin.size(); ++k) sum += sin[k] * (k + 1) * std::cos((k + 1) * t);
    base = R * sum;
  }
  return base + offset.d1(t);
}

double StarShape::radius_d2(double t) const {
  double base;
  if (ellipse) {
    const double a = ellipse->a, b = ellipse->b;
    const double D = b * b * std::pow(std::cos(t), 2) + a * a * std::pow(std::sin(t), 2);
    const double dD = (a * a - b * b) * std::sin(2.0 * t);
    const double ddD = 2.0 * (a * a - b * b) * std::cos(2.0 * t);
    base = a * b * (0.75 * std::pow(D, -2.5) * dD * dD - 0.5 * std::pow(D, -1.5) * ddD);
  } else {
    double sum = 0.0;
    for (std::size_t k = 0; k < cos.size(); ++k) sum -= cos[k] * double((k + 1) * (k + 1)) * std::cos((k + 1) * t);
    for (std::size_t k = 0; k < sin.size(); ++k) sum -= sin[k] * double((k + 1) * (k + 1)) * std::sin((k + 1) * t);
    base = R * sum;
  }
  return base + offset.d2(t);
}

DomainSpec DomainSpec::disk(double R) { return star_fourier(R, {}, {}); }

DomainSpec DomainSpec::star_fourier(double R, std::vector<double> cos, std::vector<double> sin) {
  DomainSpec d;
  d.kind = Kind::star;
  d.star.R = R;
  d.star.cos = std::move(cos);
  d.star.sin = std::move(sin);
  d.validate();
  return d;
}

DomainSpec DomainSpec::ellipse(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw PreconditionError("ellipse: semi-axes must be positive");
  DomainSpec d;
  d.kind = Kind::star;
  d.star.R = std::max(a, b);
  d.star.ellipse = Ellipse{a, b};
  return d;
}

DomainSpec DomainSpec::polygon(std::vector<Point> vertices) {
  DomainSpec d;
  d.kind = Kind::polygon;
  d.vertices = std::move(vertices);
  d.validate();
  return d;
}

DomainSpec DomainSpec::rectangle(double x0, double y0, double x1, double y1) {
  return polygon({Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)});
}

void DomainSpec::validate() const {
  if (kind == Kind::star) {
    if (!(star.R > 0.0)) throw PreconditionError("star domain: R must be positive");
    for (int i = 0; i < kGrid; ++i) {
      const double r = star.radius(kTwoPi * i / kGrid);
      if (!(r > 0.0) || !std::isfinite(r))
        throw PreconditionError("star domain: boundary radius not positive at theta = " +
                                std::to_string(kTwoPi * i / kGrid));
    }
    return;
  }
  const auto n = vertices.size();
  if (n < 3) throw PreconditionError("polygon: at least three vertices required");
  if (!(polygon_signed_area(vertices) > 0.0)) throw PreconditionError("polygon: vertices must be counterclockwise");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]))
        throw PreconditionError("polygon: edges intersect, boundary is not simple");
    }
  }
}

Point DomainSpec::boundary_point(double t) const {
  const double r = star.radius(t);
  return Point(r * std::cos(t), r * std::sin(t));
}

Point DomainSpec::boundary_tangent(double t) const {
  const double r = star.radius(t), dr = star.radius_d1(t);
  return Point(dr * std::cos(t) - r * std::sin(t), dr * std::sin(t) + r * std::cos(t));
}

Point DomainSpec::outward_normal(double t) const {
  const Point tan = boundary_tangent(t);
  return Point(tan.y(), -tan.x()) / tan.norm();
}

double DomainSpec::curvature(double t) const {
  const double r = star.radius(t), dr = star.radius_d1(t), ddr = star.radius_d2(t);
  return (r * r + 2.0 * dr * dr - r * ddr) / std::pow(r * r + dr * dr, 1.5);
}

double DomainSpec::area() const {
  if (kind == Kind::polygon) return polygon_signed_area(vertices);
  // Trapezoid rule is spectrally accurate for smooth periodic integrands.
  double s = 0.0;
  for (int i = 0; i < kGrid; ++i) s += std::pow(star.radius(kTwoPi * i / kGrid), 2);
  return 0.5 * s * kTwoPi / kGrid;
}

double DomainSpec::perimeter() const {
  if (kind == Kind::polygon) {
    double s = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) s += (vertices[(i + 1) % vertices.size()] - vertices[i]).norm();
    return s;
  }
  double s = 0.0;
  for (int i = 0; i < kGrid; ++i) s += boundary_tangent(kTwoPi * i / kGrid).norm();
  return s * kTwoPi / kGrid;
}

double DomainSpec::arc_length(double t0, double t1) const {
  // Composite 8-point Gauss-Legendre with panels no wider than 2 pi / 256.
  const int panels = std::max(1, int(std::ceil((t1 - t0) / (kTwoPi / 256.0))));
  const double w = (t1 - t0) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = t0 + (p + 0.5) * w;
    for (int q = 0; q < 8; ++q) s += kGlW[q] * boundary_tangent(c + 0.5 * w * kGlX[q]).norm();
  }
  return 0.5 * w * s;
}

double DomainSpec::diameter() const {
  std::vector<Point> pts;
  if (kind == Kind::polygon) {
    pts = vertices;
  } else {
    for (int i = 0; i < 512; ++i) pts.push_back(boundary_point(kTwoPi * i / 512));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

bool DomainSpec::contains(const Point& p) const {
  if (kind == Kind::star) {
    const double t = std::atan2(p.y(), p.x());
    return p.norm() < star.radius(t);
  }
  bool inside = false;
  const auto n = vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = vertices[i];
    const Point& b = vertices[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

nlohmann::json to_json(const DomainSpec& spec) {
  using nlohmann::json;
  if (spec.kind == DomainSpec::Kind::polygon) {
    json v = json::array();
    for (const auto& p : spec.vertices) v.push_back({p.x(), p.y()});
    return {{"kind", "polygon"}, {"vertices", v}};
  }
  json j;
  if (spec.star.ellipse) {
    j = {{"kind", "ellipse"}, {"a", spec.star.ellipse->a}, {"b", spec.star.ellipse->b}};
  } else {
    j = {{"kind", "star"}, {"R", spec.star.R}, {"cos", spec.star.cos}, {"sin", spec.star.sin}};
  }
  if (!spec.star.offset.empty()) j["offset"] = {{"cos", spec.star.offset.cos}, {"sin", spec.star.offset.sin}};
  return j;
}

DomainSpec domain_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  DomainSpec d;
  if (kind == "polygon") {
    std::vector<Point> v;
    for (const auto& p : j.at("vertices")) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return DomainSpec::polygon(std::move(v));
  }
  if (kind == "disk") {
    d = DomainSpec::disk(j.value("radius", 1.0));
  } else if (kind == "star") {
    d = DomainSpec::star_fourier(j.at("R").get<double>(), j.value("cos", std::vector<double>{}),
                                 j.value("sin", std::vector<double>{}));
  } else if (kind == "ellipse") {
    d = DomainSpec::ellipse(j.at("a").get<double>(), j.at("b").get<double>());
  } else {
    throw PreconditionError("unknown domain kind '" + kind + "'");
  }
  if (j.contains("offset")) {
    d.star.offset.cos = j["offset"].value("cos", std::vector<double>{});
    d.star.offset.sin = j["offset"].value("sin", std::vector<double>{});
  }
  d.validate();
  return d;
}

}  // namespace robin
