#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace robin {

using Point = Eigen::Vector2d;

/// Trigonometric series sum_k (cos[k] cos k theta + sin[k] sin k theta), k starting at 0.
/// sin[0] is ignored.
struct FourierSeries {
  std::vector<double> cos;
  std::vector<double> sin;

  double value(double theta) const;
  double d1(double theta) const;
  double d2(double theta) const;
  bool empty() const { return cos.empty() && sin.empty(); }
};

/// Ellipse with semi-axes a (along x) and b, centered at the origin.
struct Ellipse {
  double a = 1.0;
  double b = 1.0;
};

/// Star-shaped boundary rho(theta) = base(theta) + offset(theta), where base is either
/// R (1 + sum_{k>=1} a_k cos k theta + b_k sin k theta) or an analytic ellipse radius.
/// offset collects additive radial perturbations.
struct StarShape {
  double R = 1.0;
  std::vector<double> cos;  // a_1, a_2, ...
  std::vector<double> sin;  // b_1, b_2, ...
  std::optional<Ellipse> ellipse;
  FourierSeries offset;

  double radius(double theta) const;
  double radius_d1(double theta) const;
  double radius_d2(double theta) const;
};

/// Analytic description of a planar domain.
struct DomainSpec {
  enum class Kind { star, polygon };

  Kind kind = Kind::star;
  StarShape star;
  std::vector<Point> vertices;  // counterclockwise, simple

  static DomainSpec disk(double R);
  static DomainSpec star_fourier(double R, std::vector<double> cos, std::vector<double> sin);
  static DomainSpec ellipse(double a, double b);
  static DomainSpec polygon(std::vector<Point> vertices);
  static DomainSpec rectangle(double x0, double y0, double x1, double y1);

  bool is_star() const { return kind == Kind::star; }

  /// Throws PreconditionError when the radius is not positive on a 4096-point grid
  /// or the polygon is not simple and counterclockwise.
  void validate() const;

  /// Boundary point at polar angle theta (star domains only).
  Point boundary_point(double theta) const;
  /// Tangent d/dtheta of the boundary parametrization (star domains only).
  Point boundary_tangent(double theta) const;
  /// Outward unit normal at polar angle theta (star domains only).
  Point outward_normal(double theta) const;
  /// Signed curvature of the boundary curve at theta (positive where convex).
  double curvature(double theta) const;

  double area() const;
  double perimeter() const;
  /// Arc length of the boundary between polar angles t0 < t1 (star domains only).
  double arc_length(double t0, double t1) const;
  double diameter() const;
  bool contains(const Point& p) const;
};

/// {"kind":"star","R":..,"cos":[..],"sin":[..]} | {"kind":"ellipse","a":..,"b":..} |
/// {"kind":"polygon","vertices":[[x,y],..]}. Star specs may carry an "offset" object
/// {"cos":[..],"sin":[..]} with coefficients starting at mode 0.
nlohmann::json to_json(const DomainSpec& spec);
DomainSpec domain_from_json(const nlohmann::json& j);

}  // namespace robin
