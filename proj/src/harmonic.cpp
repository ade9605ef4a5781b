#include "robin/harmonic.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "robin/ball_spectrum.hpp"
#include "robin/error.hpp"

namespace robin {

namespace {

constexpr double kPi = std::numbers::pi;

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point d = b - a;
  const double len2 = d.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + s * d)).norm();
}

double interpolate(const ScalarField& f, const Point& p) {
  std::array<double, 3> bary{};
  const int t = f.mesh->locate(p, bary);
  if (t < 0) throw PreconditionError("point lies outside the mesh");
  const auto& tri = f.mesh->triangles[t];
  return bary[0] * f[tri[0]] + bary[1] * f[tri[1]] + bary[2] * f[tri[2]];
}

double polygon_area(const std::vector<Point>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * std::abs(a);
}

// Fraction of triangle t where the linear interpolant exceeds level.
double superlevel_fraction(const ScalarField& f, std::size_t t, double level) {
  const auto& tri = f.mesh->triangles[t];
  std::array<double, 3> v{f[tri[0]] - level, f[tri[1]] - level, f[tri[2]] - level};
  const int above = int(v[0] > 0) + int(v[1] > 0) + int(v[2] > 0);
  if (above == 3) return 1.0;
  if (above == 0) return 0.0;

  std::vector<Point> poly;
  poly.reserve(4);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const Point& p = f.mesh->nodes[tri[i]];
    const Point& q = f.mesh->nodes[tri[j]];
    if (v[i] > 0) poly.push_back(p);
    if ((v[i] > 0) != (v[j] > 0)) {
      const double s = v[i] / (v[i] - v[j]);
      poly.push_back(p + s * (q - p));
    }
  }
  const double full = f.mesh->areas[t];
  return full > 0.0 ? std::clamp(polygon_area(poly) / full, 0.0, 1.0) : 0.0;
}

struct NelderMeadResult {
  Point x;
  double value;
  int evaluations;
};

template <class F>
NelderMeadResult nelder_mead(F&& objective, const Point& start, double step, double tol, int max_iter) {
  std::array<Point, 3> x{start, start + Point(step, 0.0), start + Point(0.0, step)};
  std::array<double, 3> fx{};
  int evals = 0;
  for (int i = 0; i < 3; ++i) fx[i] = objective(x[i]), ++evals;

  auto diameter = [&] {
    return std::max({(x[0] - x[1]).norm(), (x[0] - x[2]).norm(), (x[1] - x[2]).norm()});
  };

  for (int it = 0; it < max_iter && diameter() > tol; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const int best = idx[0], mid = idx[1], worst = idx[2];
    const Point centroid = 0.5 * (x[best] + x[mid]);

    const Point xr = centroid + (centroid - x[worst]);
    const double fr = objective(xr);
    ++evals;
    if (fr < fx[best]) {
      const Point xe = centroid + 2.0 * (centroid - x[worst]);
      const double fe = objective(xe);
      ++evals;
      if (fe < fr) x[worst] = xe, fx[worst] = fe;
      else x[worst] = xr, fx[worst] = fr;
      continue;
    }
    if (fr < fx[mid]) {
      x[worst] = xr, fx[worst] = fr;
      continue;
    }
    const bool outside = fr < fx[worst];
    const Point xc = outside ? centroid + 0.5 * (xr - centroid) : centroid + 0.5 * (x[worst] - centroid);
    const double fc = objective(xc);
    ++evals;
    if (fc < std::min(fr, fx[worst])) {
      x[worst] = xc, fx[worst] = fc;
      continue;
    }
    for (int i : {mid, worst}) {
      x[i] = x[best] + 0.5 * (x[i] - x[best]);
      fx[i] = objective(x[i]);
      ++evals;
    }
  }
  const int best = int(std::min_element(fx.begin(), fx.end()) - fx.begin());
  return {x[best], fx[best], evals};
}

template <class F>
double integrate_radial(F&& g, double R) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, R, 12, 1e-13);
}

}  // namespace

double boundary_distance(const Mesh& mesh, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : mesh.boundary_edges)
    best = std::min(best, segment_distance(p, mesh.nodes[e[0]], mesh.nodes[e[1]]));
  return best;
}

GreenData green_function(const Mesh& mesh, const Point& y) {
  const DirichletSolver solver(mesh);
  return green_function(mesh, solver, y);
}

GreenData green_function(const Mesh& mesh, const DirichletSolver& solver, const Point& y) {
  if (boundary_distance(mesh, y) <= 2.0 * mesh.h)
    throw PreconditionError("pole must lie farther than 2h from the boundary");

  const std::size_t nb = mesh.boundary_nodes.size();
  Vector data(static_cast<Eigen::Index>(nb));
  for (std::size_t i = 0; i < nb; ++i) data[Eigen::Index(i)] = -std::log((mesh.nodes[mesh.boundary_nodes[i]] - y).norm());

  GreenData g;
  g.mesh = &mesh;
  g.pole = y;
  g.regular_part = ScalarField(mesh, solver.solve(data));
  g.harmonic_radius_at_pole = std::exp(-interpolate(g.regular_part, y));

  const std::size_t n = mesh.node_count();
  std::vector<double> dist(n);
  double ring = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = (mesh.nodes[i] - y).norm();
    if (dist[i] <= 1e-9 * mesh.h) g.pole_node = int(i);
  }
  if (g.pole_node >= 0) {
    for (std::size_t i = 0; i < n; ++i)
      if (int(i) != g.pole_node) ring = std::min(ring, dist[i]);
    dist[g.pole_node] = ring;
  }

  Vector values(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    values[Eigen::Index(i)] =
        mesh.is_boundary(int(i)) ? 0.0 : green_gamma * (-std::log(dist[i]) - g.regular_part[i]);
  }
  g.green = ScalarField(mesh, std::move(values));
  return g;
}

double harmonic_radius(const Mesh& mesh, const DirichletSolver& solver, const Point& y) {
  const std::size_t nb = mesh.boundary_nodes.size();
  Vector data(static_cast<Eigen::Index>(nb));
  for (std::size_t i = 0; i < nb; ++i) data[Eigen::Index(i)] = -std::log((mesh.nodes[mesh.boundary_nodes[i]] - y).norm());
  const ScalarField H(mesh, solver.solve(data));
  return std::exp(-interpolate(H, y));
}

HarmonicCenter harmonic_center(const Mesh& mesh) {
  const DirichletSolver solver(mesh);
  return harmonic_center(mesh, solver);
}

HarmonicCenter harmonic_center(const Mesh& mesh, const DirichletSolver& solver) {
  const double depth = 2.0 * mesh.h;
  std::vector<int> deep;
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    if (!mesh.is_boundary(int(i)) && boundary_distance(mesh, mesh.nodes[i]) > depth) deep.push_back(int(i));
  if (deep.empty()) throw MeshError("mesh too coarse: no interior node deeper than 2h");

  constexpr std::size_t kCoarseSamples = 300;
  const std::size_t stride = (deep.size() + kCoarseSamples - 1) / kCoarseSamples;

  HarmonicCenter out;
  double best = -1.0;
  for (std::size_t k = 0; k < deep.size(); k += stride) {
    const Point& p = mesh.nodes[deep[k]];
    const double r = harmonic_radius(mesh, solver, p);
    ++out.evaluations;
    if (r > best) best = r, out.center = p;
  }

  auto objective = [&](const Point& y) {
    if (boundary_distance(mesh, y) <= depth) return 0.0;
    std::array<double, 3> bary{};
    if (mesh.locate(y, bary) < 0) return 0.0;
    return -harmonic_radius(mesh, solver, y);
  };
  const auto nm = nelder_mead(objective, out.center, std::max(mesh.h, 1e-3), 1e-6, 400);
  out.evaluations += nm.evaluations;
  if (-nm.value > best) {
    out.center = nm.x;
    out.radius = -nm.value;
  } else {
    out.radius = best;
  }
  return out;
}

double superlevel_area(const ScalarField& field, double t) {
  double sum = 0.0;
  for (std::size_t k = 0; k < field.mesh->triangles.size(); ++k)
    sum += field.mesh->areas[k] * superlevel_fraction(field, k, t);
  return sum;
}

LevelSetTable level_set_measures(const GreenData& green, std::span<const double> t_grid) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
      throw PreconditionError("t grid must be nonnegative and strictly increasing");
  }
  const Mesh& mesh = *green.mesh;
  LevelSetTable table;
  table.r_omega = green.harmonic_radius_at_pole;
  table.domain_area = mesh.area();
  table.h = mesh.h;
  table.perimeter = mesh.perimeter();
  table.gamma_ratio = std::sqrt(table.domain_area / (kPi * table.r_omega * table.r_omega));
  for (double t : t_grid) {
    const double rt = table.r_omega * std::exp(-2.0 * kPi * t);
    table.t.push_back(t);
    table.m_omega.push_back(t == 0.0 ? table.domain_area : superlevel_area(green.green, t));
    table.m_ball.push_back(kPi * rt * rt);
  }
  return table;
}

CapacityCheck verify_capacity_equality(const GreenData& green, double t) {
  if (!(t > 0.0)) throw PreconditionError("capacity level must be positive");
  const Mesh& mesh = *green.mesh;
  if (superlevel_area(green.green, t) <= 10.0 * mesh.mean_element_area())
    throw RangeError("level set is under-resolved by the mesh");

  double energy = 0.0;
  for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
    const double below = 1.0 - superlevel_fraction(green.green, k, t);
    if (below <= 0.0) continue;
    energy += green.green.gradient(k).squaredNorm() * mesh.areas[k] * below;
  }

  CapacityCheck c;
  c.t = t;
  c.cap_domain = energy / (t * t);
  const double r_omega = green.harmonic_radius_at_pole;
  const double rt = r_omega * std::exp(-2.0 * kPi * t);
  c.cap_ball = 2.0 * kPi / std::log(r_omega / rt);
  c.relative_gap = std::abs(c.cap_domain - c.cap_ball) / c.cap_ball;
  return c;
}

Lemma2Report verify_lemma_cap2(const LevelSetTable& table) {
  Lemma2Report rep;
  rep.eps_h = 10.0 * table.h * table.perimeter;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.worst_strict_margin = std::numeric_limits<double>::infinity();
  const double g2 = table.gamma_ratio * table.gamma_ratio;
  for (std::size_t i = 0; i < table.t.size(); ++i) {
    Lemma2Row row;
    row.t = table.t[i];
    row.m_omega = table.m_omega[i];
    row.bound = g2 * table.m_ball[i];
    row.strict_margin = row.bound - row.m_omega;
    row.margin = row.strict_margin + rep.eps_h;
    rep.worst_margin = std::min(rep.worst_margin, row.margin);
    rep.worst_strict_margin = std::min(rep.worst_strict_margin, row.strict_margin);
    if (row.margin < 0.0) rep.passed = false;
    rep.rows.push_back(row);
  }
  return rep;
}

double ball_integral(const RadialProfile& phi, const std::function<double(double)>& f) {
  return 2.0 * kPi * integrate_radial([&](double rho) { return f(phi.value(rho)) * rho; }, phi.radius);
}

double ball_dirichlet_energy(const RadialProfile& phi) {
  return 2.0 * kPi * integrate_radial(
                         [&](double rho) {
                           const double d = phi.derivative(rho);
                           return d * d * rho;
                         },
                         phi.radius);
}

ScalarField transplant(const RadialProfile& phi, const GreenData& green, double r_omega) {
  const Mesh& mesh = *green.mesh;
  const double boundary_value = phi.value(r_omega);
  Vector values(static_cast<Eigen::Index>(mesh.node_count()));
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    if (mesh.is_boundary(int(i))) {
      values[Eigen::Index(i)] = boundary_value;
    } else {
      const double rho = std::min(r_omega * std::exp(-2.0 * kPi * green.green[i]), r_omega);
      values[Eigen::Index(i)] = phi.value(rho);
    }
  }
  return ScalarField(mesh, std::move(values));
}

TransplantBoundsReport verify_transplant_bounds(const RadialProfile& phi, const GreenData& green, double r_omega,
                                                double gamma_ratio, const std::function<double(double)>& f) {
  constexpr int kSamples = 256;
  double prev = phi.value(0.0);
  const double lo = prev;
  for (int i = 1; i <= kSamples; ++i) {
    const double v = phi.value(r_omega * i / kSamples);
    if (v < prev - 1e-12 * std::max(1.0, std::abs(prev)))
      throw PreconditionError("profile must be radially nondecreasing");
    prev = v;
  }
  const double hi = prev;
  double fprev = f(lo);
  if (!(fprev > 0.0)) throw PreconditionError("f must be positive on the range of the profile");
  for (int i = 1; i <= kSamples; ++i) {
    const double fv = f(lo + (hi - lo) * i / kSamples);
    if (!(fv > 0.0) || fv < fprev - 1e-12 * std::max(1.0, std::abs(fprev)))
      throw PreconditionError("f must be positive and nondecreasing on the range of the profile");
    fprev = fv;
  }

  RadialProfile ball = phi;
  ball.radius = r_omega;
  const ScalarField U = transplant(phi, green, r_omega);
  const Mesh& mesh = *green.mesh;

  TransplantBoundsReport rep;
  rep.ball_integral = ball_integral(ball, f);
  rep.domain_integral = field_integrals(U, f).volume;
  rep.upper_bound = gamma_ratio * gamma_ratio * rep.ball_integral;
  rep.epsilon = 0.2 * mesh.h * mesh.area() * f(hi);
  rep.lower_margin = rep.domain_integral - rep.ball_integral + rep.epsilon;
  rep.upper_margin = rep.upper_bound + rep.epsilon - rep.domain_integral;
  rep.passed = rep.lower_margin >= 0.0 && rep.upper_margin >= 0.0;
  return rep;
}

double eigen_mesh_allowance(double h, double reference) { return 0.2 * h * std::abs(reference); }

ExperimentReport theorem1_check(const DomainSpec& spec, double alpha, double h) {
  const auto start = std::chrono::steady_clock::now();
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  spec.validate();

  ExperimentReport rep;
  rep.id = "theorem1";
  rep.inputs = {{"domain", to_json(spec)}, {"alpha", alpha}, {"h", h}};

  const Mesh mesh = triangulate(spec, h);
  const FemOperators ops = assemble(mesh);
  const EigenResult eig = robin_principal_eigen(mesh, ops, alpha);
  const DirichletSolver solver(mesh, ops.K);
  const HarmonicCenter hc = harmonic_center(mesh, solver);
  const BallEigenResult ball = ball_eigenvalue({2, alpha, hc.radius});

  const double area = mesh.area();
  const double perimeter = mesh.perimeter();
  const double ball_area = kPi * hc.radius * hc.radius;
  const double gamma_ratio = std::sqrt(area / ball_area);
  const double lhs = area * eig.lambda;
  const double rhs = ball_area * ball.lambda;
  const double tol = eigen_mesh_allowance(h, rhs);

  rep.set("h", h);
  rep.set("nodes", double(mesh.node_count()));
  rep.set("min_angle_deg", min_angle_degrees(mesh));
  rep.set("area", area);
  rep.set("perimeter", perimeter);
  rep.set("lambda_domain", eig.lambda);
  rep.set("eigen_iterations", eig.iterations);
  rep.set("center_x", hc.center.x());
  rep.set("center_y", hc.center.y());
  rep.set("r_omega", hc.radius);
  rep.set("gamma_ratio", gamma_ratio);
  rep.set("lambda_ball", ball.lambda);
  rep.set("product_domain", lhs);
  rep.set("product_ball", rhs);
  rep.set("eps_h", tol);

  rep.check("area_times_lambda", lhs, rhs, tol);

  const double equal_area_radius = std::sqrt(area / kPi);
  const double lambda_equal = ball_eigenvalue({2, alpha, equal_area_radius}).lambda;
  rep.set("lambda_equal_area_ball", lambda_equal);
  rep.check("equal_area_ball", eig.lambda, lambda_equal, eigen_mesh_allowance(h, lambda_equal), true);

  const double constant_trial = -alpha * perimeter / area;
  rep.set("lambda_constant_trial", constant_trial);
  rep.check("constant_trial_bound", eig.lambda, constant_trial, 0.0);

  const GreenData green = green_function(mesh, solver, hc.center);
  const RadialProfile phi{[&](double r) { return ball.profile(r); }, [&](double r) { return ball.profile_derivative(r); },
                          hc.radius};
  const ScalarField U = transplant(phi, green, hc.radius);
  const Vector& u = U.values;
  const double rq = (u.dot(ops.K * u) - alpha * u.dot(ops.B * u)) / u.dot(ops.M * u);
  const double rq_bound = ball.lambda / (gamma_ratio * gamma_ratio);
  rep.set("rayleigh_transplant", rq);
  rep.set("rayleigh_transplant_bound", rq_bound);
  rep.check("transplant_above_lambda", eig.lambda, rq, 1e-10 * std::abs(eig.lambda));
  rep.check("transplant_below_scaled_ball", rq, rq_bound, eigen_mesh_allowance(h, rq_bound), true);

  const double iso = 2.0 * std::sqrt(kPi * area);
  rep.check("perimeter_isoperimetric", iso, perimeter, 1e-12 * perimeter);
  rep.check("isoperimetric_harmonic_ball", 2.0 * kPi * hc.radius, iso, eigen_mesh_allowance(h, iso));
  rep.check("harmonic_ball_area", ball_area, area, eigen_mesh_allowance(h, area));

  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace robin
