#include "robin/steklov.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "robin/bessel.hpp"
#include "robin/error.hpp"

namespace robin {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kW1 = 2.0 / 3.0;
constexpr double kW2 = 1.0 / 6.0;
constexpr std::array<std::array<double, 3>, 3> kQuadBary{{{kW1, kW2, kW2}, {kW2, kW1, kW2}, {kW2, kW2, kW1}}};

template <class F>
double integrate_radial(F&& g, double R) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, R, 12, 1e-13);
}

// Radial ODE y'' + y'/rho = F(y) on (0, R] with y(0) = y0, y'(0) = 0.
struct RadialGrid {
  std::vector<double> rho, y, dy;
  bool finite = true;
};

template <class F>
RadialGrid integrate_radial_ode(F&& rhs, double y0, double R, int steps) {
  RadialGrid g;
  const double rho0 = 1e-4 * R;
  const double f0 = rhs(y0);
  double rho = rho0, y = y0 + 0.25 * f0 * rho0 * rho0, dy = 0.5 * f0 * rho0;
  const double step = (R - rho0) / steps;
  auto deriv = [&](double r, double yy, double dd) { return std::array<double, 2>{dd, rhs(yy) - dd / r}; };
  g.rho.reserve(steps + 2);
  g.rho.push_back(0.0), g.y.push_back(y0), g.dy.push_back(0.0);
  g.rho.push_back(rho), g.y.push_back(y), g.dy.push_back(dy);
  for (int i = 0; i < steps; ++i) {
    const auto k1 = deriv(rho, y, dy);
    const auto k2 = deriv(rho + 0.5 * step, y + 0.5 * step * k1[0], dy + 0.5 * step * k1[1]);
    const auto k3 = deriv(rho + 0.5 * step, y + 0.5 * step * k2[0], dy + 0.5 * step * k2[1]);
    const auto k4 = deriv(rho + step, y + step * k3[0], dy + step * k3[1]);
    y += step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    dy += step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    rho = rho0 + (i + 1) * step;
    if (!std::isfinite(y) || !std::isfinite(dy)) {
      g.finite = false;
      return g;
    }
    g.rho.push_back(rho), g.y.push_back(y), g.dy.push_back(dy);
  }
  return g;
}

// Cubic Hermite interpolation of a radial grid (values and slopes known at the nodes).
RadialProfile hermite_profile(std::shared_ptr<const RadialGrid> g, double R) {
  auto locate = [g](double r) {
    const auto it = std::upper_bound(g->rho.begin(), g->rho.end(), r);
    std::size_t i = it == g->rho.begin() ? 0 : std::size_t(it - g->rho.begin()) - 1;
    return std::min(i, g->rho.size() - 2);
  };
  RadialProfile p;
  p.radius = R;
  p.value = [g, locate](double r) {
    const std::size_t i = locate(r);
    const double h = g->rho[i + 1] - g->rho[i], s = (r - g->rho[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * g->y[i] + h10 * h * g->dy[i] + h01 * g->y[i + 1] + h11 * h * g->dy[i + 1];
  };
  p.derivative = [g, locate](double r) {
    const std::size_t i = locate(r);
    const double h = g->rho[i + 1] - g->rho[i], s = (r - g->rho[i]) / h;
    const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
    return (d00 * g->y[i] + d01 * g->y[i + 1]) / h + d10 * g->dy[i] + d11 * g->dy[i + 1];
  };
  return p;
}

double boundary_datum(const ComparisonProblem& cp, double mu, FluxConvention convention) {
  const double total = mu * cp.M;
  return convention == FluxConvention::normalized ? total / (2.0 * kPi * cp.r_omega) : total;
}

double comparison_energy(const RadialProfile& phi, const ComparisonProblem& cp, double mu, const Nonlinearity& G) {
  const double weight = G.kind == Nonlinearity::Kind::quadratic_sink ? cp.gamma_n : 1.0;
  const double dirichlet = 2.0 * kPi * integrate_radial(
                                           [&](double r) {
                                             const double d = phi.derivative(r);
                                             return d * d * r;
                                           },
                                           cp.r_omega);
  const double volume = 2.0 * kPi * integrate_radial([&](double r) { return G.G(phi.value(r)) * r; }, cp.r_omega);
  return dirichlet - 2.0 * weight * volume - 2.0 * phi.value(cp.r_omega) * mu * cp.M;
}

ComparisonSolution finish(RadialProfile phi, const ComparisonProblem& cp, double mu, const Nonlinearity& G,
                          FluxConvention convention) {
  ComparisonSolution s;
  s.profile = std::move(phi);
  s.convention = convention;
  s.center_value = s.profile.value(0.0);
  s.boundary_value = s.profile.value(cp.r_omega);
  s.boundary_slope = s.profile.derivative(cp.r_omega);
  s.energy = comparison_energy(s.profile, cp, mu, G);
  return s;
}

// Per-triangle quadrature of G(v) with derivative data for the residual and Jacobian.
template <class F>
void for_each_quadrature_point(const Mesh& mesh, const Vector& v, F&& body) {
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double w = mesh.areas[t] / 3.0;
    for (const auto& b : kQuadBary) {
      const double s = b[0] * v[tri[0]] + b[1] * v[tri[1]] + b[2] * v[tri[2]];
      body(tri, b, w, s);
    }
  }
}

}  // namespace

Nonlinearity Nonlinearity::affine(double k) {
  Nonlinearity g;
  g.kind = Kind::affine;
  g.k = k;
  return g;
}

Nonlinearity Nonlinearity::quadratic_sink(double c, double k) {
  Nonlinearity g;
  g.kind = Kind::quadratic_sink;
  g.c = c;
  g.k = k;
  return g;
}

Nonlinearity Nonlinearity::concave_smooth(double kappa, double kappa0) {
  Nonlinearity g;
  g.kind = Kind::concave_smooth;
  g.kappa = kappa;
  g.kappa0 = kappa0;
  return g;
}

void Nonlinearity::validate() const {
  if (!std::isfinite(k) || !std::isfinite(c) || !std::isfinite(kappa) || !std::isfinite(kappa0))
    throw DomainError("nonlinearity parameters must be finite");
  if (kind == Kind::quadratic_sink && !(c > 0.0)) throw DomainError("quadratic_sink requires c > 0");
  if (kind == Kind::concave_smooth && (!(kappa > 0.0) || kappa0 < 0.0))
    throw DomainError("concave_smooth requires kappa > 0 and kappa0 >= 0");
}

double Nonlinearity::G(double s) const {
  switch (kind) {
    case Kind::affine: return k * s;
    case Kind::quadratic_sink: return k * s - 0.5 * c * c * s * s;
    case Kind::concave_smooth: return kappa * (1.0 - std::exp(-s)) + kappa0;
  }
  return 0.0;
}

double Nonlinearity::dG(double s) const {
  switch (kind) {
    case Kind::affine: return k;
    case Kind::quadratic_sink: return k - c * c * s;
    case Kind::concave_smooth: return kappa * std::exp(-s);
  }
  return 0.0;
}

double Nonlinearity::d2G(double s) const {
  switch (kind) {
    case Kind::affine: return 0.0;
    case Kind::quadratic_sink: return -c * c;
    case Kind::concave_smooth: return -kappa * std::exp(-s);
  }
  return 0.0;
}

std::string Nonlinearity::name() const {
  switch (kind) {
    case Kind::affine: return "affine";
    case Kind::quadratic_sink: return "quadratic_sink";
    case Kind::concave_smooth: return "concave_smooth";
  }
  return "";
}

Vector boundary_load(const Mesh& mesh, const FemOperators& ops, double mu, const BoundaryWeight& rho) {
  Vector r = Vector::Zero(Eigen::Index(mesh.node_count()));
  for (int i : mesh.boundary_nodes) r[i] = rho.value(mesh.nodes[i]);
  return mu * (ops.B * r);
}

double boundary_weight_integral(const Mesh& mesh, const FemOperators& ops, const BoundaryWeight& rho) {
  return boundary_load(mesh, ops, 1.0, rho).sum();
}

double discrete_energy(const EnergyProblem& p, const FemOperators& ops, const Vector& v) {
  const ScalarField field(*p.mesh, v);
  const auto fi = field_integrals(field, [&](double s) { return p.G.G(s); });
  return v.dot(ops.K * v) - 2.0 * fi.volume - 2.0 * v.dot(boundary_load(*p.mesh, ops, p.mu, p.rho));
}

Vector energy_residual(const EnergyProblem& p, const FemOperators& ops, const Vector& v) {
  Vector r = ops.K * v - boundary_load(*p.mesh, ops, p.mu, p.rho);
  for_each_quadrature_point(*p.mesh, v, [&](const auto& tri, const auto& b, double w, double s) {
    const double g = p.G.dG(s);
    for (int a = 0; a < 3; ++a) r[tri[a]] -= w * g * b[a];
  });
  return r;
}

EnergySolution minimize_energy(const EnergyProblem& p) { return minimize_energy(p, assemble(*p.mesh)); }

EnergySolution minimize_energy(const EnergyProblem& p, const FemOperators& ops) {
  if (!p.mesh) throw PreconditionError("energy problem has no mesh");
  p.G.validate();
  if (p.G.kind == Nonlinearity::Kind::affine)
    throw PreconditionError("affine G has no minimizer in general; use solvability_check");

  const Mesh& mesh = *p.mesh;
  const Eigen::Index n = Eigen::Index(mesh.node_count());
  EnergySolution sol;

  if (p.G.kind == Nonlinearity::Kind::quadratic_sink) {
    const SparseMatrix A = ops.K + p.G.c * p.G.c * ops.M;
    Eigen::SimplicialLDLT<SparseMatrix> solver(A);
    if (solver.info() != Eigen::Success) throw ConvergenceError("factorization failed");
    const Vector rhs = p.G.k * (ops.M * Vector::Ones(n)) + boundary_load(mesh, ops, p.mu, p.rho);
    Vector u = solver.solve(rhs);
    sol.u = ScalarField(mesh, u);
    sol.energy = discrete_energy(p, ops, u);
    sol.residual = energy_residual(p, ops, u).norm();
    sol.energy_history.push_back(sol.energy);
    return sol;
  }

  constexpr int kMaxSteps = 50;
  constexpr double kTol = 1e-10;
  Vector u = Vector::Zero(n);
  double energy = discrete_energy(p, ops, u);
  sol.energy_history.push_back(energy);
  Vector r = energy_residual(p, ops, u);

  Eigen::SimplicialLDLT<SparseMatrix> solver;
  for (int step = 0; step < kMaxSteps && r.norm() >= kTol; ++step) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.triangles.size() * 27);
    for_each_quadrature_point(mesh, u, [&](const auto& tri, const auto& b, double w, double s) {
      const double g2 = -p.G.d2G(s);
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) trip.emplace_back(tri[a], tri[c], w * g2 * b[a] * b[c]);
    });
    SparseMatrix J(n, n);
    J.setFromTriplets(trip.begin(), trip.end());
    J += ops.K;
    if (step == 0) solver.analyzePattern(J);
    solver.factorize(J);
    if (solver.info() != Eigen::Success) throw ConvergenceError("Newton factorization failed");
    const Vector du = -solver.solve(r);

    // Backtracking on the Armijo condition; the energy is convex, so full steps win near the minimum.
    const double slope = r.dot(du);
    double t = 1.0, trial = 0.0;
    Vector next;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      next = u + t * du;
      trial = discrete_energy(p, ops, next);
      if (trial <= energy + 1e-4 * t * 2.0 * slope || std::abs(trial - energy) <= 1e-14 * std::abs(energy)) break;
    }
    u = std::move(next);
    energy = trial;
    sol.energy_history.push_back(energy);
    r = energy_residual(p, ops, u);
    sol.newton_steps = step + 1;
  }
  if (r.norm() >= kTol) {
    std::ostringstream os;
    os << "Newton did not converge in " << kMaxSteps << " steps (residual " << r.norm() << ")";
    throw ConvergenceError(os.str());
  }
  sol.u = ScalarField(mesh, u);
  sol.energy = energy;
  sol.residual = r.norm();
  return sol;
}

ExperimentReport solvability_check(double k, double mu, const BoundaryWeight& rho, const Mesh& mesh) {
  const auto start = std::chrono::steady_clock::now();
  const FemOperators ops = assemble(mesh);
  const EnergyProblem p{&mesh, Nonlinearity::affine(k), mu, rho};
  const double area = mesh.area();
  const double M = boundary_weight_integral(mesh, ops, rho);
  const double printed_defect = k - mu * M;
  const double divergence_defect = k * area + mu * M;
  const double scale = std::abs(k) * area + std::abs(mu * M) + 1.0;

  ExperimentReport rep;
  rep.id = "solvability";
  rep.inputs = {{"k", k}, {"mu", mu}, {"rho", to_json(rho)}, {"h", mesh.h}};
  rep.set("area", area);
  rep.set("M", M);
  rep.set("printed_defect", printed_defect);
  rep.set("divergence_defect", divergence_defect);
  rep.check("printed_condition", std::abs(printed_defect), 0.0, 1e-9 * scale, true);
  rep.check("divergence_condition", std::abs(divergence_defect), 0.0, 1e-9 * scale, true);

  const Eigen::Index n = Eigen::Index(mesh.node_count());
  nlohmann::json along = nlohmann::json::array();
  double lowest = std::numeric_limits<double>::infinity();
  for (double s : {-100.0, -10.0, 10.0, 100.0}) {
    const double e = discrete_energy(p, ops, Vector::Constant(n, s));
    lowest = std::min(lowest, e);
    along.push_back({{"s", s}, {"energy", e}});
  }
  rep.extra["energy_along_constants"] = along;
  rep.set("lowest_energy_along_constants", lowest);

  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = mesh.nodes[std::size_t(i)].x();
  const double e0 = discrete_energy(p, ops, v);
  const double e1 = discrete_energy(p, ops, (v.array() + 1.0).matrix());
  rep.set("constant_shift_energy_change", e1 - e0);
  rep.extra["compatible"] = std::abs(divergence_defect) <= 1e-9 * scale;
  rep.extra["unbounded_below"] = std::abs(divergence_defect) > 1e-9 * scale;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

double energy_mesh_allowance(double h, double reference) { return 0.2 * h * std::abs(reference); }

ComparisonProblem make_comparison_problem(const EnergyProblem& p, const GreenData& green) {
  const FemOperators ops = assemble(*p.mesh);
  ComparisonProblem cp;
  cp.r_omega = green.harmonic_radius_at_pole;
  cp.M = boundary_weight_integral(*p.mesh, ops, p.rho);
  cp.gamma_n = p.mesh->area() / (kPi * cp.r_omega * cp.r_omega);
  return cp;
}

ComparisonCase comparison_case(const Nonlinearity& G) {
  switch (G.kind) {
    case Nonlinearity::Kind::quadratic_sink: return ComparisonCase::quadratic_sink;
    case Nonlinearity::Kind::concave_smooth: return ComparisonCase::concave_source;
    case Nonlinearity::Kind::affine: break;
  }
  throw PreconditionError("no comparison problem for affine G");
}

ComparisonSolution comparison_radial_solution(const ComparisonProblem& cp, double mu, const Nonlinearity& G,
                                              FluxConvention convention) {
  if (!(cp.r_omega > 0.0)) throw DomainError("comparison radius must be positive");
  G.validate();
  const double R = cp.r_omega;
  const double datum = boundary_datum(cp, mu, convention);

  if (comparison_case(G) == ComparisonCase::quadratic_sink) {
    if (G.k != 0.0) throw PreconditionError("comparison problem requires G = -H (no linear source)");
    const double beta = std::sqrt(cp.gamma_n) * G.c;
    const BesselOrder i0(0.0), i1(1.0);
    const double A = datum / (beta * bessel_i(i1, beta * R));
    RadialProfile phi;
    phi.radius = R;
    phi.value = [=](double r) { return A * bessel_i(i0, beta * r); };
    phi.derivative = [=](double r) { return A * beta * bessel_i(i1, beta * r); };
    return finish(std::move(phi), cp, mu, G, convention);
  }

  constexpr int kSteps = 4096;
  auto slope_for = [&](double s) {
    const RadialGrid g = integrate_radial_ode([&](double y) { return -G.dG(y); }, s, R, kSteps);
    return g.finite ? g.dy.back() : -std::numeric_limits<double>::infinity();
  };

  // phi'(R) increases with phi(0) because G' is positive and decreasing.
  double lo = -1.0, hi = 1.0;
  std::ostringstream scan;
  int expand = 0;
  for (double width = 1.0; slope_for(lo) > datum; width *= 2.0) {
    scan << " [phi0=" << lo << " slope=" << slope_for(lo) << "]";
    lo -= width;
    if (++expand > 60) throw ConvergenceError("shooting bracket failure:" + scan.str());
  }
  for (double width = 1.0; slope_for(hi) < datum; width *= 2.0) {
    scan << " [phi0=" << hi << " slope=" << slope_for(hi) << "]";
    hi += width;
    if (++expand > 120) throw ConvergenceError("shooting bracket failure:" + scan.str());
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope_for(mid) < datum ? lo : hi) = mid;
  }
  auto grid = std::make_shared<RadialGrid>(
      integrate_radial_ode([&](double y) { return -G.dG(y); }, 0.5 * (lo + hi), R, kSteps));
  return finish(hermite_profile(grid, R), cp, mu, G, convention);
}

ComparisonSolution comparison_shooting_quadratic(const ComparisonProblem& cp, double mu, const Nonlinearity& G,
                                                 FluxConvention convention) {
  if (comparison_case(G) != ComparisonCase::quadratic_sink || G.k != 0.0)
    throw PreconditionError("quadratic shooting requires quadratic_sink without linear source");
  const double beta2 = cp.gamma_n * G.c * G.c;
  const double datum = boundary_datum(cp, mu, convention);
  auto grid = std::make_shared<RadialGrid>(
      integrate_radial_ode([&](double y) { return beta2 * y; }, 1.0, cp.r_omega, 4096));
  const double scale = datum / grid->dy.back();
  for (auto& y : grid->y) y *= scale;
  for (auto& d : grid->dy) d *= scale;
  return finish(hermite_profile(grid, cp.r_omega), cp, mu, G, convention);
}

ExperimentReport verify_energy_bound(const EnergyProblem& p, const ComparisonProblem& cp, const GreenData& green) {
  const auto start = std::chrono::steady_clock::now();
  const Mesh& mesh = *p.mesh;
  const FemOperators ops = assemble(mesh);
  const EnergySolution sol = minimize_energy(p, ops);
  const ComparisonSolution comp = comparison_radial_solution(cp, p.mu, p.G, FluxConvention::normalized);
  const ComparisonSolution lit = comparison_radial_solution(cp, p.mu, p.G, FluxConvention::literal);

  if (comparison_case(p.G) == ComparisonCase::quadratic_sink) {
    if (!(comp.center_value > 0.0) || comp.boundary_slope < 0.0)
      throw PreconditionError("comparison profile must be positive and increasing (needs mu M > 0)");
  } else if (!(p.G.G(std::min(comp.center_value, comp.boundary_value)) > 0.0)) {
    throw PreconditionError("G must be positive on the range of the comparison profile");
  }

  const ScalarField U = transplant(comp.profile, green, cp.r_omega);
  const ScalarField U_lit = transplant(lit.profile, green, cp.r_omega);
  const double e_domain = sol.energy;
  const double e_trial = discrete_energy(p, ops, U.values);
  const double e_trial_lit = discrete_energy(p, ops, U_lit.values);
  const double eps = energy_mesh_allowance(mesh.h, comp.energy);
  const double eps_lit = energy_mesh_allowance(mesh.h, lit.energy);

  ExperimentReport rep;
  rep.id = "energy_bound";
  rep.inputs = {{"G", to_json(p.G)}, {"mu", p.mu}, {"rho", to_json(p.rho)}, {"h", mesh.h}};
  rep.set("energy_domain", e_domain);
  rep.set("energy_transplant", e_trial);
  rep.set("energy_comparison", comp.energy);
  rep.set("energy_transplant_literal", e_trial_lit);
  rep.set("energy_comparison_literal", lit.energy);
  rep.set("residual", sol.residual);
  rep.set("M", cp.M);
  rep.set("M_ball_rescaled", cp.M * 2.0 * kPi * cp.r_omega / mesh.perimeter());
  rep.set("r_omega", cp.r_omega);
  rep.set("gamma_n", cp.gamma_n);
  rep.set("phi_center", comp.center_value);
  rep.set("phi_boundary", comp.boundary_value);
  rep.set("eps_h", eps);

  rep.check("minimizer_below_transplant", e_domain, e_trial, 1e-9 * std::max(1.0, std::abs(e_domain)));
  rep.check("transplant_below_comparison", e_trial, comp.energy, eps);
  rep.check("minimizer_below_comparison", e_domain, comp.energy, eps);
  rep.check("literal_transplant_below_comparison", e_trial_lit, lit.energy, eps_lit, true);
  rep.check("literal_minimizer_below_comparison", e_domain, lit.energy, eps_lit, true);
  rep.extra["M_convention"] = "domain boundary integral of rho";
  rep.extra["flux_convention"] = "normalized: phi'(r_Omega) = mu M / |dB_{r_Omega}|";
  rep.extra["case"] = comparison_case(p.G) == ComparisonCase::quadratic_sink ? "quadratic_sink" : "concave_source";
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

nlohmann::json to_json(const Nonlinearity& G) {
  nlohmann::json j = {{"kind", G.name()}};
  switch (G.kind) {
    case Nonlinearity::Kind::affine: j["k"] = G.k; break;
    case Nonlinearity::Kind::quadratic_sink: j["c"] = G.c, j["k"] = G.k; break;
    case Nonlinearity::Kind::concave_smooth: j["kappa"] = G.kappa, j["kappa0"] = G.kappa0; break;
  }
  return j;
}

Nonlinearity nonlinearity_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  Nonlinearity G;
  if (kind == "affine") G = Nonlinearity::affine(j.at("k").get<double>());
  else if (kind == "quadratic_sink") G = Nonlinearity::quadratic_sink(j.value("c", 1.0), j.value("k", 0.0));
  else if (kind == "concave_smooth") G = Nonlinearity::concave_smooth(j.value("kappa", 1.0), j.value("kappa0", 0.0));
  else throw DomainError("unknown nonlinearity kind: " + kind);
  G.validate();
  return G;
}

nlohmann::json to_json(const BoundaryWeight& rho) {
  return {{"c0", rho.c0}, {"gx", rho.gx}, {"gy", rho.gy}, {"q", rho.q}};
}

BoundaryWeight boundary_weight_from_json(const nlohmann::json& j) {
  if (j.is_number()) return BoundaryWeight::constant(j.get<double>());
  return {j.value("c0", 1.0), j.value("gx", 0.0), j.value("gy", 0.0), j.value("q", 0.0)};
}

}  // namespace robin
