#include "robin/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

#include "robin/ball_spectrum.hpp"
#include "robin/error.hpp"
#include "robin/fem.hpp"
#include "robin/harmonic.hpp"
#include "robin/shape_derivative.hpp"
#include "robin/steklov.hpp"

namespace robin {

namespace {

constexpr double kPi = std::numbers::pi;
using nlohmann::json;

std::vector<double> geometric_grid(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a * std::pow(b / a, double(i) / (n - 1));
  return g;
}

std::vector<DomainSpec> isoperimetric_domains() {
  return {DomainSpec::disk(1.0),
          DomainSpec::ellipse(1.5, 1.0),
          DomainSpec::ellipse(2.0, 1.0),
          DomainSpec::ellipse(3.0, 1.0),
          DomainSpec::star_fourier(1.0, {0.0, 0.0, 0.3}, {}),
          DomainSpec::star_fourier(1.0, {0.0, 0.25}, {0.0, 0.0, 0.0, 0.0, 0.1})};
}

CriterionResult c1_ball_oracle() {
  CriterionResult c{1, "ball characteristic equation vs radial shooting, 18 cases"};
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  json rows = json::array();
  for (int n : {2, 3, 4})
    for (double alpha : {0.5, 1.0, 2.0})
      for (double r : {0.5, 1.0, 2.0}) {
        const BallProblem p{n, alpha, r};
        const double lb = ball_eigenvalue(p).lambda;
        const double ls = shooting_eigenvalue(p);
        const double rel = std::abs(lb - ls) / std::abs(lb);
        worst = std::max(worst, rel);
        rows.push_back({{"n", n}, {"alpha", alpha}, {"r", r}, {"lambda_bessel", lb}, {"lambda_shoot", ls}, {"rel", rel}});
      }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.details = {{"cases", rows}, {"worst_relative_gap", worst}, {"runtime_s", secs}};
  c.passed = worst < 1e-8 && secs < 5.0;
  return c;
}

CriterionResult c2_asymptotic() {
  CriterionResult c{2, "sqrt|lambda(B_r)| decreases to alpha for n=2, alpha=1"};
  const auto start = std::chrono::steady_clock::now();
  json rows = json::array();
  std::vector<double> k;
  for (double r : {5.0, 10.0, 20.0, 50.0}) {
    k.push_back(ball_eigenvalue({2, 1.0, r}).k);
    rows.push_back({{"r", r}, {"sqrt_abs_lambda", k.back()}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < k.size(); ++i) decreasing = decreasing && k[i] < k[i - 1];
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.details = {{"rows", rows}, {"strictly_decreasing", decreasing}, {"runtime_s", secs}};
  c.passed = decreasing && k.back() > 1.0 && k.back() < 1.1 && secs < 1.0;
  return c;
}

CriterionResult c3_monotonicity() {
  CriterionResult c{3, "lambda(B_r) and r^{n/2} sqrt|lambda(B_r)| strictly increasing"};
  const auto radii = geometric_grid(0.1, 10.0, 20);
  c.passed = true;
  json cases = json::array();
  for (int n : {2, 3})
    for (double alpha : {0.5, 1.0, 2.0}) {
      const auto rep = ball_monotonicity_check(n, alpha, radii);
      c.passed = c.passed && rep.passed();
      cases.push_back({{"n", n},
                       {"alpha", alpha},
                       {"lambda_increasing", rep.lambda_increasing},
                       {"y_increasing", rep.y_increasing},
                       {"y_slope_increasing", rep.y_slope_increasing}});
    }
  c.details = {{"radii", radii}, {"cases", cases}};
  return c;
}

CriterionResult c4_sign() {
  CriterionResult c{4, "lambda + alpha^2 + alpha (n-1)/r < 0 for every solved ball"};
  double worst = -std::numeric_limits<double>::infinity();
  int count = 0;
  auto visit = [&](int n, double alpha, double r) {
    worst = std::max(worst, ball_eigenvalue({n, alpha, r}).curvature_combination());
    ++count;
  };
  for (int n : {2, 3, 4})
    for (double alpha : {0.5, 1.0, 2.0})
      for (double r : {0.5, 1.0, 2.0}) visit(n, alpha, r);
  for (int n : {2, 3})
    for (double alpha : {0.5, 1.0, 2.0})
      for (double r : geometric_grid(0.1, 10.0, 20)) visit(n, alpha, r);
  for (double r : {5.0, 10.0, 20.0, 50.0}) visit(2, 1.0, r);
  c.details = {{"cases", count}, {"largest_value", worst}};
  c.passed = worst < 0.0;
  return c;
}

CriterionResult c5_fem() {
  CriterionResult c{5, "FEM Robin eigenvalue on the unit disk vs ball solver"};
  const auto start = std::chrono::steady_clock::now();
  const double exact = ball_eigenvalue({2, 1.0, 1.0}).lambda;
  const Mesh m1 = triangulate(DomainSpec::disk(1.0), 0.05);
  const Mesh m2 = triangulate(DomainSpec::disk(1.0), 0.025);
  const double l1 = robin_principal_eigen(m1, 1.0).lambda;
  const double l2 = robin_principal_eigen(m2, 1.0).lambda;
  const double e1 = std::abs(l1 - exact) / std::abs(exact), e2 = std::abs(l2 - exact) / std::abs(exact);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.details = {{"lambda_ball", exact}, {"lambda_h0.05", l1}, {"lambda_h0.025", l2},  {"rel_error_h0.05", e1},
               {"rel_error_h0.025", e2}, {"improvement", e1 / e2}, {"runtime_s", secs}};
  c.passed = e1 < 1e-2 && e1 / e2 >= 3.0 && secs < 60.0;
  return c;
}

CriterionResult c6_harmonic_radius(const AcceptanceOptions& opt) {
  CriterionResult c{6, "harmonic radius and center of the disk; |B_{r_Omega}| <= |Omega|"};
  const Mesh disk = triangulate(DomainSpec::disk(1.0), 0.05);
  const HarmonicCenter hc = harmonic_center(disk);
  bool ok = std::abs(hc.radius - 1.0) < 1e-2 && hc.center.norm() < 5e-2;
  json rows = json::array();
  for (const auto& spec : isoperimetric_domains()) {
    const Mesh m = triangulate(spec, opt.h);
    const HarmonicCenter h = harmonic_center(m);
    const double ball = kPi * h.radius * h.radius;
    const double tol = eigen_mesh_allowance(opt.h, m.area());
    const bool pass = ball <= m.area() + tol;
    ok = ok && pass;
    rows.push_back({{"domain", to_json(spec)}, {"r_omega", h.radius}, {"ball_area", ball}, {"area", m.area()},
                    {"tolerance", tol}, {"passed", pass}});
  }
  c.details = {{"disk_radius", hc.radius}, {"disk_center", {hc.center.x(), hc.center.y()}}, {"domains", rows}};
  c.passed = ok;
  return c;
}

CriterionResult c7_capacity(const AcceptanceOptions& opt) {
  CriterionResult c{7, "condenser capacities of Omega \\ Omega^t and the ball agree"};
  bool ok = true;
  json rows = json::array();
  for (const auto& spec : {DomainSpec::disk(1.0), DomainSpec::ellipse(2.0, 1.0)}) {
    const Mesh m = triangulate(spec, opt.h);
    const DirichletSolver solver(m);
    const HarmonicCenter hc = harmonic_center(m, solver);
    const GreenData g = green_function(m, solver, hc.center);
    for (double t : {0.02, 0.05, 0.1, 0.15, 0.2}) {
      const CapacityCheck cc = verify_capacity_equality(g, t);
      ok = ok && cc.relative_gap < 5e-2;
      rows.push_back({{"domain", to_json(spec)}, {"t", t}, {"cap_domain", cc.cap_domain}, {"cap_ball", cc.cap_ball},
                      {"relative_gap", cc.relative_gap}});
    }
  }
  c.details = {{"rows", rows}};
  c.passed = ok;
  return c;
}

CriterionResult c8_lemma2(const AcceptanceOptions& opt) {
  CriterionResult c{8, "m_Omega(t) <= gamma^2 m_B(t) at 20 log-spaced levels"};
  bool ok = true;
  json rows = json::array();
  const auto ts = geometric_grid(1e-3, 0.5, 20);
  for (const auto& spec : {DomainSpec::ellipse(1.5, 1.0), DomainSpec::ellipse(2.0, 1.0),
                           DomainSpec::star_fourier(1.0, {0.0, 0.0, 0.3}, {})}) {
    const Mesh m = triangulate(spec, opt.h);
    const DirichletSolver solver(m);
    const HarmonicCenter hc = harmonic_center(m, solver);
    const GreenData g = green_function(m, solver, hc.center);
    const Lemma2Report rep = verify_lemma_cap2(level_set_measures(g, ts));
    ok = ok && rep.passed;
    rows.push_back({{"domain", to_json(spec)}, {"eps_h", rep.eps_h}, {"worst_margin", rep.worst_margin},
                    {"worst_strict_margin", rep.worst_strict_margin}, {"passed", rep.passed}});
  }
  c.details = {{"t", ts}, {"domains", rows}};
  c.passed = ok;
  return c;
}

CriterionResult c9_transplant(const AcceptanceOptions& opt) {
  CriterionResult c{9, "transplanted Dirichlet energy and the two-sided integral bound"};
  const DomainSpec spec = DomainSpec::ellipse(2.0, 1.0);
  const Mesh m = triangulate(spec, opt.h);
  const DirichletSolver solver(m);
  const HarmonicCenter hc = harmonic_center(m, solver);
  const GreenData g = green_function(m, solver, hc.center);
  const BallEigenResult ball = ball_eigenvalue({2, 1.0, hc.radius});
  const RadialProfile phi{[&](double r) { return ball.profile(r); },
                          [&](double r) { return ball.profile_derivative(r); }, hc.radius};
  const ScalarField U = transplant(phi, g, hc.radius);
  const double dU = field_integrals(U, [](double) { return 0.0; }).dirichlet;
  const double dB = ball_dirichlet_energy(phi);
  const double gap = std::abs(dU - dB) / dB;
  const double gamma = std::sqrt(m.area() / (kPi * hc.radius * hc.radius));
  const auto sq = [](double s) { return s * s; };
  const TransplantBoundsReport tb = verify_transplant_bounds(phi, g, hc.radius, gamma, sq);
  c.details = {{"dirichlet_domain", dU},
               {"dirichlet_ball", dB},
               {"dirichlet_relative_gap", gap},
               {"ball_integral", tb.ball_integral},
               {"domain_integral", tb.domain_integral},
               {"upper_bound", tb.upper_bound},
               {"epsilon", tb.epsilon},
               {"lower_margin", tb.lower_margin},
               {"upper_margin", tb.upper_margin},
               {"lower_side_holds", tb.lower_margin >= 0.0},
               {"upper_side_holds", tb.upper_margin >= 0.0}};
  c.passed = gap < 2e-2 && tb.passed;
  return c;
}

CriterionResult c10_theorem1(const AcceptanceOptions& opt) {
  CriterionResult c{10, "|Omega| lambda(Omega) <= |B_{r_Omega}| lambda(B_{r_Omega})"};
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  json rows = json::array();
  const std::vector<DomainSpec> domains{DomainSpec::ellipse(1.5, 1.0), DomainSpec::ellipse(2.0, 1.0),
                                        DomainSpec::ellipse(3.0, 1.0),
                                        DomainSpec::star_fourier(1.0, {0.0, 0.0, 0.3}, {}),
                                        DomainSpec::star_fourier(1.0, {0.0, 0.25}, {0.0, 0.0, 0.0, 0.0, 0.1})};
  for (const auto& spec : domains)
    for (double alpha : {0.5, 1.0}) {
      const ExperimentReport rep = theorem1_check(spec, alpha, opt.h);
      const Assertion* main = rep.find("area_times_lambda");
      const bool strict = main->margin() > main->tolerance;
      ok = ok && strict && rep.passed();
      rows.push_back({{"domain", to_json(spec)},
                      {"alpha", alpha},
                      {"margin", main->margin()},
                      {"eps_h", main->tolerance},
                      {"margin_exceeds_eps", strict},
                      {"equal_area_ball_holds", rep.find("equal_area_ball")->passed()},
                      {"constant_trial_holds", rep.find("constant_trial_bound")->passed()},
                      {"report", to_json(rep)}});
    }
  const ExperimentReport disk = theorem1_check(DomainSpec::disk(1.0), 1.0, opt.h);
  const double q = disk.quantities.at("product_domain"), b = disk.quantities.at("product_ball");
  const double rel = std::abs(q - b) / std::abs(b);
  ok = ok && rel < 1e-2 && disk.passed();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.details = {{"cases", rows}, {"disk_relative_gap", rel}, {"disk_report", to_json(disk)}, {"runtime_s", secs}};
  c.passed = ok && secs < 600.0;
  return c;
}

CriterionResult c11_shape_derivative(const AcceptanceOptions& opt) {
  CriterionResult c{11, "eigenvalue shape derivative: closed form, boundary formula, sign"};
  bool ok = true;
  json balls = json::array();
  for (int n : {2, 3})
    for (double alpha : {0.5, 1.0, 2.0}) {
      const ExperimentReport r = ball_derivative_check(n, alpha, 1.0);
      ok = ok && r.passed();
      balls.push_back({{"n", n}, {"alpha", alpha}, {"relative_error", r.quantities.at("relative_error")}});
    }
  const DomainSpec ellipse = DomainSpec::ellipse(2.0, 1.0);
  const ExperimentReport fem =
      eigen_derivative_check(ellipse, 1.0, opt.h, PerturbationField::make(ellipse, {{0.0, 0.0, 1.0}, {}}));
  ok = ok && fem.passed();

  const DomainSpec disk = DomainSpec::disk(1.0);
  const Mesh m = triangulate(disk, opt.h);
  const EigenResult eig = robin_principal_eigen(m, 1.0);
  const BoundaryGeometry geom = boundary_geometry(m, disk);
  json signs = json::array();
  for (const FourierSeries& s : {FourierSeries{{1.0}, {}}, FourierSeries{{1.0, 0.5}, {}},
                                 FourierSeries{{0.5}, {0.0, 0.0, 0.3}}}) {
    const PerturbationField p = PerturbationField::make(disk, s);
    const double flux = volume_flux(geom, p);
    const double d = eigen_shape_derivative(m, geom, 1.0, eig, p);
    ok = ok && flux > 0.0 && d > 0.0;
    signs.push_back({{"cos", s.cos}, {"sin", s.sin}, {"flux", flux}, {"derivative", d}});
  }
  c.details = {{"ball", balls}, {"ellipse", to_json(fem)}, {"disk_sign", signs}};
  c.passed = ok;
  return c;
}

CriterionResult c12_steklov(const AcceptanceOptions& opt) {
  CriterionResult c{12, "boundary-forced energy with G = -c^2 s^2/2: closed form, bound chain, mu scaling"};
  // Disk: u = A I_0(c |x|) with A c I_1(c R) = mu rho.
  const Mesh disk = triangulate(DomainSpec::disk(1.0), opt.h);
  const EnergyProblem pd{&disk, Nonlinearity::quadratic_sink(1.0), 1.0, BoundaryWeight::constant(1.0)};
  const EnergySolution sd = minimize_energy(pd);
  const BesselOrder i0(0.0), i1(1.0);
  const double A = 1.0 / bessel_i(i1, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < disk.node_count(); ++i) {
    const double exact = A * bessel_i(i0, disk.nodes[i].norm());
    worst = std::max(worst, std::abs(sd.u[i] - exact) / std::abs(exact));
  }
  const bool closed_ok = worst < 1e-2;

  const Mesh m = triangulate(DomainSpec::ellipse(2.0, 1.0), opt.h);
  const EnergyProblem p{&m, Nonlinearity::quadratic_sink(1.0), 1.0, BoundaryWeight::constant(1.0)};
  const DirichletSolver solver(m);
  const HarmonicCenter hc = harmonic_center(m, solver);
  const GreenData g = green_function(m, solver, hc.center);
  const ExperimentReport chain = verify_energy_bound(p, make_comparison_problem(p, g), g);

  const FemOperators ops = assemble(m);
  EnergyProblem p1 = p, p3 = p;
  p1.mu = 1.0;
  p3.mu = 3.0;
  const EnergySolution s1 = minimize_energy(p1, ops), s3 = minimize_energy(p3, ops);
  const double u_scale = (s3.u.values - 3.0 * s1.u.values).norm() / (3.0 * s1.u.values.norm());
  const double e_scale = std::abs(s3.energy - 9.0 * s1.energy) / std::abs(9.0 * s1.energy);
  const bool scale_ok = u_scale < 1e-10 && e_scale < 1e-10;

  c.details = {{"disk_max_relative_error", worst},
               {"chain", to_json(chain)},
               {"mu_scaling_u", u_scale},
               {"mu_scaling_energy", e_scale}};
  c.passed = closed_ok && chain.passed() && scale_ok;
  return c;
}

CriterionResult c13_first_variation(const AcceptanceOptions& opt) {
  CriterionResult c{13, "first variation of the energy: ball criticality and finite-difference adjudication"};
  const DomainSpec disk = DomainSpec::disk(1.0);
  const Mesh m = triangulate(disk, opt.h);
  const Nonlinearity G = Nonlinearity::quadratic_sink(1.0);
  const BoundaryWeight rho{1.0, 0.0, 0.0, 0.5};
  const EnergySolution sol = minimize_energy(EnergyProblem{&m, G, 1.0, rho});
  const BoundaryGeometry geom = boundary_geometry(m, disk);
  // Scale for the zero test: the same integrand against a uniform dilation.
  const PerturbationField uniform = PerturbationField::make(disk, {{1.0}, {}});
  const SteklovVariation dilation = steklov_first_variation(m, geom, sol.u, G, 1.0, rho, uniform);
  const double tol = 1e-6 * std::max({std::abs(dilation.printed), std::abs(dilation.scaled), 1.0});
  json ball = json::array();
  bool ball_ok = true;
  for (const FourierSeries& s : {FourierSeries{{0.0, 1.0}, {}}, FourierSeries{{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0, 0.5}}}) {
    const PerturbationField p = PerturbationField::make(disk, s);
    const SteklovVariation v = steklov_first_variation(m, geom, sol.u, G, 1.0, rho, p);
    const bool ok = std::abs(v.printed) <= tol && std::abs(v.scaled) <= tol;
    ball_ok = ball_ok && ok;
    ball.push_back({{"cos", s.cos}, {"sin", s.sin}, {"printed", v.printed}, {"scaled", v.scaled},
                    {"hadamard", v.hadamard}, {"tolerance", tol}, {"passed", ok}});
  }
  const DomainSpec ellipse = DomainSpec::ellipse(2.0, 1.0);
  const ExperimentReport rep = steklov_variation_check(ellipse, G, 1.0, BoundaryWeight::constant(1.0), opt.h,
                                                       PerturbationField::make(ellipse, {{0.0, 0.0, 1.0}, {}}));
  c.details = {{"ball", ball}, {"ellipse", to_json(rep)}, {"matching_variant", rep.extra.at("matching_variant")}};
  c.passed = ball_ok && rep.passed();
  return c;
}

CriterionResult dispatch(int id, const AcceptanceOptions& opt) {
  switch (id) {
    case 1: return c1_ball_oracle();
    case 2: return c2_asymptotic();
    case 3: return c3_monotonicity();
    case 4: return c4_sign();
    case 5: return c5_fem();
    case 6: return c6_harmonic_radius(opt);
    case 7: return c7_capacity(opt);
    case 8: return c8_lemma2(opt);
    case 9: return c9_transplant(opt);
    case 10: return c10_theorem1(opt);
    case 11: return c11_shape_derivative(opt);
    case 12: return c12_steklov(opt);
    case 13: return c13_first_variation(opt);
  }
  throw PreconditionError("criterion id out of range");
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = dispatch(id, opt);
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.passed = false;
    r.details = {{"error", e.what()}};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> out(kCriterionCount);
  const int jobs = std::max(1, opt.jobs);
  for (int first = 1; first <= kCriterionCount; first += jobs) {
    std::vector<std::future<CriterionResult>> batch;
    for (int id = first; id < first + jobs && id <= kCriterionCount; ++id)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [id, &opt] { return run_criterion(id, opt); }));
    for (auto& f : batch) {
      CriterionResult r = f.get();
      out[r.id - 1] = std::move(r);
    }
  }
  return out;
}

json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"seconds", r.seconds}, {"details", r.details}};
}

std::string summary_line(const CriterionResult& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << "  " << r.title << "  (" << r.seconds << " s)";
  return os.str();
}

}  // namespace robin
