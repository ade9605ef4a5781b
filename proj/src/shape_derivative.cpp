#include "robin/shape_derivative.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "robin/error.hpp"

namespace robin {

namespace {

constexpr double kPi = std::numbers::pi;

double relative_gap(double a, double reference) {
  const double denom = std::max(std::abs(reference), 1e-300);
  return std::abs(a - reference) / denom;
}

void add_scaled(FourierSeries& into, const FourierSeries& s, double t) {
  into.cos.resize(std::max(into.cos.size(), s.cos.size()), 0.0);
  into.sin.resize(std::max(into.sin.size(), s.sin.size()), 0.0);
  for (std::size_t k = 0; k < s.cos.size(); ++k) into.cos[k] += t * s.cos[k];
  for (std::size_t k = 0; k < s.sin.size(); ++k) into.sin[k] += t * s.sin[k];
}

}  // namespace

PerturbationField PerturbationField::make(const DomainSpec& spec, FourierSeries rho_hat) {
  if (!spec.is_star()) throw PreconditionError("perturbations require a star domain");
  if (rho_hat.empty()) throw PreconditionError("perturbation series is empty");
  constexpr int kGrid = 4096;
  double rmin = std::numeric_limits<double>::infinity(), amax = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double th = 2.0 * kPi * i / kGrid;
    rmin = std::min(rmin, spec.star.radius(th));
    amax = std::max(amax, std::abs(rho_hat.value(th)));
  }
  PerturbationField p;
  p.rho_hat = std::move(rho_hat);
  p.t_max = amax > 0.0 ? 0.5 * rmin / amax : std::numeric_limits<double>::infinity();
  return p;
}

double BoundaryGeometry::length() const {
  double s = 0.0;
  for (double w : weight) s += w;
  return s;
}

BoundaryGeometry boundary_geometry(const Mesh& mesh, const DomainSpec& spec) {
  if (!spec.is_star()) throw PreconditionError("boundary geometry requires a star domain");
  BoundaryGeometry g;
  const std::size_t nb = mesh.boundary_nodes.size();
  for (int node : mesh.boundary_nodes) {
    const Point& p = mesh.nodes[node];
    const double th = std::atan2(p.y(), p.x());
    const Point nu = spec.outward_normal(th);
    g.theta.push_back(th);
    g.normal.push_back(nu);
    g.curvature.push_back(spec.curvature(th));
    g.radial_normal.push_back(nu.dot(Point(std::cos(th), std::sin(th))));
  }
  std::vector<double> seg(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const double a = g.theta[i];
    double b = g.theta[(i + 1) % nb];
    while (b <= a) b += 2.0 * kPi;
    seg[i] = spec.arc_length(a, b);
  }
  g.weight.resize(nb);
  g.arc.resize(nb);
  double s = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    g.weight[i] = 0.5 * (seg[i] + seg[(i + nb - 1) % nb]);
    g.arc[i] = s;
    s += seg[i];
  }
  return g;
}

std::vector<double> normal_velocity(const BoundaryGeometry& geom, const PerturbationField& pert) {
  std::vector<double> v(geom.theta.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pert.amplitude(geom.theta[i]) * geom.radial_normal[i];
  return v;
}

double volume_flux(const BoundaryGeometry& geom, const PerturbationField& pert) {
  const auto v = normal_velocity(geom, pert);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += geom.weight[i] * v[i];
  return s;
}

std::vector<double> tangential_derivative(const BoundaryGeometry& geom, const Vector& trace) {
  const std::size_t nb = geom.arc.size();
  const double total = geom.length();
  std::vector<double> d(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const std::size_t im = (i + nb - 1) % nb, ip = (i + 1) % nb;
    double h1 = geom.arc[i] - geom.arc[im];
    double h2 = geom.arc[ip] - geom.arc[i];
    if (h1 <= 0.0) h1 += total;
    if (h2 <= 0.0) h2 += total;
    const double um = trace[Eigen::Index(im)], u0 = trace[Eigen::Index(i)], up = trace[Eigen::Index(ip)];
    d[i] = (-h2 * h2 * um + (h2 * h2 - h1 * h1) * u0 + h1 * h1 * up) / (h1 * h2 * (h1 + h2));
  }
  return d;
}

double eigen_shape_derivative(const Mesh& mesh, const BoundaryGeometry& geom, double alpha, const EigenResult& eig,
                              const PerturbationField& pert) {
  const Vector trace = boundary_trace(mesh, eig.field.values);
  const auto du = tangential_derivative(geom, trace);
  const auto vn = normal_velocity(geom, pert);
  double s = 0.0;
  for (std::size_t i = 0; i < vn.size(); ++i) {
    const double u = trace[Eigen::Index(i)];
    const double integrand = du[i] * du[i] - (eig.lambda + alpha * alpha + alpha * geom.curvature[i]) * u * u;
    s += geom.weight[i] * integrand * vn[i];
  }
  return s;
}

SteklovVariation steklov_first_variation(const Mesh& mesh, const BoundaryGeometry& geom, const ScalarField& u,
                                         const Nonlinearity& G, double mu, const BoundaryWeight& rho,
                                         const PerturbationField& pert) {
  const Vector trace = boundary_trace(mesh, u.values);
  const auto du = tangential_derivative(geom, trace);
  const auto vn = normal_velocity(geom, pert);
  SteklovVariation out;
  for (std::size_t i = 0; i < vn.size(); ++i) {
    const Point& x = mesh.nodes[mesh.boundary_nodes[i]];
    const double ui = trace[Eigen::Index(i)];
    const double r = rho.value(x);
    const double dr = rho.gradient(x).dot(geom.normal[i]);
    const double kappa = geom.curvature[i];
    const double grad2 = du[i] * du[i] + mu * mu * r * r;
    const double common = grad2 - 2.0 * G.G(ui) - 2.0 * mu * mu * r * r - 2.0 * mu * ui * dr;
    const double w = geom.weight[i] * vn[i];
    out.printed += w * (common + 2.0 * kappa * mu);
    out.scaled += w * (common + 2.0 * kappa * mu * ui * r);
    out.hadamard += w * (common - 2.0 * kappa * mu * ui * r);
  }
  return out;
}

DomainSpec perturbed_spec(const DomainSpec& spec, const PerturbationField& pert, double t) {
  if (!spec.is_star()) throw PreconditionError("perturbations require a star domain");
  if (std::abs(t) > pert.t_max) throw RangeError("perturbation step exceeds t_max");
  if (t == 0.0) return spec;
  DomainSpec out = spec;
  StarShape& s = out.star;
  if (!s.ellipse && s.offset.empty()) {
    const double c0 = pert.rho_hat.cos.empty() ? 0.0 : pert.rho_hat.cos[0];
    const double R = s.R + t * c0;
    const std::size_t nc = std::max(s.cos.size(), pert.rho_hat.cos.size() > 0 ? pert.rho_hat.cos.size() - 1 : 0);
    const std::size_t ns = std::max(s.sin.size(), pert.rho_hat.sin.size() > 0 ? pert.rho_hat.sin.size() - 1 : 0);
    std::vector<double> a(nc, 0.0), b(ns, 0.0);
    for (std::size_t k = 0; k < nc; ++k) {
      const double base = k < s.cos.size() ? s.R * s.cos[k] : 0.0;
      const double add = k + 1 < pert.rho_hat.cos.size() ? pert.rho_hat.cos[k + 1] : 0.0;
      a[k] = (base + t * add) / R;
    }
    for (std::size_t k = 0; k < ns; ++k) {
      const double base = k < s.sin.size() ? s.R * s.sin[k] : 0.0;
      const double add = k + 1 < pert.rho_hat.sin.size() ? pert.rho_hat.sin[k + 1] : 0.0;
      b[k] = (base + t * add) / R;
    }
    s.R = R;
    s.cos = std::move(a);
    s.sin = std::move(b);
  } else {
    add_scaled(s.offset, pert.rho_hat, t);
  }
  out.validate();
  return out;
}

FiniteDifferenceStudy central_difference_study(const std::function<double(double)>& F, std::span<const double> steps) {
  if (steps.size() < 2) throw PreconditionError("finite-difference study needs two steps");
  FiniteDifferenceStudy st;
  st.base = F(0.0);
  for (double t : steps) {
    const double fp = F(t), fm = F(-t);
    st.steps.push_back(t);
    st.plus.push_back(fp);
    st.minus.push_back(fm);
    st.forward.push_back((fp - st.base) / t);
    st.central.push_back((fp - fm) / (2.0 * t));
  }
  const std::size_t n = st.steps.size();
  const double ratio = st.steps[n - 2] / st.steps[n - 1];
  const double r2 = ratio * ratio;
  st.extrapolated = (r2 * st.central[n - 1] - st.central[n - 2]) / (r2 - 1.0);
  return st;
}

double perturbed_eigenvalue(const Mesh& base, const DomainSpec& spec, const PerturbationField& pert, double alpha,
                            double t) {
  const Mesh m = deform_star_mesh(base, spec, perturbed_spec(spec, pert, t));
  return robin_principal_eigen(m, alpha).lambda;
}

double perturbed_energy(const Mesh& base, const DomainSpec& spec, const PerturbationField& pert,
                        const Nonlinearity& G, double mu, const BoundaryWeight& rho, double t) {
  const Mesh m = deform_star_mesh(base, spec, perturbed_spec(spec, pert, t));
  return minimize_energy(EnergyProblem{&m, G, mu, rho}).energy;
}

namespace {

nlohmann::json study_json(const FiniteDifferenceStudy& st) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < st.steps.size(); ++i)
    rows.push_back({{"t", st.steps[i]},
                    {"plus", st.plus[i]},
                    {"minus", st.minus[i]},
                    {"forward", st.forward[i]},
                    {"central", st.central[i]}});
  return {{"base", st.base}, {"rows", rows}, {"extrapolated", st.extrapolated}};
}

}  // namespace

ExperimentReport eigen_derivative_check(const DomainSpec& spec, double alpha, double h, const PerturbationField& pert) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.id = "eigen_shape_derivative";
  rep.inputs = {{"domain", to_json(spec)},
                {"alpha", alpha},
                {"h", h},
                {"rho_hat", {{"cos", pert.rho_hat.cos}, {"sin", pert.rho_hat.sin}}}};

  const Mesh mesh = triangulate(spec, h);
  const EigenResult eig = robin_principal_eigen(mesh, alpha);
  const BoundaryGeometry geom = boundary_geometry(mesh, spec);
  const double formula = eigen_shape_derivative(mesh, geom, alpha, eig, pert);

  const std::vector<double> steps{1e-2, 5e-3};
  const auto st = central_difference_study(
      [&](double t) { return perturbed_eigenvalue(mesh, spec, pert, alpha, t); }, steps);
  const double mismatch_large = std::abs(formula - st.forward[0]);
  const double mismatch_small = std::abs(formula - st.forward[1]);
  const double ratio = mismatch_small > 0.0 ? mismatch_large / mismatch_small : std::numeric_limits<double>::infinity();

  rep.set("lambda", eig.lambda);
  rep.set("flux", volume_flux(geom, pert));
  rep.set("formula", formula);
  rep.set("fd_extrapolated", st.extrapolated);
  rep.set("relative_error", relative_gap(formula, st.extrapolated));
  rep.set("mismatch_t1", mismatch_large);
  rep.set("mismatch_t2", mismatch_small);
  rep.set("mismatch_ratio", ratio);
  rep.set("central_mismatch_t1", std::abs(formula - st.central[0]));
  rep.set("central_mismatch_t2", std::abs(formula - st.central[1]));
  rep.extra["finite_differences"] = study_json(st);
  rep.check("formula_vs_fd", relative_gap(formula, st.extrapolated), 1e-2, 0.0);
  rep.check("fd_mismatch_ratio", 1.5, ratio, 0.0);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport ball_derivative_check(int n, double alpha, double R) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.id = "ball_shape_derivative";
  rep.inputs = {{"n", n}, {"alpha", alpha}, {"R", R}};
  const BallEigenResult res = ball_eigenvalue({n, alpha, R});
  const double flux = unit_sphere_area(n) * std::pow(R, n - 1);
  const double closed = ball_shape_derivative_closed_form(res, flux);
  const std::vector<double> steps{1e-3 * R, 5e-4 * R};
  const auto st = central_difference_study([&](double t) { return ball_eigenvalue({n, alpha, R + t}).lambda; }, steps);
  rep.set("lambda", res.lambda);
  rep.set("closed_form", closed);
  rep.set("fd_extrapolated", st.extrapolated);
  rep.set("relative_error", relative_gap(closed, st.extrapolated));
  rep.extra["finite_differences"] = study_json(st);
  rep.check("closed_form_vs_fd", relative_gap(closed, st.extrapolated), 1e-4, 0.0);
  rep.check("dilation_increases_lambda", 0.0, closed, 0.0);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport steklov_variation_check(const DomainSpec& spec, const Nonlinearity& G, double mu,
                                         const BoundaryWeight& rho, double h, const PerturbationField& pert) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.id = "steklov_first_variation";
  rep.inputs = {{"domain", to_json(spec)},
                {"G", to_json(G)},
                {"mu", mu},
                {"rho", to_json(rho)},
                {"h", h},
                {"rho_hat", {{"cos", pert.rho_hat.cos}, {"sin", pert.rho_hat.sin}}}};

  const Mesh mesh = triangulate(spec, h);
  const EnergySolution sol = minimize_energy(EnergyProblem{&mesh, G, mu, rho});
  const BoundaryGeometry geom = boundary_geometry(mesh, spec);
  const SteklovVariation var = steklov_first_variation(mesh, geom, sol.u, G, mu, rho, pert);

  const std::vector<double> steps{1e-2, 5e-3};
  const auto st = central_difference_study(
      [&](double t) { return perturbed_energy(mesh, spec, pert, G, mu, rho, t); }, steps);

  constexpr double kMatch = 2e-2;
  const double e_printed = relative_gap(var.printed, st.extrapolated);
  const double e_scaled = relative_gap(var.scaled, st.extrapolated);
  const double e_hadamard = relative_gap(var.hadamard, st.extrapolated);

  rep.set("energy", sol.energy);
  rep.set("flux", volume_flux(geom, pert));
  rep.set("variant_printed", var.printed);
  rep.set("variant_scaled", var.scaled);
  rep.set("variant_hadamard", var.hadamard);
  rep.set("fd_extrapolated", st.extrapolated);
  rep.set("relative_error_printed", e_printed);
  rep.set("relative_error_scaled", e_scaled);
  rep.set("relative_error_hadamard", e_hadamard);
  rep.extra["finite_differences"] = study_json(st);

  nlohmann::json matching = nlohmann::json::array();
  if (e_printed < kMatch) matching.push_back("printed");
  if (e_scaled < kMatch) matching.push_back("scaled");
  if (e_hadamard < kMatch) matching.push_back("hadamard");
  rep.extra["matching_variants"] = matching;
  std::string best = "none";
  if (e_printed < kMatch && e_printed <= e_scaled) best = "printed";
  else if (e_scaled < kMatch) best = "scaled";
  rep.extra["matching_variant"] = best;

  rep.check("printed_or_scaled_matches_fd", std::min(e_printed, e_scaled), kMatch, 0.0);
  rep.check("hadamard_matches_fd", e_hadamard, kMatch, 0.0, true);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace robin
