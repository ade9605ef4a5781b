// Command-line driver for the verification experiments.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "robin/acceptance.hpp"
#include "robin/ball_spectrum.hpp"
#include "robin/error.hpp"
#include "robin/fem.hpp"
#include "robin/harmonic.hpp"
#include "robin/shape_derivative.hpp"
#include "robin/steklov.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace robin;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Context {
  json config = json::object();
  fs::path out = ".";
  int jobs = 1;

  double tol(const std::string& key, double fallback) const {
    if (config.contains("tolerances") && config["tolerances"].contains(key))
      return config["tolerances"][key].get<double>();
    return fallback;
  }
  template <class T>
  T get(const std::string& key, T fallback) const {
    return config.contains(key) ? config[key].get<T>() : fallback;
  }
  DomainSpec domain(const DomainSpec& fallback = DomainSpec::disk(1.0)) const {
    return config.contains("domain") ? domain_from_json(config["domain"]) : fallback;
  }
};

std::vector<double> geometric(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? a : a * std::pow(b / a, double(i) / (n - 1));
  return g;
}

// Either an explicit list or {"min":..,"max":..,"count":..} (geometric spacing).
std::vector<double> grid(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  return geometric(j.at("min").get<double>(), j.at("max").get<double>(), j.at("count").get<int>());
}

void write_json(const Context& ctx, const std::string& name, const json& j) {
  std::ofstream(ctx.out / name) << j.dump(2) << '\n';
}

std::ofstream open_csv(const Context& ctx, const std::string& name, const std::string& header) {
  std::ofstream f(ctx.out / name);
  f.precision(17);
  f << header << '\n';
  return f;
}

int verdict(bool passed) { return passed ? kExitPass : kExitFail; }

int run_ball_eig(const Context& ctx) {
  const int n = ctx.get("n", 2);
  const double alpha = ctx.get("alpha", 1.0);
  const auto radii = ctx.config.contains("radii") ? grid(ctx.config["radii"]) : geometric(0.1, 10.0, 20);
  const double oracle_tol = ctx.tol("oracle", 1e-8);

  ExperimentReport rep;
  rep.id = "ball-eig";
  rep.inputs = {{"n", n}, {"alpha", alpha}, {"radii", radii}};
  auto csv = open_csv(ctx, "ball_eig.csv", "r,lambda,sqrt_abs_lambda,y,lambda_shoot,relative_gap");
  double worst = 0.0;
  for (double r : radii) {
    const BallProblem p{n, alpha, r};
    const BallEigenResult res = ball_eigenvalue(p);
    const double shoot = shooting_eigenvalue(p);
    const double gap = std::abs(res.lambda - shoot) / std::abs(res.lambda);
    worst = std::max(worst, gap);
    csv << r << ',' << res.lambda << ',' << res.k << ',' << std::pow(r, 0.5 * n) * res.k << ',' << shoot << ','
        << gap << '\n';
    rep.check("sign_r=" + std::to_string(r), res.curvature_combination(), 0.0, 0.0);
  }
  const auto mono = ball_monotonicity_check(n, alpha, radii);
  rep.set("worst_oracle_gap", worst);
  rep.check("oracle_agreement", worst, oracle_tol, 0.0);
  rep.check("lambda_increasing", mono.lambda_increasing ? 0.0 : 1.0, 0.0, 0.0);
  rep.check("y_increasing", mono.y_increasing ? 0.0 : 1.0, 0.0, 0.0);
  rep.extra["y_slope_increasing"] = mono.y_slope_increasing;
  write_json(ctx, "ball_eig.json", to_json(rep));
  return verdict(rep.passed());
}

int run_fem_eig(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const DomainSpec spec = ctx.domain();
  const double alpha = ctx.get("alpha", 1.0), h = ctx.get("h", 0.05);
  const Mesh mesh = triangulate(spec, h);
  const EigenResult eig = robin_principal_eigen(mesh, alpha);
  ExperimentReport rep;
  rep.id = "fem-eig";
  rep.inputs = {{"domain", to_json(spec)}, {"alpha", alpha}, {"h", h}};
  rep.set("lambda", eig.lambda);
  rep.set("iterations", eig.iterations);
  rep.set("rayleigh_residual", eig.rayleigh_residual);
  rep.set("nodes", double(mesh.node_count()));
  rep.set("triangles", double(mesh.triangles.size()));
  rep.set("min_angle_deg", min_angle_degrees(mesh));
  rep.set("area", mesh.area());
  rep.set("perimeter", mesh.perimeter());
  rep.check("constant_trial_bound", eig.lambda, -alpha * mesh.perimeter() / mesh.area(), 0.0);
  if (ctx.config.contains("mesh_out")) {
    std::ofstream f(ctx.out / ctx.config["mesh_out"].get<std::string>());
    write_mesh(f, mesh);
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(ctx, "fem_eig.json", to_json(rep));
  return verdict(rep.passed());
}

int run_harmonic(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const DomainSpec spec = ctx.domain();
  const double h = ctx.get("h", 0.05);
  const auto ts = ctx.config.contains("t_grid") ? grid(ctx.config["t_grid"]) : geometric(1e-3, 0.5, 20);
  const auto cap_ts = ctx.config.contains("capacity_t") ? grid(ctx.config["capacity_t"])
                                                        : std::vector<double>{0.02, 0.05, 0.1, 0.15, 0.2};
  const double cap_tol = ctx.tol("capacity", 5e-2);

  const Mesh mesh = triangulate(spec, h);
  const DirichletSolver solver(mesh);
  const HarmonicCenter hc = harmonic_center(mesh, solver);
  const GreenData g = green_function(mesh, solver, hc.center);
  const LevelSetTable table = level_set_measures(g, ts);
  const Lemma2Report l2 = verify_lemma_cap2(table);

  ExperimentReport rep;
  rep.id = "harmonic";
  rep.inputs = {{"domain", to_json(spec)}, {"h", h}, {"t_grid", ts}, {"capacity_t", cap_ts}};
  rep.set("center_x", hc.center.x());
  rep.set("center_y", hc.center.y());
  rep.set("r_omega", hc.radius);
  rep.set("gamma_ratio", table.gamma_ratio);
  rep.set("area", mesh.area());
  rep.set("eps_h", l2.eps_h);
  rep.check("harmonic_ball_area", std::numbers::pi * hc.radius * hc.radius, mesh.area(),
            eigen_mesh_allowance(h, mesh.area()));

  auto csv = open_csv(ctx, "level_sets.csv", "t,m_Omega,m_Ball,bound,margin");
  for (const auto& row : l2.rows) {
    const std::size_t i = std::size_t(&row - l2.rows.data());
    csv << row.t << ',' << row.m_omega << ',' << table.m_ball[i] << ',' << row.bound << ',' << row.margin << '\n';
    rep.check("lemma2_t=" + std::to_string(row.t), row.m_omega, row.bound, l2.eps_h);
  }
  json caps = json::array();
  for (double t : cap_ts) {
    const CapacityCheck c = verify_capacity_equality(g, t);
    caps.push_back({{"t", t}, {"cap_domain", c.cap_domain}, {"cap_ball", c.cap_ball}, {"relative_gap", c.relative_gap}});
    rep.check("capacity_t=" + std::to_string(t), c.relative_gap, cap_tol, 0.0);
  }
  rep.extra["capacity"] = caps;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(ctx, "harmonic.json", to_json(rep));
  return verdict(rep.passed());
}

int run_theorem1(const Context& ctx) {
  std::vector<DomainSpec> domains;
  if (ctx.config.contains("domains"))
    for (const auto& d : ctx.config["domains"]) domains.push_back(domain_from_json(d));
  else
    domains.push_back(ctx.domain());
  const std::vector<double> alphas =
      ctx.config.contains("alphas") ? ctx.config["alphas"].get<std::vector<double>>()
                                    : std::vector<double>{ctx.get("alpha", 1.0)};
  const double h = ctx.get("h", 0.05);

  struct Job {
    DomainSpec spec;
    double alpha;
  };
  std::vector<Job> jobs;
  for (const auto& d : domains)
    for (double a : alphas) jobs.push_back({d, a});

  std::vector<ExperimentReport> reports(jobs.size());
  const std::size_t width = std::size_t(std::max(1, ctx.jobs));
  for (std::size_t first = 0; first < jobs.size(); first += width) {
    std::vector<std::future<ExperimentReport>> batch;
    for (std::size_t i = first; i < std::min(jobs.size(), first + width); ++i)
      batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred,
                                 [&, i] { return theorem1_check(jobs[i].spec, jobs[i].alpha, h); }));
    for (std::size_t k = 0; k < batch.size(); ++k) reports[first + k] = batch[k].get();
  }

  auto csv = open_csv(ctx, "theorem1.csv",
                      "case,alpha,product_domain,product_ball,margin,eps_h,lambda_domain,lambda_equal_area_ball,"
                      "lambda_constant_trial,passed");
  json all = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const Assertion* a = r.find("area_times_lambda");
    csv << i << ',' << jobs[i].alpha << ',' << a->lhs << ',' << a->rhs << ',' << a->margin() << ',' << a->tolerance
        << ',' << r.quantities.at("lambda_domain") << ',' << r.quantities.at("lambda_equal_area_ball") << ','
        << r.quantities.at("lambda_constant_trial") << ',' << (r.passed() ? 1 : 0) << '\n';
    ok = ok && r.passed();
    all.push_back(to_json(r));
  }
  write_json(ctx, "theorem1.json", all);
  return verdict(ok);
}

PerturbationField perturbation(const Context& ctx, const DomainSpec& spec) {
  FourierSeries s{{0.0, 0.0, 1.0}, {}};
  if (ctx.config.contains("perturbation")) {
    const auto& p = ctx.config["perturbation"];
    s.cos = p.value("cos", std::vector<double>{});
    s.sin = p.value("sin", std::vector<double>{});
  }
  return PerturbationField::make(spec, s);
}

EnergyProblem energy_problem(const Context& ctx, const Mesh& mesh) {
  const json st = ctx.config.contains("steklov") ? ctx.config["steklov"] : json::object();
  EnergyProblem p;
  p.mesh = &mesh;
  p.G = st.contains("G") ? nonlinearity_from_json(st["G"]) : Nonlinearity::quadratic_sink(1.0);
  p.mu = st.value("mu", 1.0);
  p.rho = st.contains("rho") ? boundary_weight_from_json(st["rho"]) : BoundaryWeight::constant(1.0);
  return p;
}

int run_shape_deriv(const Context& ctx) {
  // the default perturbation is degenerate on the disk (zero derivative), so default to an ellipse
  const DomainSpec spec = ctx.domain(DomainSpec::ellipse(2.0, 1.0));
  const double alpha = ctx.get("alpha", 1.0), h = ctx.get("h", 0.05);
  const PerturbationField pert = perturbation(ctx, spec);
  json out = json::object();
  bool ok = true;

  const ExperimentReport eig = eigen_derivative_check(spec, alpha, h, pert);
  out["eigenvalue"] = to_json(eig);
  ok = ok && eig.passed();
  if (ctx.config.contains("steklov")) {
    const Mesh dummy;
    const EnergyProblem p = energy_problem(ctx, dummy);
    const ExperimentReport var = steklov_variation_check(spec, p.G, p.mu, p.rho, h, pert);
    out["energy"] = to_json(var);
    ok = ok && var.passed();
  }
  write_json(ctx, "shape_deriv.json", out);
  return verdict(ok);
}

int run_steklov(const Context& ctx) {
  const DomainSpec spec = ctx.domain();
  const double h = ctx.get("h", 0.05);
  const Mesh mesh = triangulate(spec, h);
  const EnergyProblem p = energy_problem(ctx, mesh);
  json out = json::object();
  bool ok = true;
  if (p.G.kind == Nonlinearity::Kind::affine) {
    const ExperimentReport rep = solvability_check(p.G.k, p.mu, p.rho, mesh);
    out["solvability"] = to_json(rep);
  } else {
    const DirichletSolver solver(mesh);
    const HarmonicCenter hc = harmonic_center(mesh, solver);
    const GreenData g = green_function(mesh, solver, hc.center);
    const ExperimentReport rep = verify_energy_bound(p, make_comparison_problem(p, g), g);
    out["energy_bound"] = to_json(rep);
    ok = rep.passed();
  }
  write_json(ctx, "steklov.json", out);
  return verdict(ok);
}

int run_verify_all(const Context& ctx) {
  AcceptanceOptions opt;
  opt.h = ctx.get("h", 0.05);
  opt.jobs = ctx.jobs;
  const auto results = run_acceptance(opt);
  json all = json::array();
  bool ok = true;
  for (const auto& r : results) {
    std::cout << summary_line(r) << '\n';
    all.push_back(to_json(r));
    ok = ok && r.passed;
  }
  write_json(ctx, "verify_all.json", all);
  return verdict(ok);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin eigenvalue and boundary-energy verification toolkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Context ctx;
  std::string config_path, out_dir = ".";
  app.add_option("--config", config_path, "JSON job specification")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", ctx.jobs, "independent experiments run concurrently")->check(CLI::PositiveNumber);

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
  };
  const Sub subs[] = {
      {"ball-eig", "ball eigenvalues with shooting oracle and monotonicity table", run_ball_eig},
      {"fem-eig", "principal Robin eigenvalue on a domain", run_fem_eig},
      {"harmonic", "Green's function, harmonic center, level-set and capacity tables", run_harmonic},
      {"theorem1", "isoperimetric eigenvalue comparison with the harmonic-radius ball", run_theorem1},
      {"shape-deriv", "boundary derivative formulas against finite differences", run_shape_deriv},
      {"steklov", "boundary-forced energy: minimization and comparison bounds", run_steklov},
      {"verify-all", "entire acceptance suite", run_verify_all},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      try {
        ctx.config = json::parse(f);
      } catch (const json::parse_error& e) {
        throw UsageError(std::string("malformed config: ") + e.what());
      }
      if (!ctx.config.is_object()) throw UsageError("config must be a JSON object");
    }
    ctx.out = out_dir;
    fs::create_directories(ctx.out);
    for (const auto& s : subs)
      if (app.got_subcommand(s.name)) {
        const int code = s.fn(ctx);
        std::cerr << s.name << ": " << (code == kExitPass ? "all assertions passed" : "assertion failure") << '\n';
        return code;
      }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "usage error: bad config value: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
