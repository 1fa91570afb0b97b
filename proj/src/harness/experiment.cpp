#include "pmri/harness/experiment.hpp"

#include "pmri/harness/io.hpp"
#include "pmri/patch/adaptive.hpp"
#include "pmri/solvers/proximal.hpp"
#include "pmri/solvers/smooth.hpp"
#include "pmri/solvers/splitting.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <set>

namespace pmri {

namespace {

std::set<std::string> const kKnownKeys{
  "seed",          "grid.nx",         "grid.ny",          "phantom.kind",      "phantom.path",     "phantom.phase",
  "mask.kind",     "mask.n",          "mask.fraction",    "mask.seed",         "mask.center_band", "mask.path",
  "smaps.kind",    "smaps.coils",     "smaps.path",       "noise.snr_db",      "input.kspace",     "input.truth",
  "model.potential", "model.param",   "model.transform",  "model.levels",      "model.lambda",     "model.lambda_scale",
  "patch.height",  "patch.width",     "patch.stride",     "patch.alpha",       "patch.atoms",      "solver.name",
  "solver.iters",  "solver.rel_tol",  "solver.residual_tol", "solver.mu",      "solver.inner_cg",  "solver.tau",
  "solver.sigma",  "solver.kappa",    "solver.restart",   "solver.precision",  "output.dir",       "output.timing",
  "output.images",
};

int positive_int(Config const &c, std::string const &key, long long fallback, long long min = 1)
{
  long long const v = c.get_int(key, fallback);
  if (v < min || v > (1LL << 30)) { throw ConfigError("'" + key + "' must be >= " + std::to_string(min)); }
  return int(v);
}

Transform make_transform(ExperimentConfig const &cfg, Grid const &g)
{
  if (cfg.transform == "finite_diff") { return Transform::finite_diff(g); }
  if (cfg.transform == "odwt") { return Transform::odwt(g, cfg.levels); }
  if (cfg.transform == "identity") { return Transform::identity(g); }
  throw ConfigError("unknown transform '" + cfg.transform + "'");
}

Potential make_potential(ExperimentConfig const &cfg)
{
  if (cfg.potential == "quadratic") { return Potential::quadratic(); }
  if (cfg.potential == "fair") { return Potential::fair(cfg.potential_param); }
  if (cfg.potential == "hyperbola") { return Potential::hyperbola(cfg.potential_param); }
  if (cfg.potential == "huber") { return Potential::huber(cfg.potential_param); }
  if (cfg.potential == "abs") { return Potential::abs(); }
  throw ConfigError("unknown potential '" + cfg.potential + "'");
}

RestartRule parse_restart(std::string const &s)
{
  if (s == "none") { return RestartRule::none; }
  if (s == "function") { return RestartRule::function_value; }
  if (s == "gradient") { return RestartRule::gradient; }
  throw ConfigError("unknown restart rule '" + s + "'");
}

template<typename Opts>
Opts base_options(ExperimentConfig const &cfg, ErrorMetric metric)
{
  Opts o;
  o.iters = cfg.iters;
  o.rel_tol = cfg.rel_tol;
  o.metric = std::move(metric);
  return o;
}

} // namespace

ExperimentConfig experiment_from_config(Config const &c)
{
  for (auto const &[key, value] : c.values()) {
    if (!kKnownKeys.count(key)) { throw ConfigError("unknown config key '" + key + "'"); }
  }
  ExperimentConfig e;
  long long const seed = c.get_int("seed", 0);
  if (seed < 0) { throw ConfigError("seed must be nonnegative"); }
  e.seed = uint64_t(seed);
  e.grid = Grid{positive_int(c, "grid.nx", 64, 8), positive_int(c, "grid.ny", 64, 8)};

  e.phantom = c.get("phantom.kind", e.phantom);
  e.phantom_path = c.get("phantom.path", "");
  e.phantom_phase = c.get_bool("phantom.phase", false);
  if (e.phantom == "file" && e.phantom_path.empty()) { throw ConfigError("phantom.kind = file needs phantom.path"); }
  if (e.phantom != "file") { parse_phantom_kind(e.phantom); }

  e.mask.kind = parse_mask_kind(c.get("mask.kind", "full"));
  e.mask.n = positive_int(c, "mask.n", 2);
  e.mask.fraction = c.get_double("mask.fraction", 1.0);
  e.mask.seed = uint64_t(c.get_int("mask.seed", seed));
  e.mask.center_band = c.get_int("mask.center_band", -1);
  e.mask_path = c.get("mask.path", "");

  e.smaps = c.get("smaps.kind", "synthetic");
  if (e.smaps != "synthetic" && e.smaps != "unit" && e.smaps != "file") { throw ConfigError("unknown smaps.kind '" + e.smaps + "'"); }
  e.coils = positive_int(c, "smaps.coils", 1);
  e.smaps_path = c.get("smaps.path", "");
  if (e.smaps == "file" && e.smaps_path.empty()) { throw ConfigError("smaps.kind = file needs smaps.path"); }

  e.snr_db = c.get_double("noise.snr_db", INFINITY);
  if (std::isnan(e.snr_db) || e.snr_db == -INFINITY) { throw ConfigError("noise.snr_db must be finite or inf"); }
  e.kspace_path = c.get("input.kspace", "");
  e.truth_path = c.get("input.truth", "");

  e.potential = c.get("model.potential", e.potential);
  e.potential_param = c.get_double("model.param", e.potential_param);
  e.transform = c.get("model.transform", e.transform);
  e.levels = positive_int(c, "model.levels", 3);
  e.lambda = c.get_double("model.lambda", -1);
  e.lambda_scale = c.get_double("model.lambda_scale", 0.01);
  if (!(e.lambda_scale >= 0)) { throw ConfigError("model.lambda_scale must be >= 0"); }
  make_potential(e);

  e.patch.height = positive_int(c, "patch.height", 4);
  e.patch.width = positive_int(c, "patch.width", 4);
  e.patch.stride = positive_int(c, "patch.stride", 1);
  e.alpha = c.get_double("patch.alpha", e.alpha);
  e.atoms = positive_int(c, "patch.atoms", 0, 0);

  e.solvers = c.get_list("solver.name", e.solvers);
  if (e.solvers.empty()) { throw ConfigError("solver.name lists no solver"); }
  e.iters = positive_int(c, "solver.iters", 100, 0);
  e.rel_tol = c.get_double("solver.rel_tol", 0);
  e.residual_tol = c.get_double("solver.residual_tol", 0);
  e.mu = c.get_double("solver.mu", 0);
  e.inner_cg = positive_int(c, "solver.inner_cg", 0, 0);
  e.tau = c.get_double("solver.tau", 0);
  e.sigma = c.get_double("solver.sigma", 0);
  e.kappa = c.get_double("solver.kappa", 20);
  e.restart = c.get("solver.restart", "none");
  parse_restart(e.restart);
  std::string const prec = c.get("solver.precision", "double");
  if (prec == "double") {
    e.precision = Precision::double_precision;
  } else if (prec == "single") {
    e.precision = Precision::single_precision;
  } else {
    throw ConfigError("solver.precision must be double or single");
  }

  e.out_dir = c.get("output.dir", ".");
  std::string const timing = c.get("output.timing", "none");
  if (timing != "none" && timing != "wall") { throw ConfigError("output.timing must be none or wall"); }
  e.timing = timing == "wall";
  e.write_images = c.get_bool("output.images", true);
  return e;
}

std::vector<std::string> preset_names() { return {"fig-ep", "fig-odwt", "quadratic", "full"}; }

Config preset_config(std::string const &name)
{
  // Shared by every preset: 64x64 Shepp-Logan, zero-filled start, lambda = 0.01 ||A'y||_inf.
  std::string text = "seed = 0\ngrid.nx = 64\ngrid.ny = 64\nphantom.kind = shepp_logan\nmodel.lambda_scale = 0.01\n";
  if (name == "fig-ep") {
    text += "mask.kind = variable_density_lines\nmask.fraction = 0.34\n"
            "smaps.kind = unit\nnoise.snr_db = 40\n"
            "model.potential = fair\nmodel.param = 0.1\nmodel.transform = finite_diff\n"
            "solver.name = ncg,ogm\nsolver.iters = 1000\n";
  } else if (name == "fig-odwt") {
    text += "mask.kind = variable_density_lines\nmask.fraction = 0.34\n"
            "smaps.kind = unit\nnoise.snr_db = 40\n"
            "model.transform = odwt\nmodel.levels = 3\n"
            "solver.name = ista,fista,pogm\nsolver.iters = 300\n";
  } else if (name == "quadratic") {
    text += "mask.kind = variable_density_lines\nmask.fraction = 0.34\n"
            "smaps.kind = synthetic\nsmaps.coils = 4\nnoise.snr_db = 40\n"
            "model.potential = quadratic\nmodel.transform = finite_diff\nmodel.lambda_scale = 0.1\n"
            "solver.name = cg,pcg\nsolver.iters = 300\nsolver.residual_tol = 1e-6\n";
  } else if (name == "full") {
    text += "mask.kind = full\nsmaps.kind = synthetic\nsmaps.coils = 4\n"
            "solver.name = coil_combine\n";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return Config::parse(text);
}

Problem build_problem(ExperimentConfig const &cfg)
{
  std::optional<Image> truth;
  KSpaceData y;
  SensitivityMaps maps;
  if (!cfg.kspace_path.empty()) {
    y = read_kspace(cfg.kspace_path);
    Grid const g = y.mask.grid();
    if (cfg.smaps == "file") {
      maps = read_maps(cfg.smaps_path);
    } else if (cfg.smaps == "unit") {
      maps = SensitivityMaps::unit(g);
    } else {
      maps = synthetic_maps(g, cfg.coils, cfg.seed + 2);
    }
    if (!cfg.truth_path.empty()) { truth = read_image(cfg.truth_path); }
    return Problem{SystemOperator(y.mask, std::move(maps), cfg.precision), std::move(y), std::move(truth)};
  }

  if (cfg.phantom == "file") {
    truth = read_image(cfg.phantom_path);
  } else {
    truth = make_phantom(parse_phantom_kind(cfg.phantom), cfg.grid, cfg.phantom_phase);
  }
  Grid const g = truth->grid();
  SamplingMask mask = cfg.mask_path.empty() ? make_mask(cfg.mask, g) : read_mask(cfg.mask_path);
  if (cfg.smaps == "file") {
    maps = read_maps(cfg.smaps_path);
  } else if (cfg.smaps == "unit") {
    maps = SensitivityMaps::unit(g);
  } else {
    maps = synthetic_maps(g, cfg.coils, cfg.seed + 2);
  }
  SystemOperator op(std::move(mask), std::move(maps), cfg.precision);
  y = simulate(op, *truth, cfg.snr_db, cfg.seed + 1);
  return Problem{std::move(op), std::move(y), std::move(truth)};
}

Problem simulate_to_files(ExperimentConfig const &cfg)
{
  Problem p = build_problem(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::path const dir(cfg.out_dir);
  if (p.truth) {
    write_image((dir / "truth.cplx").string(), *p.truth);
    write_pgm((dir / "truth.pgm").string(), *p.truth);
  }
  write_maps((dir / "maps.cplx").string(), p.op.smaps());
  write_kspace((dir / "kspace").string(), p.y);
  return p;
}

ImageResult run_solver(std::string const &name, ExperimentConfig const &cfg, Problem const &problem, double lambda,
                       Image const &x0)
{
  SystemOperator const &op = problem.op;
  KSpaceData const &y = problem.y;
  ErrorMetric metric;
  if (problem.truth) {
    Image const truth = *problem.truth;
    metric = [truth](CVector const &x) { return nrmse(x, truth.vec()); };
  }
  auto inner = [&](int fallback) { return cfg.inner_cg > 0 ? cfg.inner_cg : fallback; };

  if (name == "cg" || name == "pcg") {
    auto o = base_options<CgOptions>(cfg, metric);
    o.residual_tol = cfg.residual_tol;
    o.preconditioned = name == "pcg";
    SmoothCost const cost(op, y, lambda, make_transform(cfg, op.grid()), make_potential(cfg));
    CgQuadraticResult r = cg_quadratic(cost, x0, o);
    return {std::move(r.x), std::move(r.trace)};
  }
  if (name == "gd" || name == "ncg" || name == "ogm") {
    SmoothCost const cost(op, y, lambda, make_transform(cfg, op.grid()), make_potential(cfg));
    auto o = base_options<SolverOptions>(cfg, metric);
    if (name == "ncg") { return ncg(cost, x0, o); }
    return name == "gd" ? gradient_descent(cost, x0, cost.lipschitz(), o) : ogm(cost, x0, cost.lipschitz(), o);
  }
  if (name == "ista" || name == "fista" || name == "pogm") {
    Transform const T = make_transform(cfg, op.grid());
    CompositeProblem const cp = synthesis_l1_problem(op, y, T, lambda);
    SolverTrace log;
    Majorizer const D = select_majorizer(op, T, &log);
    CVector const z0 = T.apply(x0);
    SolverResult r;
    if (name == "ista") {
      r = ista(cp, z0, D, base_options<SolverOptions>(cfg, metric));
    } else if (name == "fista") {
      r = fista(cp, z0, D, base_options<SolverOptions>(cfg, metric));
    } else {
      auto o = base_options<PogmOptions>(cfg, metric);
      o.restart = parse_restart(cfg.restart);
      r = pogm(cp, z0, D.L, o);
    }
    for (auto &e : log.events) { r.trace.events.insert(r.trace.events.begin(), e); }
    return {Image(op.grid(), T.adjoint(r.x)), std::move(r.trace)};
  }
  if (name == "pgm") {
    CompositeProblem const cp = image_prox_problem(op, y, make_potential(cfg), lambda);
    SolverResult r = pgm_general(cp, x0.vec(), data_lipschitz(op), base_options<SolverOptions>(cfg, metric));
    return {Image(op.grid(), std::move(r.x)), std::move(r.trace)};
  }
  if (name == "admm") {
    auto o = base_options<AdmmOptions>(cfg, metric);
    o.mu = cfg.mu;
    o.inner_cg = inner(3);
    AdmmResult r = admm_analysis(op, y, make_transform(cfg, op.grid()), lambda, x0, o);
    return {std::move(r.state.x), std::move(r.trace)};
  }
  if (name == "admm_structured") {
    Transform const T = make_transform(cfg, op.grid());
    return admm_structured(op, y, T, lambda, condition_penalties(op, T, cfg.kappa), x0,
                           base_options<SolverOptions>(cfg, metric));
  }
  if (name == "primal_dual") {
    auto o = base_options<PrimalDualOptions>(cfg, metric);
    o.tau = cfg.tau;
    o.sigma = cfg.sigma;
    return primal_dual(op, y, make_transform(cfg, op.grid()), lambda, x0, o);
  }
  if (name == "analysis_alternate" || name == "tlmri") {
    TransformModel omega = TransformModel::dct2(cfg.patch.height, cfg.patch.width);
    if (name == "analysis_alternate") {
      return analysis_alternate(op, y, cfg.patch, omega, lambda, cfg.alpha, x0, base_options<SolverOptions>(cfg, metric));
    }
    auto o = base_options<TlmriOptions>(cfg, metric);
    o.inner_cg = inner(5);
    TlmriResult r = tlmri(op, y, cfg.patch, std::move(omega), lambda, cfg.alpha, x0, o);
    return {std::move(r.x), std::move(r.trace)};
  }
  if (name == "dlmri") {
    Index const d = cfg.patch.patch_size();
    Dictionary D = Dictionary::overcomplete_dct(cfg.patch.height, cfg.patch.width, cfg.atoms > 0 ? cfg.atoms : 2 * d);
    auto o = base_options<DlmriOptions>(cfg, metric);
    o.inner_cg = inner(5);
    DlmriResult r = dlmri(op, y, cfg.patch, std::move(D), lambda, cfg.alpha, x0, o);
    return {std::move(r.x), std::move(r.trace)};
  }
  if (name == "coil_combine" || name == "sense") {
    Image x = name == "coil_combine" ? coil_combine(y, op.smaps()) : sense_block_solve(y, op.smaps(), cfg.mask.n);
    TraceRecorder rec(base_options<SolverOptions>(cfg, metric));
    rec.record(0, op.data_cost(x, y), x.vec());
    return {std::move(x), rec.take()};
  }
  throw ConfigError("unknown solver '" + name + "'");
}

std::string ExperimentSummary::to_json() const
{
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["lambda"] = lambda;
  j["sampling_fraction"] = sampling_fraction;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (SolverSummary const &s : solvers) {
    nlohmann::ordered_json o;
    o["solver"] = s.solver;
    o["final_cost"] = s.final_cost;
    o["final_nrmse"] = std::isnan(s.final_nrmse) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(s.final_nrmse);
    o["iterations"] = s.iterations;
    o["events"] = s.events;
    arr.push_back(std::move(o));
  }
  j["solvers"] = std::move(arr);
  j["agreement_nrmse"] = agreement;
  return j.dump(2) + "\n";
}

ExperimentSummary run_experiment(ExperimentConfig const &cfg)
{
  Problem const problem = build_problem(cfg);
  double const lambda = cfg.lambda >= 0 ? cfg.lambda : lambda_heuristic(problem.op, problem.y, cfg.lambda_scale);
  Image const x0 = zero_filled_image(problem.op, problem.y);

  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::path const dir(cfg.out_dir);
  ExperimentSummary summary;
  summary.seed = cfg.seed;
  summary.lambda = lambda;
  summary.sampling_fraction = problem.op.mask().fraction();
  auto flush = [&] {
    std::ofstream f(dir / "summary.json", std::ios::trunc);
    if (!f) { throw IoError("cannot write summary.json in '" + cfg.out_dir + "'"); }
    f << summary.to_json();
  };

  std::optional<Image> first;
  for (std::string const &name : cfg.solvers) {
    ImageResult r = run_solver(name, cfg, problem, lambda, x0);
    write_trace_csv((dir / ("trace_" + name + ".csv")).string(), r.trace, cfg.timing);
    if (cfg.write_images) {
      write_image((dir / ("image_" + name + ".cplx")).string(), r.x);
      write_pgm((dir / ("image_" + name + ".pgm")).string(), r.x);
    }
    SolverSummary s;
    s.solver = name;
    s.final_cost = r.trace.final_cost();
    s.final_nrmse = problem.truth ? nrmse(r.x, *problem.truth) : NAN;
    s.iterations = r.trace.iterations();
    s.events = r.trace.events;
    summary.solvers.push_back(std::move(s));
    if (!first) {
      first = r.x;
    } else {
      summary.agreement.push_back(nrmse(r.x, *first));
    }
    flush();
  }
  return summary;
}

} // namespace pmri
