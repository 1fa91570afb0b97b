#include "pmri/harness/experiment.hpp"
#include "pmri/harness/io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

using namespace pmri;

namespace {

constexpr int kConfigExit = 2;
constexpr int kSolverExit = 3;

struct Overrides
{
  std::optional<long long> seed;
  std::optional<int> iters;
  std::optional<double> lambda;
  std::string out;
};

void add_overrides(CLI::App *cmd, Overrides &o)
{
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("--iters", o.iters, "Override solver.iters");
  cmd->add_option("--lambda", o.lambda, "Override model.lambda (absolute value)");
}

ExperimentConfig resolve(Config cfg, Overrides const &o)
{
  if (o.seed) { cfg.set("seed", std::to_string(*o.seed)); }
  if (o.iters) { cfg.set("solver.iters", std::to_string(*o.iters)); }
  if (o.lambda) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *o.lambda);
    cfg.set("model.lambda", buf);
  }
  if (!o.out.empty()) { cfg.set("output.dir", o.out); }
  return experiment_from_config(cfg);
}

void print_summary(ExperimentSummary const &s)
{
  std::printf("sampling fraction %.4f, lambda %.6g\n", s.sampling_fraction, s.lambda);
  for (SolverSummary const &r : s.solvers) {
    std::printf("%-18s iters %5d  cost %.10e  nrmse %.6e\n", r.solver.c_str(), r.iterations, r.final_cost, r.final_nrmse);
    for (std::string const &e : r.events) { std::printf("    %s\n", e.c_str()); }
  }
  for (size_t k = 0; k < s.agreement.size(); ++k) {
    std::printf("nrmse(%s, %s) = %.3e\n", s.solvers[k + 1].solver.c_str(), s.solvers[0].solver.c_str(), s.agreement[k]);
  }
}

void info(std::string const &path)
{
  std::string const fmt = detect_format(path);
  if (fmt == "CPLX1") {
    ComplexArray const a = read_cplx(path);
    std::printf("CPLX1 dims (");
    for (size_t k = 0; k < a.dims.size(); ++k) { std::printf("%s%u", k ? ", " : "", a.dims[k]); }
    std::printf(")  values %lld  max |x| %.6g  ||x|| %.6g\n", static_cast<long long>(a.data.size()),
                a.data.size() ? a.data.cwiseAbs().maxCoeff() : 0.0, a.data.norm());
  } else if (fmt == "MASK1") {
    SamplingMask const m = read_mask(path);
    std::printf("MASK1 grid %s  sampled %lld  fraction %.4f\n", to_string(m.grid()).c_str(),
                static_cast<long long>(m.count()), m.fraction());
  } else if (fmt == "PGM") {
    std::printf("PGM image\n");
  } else {
    throw ConfigError("'" + path + "' is not a CPLX1, MASK1 or PGM file");
  }
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Parallel MRI reconstruction experiments"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides sim_o, run_o, preset_o;

  auto *sim = app.add_subcommand("simulate", "Generate phantom, maps and k-space files from a config");
  sim->add_option("--config", config_path, "Config file (key = value or JSON)")->required();
  sim->add_option("--out", sim_o.out, "Override output.dir");
  add_overrides(sim, sim_o);

  auto *run = app.add_subcommand("run", "Run the configured solvers and write traces, images and a summary");
  run->add_option("--config", config_path, "Config file (key = value or JSON)")->required();
  run->add_option("--out", run_o.out, "Override output.dir");
  add_overrides(run, run_o);

  std::string preset_name;
  auto *preset = app.add_subcommand("preset", "Run a named experiment preset");
  preset->add_option("name", preset_name, "fig-ep, fig-odwt, quadratic or full")->required();
  preset->add_option("--out", preset_o.out, "Output directory")->required();
  add_overrides(preset, preset_o);

  std::string info_path;
  auto *inf = app.add_subcommand("info", "Describe a CPLX1, MASK1 or PGM file");
  inf->add_option("file", info_path)->required();

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*sim) {
      ExperimentConfig const cfg = resolve(Config::load(config_path), sim_o);
      Problem const p = simulate_to_files(cfg);
      std::printf("wrote %s (grid %s, %lld coils, %lld samples, fraction %.4f)\n", cfg.out_dir.c_str(),
                  to_string(p.op.grid()).c_str(), static_cast<long long>(p.op.ncoils()),
                  static_cast<long long>(p.op.mask().count()), p.op.mask().fraction());
    } else if (*run) {
      print_summary(run_experiment(resolve(Config::load(config_path), run_o)));
    } else if (*preset) {
      print_summary(run_experiment(resolve(preset_config(preset_name), preset_o)));
    } else if (*inf) {
      info(info_path);
    }
  } catch (SolverError const &e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kSolverExit;
  } catch (std::invalid_argument const &e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfigExit;
  } catch (std::logic_error const &e) {
    std::fprintf(stderr, "unsupported configuration: %s\n", e.what());
    return kConfigExit;
  } catch (IoError const &e) {
    std::fprintf(stderr, "file error: %s\n", e.what());
    return kConfigExit;
  } catch (std::exception const &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolverExit;
  }
  return 0;
}
