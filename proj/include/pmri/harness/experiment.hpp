#pragma once

#include "pmri/core/model.hpp"
#include "pmri/harness/config.hpp"
#include "pmri/harness/synthetic.hpp"
#include "pmri/regularizers/patches.hpp"
#include "pmri/solvers/trace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pmri {

/// Everything a reconstruction run needs, decoded from a Config.
struct ExperimentConfig
{
  uint64_t seed = 0;
  Grid grid{64, 64};

  std::string phantom = "shepp_logan"; ///< shepp_logan | blocks | file
  std::string phantom_path;
  bool phantom_phase = false;

  MaskSpec mask;
  std::string mask_path; ///< overrides the generated mask when set

  Index coils = 1;
  std::string smaps = "synthetic"; ///< synthetic | unit | file
  std::string smaps_path;

  double snr_db = INFINITY;

  /// Measured data from `recon simulate` (stem of .mask/.cplx); when set nothing is simulated.
  std::string kspace_path;
  std::string truth_path;

  std::string potential = "quadratic"; ///< quadratic | fair | hyperbola | huber | abs
  double potential_param = 0.1;
  std::string transform = "finite_diff"; ///< finite_diff | odwt | identity
  int levels = 3;
  double lambda = -1;        ///< < 0 selects lambda_scale ||A'y||_inf
  double lambda_scale = 0.01;

  PatchConfig patch{4, 4, 1};
  double alpha = 0.05;
  Index atoms = 0; ///< dlmri dictionary size; 0 selects 2 d

  std::vector<std::string> solvers{"ncg"};
  int iters = 100;
  double rel_tol = 0;
  double residual_tol = 0;
  double mu = 0;
  int inner_cg = 0; ///< 0 keeps each solver's default
  double tau = 0;
  double sigma = 0;
  double kappa = 20;
  std::string restart = "none"; ///< none | function | gradient
  Precision precision = Precision::double_precision;

  std::string out_dir = ".";
  bool timing = false;
  bool write_images = true;
};

/// Decodes and validates; unknown keys are configuration errors.
ExperimentConfig experiment_from_config(Config const &cfg);

/// Named configurations: fig-ep, fig-odwt, quadratic, full.
Config preset_config(std::string const &name);
std::vector<std::string> preset_names();

/// Operator, data, and (when known) ground truth for a run.
struct Problem
{
  SystemOperator op;
  KSpaceData y;
  std::optional<Image> truth;
};

Problem build_problem(ExperimentConfig const &cfg);

/// Writes truth.cplx, maps.cplx, and kspace.mask/.cplx into the output directory; returns the problem.
Problem simulate_to_files(ExperimentConfig const &cfg);

struct SolverSummary
{
  std::string solver;
  double final_cost = 0;
  double final_nrmse = 0; ///< NaN without ground truth
  int iterations = 0;
  std::vector<std::string> events;
};

struct ExperimentSummary
{
  std::vector<SolverSummary> solvers;
  double sampling_fraction = 0;
  double lambda = 0;
  uint64_t seed = 0;
  /// Pairwise NRMSE between the first solver's image and each later one.
  std::vector<double> agreement;

  std::string to_json() const;
};

/// Runs every configured solver from the zero-filled start, writing trace_<solver>.csv, image_<solver>.cplx,
/// image_<solver>.pgm, and summary.json (rewritten after each solver so partial results survive failures).
ExperimentSummary run_experiment(ExperimentConfig const &cfg);

/// One solver on a prepared problem.
ImageResult run_solver(std::string const &name, ExperimentConfig const &cfg, Problem const &problem, double lambda,
                       Image const &x0);

} // namespace pmri
