#pragma once

#include "pmri/core/types.hpp"

#include <chrono>
#include <functional>
#include <string>
#include <vector>

namespace pmri {

struct TraceRecord
{
  int iter = 0;
  double cost = 0;
  double nrmse = 0; ///< NaN when no reference is attached
  double seconds = 0;
};

/// Per-iteration history of a solver run, starting with the initial iterate at iter 0.
struct SolverTrace
{
  std::vector<TraceRecord> records;
  std::vector<std::string> events; ///< notable run events (restarts, fallbacks, early stops)
  bool stopped_early = false;

  double final_cost() const { return records.empty() ? 0.0 : records.back().cost; }
  int iterations() const { return records.empty() ? 0 : records.back().iter; }
};

/// Maps an iterate to an error figure against a reference (typically NRMSE).
using ErrorMetric = std::function<double(CVector const &)>;

struct SolverOptions
{
  int iters = 100;
  /// Stop once |cost_k - cost_{k-1}| <= rel_tol |cost_{k-1}|; 0 disables.
  double rel_tol = 0;
  ErrorMetric metric;
  /// Record cost and error every iteration. Inner solvers switch this off.
  bool record = true;
};

struct SolverResult
{
  CVector x;
  SolverTrace trace;
};

struct ImageResult
{
  Image x;
  SolverTrace trace;
};

class TraceRecorder
{
public:
  explicit TraceRecorder(SolverOptions const &opts)
    : metric_{opts.metric}
    , rel_tol_{opts.rel_tol}
    , start_{std::chrono::steady_clock::now()}
  {
  }

  void record(int k, double cost, CVector const &x);

  /// True when the relative cost change between the last two records is below the tolerance.
  bool converged() const;

  void event(std::string msg) { trace_.events.push_back(std::move(msg)); }
  void stopped_early() { trace_.stopped_early = true; }
  SolverTrace &trace() { return trace_; }
  SolverTrace take() { return std::move(trace_); }

private:
  ErrorMetric metric_;
  double rel_tol_;
  std::chrono::steady_clock::time_point start_;
  SolverTrace trace_;
};

/// Throws SolverError when x contains NaN or infinity.
void require_finite(CVector const &x, char const *solver, int iter);

/// Throws InvariantViolation when `current` exceeds `previous` by more than `slack` relative.
void require_nonincreasing(double previous, double current, double slack, char const *solver, int iter);

} // namespace pmri
