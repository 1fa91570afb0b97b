#include "pmri/solvers/trace.hpp"

#include <cmath>
#include <limits>

namespace pmri {

void TraceRecorder::record(int k, double cost, CVector const &x)
{
  double const err = metric_ ? metric_(x) : std::numeric_limits<double>::quiet_NaN();
  double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  trace_.records.push_back(TraceRecord{k, cost, err, secs});
}

bool TraceRecorder::converged() const
{
  auto const &r = trace_.records;
  if (rel_tol_ <= 0 || r.size() < 2) { return false; }
  double const prev = r[r.size() - 2].cost;
  double const cur = r.back().cost;
  return std::abs(cur - prev) <= rel_tol_ * std::abs(prev);
}

void require_finite(CVector const &x, char const *solver, int iter)
{
  if (!x.allFinite()) {
    throw SolverError(std::string(solver) + ": non-finite iterate at iteration " + std::to_string(iter));
  }
}

void require_nonincreasing(double previous, double current, double slack, char const *solver, int iter)
{
  if (current > previous + slack * std::max(std::abs(previous), 1e-300)) {
    throw InvariantViolation(std::string(solver) + ": cost increased at iteration " + std::to_string(iter) + " from " +
                             std::to_string(previous) + " to " + std::to_string(current));
  }
}

} // namespace pmri
