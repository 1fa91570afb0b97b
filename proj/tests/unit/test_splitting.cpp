#include "fixtures.hpp"
#include "oracles.hpp"

#include "pmri/solvers/smooth.hpp"
#include "pmri/solvers/splitting.hpp"

#include <doctest.h>

using namespace pmri;
using namespace fixture;

namespace {

struct TvProblem
{
  SystemOperator op;
  KSpaceData y;
  Transform T;
  double lambda;
};

TvProblem tv_problem(uint64_t seed)
{
  auto p = small_problem(8, 1, 0.5, seed, 25);
  Transform T = Transform::finite_diff(p.op.grid());
  double const lambda = lambda_heuristic(p.op, p.y, 0.05);
  return {p.op, p.y, T, lambda};
}

} // namespace

TEST_CASE("admm with lambda zero is least squares")
{
  Grid const g{8, 8};
  SystemOperator op(SamplingMask::full(g), synthetic_maps(g, 2, 1));
  KSpaceData y = random_kspace(op.mask(), 2, 2);
  AdmmOptions o;
  o.iters = 200;
  auto r = admm_analysis(op, y, Transform::finite_diff(g), 0.0, Image(g), o);
  CHECK(rel(r.state.x.vec(), coil_combine(y, op.smaps()).vec()) < 1e-6);
  CHECK(r.state.mu == 1.0);
}

TEST_CASE("admm, structured admm and primal-dual agree on a TV problem")
{
  auto p = tv_problem(3);
  Image const x0(p.op.grid());
  AdmmOptions ao;
  ao.iters = 4000;
  auto a = admm_analysis(p.op, p.y, p.T, p.lambda, x0, ao);
  CHECK(a.state.mu == p.lambda);
  CHECK(a.constraint_residual.back() < 1e-6);

  SolverOptions so;
  so.iters = 4000;
  auto s = admm_structured(p.op, p.y, p.T, p.lambda, condition_penalties(p.op, p.T), x0, so);

  PrimalDualOptions po;
  po.iters = 20000;
  PrimalDualState pds;
  auto d = primal_dual(p.op, p.y, p.T, p.lambda, x0, po, &pds);
  CHECK(pds.z.cwiseAbs().maxCoeff() <= 1.0);

  double const ca = a.trace.final_cost();
  CHECK(rel(s.trace.final_cost(), ca) < 1e-5);
  CHECK(rel(d.trace.final_cost(), ca) < 1e-6);
  CHECK(analysis_l1_cost(p.op, p.y, p.T, p.lambda, a.state.x) == doctest::Approx(ca));

  SUBCASE("a converged admm state is stationary")
  {
    AdmmOptions more = ao;
    more.iters = 20;
    auto again = admm_analysis(p.op, p.y, p.T, p.lambda, a.state.x, more, a.state);
    CHECK((again.state.x.vec() - a.state.x.vec()).norm() < 1e-8 * a.state.x.vec().norm());
  }
}

TEST_CASE("admm z-update is the soft threshold")
{
  auto p = tv_problem(5);
  AdmmOptions o;
  o.iters = 1;
  Image x0 = random_image(p.op.grid(), 1);
  auto r = admm_analysis(p.op, p.y, p.T, p.lambda, x0, o);
  CHECK(rel(r.state.z, soft_threshold(p.T.apply(x0), p.lambda / r.state.mu)) < 1e-15);
}

TEST_CASE("admm configuration errors")
{
  auto p = tv_problem(1);
  Image x0(p.op.grid());
  AdmmOptions o;
  o.mu = -1;
  CHECK_THROWS_AS(admm_analysis(p.op, p.y, p.T, p.lambda, x0, o), ConfigError);
  o.mu = 1;
  o.inner_cg = 0;
  CHECK_THROWS_AS(admm_analysis(p.op, p.y, p.T, p.lambda, x0, o), ConfigError);
  CHECK_THROWS_AS(AdmmStructured(p.op, p.y, p.T, p.lambda, StructuredPenalties{0, 1, 1}), ConfigError);
}

TEST_CASE("condition_penalties")
{
  Grid const g{8, 8};
  Transform T = Transform::finite_diff(g);
  SUBCASE("closed forms for a unit coil")
  {
    SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
    auto mu = condition_penalties(op, T, 20);
    CHECK(mu.mu_u == doctest::Approx(64.0 / 19.0));
    CHECK((8 * mu.mu_z + mu.mu_v) / mu.mu_v <= 20 * (1 + 1e-12));
  }
  SUBCASE("dense condition numbers stay below the target")
  {
    SystemOperator op(random_mask(g, 0.5, 2), random_maps(g, 2, 3));
    double const kappa = 20;
    auto mu = condition_penalties(op, T, kappa);
    Index const N = 64;
    CMatrix const F = oracle::dft_matrix(g);
    CMatrix const S = oracle::system_matrix(op.mask(), SensitivityMaps::unit(g)) * F.inverse();
    CMatrix const u_mat = F.adjoint() * S.adjoint() * S * F + mu.mu_u * CMatrix::Identity(N, N);
    CHECK(oracle::condition_number(u_mat) <= kappa * (1 + 1e-9));
    CMatrix const D = oracle::finite_diff_matrix(g);
    CHECK(oracle::condition_number(mu.mu_z * D.adjoint() * D + mu.mu_v * CMatrix::Identity(N, N)) <= kappa * (1 + 1e-9));
    CMatrix CC = CMatrix::Zero(N, N);
    CC.diagonal() = op.smaps().sum_of_squares().cast<Complex>();
    CHECK(oracle::condition_number(mu.mu_u * CC + mu.mu_v * CMatrix::Identity(N, N)) <= kappa * (1 + 1e-9));
  }
  CHECK_THROWS_AS(condition_penalties(SystemOperator(SamplingMask::full(g), SensitivityMaps::unit(g)), T, 1.0), ConfigError);
}

TEST_CASE("structured admm subproblems are solved exactly")
{
  Grid const g{8, 8};
  SystemOperator op(random_mask(g, 0.5, 4), random_maps(g, 2, 5));
  KSpaceData y = random_kspace(op.mask(), 2, 6);
  Transform T = Transform::finite_diff(g);
  AdmmStructured s(op, y, T, 0.5, condition_penalties(op, T));
  s.initialize(random_image(g, 7));
  for (int k = 0; k < 5; ++k) {
    s.update_u();
    CHECK(s.u_normal_residual() < 1e-10);
    s.update_v();
    CHECK(s.v_normal_residual() < 1e-10);
    s.update_x();
    CHECK(s.x_normal_residual() < 1e-10);
    s.update_z();
    s.update_duals();
  }
}

TEST_CASE("structured admm with lambda zero is least squares")
{
  Grid const g{8, 8};
  SystemOperator op(SamplingMask::full(g), synthetic_maps(g, 2, 1));
  KSpaceData y = random_kspace(op.mask(), 2, 2);
  Transform T = Transform::finite_diff(g);
  SolverOptions o;
  o.iters = 500;
  auto r = admm_structured(op, y, T, 0.0, condition_penalties(op, T), Image(g), o);
  CHECK(rel(r.x.vec(), coil_combine(y, op.smaps()).vec()) < 1e-6);
}

TEST_CASE("structured admm with huge penalties stays finite")
{
  auto p = tv_problem(2);
  AdmmStructured s(p.op, p.y, p.T, p.lambda, StructuredPenalties{1e6, 1e6, 1e6});
  s.initialize(Image(p.op.grid()));
  for (int k = 0; k < 50; ++k) { s.step(); }
  CHECK(std::isfinite(s.cost()));
  auto res = s.constraint_residuals();
  for (double r : res) { CHECK(std::isfinite(r)); }
}

TEST_CASE("primal-dual")
{
  auto p = tv_problem(4);
  Grid const g = p.op.grid();
  SUBCASE("lambda zero is gradient descent on the data term")
  {
    PrimalDualOptions o;
    o.iters = 10;
    double const tau = 0.99 / data_lipschitz(p.op);
    CVector x = CVector::Zero(g.size());
    for (int k = 0; k < 10; ++k) {
      KSpaceData r = p.op.forward(Image(g, x));
      r.samples -= p.y.samples;
      x -= tau * p.op.adjoint(r).vec();
    }
    CHECK(rel(primal_dual(p.op, p.y, p.T, 0.0, Image(g), o).x.vec(), x) < 1e-10);
  }
  SUBCASE("projection")
  {
    CVector z(3);
    z << Complex{0.3, 0.4}, Complex{0, -1}, Complex{3, 4};
    CVector pz = project_inf_ball(z, RVector::Ones(3));
    CHECK(pz[0] == z[0]);
    CHECK(pz[1] == z[1]);
    CHECK(std::abs(pz[2] - Complex{0.6, 0.8}) < 1e-15);
    CHECK(rel(project_inf_ball(pz, RVector::Ones(3)), pz) == 0.0);
  }
  SUBCASE("unstable steps are rejected")
  {
    PrimalDualOptions o;
    o.tau = 2.5 / data_lipschitz(p.op);
    CHECK_THROWS_AS(primal_dual(p.op, p.y, p.T, p.lambda, Image(g), o), ConfigError);
    o.tau = 0.5 / data_lipschitz(p.op);
    o.sigma = 100.0 / (p.lambda * p.lambda);
    CHECK_THROWS_AS(primal_dual(p.op, p.y, p.T, p.lambda, Image(g), o), ConfigError);
  }
}
