#include "fixtures.hpp"
#include "oracles.hpp"

#include "pmri/solvers/linear.hpp"
#include "pmri/solvers/smooth.hpp"

#include <doctest.h>

using namespace pmri;
using namespace fixture;

namespace {

SmoothCost dense_friendly_cost(Potential psi, double lambda, uint64_t seed)
{
  Grid const g{8, 8};
  SystemOperator op(random_mask(g, 0.5, seed), random_maps(g, 2, seed + 1));
  KSpaceData y = random_kspace(op.mask(), 2, seed + 2);
  return SmoothCost(op, y, lambda, Transform::finite_diff(g), psi);
}

void check_trace_indices(SolverTrace const &t)
{
  REQUIRE(!t.records.empty());
  CHECK(t.records.front().iter == 0);
  for (size_t k = 1; k < t.records.size(); ++k) { CHECK(t.records[k].iter > t.records[k - 1].iter); }
}

} // namespace

TEST_CASE("cg on a scaled identity converges in one iteration")
{
  Grid const g{8, 8};
  SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
  KSpaceData y = random_kspace(op.mask(), 1, 3);
  SmoothCost cost(op, y, 0.0, Transform::finite_diff(g), Potential::quadratic());
  CgOptions opts;
  opts.iters = 10;
  opts.residual_tol = 1e-12;
  auto r = cg_quadratic(cost, Image(g), opts);
  CHECK(r.iterations == 1);
  CHECK(rel(r.x.vec(), coil_combine(y, op.smaps()).vec()) < 1e-12);
}

TEST_CASE("cg matches the dense solve and is monotone")
{
  SmoothCost cost = dense_friendly_cost(Potential::quadratic(), 0.7, 10);
  CMatrix const A = oracle::system_matrix(cost.op().mask(), cost.op().smaps());
  CMatrix const T = oracle::finite_diff_matrix(cost.grid());
  CVector const exact = oracle::dense_quadratic_solve(A, oracle::stack(cost.data().samples), T, 0.7);
  CgOptions opts;
  opts.iters = 200;
  opts.residual_tol = 1e-13;
  auto r = cg_quadratic(cost, Image(cost.grid()), opts);
  CHECK(rel(r.x.vec(), exact) < 1e-8);
  check_trace_indices(r.trace);
  for (size_t k = 1; k < r.trace.records.size(); ++k) {
    CHECK(r.trace.records[k].cost <= r.trace.records[k - 1].cost * (1 + 1e-14));
  }

  opts.preconditioned = true;
  auto p = cg_quadratic(cost, Image(cost.grid()), opts);
  CHECK(rel(p.x.vec(), exact) < 1e-8);

  SUBCASE("starting at the solution stops immediately")
  {
    CgOptions o;
    o.iters = 50;
    o.residual_tol = 1e-6;
    auto s = cg_quadratic(cost, Image(cost.grid(), exact), o);
    CHECK(s.iterations == 0);
    CHECK(rel(s.x.vec(), exact) < 1e-14);
  }
}

TEST_CASE("cg rejects a non-quadratic potential")
{
  SmoothCost cost = dense_friendly_cost(Potential::fair(0.1), 0.1, 1);
  CHECK_THROWS_AS(cg_quadratic(cost, Image(cost.grid()), CgOptions{}), ConfigError);
}

TEST_CASE("smooth cost needs a smooth potential")
{
  Grid const g{4, 4};
  SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
  KSpaceData y = random_kspace(op.mask(), 1, 1);
  CHECK_THROWS_AS(SmoothCost(op, y, 1.0, Transform::finite_diff(g), Potential::abs()), UnsupportedError);
  CHECK_THROWS_AS(SmoothCost(op, y, -1.0, Transform::finite_diff(g), Potential::quadratic()), ConfigError);
}

TEST_CASE("gradient matches directional finite differences")
{
  for (auto psi : {Potential::quadratic(), Potential::fair(0.1), Potential::hyperbola(0.01)}) {
    SmoothCost cost = dense_friendly_cost(psi, 0.3, 20);
    Rng rng(5);
    for (int t = 0; t < 5; ++t) {
      CVector x = rng.complex_normal(64);
      CVector d = rng.complex_normal(64);
      double const h = 1e-5;
      double const fd = (cost.value(x + h * d) - cost.value(x - h * d)) / (2 * h);
      double const an = re_dot(cost.gradient(x), d);
      CHECK(std::abs(fd - an) <= 1e-5 * std::abs(an));
    }
  }
}

TEST_CASE("gradient descent")
{
  SUBCASE("zero gradient is a fixed point")
  {
    Grid const g{4, 4};
    SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
    SmoothCost cost(op, KSpaceData(op.mask(), CMatrix::Zero(16, 1)), 1.0, Transform::finite_diff(g),
                    Potential::fair(0.1));
    SolverOptions o;
    o.iters = 5;
    auto r = gradient_descent(cost, Image(g), cost.lipschitz(), o);
    CHECK(r.x.vec().norm() == 0.0);
  }
  SUBCASE("quadratic iterates follow the linear recursion")
  {
    Grid const g{4, 4};
    SystemOperator op(random_mask(g, 0.6, 2), random_maps(g, 1, 3));
    KSpaceData y = random_kspace(op.mask(), 1, 4);
    SmoothCost cost(op, y, 0.5, Transform::finite_diff(g), Potential::quadratic());
    CMatrix const A = oracle::system_matrix(op.mask(), op.smaps());
    CMatrix const T = oracle::finite_diff_matrix(g);
    CMatrix const H = A.adjoint() * A + 0.5 * T.adjoint() * T;
    CVector const b = A.adjoint() * oracle::stack(y.samples);
    double const L = cost.lipschitz();
    CVector x = CVector::Zero(16);
    for (int k = 0; k < 7; ++k) { x = x - (H * x - b) / L; }
    SolverOptions o;
    o.iters = 7;
    auto r = gradient_descent(cost, Image(g), L, o);
    CHECK(rel(r.x.vec(), x) < 1e-12);
  }
  SUBCASE("monotone on an edge-preserving problem")
  {
    auto p = small_problem(32, 1, 0.4, 3);
    SmoothCost cost(p.op, p.y, lambda_heuristic(p.op, p.y), Transform::finite_diff(p.op.grid()), Potential::fair(0.1));
    SolverOptions o;
    o.iters = 50;
    auto r = gradient_descent(cost, zero_filled_image(p.op, p.y), cost.lipschitz(), o);
    for (size_t k = 1; k < r.trace.records.size(); ++k) {
      CHECK(r.trace.records[k].cost <= r.trace.records[k - 1].cost);
    }
  }
  SUBCASE("a step that is too long is detected")
  {
    SmoothCost cost = dense_friendly_cost(Potential::quadratic(), 0.1, 5);
    SolverOptions o;
    o.iters = 50;
    CHECK_THROWS_AS(gradient_descent(cost, Image(cost.grid()), 0.01 * cost.lipschitz(), o), InvariantViolation);
  }
}

TEST_CASE("nonlinear CG with a quadratic potential reproduces linear CG")
{
  SmoothCost cost = dense_friendly_cost(Potential::quadratic(), 0.4, 30);
  for (int k = 1; k <= 6; ++k) {
    CgOptions co;
    co.iters = k;
    SolverOptions no;
    no.iters = k;
    auto c = cg_quadratic(cost, Image(cost.grid()), co);
    auto n = ncg(cost, Image(cost.grid()), no);
    CHECK(rel(n.x.vec(), c.x.vec()) < 1e-8);
  }
}

TEST_CASE("nonlinear CG does not move from a stationary point")
{
  Grid const g{8, 8};
  SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
  SmoothCost cost(op, KSpaceData(op.mask(), CMatrix::Zero(64, 1)), 1.0, Transform::finite_diff(g), Potential::fair(0.1));
  SolverOptions o;
  o.iters = 5;
  CHECK(ncg(cost, Image(g), o).x.vec().norm() == 0.0);
}

TEST_CASE("nonlinear CG beats gradient descent on an edge-preserving problem")
{
  auto p = small_problem(32, 1, 0.4, 1);
  SmoothCost cost(p.op, p.y, lambda_heuristic(p.op, p.y), Transform::finite_diff(p.op.grid()), Potential::fair(0.1));
  Image const x0 = zero_filled_image(p.op, p.y);
  SolverOptions o;
  o.iters = 400;
  auto n = ncg(cost, x0, o);
  auto gd = gradient_descent(cost, x0, cost.lipschitz(), o);
  double const fstar = std::min(n.trace.final_cost(), gd.trace.final_cost());
  auto first_within = [&](SolverTrace const &t) {
    for (auto const &r : t.records) {
      if (r.cost <= fstar * 1.001) { return r.iter; }
    }
    return 1 << 30;
  };
  CHECK(first_within(n.trace) < first_within(gd.trace));
  for (size_t k = 1; k < n.trace.records.size(); ++k) {
    CHECK(n.trace.records[k].cost <= n.trace.records[k - 1].cost);
  }
}

TEST_CASE("ogm first iterate on a scalar quadratic")
{
  Grid const g{1, 1};
  SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
  KSpaceData y(op.mask(), CMatrix::Constant(1, 1, Complex{1, 0}));
  SmoothCost cost(op, y, 0.0, Transform::identity(g), Potential::quadratic());
  SolverOptions o;
  o.iters = 1;
  // One iteration uses the final rule theta_1 = 2, so x_1 = w_1 + (w_1 - x_0) / 2 with w_1 = x_0 - f'(x_0) / L.
  auto r = ogm(cost, Image(g), 2.0, o);
  CHECK(std::abs(r.x.vec()[0] - Complex{0.75, 0}) < 1e-15);

  KSpaceData zero(op.mask(), CMatrix::Zero(1, 1));
  SmoothCost flat(op, zero, 0.0, Transform::identity(g), Potential::quadratic());
  o.iters = 5;
  CHECK(ogm(flat, Image(g), 1.0, o).x.vec().norm() == 0.0);
}

TEST_CASE("power iteration and Lipschitz constants")
{
  Grid const g{8, 8};
  SystemOperator op(random_mask(g, 0.5, 3), random_maps(g, 2, 4));
  CMatrix const A = oracle::system_matrix(op.mask(), op.smaps());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(A.adjoint() * A);
  double const top = es.eigenvalues().maxCoeff();
  auto pi = power_iteration([&](CVector const &v) { return op.gram(Image(g, v)).vec(); }, 64, 500, 1e-12);
  CHECK(pi.value >= 0.99 * top);
  CHECK(pi.value <= top * (1 + 1e-12));
  CHECK(data_lipschitz(op) >= top * (1 - 1e-12));

  SystemOperator full(SamplingMask::full(g), synthetic_maps(g, 3, 1));
  CHECK(data_lipschitz(full) == doctest::Approx(64.0));
  SmoothCost cost(full, random_kspace(full.mask(), 3, 2), 0.5, Transform::finite_diff(g), Potential::fair(0.1));
  CHECK(cost.lipschitz() == doctest::Approx(64.0 + 0.5 * 8.0));
}

TEST_CASE("circulant preconditioner is exact for a circulant Hessian")
{
  Grid const g{8, 8};
  SystemOperator op(random_mask(g, 0.5, 1), SensitivityMaps::unit(g));
  Transform T = Transform::finite_diff(g);
  RVector spectrum = gram_circulant_spectrum(op) + 0.3 * T.gram_spectrum();
  CirculantPreconditioner P(g, spectrum);
  Image x = random_image(g, 2);
  CVector const hx = op.gram(x).vec() + 0.3 * T.adjoint(T.apply(x));
  CHECK(rel(P.apply(hx), x.vec()) < 1e-10);

  LinearMap H = [&](CVector const &v) { return CVector(op.gram(Image(g, v)).vec() + 0.3 * T.adjoint(T.apply(v))); };
  CirculantPreconditioner Q(g, H);
  CHECK(rel(Q.apply(hx), x.vec()) < 1e-10);
}
