#include "fixtures.hpp"
#include "oracles.hpp"

#include "pmri/core/fft.hpp"

#include <doctest.h>

using namespace pmri;
using namespace fixture;

TEST_CASE("fft convention is unnormalized and unshifted")
{
  static_assert(SystemOperator::fft_norm == FftNorm::unnormalized);
  Grid const g{4, 6};
  Fft2<double> fft(g);
  Image x = random_image(g, 1);
  CVector const X = fft2(fft, x.vec());
  CHECK(rel(X, oracle::dft_matrix(g) * x.vec()) < 1e-12);
  CHECK(rel(ifft2_adjoint(fft, X), double(g.size()) * x.vec()) < 1e-12);
}

TEST_CASE("forward of zero and of an impulse")
{
  Grid const g{8, 8};
  SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
  KSpaceData z = op.forward(Image(g));
  CHECK(z.samples.cwiseAbs().maxCoeff() == 0.0);

  Image delta(g);
  delta(0, 0) = 1.0;
  KSpaceData d = op.forward(delta);
  REQUIRE(d.samples.rows() == g.size());
  CHECK((d.samples.array() - Complex{1, 0}).abs().maxCoeff() < 1e-14);
}

TEST_CASE("adjoint of zero data and full-sampling round trip")
{
  Grid const g{8, 6};
  SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
  CHECK(op.adjoint(KSpaceData(op.mask(), CMatrix::Zero(g.size(), 1))).vec().norm() == 0.0);
  Image x = random_image(g, 3);
  CHECK(rel(op.adjoint(op.forward(x)).vec(), double(g.size()) * x.vec()) < 1e-12);
}

TEST_CASE("adjoint identity on 100 random pairs")
{
  Grid const g{12, 10};
  SystemOperator op(random_mask(g, 0.4, 5), random_maps(g, 3, 6));
  double worst = 0;
  for (uint64_t t = 0; t < 100; ++t) {
    Image x = random_image(g, 100 + t);
    KSpaceData y = random_kspace(op.mask(), 3, 900 + t);
    Complex lhs = 0;
    KSpaceData ax = op.forward(x);
    for (Index l = 0; l < 3; ++l) { lhs += y.samples.col(l).dot(ax.samples.col(l)); }
    Complex const rhs = op.adjoint(y).vec().dot(x.vec());
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("gram equals adjoint of forward and the dense oracle")
{
  Grid const g{8, 8};
  SystemOperator op(random_mask(g, 0.5, 7), random_maps(g, 2, 8));
  CMatrix const A = oracle::system_matrix(op.mask(), op.smaps());
  for (uint64_t t = 0; t < 5; ++t) {
    Image x = random_image(g, 20 + t);
    CVector const two_step = op.adjoint(op.forward(x)).vec();
    CHECK(rel(op.gram(x).vec(), two_step) < 1e-12);
    CHECK(rel(op.gram(x).vec(), A.adjoint() * A * x.vec()) < 1e-10);
    CHECK(rel(oracle::stack(op.forward(x).samples), A * x.vec()) < 1e-10);
  }
  CHECK(op.gram(Image(g)).vec().norm() == 0.0);
}

TEST_CASE("gram with full mask and normalized maps is N I")
{
  Grid const g{8, 8};
  SystemOperator op(SamplingMask::full(g), synthetic_maps(g, 3, 1));
  REQUIRE(op.smaps().is_normalized());
  Image x = random_image(g, 9);
  CHECK(rel(op.gram(x).vec(), 64.0 * x.vec()) < 1e-12);
}

TEST_CASE("shape and data errors")
{
  Grid const g{8, 8};
  SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
  CHECK_THROWS_AS(op.forward(Image(Grid{4, 4})), DimensionError);
  SamplingMask other = random_mask(g, 0.5, 1);
  CHECK_THROWS_AS(op.adjoint(KSpaceData(other, CMatrix::Zero(other.count(), 1))), ConfigError);
  CHECK_THROWS_AS(Image(Grid{0, 3}), DimensionError);
  CHECK_THROWS_AS(SamplingMask(g, std::vector<uint8_t>(64, 0)), std::invalid_argument);
  CMatrix bad = CMatrix::Constant(64, 2, Complex{1, 0});
  CHECK_THROWS_AS(SensitivityMaps(g, bad, true), ConfigError);
}

TEST_CASE("sample ordering is row-major over the mask")
{
  Grid const g{4, 4};
  std::vector<uint8_t> keep(16, 0);
  keep[size_t(g.flat(2, 1))] = 1;
  keep[size_t(g.flat(0, 3))] = 1;
  SamplingMask mask(g, keep);
  REQUIRE(mask.count() == 2);
  CHECK(mask.indices()[0] == g.flat(0, 3));
  CHECK(mask.indices()[1] == g.flat(2, 1));
}

TEST_CASE("coil_combine")
{
  Grid const g{8, 8};
  SUBCASE("single unit coil is the inverse FFT")
  {
    SystemOperator op(SamplingMask::full(g), SensitivityMaps::unit(g));
    KSpaceData y = random_kspace(op.mask(), 1, 4);
    CVector const expected = oracle::dft_matrix(g).adjoint() * y.samples.col(0) / 64.0;
    CHECK(rel(coil_combine(y, op.smaps()).vec(), expected) < 1e-12);
  }
  SUBCASE("noiseless data is recovered")
  {
    SystemOperator op(SamplingMask::full(g), random_maps(g, 3, 2));
    Image x = random_image(g, 11);
    CHECK(rel(coil_combine(op.forward(x), op.smaps()).vec(), x.vec()) < 1e-10);
  }
  SUBCASE("matches the dense least-squares solution on noisy data")
  {
    SystemOperator op(SamplingMask::full(g), synthetic_maps(g, 2, 5));
    KSpaceData y = random_kspace(op.mask(), 2, 13);
    CMatrix const A = oracle::system_matrix(op.mask(), op.smaps());
    CVector const ls = (A.adjoint() * A).ldlt().solve(A.adjoint() * oracle::stack(y.samples));
    CHECK(rel(coil_combine(y, op.smaps()).vec(), ls) < 1e-8);
  }
  SUBCASE("zero-sensitivity pixels are zero")
  {
    CMatrix m = CMatrix::Ones(64, 1);
    m(10, 0) = 0.0;
    SensitivityMaps maps(g, m);
    SystemOperator op(SamplingMask::full(g), maps);
    Image x = random_image(g, 12);
    Image r = coil_combine(op.forward(x), maps);
    CHECK(r.vec()[10] == Complex{0, 0});
    CHECK(std::abs(r.vec()[11] - x.vec()[11]) < 1e-12);
  }
  SUBCASE("undersampled data is rejected")
  {
    SystemOperator op(random_mask(g, 0.5, 3), SensitivityMaps::unit(g));
    CHECK_THROWS_AS(coil_combine(op.forward(random_image(g, 1)), op.smaps()), UnsupportedError);
  }
}

TEST_CASE("sense_block_solve")
{
  Grid const g{8, 8};
  SensitivityMaps const maps = synthetic_maps(g, 2, 3);
  SUBCASE("accel 1 is coil_combine")
  {
    SystemOperator op(SamplingMask::full(g), maps);
    KSpaceData y = random_kspace(op.mask(), 2, 1);
    CHECK(rel(sense_block_solve(y, maps, 1).vec(), coil_combine(y, maps).vec()) < 1e-12);
  }
  std::vector<uint8_t> keep(64, 0);
  for (Index i = 0; i < 8; i += 2) {
    for (Index j = 0; j < 8; ++j) { keep[size_t(g.flat(i, j))] = 1; }
  }
  SystemOperator op(SamplingMask(g, keep), maps);
  SUBCASE("accel 2 recovers noiseless data and matches the dense solve")
  {
    Image x = random_image(g, 21);
    CHECK(rel(sense_block_solve(op.forward(x), maps, 2).vec(), x.vec()) < 1e-8);
    KSpaceData y = random_kspace(op.mask(), 2, 22);
    CMatrix const A = oracle::system_matrix(op.mask(), maps);
    CVector const ls = (A.adjoint() * A).ldlt().solve(A.adjoint() * oracle::stack(y.samples));
    CHECK(rel(sense_block_solve(y, maps, 2).vec(), ls) < 1e-8);
  }
  SUBCASE("zero data gives zero")
  {
    CHECK(sense_block_solve(KSpaceData(op.mask(), CMatrix::Zero(op.mask().count(), 2)), maps, 2).vec().norm() == 0.0);
  }
  SUBCASE("irregular mask is a configuration error")
  {
    CHECK(is_regular_row_mask(op.mask(), 2));
    SamplingMask irregular = random_mask(g, 0.5, 9);
    CHECK_FALSE(is_regular_row_mask(irregular, 2));
    CHECK_THROWS_AS(sense_block_solve(KSpaceData(irregular, CMatrix::Zero(irregular.count(), 2)), maps, 2), ConfigError);
  }
}

TEST_CASE("single precision passes the adjoint test at the loosened tolerance")
{
  Grid const g{16, 16};
  SystemOperator op(random_mask(g, 0.5, 1), random_maps(g, 2, 2), Precision::single_precision);
  Image x = random_image(g, 3);
  KSpaceData y = random_kspace(op.mask(), 2, 4);
  KSpaceData ax = op.forward(x);
  Complex lhs = 0;
  for (Index l = 0; l < 2; ++l) { lhs += y.samples.col(l).dot(ax.samples.col(l)); }
  Complex const rhs = op.adjoint(y).vec().dot(x.vec());
  CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-5);
}
