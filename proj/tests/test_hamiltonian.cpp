// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include "nhqm/hamiltonian.hpp"
#include "nhqm/random.hpp"
#include "oracles.hpp"

using namespace nhqm;

TEST(Materialize, HermitianLimit)
{
  for (double theta : {0.0, 0.7, 2.0})
  {
    const Matrix H = materialize(HamiltonianModel::pt_qubit({0.0, 1.0, theta}), 0.0);
    Matrix want(2, 2);
    want << 0.0, 1.0, 1.0, 0.0;
    EXPECT_LT((H - want).norm(), 1e-15);
  }
}

TEST(Materialize, PtQubit)
{
  const Matrix H = materialize(HamiltonianModel::pt_qubit({1.0, 1.0, pi / 6}), 0.0);
  Matrix want(2, 2);
  want << std::exp(cplx(0.0, pi / 6)), 1.0, 1.0, std::exp(cplx(0.0, -pi / 6));
  EXPECT_LT((H - want).norm(), 1e-15);
}

TEST(Materialize, DecayMode)
{
  const Matrix H = materialize(HamiltonianModel::decay(1.0, 0.5), 3.0);
  ASSERT_EQ(H.rows(), 1);
  EXPECT_EQ(H(0, 0), cplx(1.0, -0.25));
}

TEST(Materialize, PassThrough)
{
  auto rng = make_rng(1);
  const Matrix A = random_matrix(rng, 3);
  EXPECT_EQ(materialize(HamiltonianModel::constant(A), 5.0), A);
  const auto h = HamiltonianModel::time_dependent([A](double t) { return Matrix(t * A); }, 3);
  EXPECT_LT((materialize(h, 2.0) - 2.0 * A).norm(), 1e-15);
  EXPECT_FALSE(h.is_time_independent());
}

TEST(Materialize, RejectsBadParameters)
{
  EXPECT_THROW(HamiltonianModel::pt_qubit({1.0, 0.0, 0.3}), Error);
  EXPECT_THROW(HamiltonianModel::decay(1.0, -0.1), Error);
}

TEST(Regime, PaperCases)
{
  EXPECT_EQ(classify_regime({1.0, 1.0, pi / 6}), PTRegime::Unbroken);
  EXPECT_EQ(classify_regime({1.0, 1.0, pi / 2}), PTRegime::ExceptionalPoint);
  EXPECT_EQ(classify_regime({1.0, 0.5, pi / 2}), PTRegime::Broken);
}

TEST(Regime, UsesSineSquared)
{
  // r^2 sin(theta) = 0.5 would call s = 0.8 broken; r^2 sin^2(theta) = 0.25 says unbroken.
  EXPECT_EQ(classify_regime({1.0, 0.6, pi / 6}), PTRegime::Unbroken);
  EXPECT_EQ(classify_regime({1.0, 0.5 - 1e-3, pi / 6}), PTRegime::Broken);
}

TEST(Regime, ScaleInvariance)
{
  auto rng = make_rng(2);
  for (int k = 0; k < 200; ++k)
  {
    const PTParams p{uniform(rng, 0.0, 2.0), uniform(rng, 0.1, 2.0), uniform(rng, -pi, pi)};
    const double c = uniform(rng, 0.1, 10.0);
    const PTParams q{c * p.r, c * p.s, p.theta};
    const double tol = 1e-6;
    EXPECT_EQ(classify_regime(p, tol), classify_regime(q, tol * c * c));
  }
}

TEST(Regime, PtSymmetry)
{
  Matrix sx(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  auto rng = make_rng(3);
  for (int k = 0; k < 100; ++k)
  {
    const Matrix H = pt_matrix({uniform(rng, 0.0, 3.0), uniform(rng, 0.1, 3.0), uniform(rng, -pi, pi)});
    EXPECT_LT((sx * H.conjugate() * sx - H).norm(), 1e-15);
  }
}

TEST(Eigenvalues, PaperCases)
{
  const auto [up, um] = pt_eigenvalues({1.0, 1.0, pi / 6});
  EXPECT_NEAR(up.real(), 1.7320508, 1e-7);
  EXPECT_NEAR(um.real(), 0.0, 1e-12);
  EXPECT_EQ(up.imag(), 0.0);

  const auto [hp, hm] = pt_eigenvalues({0.0, 1.0, 0.4});
  EXPECT_NEAR(hp.real(), 1.0, 1e-15);
  EXPECT_NEAR(hm.real(), -1.0, 1e-15);

  const auto [bp, bm] = pt_eigenvalues({1.0, 0.5, pi / 2});
  EXPECT_NEAR(std::abs(bp.imag()), 0.8660254, 1e-7);
  EXPECT_NEAR(bp.real(), 0.0, 1e-15);
  EXPECT_LT(std::abs(bp - std::conj(bm)), 1e-15);
}

TEST(Eigenvalues, ThrowsAtExceptionalPoint)
{
  try
  {
    pt_eigenvalues({1.0, 1.0, pi / 2});
    FAIL();
  }
  catch (const Error &e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::Degenerate);
  }
}

TEST(Eigenvalues, AgreeWithGenericSolver)
{
  auto rng = make_rng(4);
  int checked = 0;
  while (checked < 1000)
  {
    const PTParams p{uniform(rng, 0.0, 3.0), uniform(rng, -3.0, 3.0), uniform(rng, -pi, pi)};
    if (std::abs(p.s) < 1e-3 || std::abs(p.discriminant()) < 1e-3)
      continue;
    const auto [a, b] = pt_eigenvalues(p);
    std::vector<cplx> mine = {a, b};
    std::sort(mine.begin(), mine.end(), [](cplx x, cplx y) {
      return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    const auto want = ref::eigenvalues(ref::pt_hamiltonian(p.r, p.s, p.theta));
    // Conjugate pairs share a real part; compare as sets.
    const double d1 = std::abs(mine[0] - want[0]) + std::abs(mine[1] - want[1]);
    const double d2 = std::abs(mine[0] - want[1]) + std::abs(mine[1] - want[0]);
    EXPECT_LT(std::min(d1, d2), 1e-10) << p.r << " " << p.s << " " << p.theta;
    ++checked;
  }
}
