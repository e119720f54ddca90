// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include "nhqm/density.hpp"
#include "nhqm/operators.hpp"
#include "nhqm/random.hpp"
#include "oracles.hpp"

using namespace nhqm;

namespace
{

const Matrix bender = ref::bender(0.5);

ErrorKind kind_of(const std::function<void()> &f)
{
  try
  {
    f();
  }
  catch (const Error &e)
  {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ValidationError;
}

}  // namespace

TEST(SharpAdjoint, IdentityMetricIsDagger)
{
  auto rng = make_rng(1);
  const Matrix O = random_matrix(rng, 3);
  EXPECT_LT((sharp_adjoint(O, identity(3)) - O.adjoint()).norm(), 1e-15);
}

TEST(SharpAdjoint, InvolutionAgainstBender)
{
  auto rng = make_rng(2);
  for (int k = 0; k < 50; ++k)
  {
    const Matrix O = random_matrix(rng, 2);
    EXPECT_LT((sharp_adjoint(sharp_adjoint(O, bender), bender) - O).norm(), 1e-12);
  }
}

TEST(SharpAdjoint, MatchesDefinition)
{
  auto rng = make_rng(3);
  const Matrix G = random_hpd(rng, 3);
  const Matrix O = random_matrix(rng, 3);
  EXPECT_LT((sharp_adjoint(O, G) - G.inverse() * O.adjoint() * G).norm(), 1e-12);
}

TEST(SharpAdjoint, InverseMetricIsSelfAdjoint)
{
  auto rng = make_rng(4);
  const Matrix G = random_hpd(rng, 3);
  const Matrix Ginv = G.inverse();
  EXPECT_LT((sharp_adjoint(Ginv, G) - Ginv).norm(), 1e-12);
  EXPECT_TRUE(is_self_adjoint(Ginv, G).self_adjoint);
}

TEST(SharpAdjoint, Antihomomorphism)
{
  auto rng = make_rng(5);
  for (int k = 0; k < 20; ++k)
  {
    const Matrix G = random_hpd(rng, 3);
    const Matrix A = random_matrix(rng, 3), B = random_matrix(rng, 3);
    EXPECT_LT((sharp_adjoint(A * B, G) - sharp_adjoint(B, G) * sharp_adjoint(A, G)).norm(), 1e-10);
  }
}

TEST(SharpAdjoint, RejectsBadMetric)
{
  Matrix G = identity(2);
  G(0, 0) = -1.0;
  EXPECT_EQ(kind_of([&] { sharp_adjoint(identity(2), G); }), ErrorKind::NotHPD);
}

TEST(SelfAdjoint, Cases)
{
  const auto id = is_self_adjoint(identity(2), bender);
  EXPECT_TRUE(id.self_adjoint);
  EXPECT_EQ(id.residual, 0.0);

  Matrix sx(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  const auto x = is_self_adjoint(sx, bender);
  EXPECT_FALSE(x.self_adjoint);
  EXPECT_GT(x.residual, 0.1);

  auto rng = make_rng(6);
  const Matrix G = random_hpd(rng, 3);
  const auto rho = gdm_from_ensemble({{0.3, normalize_in(random_ket(rng, 3), G)},
                                      {0.7, normalize_in(random_ket(rng, 3), G)}},
                                     G);
  EXPECT_TRUE(is_self_adjoint(rho.rho, G).self_adjoint);
}

TEST(DressUnitary, Cases)
{
  EXPECT_LT((dress_unitary(identity(2), bender).matrix - identity(2)).norm(), 1e-14);

  auto rng = make_rng(7);
  const Matrix V = haar_unitary(rng, 2);
  const auto U = dress_unitary(V, bender);
  EXPECT_EQ(U.role, OperatorRole::Unitary);
  EXPECT_LE(metric_invariance_residual(U.matrix, bender), 1e-12);
  EXPECT_LT((dress_unitary(V, identity(2)).matrix - V).norm(), 1e-14);

  Matrix notU = V;
  notU(0, 0) += 0.01;
  EXPECT_EQ(kind_of([&] { dress_unitary(notU, bender); }), ErrorKind::NotUnitaryInput);
}

TEST(DressUnitary, PreservesInnerProducts)
{
  auto rng = make_rng(8);
  for (int k = 0; k < 30; ++k)
  {
    const Eigen::Index n = 2 + k % 3;
    const Matrix G = random_hpd(rng, n);
    const Matrix U = dress_unitary(haar_unitary(rng, n), G).matrix;
    const Vector psi = random_ket(rng, n), phi = random_ket(rng, n);
    const cplx before = psi.dot(G * phi);
    const cplx after = (U * psi).dot(G * (U * phi));
    EXPECT_LT(std::abs(before - after), 1e-10);
  }
}

TEST(DressUnitary, GroupHomomorphism)
{
  auto rng = make_rng(9);
  for (int k = 0; k < 20; ++k)
  {
    const Matrix G = random_hpd(rng, 3);
    const Matrix V1 = haar_unitary(rng, 3), V2 = haar_unitary(rng, 3);
    const Matrix lhs = dress_unitary(V1, G).matrix * dress_unitary(V2, G).matrix;
    EXPECT_LT((lhs - dress_unitary(V1 * V2, G).matrix).norm(), 1e-10);
  }
}

TEST(DressObservable, BecomesSelfAdjoint)
{
  auto rng = make_rng(10);
  const Matrix G = random_hpd(rng, 3);
  const Matrix A = random_matrix(rng, 3);
  const auto O = dress_observable(A + A.adjoint(), G);
  EXPECT_TRUE(is_self_adjoint(O.matrix, G).self_adjoint);
}

TEST(DressMeasurement, Cases)
{
  const auto single = dress_measurement_set({identity(2)}, bender);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_LT((single[0].matrix - identity(2)).norm(), 1e-14);

  Matrix P0 = Matrix::Zero(2, 2), P1 = Matrix::Zero(2, 2);
  P0(0, 0) = 1.0;
  P1(1, 1) = 1.0;
  const auto pair = dress_measurement_set({P0, P1}, bender);
  EXPECT_LE(generalized_completeness_residual(matrices(pair), bender), 1e-12);
  // Undressed projectors are not complete in the generalized sense.
  EXPECT_GT(generalized_completeness_residual({P0, P1}, bender), 0.1);

  const auto plain = dress_measurement_set({P0, P1}, identity(2));
  EXPECT_LT((plain[0].matrix - P0).norm() + (plain[1].matrix - P1).norm(), 1e-15);

  EXPECT_EQ(kind_of([&] { dress_measurement_set({P0}, bender); }), ErrorKind::IncompleteSet);
}

TEST(DressMeasurement, RandomKrausSets)
{
  auto rng = make_rng(11);
  for (int k = 0; k < 20; ++k)
  {
    const Eigen::Index n = 2 + k % 3;
    const Matrix G = random_hpd(rng, n);
    const auto K = random_kraus_set(rng, n, 1 + k % 4);
    ASSERT_LE(completeness_residual(K), 1e-12);
    EXPECT_LE(generalized_completeness_residual(matrices(dress_measurement_set(K, G)), G), 1e-10);
  }
}
