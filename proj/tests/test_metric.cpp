// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sstream>
#include <thread>
#include "nhqm/appendix_oracle.hpp"
#include "nhqm/metric.hpp"
#include "nhqm/random.hpp"
#include "oracles.hpp"

using namespace nhqm;

namespace
{

const PTParams unbroken{1.0, 1.0, pi / 6};
const PTParams broken{1.0, 0.5, pi / 2};

Matrix hermitian_random(Rng &rng, Eigen::Index n)
{
  const Matrix A = random_matrix(rng, n);
  return 0.5 * (A + A.adjoint());
}

}  // namespace

TEST(MetricRhs, HermitianIdentityIsStationary)
{
  auto rng = make_rng(1);
  const auto h = HamiltonianModel::constant(hermitian_random(rng, 3));
  EXPECT_LT(metric_rhs(h, 0.0, identity(3)).norm(), 1e-14);
}

TEST(MetricRhs, DecayMode)
{
  const double omega = 1.3, gamma = 0.7, g = 2.5;
  const Matrix r = metric_rhs(HamiltonianModel::decay(omega, gamma), 0.0, Matrix::Constant(1, 1, g));
  EXPECT_NEAR(r(0, 0).real(), gamma * g, 1e-15);
  EXPECT_NEAR(r(0, 0).imag(), 0.0, 1e-15);
}

TEST(MetricRhs, BenderIsStationary)
{
  const Matrix G = ref::bender(0.5);
  EXPECT_LT(metric_rhs(HamiltonianModel::pt_qubit(unbroken), 0.0, G).norm(), 1e-14);
}

TEST(SolveMetric, HermitianIdentity)
{
  auto rng = make_rng(2);
  const auto h = HamiltonianModel::constant(hermitian_random(rng, 3));
  const auto traj = solve_metric(h, identity(3), 0.0, 2.0, 1e-3);
  for (double t : {0.0, 0.3337, 1.0, 2.0})
    EXPECT_LT((traj.at(t) - identity(3)).norm(), 1e-13);
}

TEST(SolveMetric, DecayMode)
{
  const auto traj = solve_metric(HamiltonianModel::decay(1.0, 0.5), Matrix::Ones(1, 1), 0.0, 2.0, 1e-3);
  EXPECT_NEAR(traj.at(2.0)(0, 0).real(), std::exp(1.0), 1e-9);
}

TEST(SolveMetric, BrokenRegimeMatchesClosedForm)
{
  const auto c = oracle::broken_params_from_bases(broken, 1.0, 1.0);
  const Matrix G0 = oracle::broken_metric(broken, c, 0.0);
  const auto traj = solve_metric(HamiltonianModel::pt_qubit(broken), G0, 0.0, 1.0, 1e-3);
  EXPECT_LT((traj.at(1.0) - oracle::broken_metric(broken, c, 1.0)).norm(), 1e-8);
}

TEST(SolveMetric, SamplesStayHermitianAndPositive)
{
  auto rng = make_rng(3);
  for (int k = 0; k < 10; ++k)
  {
    const Eigen::Index n = 2 + k % 3;
    const auto h = HamiltonianModel::constant(random_matrix(rng, n, 0.5));
    const auto traj = solve_metric(h, random_hpd(rng, n), 0.0, 1.0, 1e-2);
    const auto samples = traj.samples();
    ASSERT_GE(samples.size(), 100u);
    for (const auto &[t, G] : samples)
    {
      const auto rep = check_metric(G);
      EXPECT_LE(rep.hermiticity_residual, 1e-10);
      EXPECT_GT(rep.min_eigenvalue, 0.0);
    }
  }
}

TEST(SolveMetric, InterpolationAndExtension)
{
  const auto c = oracle::broken_params_from_bases(broken, 1.0, 1.0);
  const Matrix G0 = oracle::broken_metric(broken, c, 0.0);
  const auto traj = solve_metric(HamiltonianModel::pt_qubit(broken), G0, 0.0, 0.5, 1e-3);
  // Off-grid and beyond the initially integrated range.
  for (double t : {0.12345, 0.4999, 0.73, 1.4142})
    EXPECT_LT((traj.at(t) - oracle::broken_metric(broken, c, t)).norm(), 1e-8) << t;
}

TEST(SolveMetric, ConcurrentReadersAgree)
{
  const auto h = HamiltonianModel::pt_qubit(broken);
  const Matrix G0 = oracle::broken_metric(broken, oracle::broken_params_from_bases(broken, 1.0, 1.0), 0.0);
  const auto shared = solve_metric(h, G0, 0.0, 0.01, 1e-3);
  const auto fresh = solve_metric(h, G0, 0.0, 0.01, 1e-3);
  const std::vector<double> times = {1.7, 0.35, 2.2, 1.05, 0.9, 2.0};
  std::vector<std::thread> pool;
  std::vector<Matrix> seen(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    pool.emplace_back([&, i] { seen[i] = shared.at(times[i]); });
  for (auto &th : pool)
    th.join();
  for (std::size_t i = 0; i < times.size(); ++i)
    EXPECT_EQ(seen[i], fresh.at(times[i])) << times[i];
}

TEST(SolveMetric, RejectsInvalidInitialMetric)
{
  Matrix G = identity(2);
  G(1, 1) = -1.0;
  EXPECT_THROW(solve_metric(HamiltonianModel::pt_qubit(unbroken), G, 0.0, 1.0, 1e-3), Error);
}

TEST(SolveMetric, PositivityLossIsSignalled)
{
  // A step far outside the RK4 stability region amplifies the oscillating modes of G.
  Matrix H(2, 2);
  H << 0.0, 10.0, 10.0, 0.0;
  Matrix G0 = identity(2);
  G0(1, 1) = 2.0;
  try
  {
    solve_metric(HamiltonianModel::constant(H), G0, 0.0, 20.0, 0.5);
    FAIL() << "expected PositivityLost";
  }
  catch (const PositivityLost &e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::PositivityLost);
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LE(e.time(), 20.0);
  }
}

TEST(StationaryMetric, HermitianGivesIdentity)
{
  auto rng = make_rng(4);
  const Matrix A = hermitian_random(rng, 2);
  // Diagonal Hermitian H with distinct eigenvalues admits every diagonal PD metric; the
  // canonical unit-determinant choice is I.
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = -0.5;
  EXPECT_LT((stationary_metric(HamiltonianModel::constant(D)) - identity(2)).norm(), 1e-10);
  const Matrix G = stationary_metric(HamiltonianModel::constant(A));
  EXPECT_LT((G - identity(2)).norm(), 1e-10);
}

TEST(StationaryMetric, ReproducesBender)
{
  const Matrix G = stationary_metric(HamiltonianModel::pt_qubit(unbroken));
  const Matrix B = ref::bender(0.5);
  // Both are unit-determinant, so "up to scale" is equality.
  EXPECT_NEAR(B.determinant().real(), 1.0, 1e-14);
  EXPECT_LT((G - B).norm(), 1e-10);
  EXPECT_LE(metric_rhs(HamiltonianModel::pt_qubit(unbroken), 0.0, G).norm(), 1e-12);
}

TEST(StationaryMetric, RandomUnbrokenParameters)
{
  auto rng = make_rng(5);
  for (int k = 0; k < 50; ++k)
  {
    const PTParams p{uniform(rng, 0.0, 2.0), uniform(rng, 0.5, 2.0), uniform(rng, -pi, pi)};
    if (p.discriminant() < 0.05)
      continue;
    const auto h = HamiltonianModel::pt_qubit(p);
    const Matrix G = stationary_metric(h);
    EXPECT_LE(metric_rhs(h, 0.0, G).norm(), 1e-12);
    EXPECT_NEAR(G.determinant().real(), 1.0, 1e-10);
    const double sa = p.sin_alpha();
    EXPECT_LT((G - ref::bender(sa)).norm(), 1e-9) << p.r << " " << p.s << " " << p.theta;
  }
}

TEST(StationaryMetric, BrokenHasNone)
{
  for (const PTParams p : {broken, PTParams{1.0, 1.0, pi / 2}})
  {
    try
    {
      stationary_metric(HamiltonianModel::pt_qubit(p));
      FAIL();
    }
    catch (const Error &e)
    {
      EXPECT_EQ(e.kind(), ErrorKind::NoStationaryMetric);
    }
  }
}

TEST(StationaryMetric, PseudoHermitianByConstruction)
{
  // H = S^{-1} D S with real diagonal D is pseudo-Hermitian with respect to S^dagger S.
  auto rng = make_rng(6);
  for (int k = 0; k < 10; ++k)
  {
    const Eigen::Index n = 2 + k % 3;
    Matrix S = random_matrix(rng, n) + 2.0 * identity(n);
    Matrix D = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      D(i, i) = static_cast<double>(i) + uniform(rng, 0.0, 0.5);
    const Matrix H = S.inverse() * D * S;
    const auto h = HamiltonianModel::constant(H);
    const Matrix G = stationary_metric(h);
    EXPECT_LE(metric_rhs(h, 0.0, G).norm(), 1e-10);
    EXPECT_TRUE(check_metric(G).valid);
  }
}

TEST(MetricFromBasis, StandardBasis)
{
  std::vector<Vector> basis;
  for (int i = 0; i < 3; ++i)
    basis.push_back(identity(3).col(i));
  EXPECT_LT((metric_from_basis(basis) - identity(3)).norm(), 1e-15);
}

TEST(MetricFromBasis, BenderFromEigenbasis)
{
  const double ca = std::sqrt(0.75);
  const cplx a = 1.0 / std::sqrt(2.0 * ca), b = cplx(0.0, 1.0) * a;
  const auto kets = oracle::standard_kets(unbroken, a, b);
  // The kets really are eigenvectors.
  const Matrix H = ref::pt_hamiltonian(1.0, 1.0, pi / 6);
  const auto [lp, lm] = pt_eigenvalues(unbroken);
  EXPECT_LT((H * kets[0] - lp * kets[0]).norm(), 1e-14);
  EXPECT_LT((H * kets[1] - lm * kets[1]).norm(), 1e-14);
  EXPECT_LT((metric_from_basis({kets[0], kets[1]}) - ref::bender(0.5)).norm(), 1e-12);
}

TEST(MetricFromBasis, GeneralCoefficients)
{
  const double ca = std::sqrt(0.75), sa = 0.5;
  for (auto [a, b] : {std::pair<cplx, cplx>{1.0, 1.0}, {cplx(0.3, 0.4), cplx(0.0, 0.5)},
                      {1.0, 2.0}, {cplx(0.2, -1.0), 0.7}})
  {
    const auto kets = oracle::standard_kets(unbroken, a, b);
    const Matrix G = metric_from_basis({kets[0], kets[1]});
    const double na = std::norm(a), nb = std::norm(b);
    // Direct inversion of a (|u><u| + |v><v|), written out for the 2x2 case.
    const double Ap = (na + nb) / (4.0 * na * nb * ca * ca);
    const double Am = (nb - na) / (4.0 * na * nb * ca);
    Matrix want(2, 2);
    want << Ap, cplx(Am, -Ap * sa), cplx(Am, Ap * sa), Ap;
    EXPECT_LT((G - want).norm(), 1e-12);
    if (na == nb)
    {
      // The symmetric closed form agrees when |a| = |b|.
      const double pp = (nb + na) / (2.0 * (na * na + nb * nb) * ca * ca);
      const double pm = (nb - na) / (2.0 * (na * na + nb * nb) * ca * ca);
      EXPECT_NEAR(Ap, pp, 1e-14);
      EXPECT_NEAR(Am, pm, 1e-14);
    }
    // Decomposed into the brute-force family the result satisfies its positivity constraints.
    EXPECT_TRUE(oracle::satisfies_constraints(unbroken, oracle::unbroken_params_from(unbroken, G)));
  }
}

TEST(MetricFromBasis, SingularBasis)
{
  Vector u(2), v(2);
  u << 1.0, 1.0;
  v << 1.0, 1.0 + 1e-14;
  try
  {
    metric_from_basis({u, v});
    FAIL();
  }
  catch (const Error &e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::SingularBasis);
  }
}

TEST(BruteForceFamily, ConstantWhenAAndBVanish)
{
  const double ca = std::sqrt(0.75);
  const oracle::UnbrokenParams c{0.0, 0.0, 2.0, 0.3 * ca};
  const auto h = HamiltonianModel::pt_qubit(unbroken);
  for (double t : {0.0, 0.7, 3.1})
  {
    const Matrix G = oracle::unbroken_metric(unbroken, c, t);
    EXPECT_LT((G - oracle::unbroken_metric(unbroken, c, 0.0)).norm(), 1e-14);
    EXPECT_LE(metric_rhs(h, t, G).norm(), 1e-12);
  }
  const oracle::UnbrokenParams moving{0.3, 0.2, 2.0, 0.1};
  EXPECT_GT(metric_rhs(h, 0.0, oracle::unbroken_metric(unbroken, moving, 0.0)).norm(), 1e-3);
}

TEST(Transition, CommutingInitialData)
{
  auto rng = make_rng(7);
  const Matrix H = hermitian_random(rng, 3);
  const Matrix T0 = 2.0 * identity(3) + 0.5 * H;
  const auto T = propagate_transition(HamiltonianModel::constant(H), T0, 0.0, 2.0, 1e-3);
  EXPECT_LT((T.at(2.0) - T0).norm(), 1e-12);
  EXPECT_LT((propagate_transition(HamiltonianModel::constant(H), identity(3), 0.0, 1.0, 1e-3).at(1.0) -
             identity(3)).norm(), 1e-14);
}

TEST(Transition, HermitianConjugationIdentity)
{
  // G1 = I is stationary; G2 = T^dagger T must follow the metric flow from T0^dagger T0.
  auto rng = make_rng(8);
  const auto h = HamiltonianModel::constant(hermitian_random(rng, 3));
  const Matrix T0 = random_matrix(rng, 3) + 2.0 * identity(3);
  const auto T = propagate_transition(h, T0, 0.0, 2.0, 1e-3);
  const auto G2 = solve_metric(h, T0.adjoint() * T0, 0.0, 2.0, 1e-3);
  for (double t : {0.5, 1.0, 2.0})
  {
    const Matrix Tt = T.at(t);
    EXPECT_LT((Tt.adjoint() * Tt - G2.at(t)).norm(), 1e-8);
  }
}

TEST(Transition, RelatesTwoUnbrokenMetrics)
{
  using oracle::BasisChoice;
  auto G1 = [](double t) { return oracle::unbroken_metric_from_bases(unbroken, 1.0, 1.0, BasisChoice::InstantDiagonal, t); };
  auto G2 = [](double t) {
    return oracle::unbroken_metric_from_bases(unbroken, cplx(0.5, 0.2), 1.3, BasisChoice::InstantDiagonal, t);
  };
  const auto r1 = hpd_roots(G1(0.0));
  const Matrix T0 = r1.inv_sqrt * hpd_sqrt(G2(0.0));
  ASSERT_LT((T0.adjoint() * G1(0.0) * T0 - G2(0.0)).norm(), 1e-12);
  const auto T = propagate_transition(HamiltonianModel::pt_qubit(unbroken), T0, 0.0, 3.0, 1e-3);
  for (double t : {0.4, 1.5, 3.0})
  {
    const Matrix Tt = T.at(t);
    EXPECT_LT((Tt.adjoint() * G1(t) * Tt - G2(t)).norm(), 1e-8) << t;
  }
}

TEST(Transition, SingularInitialValue)
{
  EXPECT_THROW(propagate_transition(HamiltonianModel::pt_qubit(unbroken), Matrix::Zero(2, 2), 0.0, 1.0, 1e-3),
               Error);
}

TEST(CheckMetric, Cases)
{
  const auto id = check_metric(identity(2));
  EXPECT_EQ(id.hermiticity_residual, 0.0);
  EXPECT_NEAR(id.min_eigenvalue, 1.0, 1e-15);
  EXPECT_TRUE(id.valid);

  const auto b = check_metric(ref::bender(0.5));
  EXPECT_LT(b.hermiticity_residual, 1e-15);
  EXPECT_NEAR(b.min_eigenvalue, 0.5773503, 1e-7);
  EXPECT_NEAR(b.max_eigenvalue, 1.7320508, 1e-7);

  auto rng = make_rng(9);
  const auto bad = check_metric(random_matrix(rng, 3));
  EXPECT_GT(bad.hermiticity_residual, 0.1);
}

TEST(MetricCsv, HeaderAndRows)
{
  const auto traj = MetricTrajectory::stationary(ref::bender(0.5));
  std::ostringstream os;
  write_metric_csv(os, traj, {0.0, 0.5});
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  EXPECT_EQ(header, "t,re_g11,im_g11,re_g12,im_g12,re_g21,im_g21,re_g22,im_g22");
  int rows = 0;
  while (std::getline(is, row))
  {
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 8);
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}
