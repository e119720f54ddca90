// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <vector>
#include "nhqm/density.hpp"
#include "nhqm/linalg.hpp"
#include "nhqm/optimize.hpp"
#include "nhqm/parallel.hpp"
#include "nhqm/random.hpp"

namespace nhqm
{

// -sum x ln x over a spectrum; entries below `floor` count as zero.
inline double shannon_nats(const RealVector &p, double floor = 1e-14)
{
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > floor)
      s -= p(i) * std::log(p(i));
  return s;
}

// Reshapes a ket on A (x) B into the dim_a x dim_b coefficient matrix.
inline Matrix coefficient_matrix(const Vector &psi, Eigen::Index dim_a, Eigen::Index dim_b)
{
  check_dims(psi.size(), dim_a, dim_b, "coefficient_matrix");
  Matrix M(dim_a, dim_b);
  for (Eigen::Index a = 0; a < dim_a; ++a)
    for (Eigen::Index b = 0; b < dim_b; ++b)
      M(a, b) = psi(a * dim_b + b);
  return M;
}

struct PureEntropy
{
  double side_a = 0.0;
  double side_b = 0.0;
};

// Entropies of both reduced states of a G-normalized pure state.
inline PureEntropy entropy_pure_both(const Vector &psi, const Matrix &G_a, const Matrix &G_b)
{
  const Eigen::Index da = G_a.rows(), db = G_b.rows();
  if (psi.size() != da * db)
    throw Error(ErrorKind::BadShape, "entropy_pure: ket dimension differs from dim_a * dim_b");
  const auto ra = hpd_roots(G_a), rb = hpd_roots(G_b);
  const Vector phi = kron(ra.sqrt, rb.sqrt) * psi;
  const double n2 = phi.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-10)
    throw Error(ErrorKind::UnnormalizedState,
                "entropy_pure: <psi|G|psi> = " + std::to_string(n2));
  const Matrix M = coefficient_matrix(phi, da, db);
  PureEntropy e;
  e.side_a = shannon_nats(hermitian_eig(M * M.adjoint()).values.cwiseMax(0.0));
  e.side_b = shannon_nats(hermitian_eig(M.transpose() * M.conjugate()).values.cwiseMax(0.0));
  return e;
}

inline double entropy_pure(const Vector &psi, const Matrix &G_a, const Matrix &G_b)
{
  return entropy_pure_both(psi, G_a, G_b).side_a;
}

inline double binary_entropy_nats(double x)
{
  double h = 0.0;
  if (x > 0.0)
    h -= x * std::log(x);
  if (x < 1.0)
    h -= (1.0 - x) * std::log(1.0 - x);
  return h;
}

inline double eof_from_concurrence(double c)
{
  c = std::clamp(c, 0.0, 1.0);
  return binary_entropy_nats(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

// Wootters concurrence of a conventional two-qubit density matrix. The mu_i are the singular
// values of sqrt(rho) (sy x sy) conj(sqrt(rho)).
inline double concurrence(const Matrix &rho_hat)
{
  if (rho_hat.rows() != 4 || rho_hat.cols() != 4)
    throw Error(ErrorKind::BadShape, "concurrence: expects a 4x4 density matrix");
  if (!rho_hat.allFinite() || hermiticity_residual(rho_hat) > 1e-10 ||
      std::abs(rho_hat.trace() - 1.0) > 1e-10)
    throw Error(ErrorKind::BadShape, "concurrence: input is not a unit-trace Hermitian matrix");
  const auto spec = hermitian_eig(rho_hat);
  if (spec.values(0) < -1e-10)
    throw Error(ErrorKind::BadShape, "concurrence: input is not positive semidefinite");
  const RealVector s = spec.values.cwiseMax(0.0).cwiseSqrt();
  const Matrix S = spec.vectors * s.cast<cplx>().asDiagonal() * spec.vectors.adjoint();
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  Eigen::JacobiSVD<Matrix> svd(S * yy * S.conjugate());
  const RealVector mu = svd.singularValues();  // decreasing
  return std::max(0.0, mu(0) - mu(1) - mu(2) - mu(3));
}

// Entanglement of formation in nats from the concurrence.
inline double concurrence_oracle(const Matrix &rho_hat)
{
  return eof_from_concurrence(concurrence(rho_hat));
}

struct EofOptions
{
  Eigen::Index ensemble_size = 0;  // 0 selects 2 * rank
  int restarts = 16;
  std::uint64_t seed = 0;
  double rank_tol = 1e-12;
  UnitarySearchOptions search{};
};

struct EofResult
{
  double value = 0.0;
  Eigen::Index rank = 0;
  Eigen::Index ensemble_size = 0;
  Matrix mixing;  // best m x m unitary; the first `rank` columns form the isometry
};

namespace detail
{

// Average entanglement of the ensemble w_i = sum_k W_ik sqrt(lambda_k) e_k; rows of B hold
// sqrt(lambda_k) e_k^T. Returns the value and the Z matrix of the unitary search.
inline UnitaryEvaluation eof_objective(const Matrix &W, const Matrix &B, Eigen::Index dim_a,
                                       Eigen::Index dim_b)
{
  const Eigen::Index r = B.rows();
  const Matrix V = W.leftCols(r) * B;  // m x D, row i is w_i^T
  const Eigen::Index m = V.rows(), D = V.cols();
  Matrix Gamma(m, D);
  double value = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
  {
    Matrix M(dim_a, dim_b);
    for (Eigen::Index a = 0; a < dim_a; ++a)
      for (Eigen::Index b = 0; b < dim_b; ++b)
        M(a, b) = V(i, a * dim_b + b);
    const Matrix X = M * M.adjoint();
    const double p = X.trace().real();
    if (!(p > 1e-30))
    {
      Gamma.row(i).setZero();
      continue;
    }
    const auto spec = hermitian_eig(X);
    RealVector logx(dim_a);
    for (Eigen::Index k = 0; k < dim_a; ++k)
    {
      const double x = spec.values(k);
      if (x > 1e-30)
      {
        logx(k) = std::log(x);
        value -= x * logx(k);
      }
      else
      {
        logx(k) = std::log(p);  // zero weight in the gradient
      }
    }
    const double lp = std::log(p);
    value += p * lp;
    const RealVector coeff = (-logx).array() + lp;
    const Matrix G = spec.vectors * coeff.cast<cplx>().asDiagonal() * spec.vectors.adjoint() * M;
    for (Eigen::Index a = 0; a < dim_a; ++a)
      for (Eigen::Index b = 0; b < dim_b; ++b)
        Gamma(i, a * dim_b + b) = G(a, b);
  }
  return {value, V * Gamma.adjoint()};
}

}  // namespace detail

// Upper bound on the entanglement of formation: minimizes the ensemble-average entropy over
// decompositions of the dressed state, with random restarts. Exact for pure states.
inline EofResult eof_optimize_dressed(const Matrix &rho_hat, Eigen::Index dim_a,
                                      Eigen::Index dim_b, const EofOptions &opt = {})
{
  check_dims(rho_hat.rows(), dim_a, dim_b, "eof_optimize");
  const auto spec = hermitian_eig(rho_hat);
  const Eigen::Index D = rho_hat.rows();
  const double top = std::max(spec.values(D - 1), 0.0);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = D - 1; k >= 0; --k)
    if (spec.values(k) > opt.rank_tol * std::max(top, 1.0))
      kept.push_back(k);
  const auto r = static_cast<Eigen::Index>(kept.size());
  if (r == 0)
    throw Error(ErrorKind::BadShape, "eof_optimize: zero density matrix");
  const Eigen::Index m = opt.ensemble_size > 0 ? opt.ensemble_size : 2 * r;
  if (m < r)
    throw Error(ErrorKind::RankTooLarge, "eof_optimize: ensemble size " + std::to_string(m) +
                                             " below rank " + std::to_string(r));
  Matrix B(r, D);
  for (Eigen::Index k = 0; k < r; ++k)
  {
    const auto idx = kept[static_cast<std::size_t>(k)];
    B.row(k) = std::sqrt(spec.values(idx)) * spec.vectors.col(idx).transpose();
  }
  auto f = [&](const Matrix &W) { return detail::eof_objective(W, B, dim_a, dim_b); };

  EofResult best;
  best.rank = r;
  best.ensemble_size = m;
  if (r == 1)
  {
    best.mixing = identity(m);
    best.value = f(best.mixing).value;
    return best;
  }
  const int restarts = std::max(1, opt.restarts);
  std::vector<UnitarySearchResult> results(static_cast<std::size_t>(restarts));
  parallel_for(results.size(), [&](std::size_t i) {
    Matrix W0;
    if (i == 0)
    {
      W0 = identity(m);
    }
    else
    {
      auto rng = make_rng(opt.seed, i);
      W0 = haar_unitary(rng, m);
    }
    results[i] = minimize_over_unitary(f, W0, opt.search);
  });
  best.value = std::numeric_limits<double>::infinity();
  for (auto &res : results)
    if (res.value < best.value)
    {
      best.value = res.value;
      best.mixing = std::move(res.W);
    }
  best.value = std::max(best.value, 0.0);
  return best;
}

inline double eof_optimize(const GeneralizedDensityMatrix &rho, const EofOptions &opt = {})
{
  return eof_optimize_dressed(dress(rho), rho.dim_a, rho.dim_b, opt).value;
}

inline double eof_optimize(const GeneralizedDensityMatrix &rho, Eigen::Index m, int restarts,
                           std::uint64_t seed)
{
  EofOptions opt;
  opt.ensemble_size = m;
  opt.restarts = restarts;
  opt.seed = seed;
  return eof_optimize(rho, opt);
}

}  // namespace nhqm
