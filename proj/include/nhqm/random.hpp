// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>
#include "nhqm/linalg.hpp"

namespace nhqm
{

using Rng = std::mt19937_64;

// Independent, reproducible stream for (seed, index) pairs; used to make parallel trials
// order-independent.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x6e68716du};
  return Rng(seq);
}

inline double uniform(Rng &rng, double lo = 0.0, double hi = 1.0)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix ginibre(Rng &rng, Eigen::Index rows, Eigen::Index cols)
{
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix X(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
    {
      const double re = n(rng);
      const double im = n(rng);
      X(i, j) = cplx(re, im);
    }
  return X;
}

inline Vector random_ket(Rng &rng, Eigen::Index dim)
{
  Vector v = ginibre(rng, dim, 1).col(0);
  return v / v.norm();
}

// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix on R's diagonal).
inline Matrix haar_unitary(Rng &rng, Eigen::Index dim)
{
  const Matrix X = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(X);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR();
  for (Eigen::Index k = 0; k < dim; ++k)
  {
    const cplx d = R(k, k);
    Q.col(k) *= d / std::abs(d);
  }
  return Q;
}

// Random HPD matrix with eigenvalues in [min_eig, max_eig], random eigenbasis.
inline Matrix random_hpd(Rng &rng, Eigen::Index dim, double min_eig = 0.3, double max_eig = 3.0)
{
  const Matrix U = haar_unitary(rng, dim);
  RealVector ev(dim);
  for (Eigen::Index k = 0; k < dim; ++k)
    ev(k) = uniform(rng, min_eig, max_eig);
  return hermitian_part(U * ev.cast<cplx>().asDiagonal() * U.adjoint());
}

inline std::vector<double> random_probabilities(Rng &rng, std::size_t count)
{
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(count);
  double total = 0.0;
  for (auto &x : p)
  {
    x = e(rng) + 1e-3;
    total += x;
  }
  for (auto &x : p)
    x /= total;
  return p;
}

// Kraus set {K_j} with sum K_j^dagger K_j = I, cut from a Haar isometry.
inline std::vector<Matrix> random_kraus_set(Rng &rng, Eigen::Index dim, std::size_t outcomes)
{
  const auto total = static_cast<Eigen::Index>(outcomes) * dim;
  const Matrix W = haar_unitary(rng, total);
  std::vector<Matrix> K;
  K.reserve(outcomes);
  for (std::size_t j = 0; j < outcomes; ++j)
    K.push_back(W.block(static_cast<Eigen::Index>(j) * dim, 0, dim, dim));
  return K;
}

// Random non-Hermitian matrix with entries of scale `scale`.
inline Matrix random_matrix(Rng &rng, Eigen::Index dim, double scale = 1.0)
{
  return scale * ginibre(rng, dim, dim) / std::sqrt(2.0);
}

}  // namespace nhqm
