// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>
#include "nhqm/linalg.hpp"

namespace nhqm
{

// O^# = G^{-1} O^dagger G.
inline Matrix sharp_adjoint(const Matrix &O, const Matrix &G)
{
  require_hpd(G, "sharp_adjoint");
  if (O.rows() != G.rows() || O.cols() != G.cols())
    throw Error(ErrorKind::BadShape, "sharp_adjoint: operator and metric shapes differ");
  return G.llt().solve(O.adjoint() * G);
}

struct SelfAdjointCheck
{
  bool self_adjoint = false;
  double residual = 0.0;
};

// Residual |O^dagger G - G O|_F.
inline SelfAdjointCheck is_self_adjoint(const Matrix &O, const Matrix &G, double tol = 1e-10)
{
  SelfAdjointCheck c;
  c.residual = (O.adjoint() * G - G * O).norm();
  c.self_adjoint = c.residual <= tol;
  return c;
}

// |U^dagger G U - G|_F.
inline double metric_invariance_residual(const Matrix &U, const Matrix &G)
{
  return (U.adjoint() * G * U - G).norm();
}

enum class OperatorRole
{
  Observable,
  Unitary,
  Measurement,
};

struct DressedOperator
{
  Matrix matrix;
  Matrix metric_at;
  OperatorRole role = OperatorRole::Observable;
};

// X -> G^{-1/2} X G^{1/2}.
inline Matrix dress_operator(const Matrix &X, const HpdRoots &roots)
{
  return roots.inv_sqrt * X * roots.sqrt;
}

inline DressedOperator dress_observable(const Matrix &O, const Matrix &G)
{
  if (hermiticity_residual(O) > 1e-10 * std::max(1.0, O.norm()))
    throw Error(ErrorKind::BadShape, "dress_observable: input is not Hermitian");
  return {dress_operator(O, hpd_roots(G)), G, OperatorRole::Observable};
}

inline DressedOperator dress_unitary(const Matrix &V, const Matrix &G)
{
  require_square(V, "dress_unitary");
  if (V.rows() != G.rows())
    throw Error(ErrorKind::BadShape, "dress_unitary: operator and metric shapes differ");
  if ((V.adjoint() * V - identity(V.rows())).norm() > 1e-10)
    throw Error(ErrorKind::NotUnitaryInput, "dress_unitary: V^dagger V != I");
  return {dress_operator(V, hpd_roots(G)), G, OperatorRole::Unitary};
}

inline double completeness_residual(const std::vector<Matrix> &K)
{
  if (K.empty())
    return std::numeric_limits<double>::infinity();
  Matrix S = Matrix::Zero(K.front().cols(), K.front().cols());
  for (const auto &k : K)
    S += k.adjoint() * k;
  return (S - identity(S.rows())).norm();
}

// |sum_j M_j^dagger G M_j - G|_F.
inline double generalized_completeness_residual(const std::vector<Matrix> &M, const Matrix &G)
{
  Matrix S = Matrix::Zero(G.rows(), G.cols());
  for (const auto &m : M)
    S += m.adjoint() * G * m;
  return (S - G).norm();
}

inline std::vector<DressedOperator> dress_measurement_set(const std::vector<Matrix> &K,
                                                          const Matrix &G)
{
  for (const auto &k : K)
    if (k.rows() != G.rows() || k.cols() != G.cols())
      throw Error(ErrorKind::BadShape, "dress_measurement_set: operator and metric shapes differ");
  const double res = completeness_residual(K);
  if (!(res <= 1e-10))
    throw Error(ErrorKind::IncompleteSet,
                "dress_measurement_set: sum K^dagger K deviates from I by " + std::to_string(res));
  const auto roots = hpd_roots(G);
  std::vector<DressedOperator> out;
  out.reserve(K.size());
  for (const auto &k : K)
    out.push_back({dress_operator(k, roots), G, OperatorRole::Measurement});
  return out;
}

inline std::vector<Matrix> matrices(const std::vector<DressedOperator> &ops)
{
  std::vector<Matrix> out;
  out.reserve(ops.size());
  for (const auto &o : ops)
    out.push_back(o.matrix);
  return out;
}

}  // namespace nhqm
