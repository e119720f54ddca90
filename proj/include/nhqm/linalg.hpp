// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <Eigen/Dense>
#include "nhqm/error.hpp"

namespace nhqm
{

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

using namespace std::complex_literals;

inline constexpr double pi = 3.14159265358979323846;

inline Matrix identity(Eigen::Index n)
{
  return Matrix::Identity(n, n);
}

inline Matrix dagger(const Matrix &A)
{
  return A.adjoint();
}

inline double frobenius(const Matrix &A)
{
  return A.norm();
}

inline bool is_finite(const Matrix &A)
{
  return A.allFinite();
}

inline void require_finite(const Matrix &A, const char *where)
{
  if (!A.allFinite())
  {
    throw Error(ErrorKind::NonFinite, std::string(where) + " produced NaN/Inf");
  }
}

inline void require_square(const Matrix &A, const char *where)
{
  if (A.rows() != A.cols() || A.rows() == 0)
  {
    throw Error(ErrorKind::BadShape, std::string(where) + " expects a nonempty square matrix");
  }
}

// ||A - A^dagger||_F
inline double hermiticity_residual(const Matrix &A)
{
  return (A - A.adjoint()).norm();
}

inline Matrix hermitian_part(const Matrix &A)
{
  return 0.5 * (A + A.adjoint());
}

// Kronecker product with row index i_a * dim(B) + i_b.
inline Matrix kron(const Matrix &A, const Matrix &B)
{
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < A.cols(); ++j)
    {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

inline Vector kron(const Vector &a, const Vector &b)
{
  Vector k(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
  {
    k.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return k;
}

struct HermitianSpectrum
{
  RealVector values;  // ascending
  Matrix vectors;
};

// Eigendecomposition of the Hermitian part of A.
inline HermitianSpectrum hermitian_eig(const Matrix &A)
{
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(A));
  if (es.info() != Eigen::Success)
  {
    throw Error(ErrorKind::NonFinite, "Hermitian eigensolver failed");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

// Scale-relative positive-definiteness threshold.
inline double tol_pd(double max_eigenvalue)
{
  return 1e-12 * std::abs(max_eigenvalue);
}

struct HpdCheck
{
  double hermiticity_residual = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool hermitian = false;
  bool positive_definite = false;
};

inline HpdCheck check_hpd(const Matrix &A)
{
  HpdCheck c;
  if (A.rows() != A.cols() || A.rows() == 0 || !A.allFinite())
  {
    return c;
  }
  c.hermiticity_residual = hermiticity_residual(A);
  c.hermitian = c.hermiticity_residual <= 1e-10 * std::max(1.0, A.norm());
  const auto spec = hermitian_eig(A);
  c.min_eigenvalue = spec.values(0);
  c.max_eigenvalue = spec.values(spec.values.size() - 1);
  c.positive_definite =
      c.hermitian && c.max_eigenvalue > 0.0 && c.min_eigenvalue > tol_pd(c.max_eigenvalue);
  return c;
}

inline void require_hpd(const Matrix &A, const char *where)
{
  require_square(A, where);
  const auto c = check_hpd(A);
  if (!c.positive_definite)
  {
    throw Error(ErrorKind::NotHPD,
                std::string(where) + ": matrix is not Hermitian positive definite (residual " +
                    std::to_string(c.hermiticity_residual) + ", min eigenvalue " +
                    std::to_string(c.min_eigenvalue) + ")");
  }
}

struct HpdRoots
{
  Matrix sqrt;
  Matrix inv_sqrt;
};

// Unique HPD square root and its inverse, from one eigendecomposition.
inline HpdRoots hpd_roots(const Matrix &A)
{
  require_hpd(A, "hpd_sqrt");
  const auto spec = hermitian_eig(A);
  const RealVector s = spec.values.cwiseSqrt();
  HpdRoots r;
  r.sqrt = spec.vectors * s.cast<cplx>().asDiagonal() * spec.vectors.adjoint();
  r.inv_sqrt = spec.vectors * s.cwiseInverse().cast<cplx>().asDiagonal() * spec.vectors.adjoint();
  r.sqrt = hermitian_part(r.sqrt);
  r.inv_sqrt = hermitian_part(r.inv_sqrt);
  return r;
}

inline Matrix hpd_sqrt(const Matrix &A)
{
  return hpd_roots(A).sqrt;
}

inline Matrix hpd_inverse(const Matrix &A)
{
  require_hpd(A, "hpd_inverse");
  const auto spec = hermitian_eig(A);
  return hermitian_part(spec.vectors * spec.values.cwiseInverse().cast<cplx>().asDiagonal() *
                        spec.vectors.adjoint());
}

// exp(scale * A) by scaling and squaring around a degree-13 Pade approximant.
inline Matrix expm(const Matrix &A, cplx scale = 1.0)
{
  require_square(A, "expm");
  require_finite(A, "expm input");
  const Eigen::Index n = A.rows();
  Matrix X = scale * A;

  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm1 = X.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13)
  {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    X /= std::ldexp(1.0, squarings);
  }

  const Matrix I = identity(n);
  const Matrix X2 = X * X;
  const Matrix X4 = X2 * X2;
  const Matrix X6 = X4 * X2;
  const Matrix U =
      X * (X6 * (b[13] * X6 + b[11] * X4 + b[9] * X2) + b[7] * X6 + b[5] * X4 + b[3] * X2 +
           b[1] * I);
  const Matrix V =
      X6 * (b[12] * X6 + b[10] * X4 + b[8] * X2) + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * I;
  Matrix E = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < squarings; ++k)
  {
    E = E * E;
  }
  require_finite(E, "expm");
  return E;
}

// One classic RK4 step of dX/dt = rhs(t, X).
template <typename Rhs>
Matrix rk4_step(Rhs &&rhs, double t, const Matrix &X, double h)
{
  const Matrix k1 = rhs(t, X);
  const Matrix k2 = rhs(t + 0.5 * h, X + (0.5 * h) * k1);
  const Matrix k3 = rhs(t + 0.5 * h, X + (0.5 * h) * k2);
  const Matrix k4 = rhs(t + h, X + h * k3);
  return X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Visits the fixed-step grid t0, t0 + h, ..., with the last step shortened to end on t1.
// Works in either direction; `step` is the magnitude.
template <typename Rhs, typename OnStep>
Matrix integrate_matrix_ode(Rhs &&rhs, const Matrix &X0, double t0, double t1, double step,
                            OnStep &&on_step)
{
  if (!(step > 0.0) || !std::isfinite(step))
  {
    throw Error(ErrorKind::BadShape, "integrate_matrix_ode: step must be positive");
  }
  Matrix X = X0;
  const double span = t1 - t0;
  if (span == 0.0)
  {
    return X;
  }
  const double dir = span > 0.0 ? 1.0 : -1.0;
  const double nsteps_real = std::abs(span) / step;
  auto nsteps = static_cast<long long>(std::ceil(nsteps_real - 1e-9));
  nsteps = std::max<long long>(nsteps, 1);
  double t = t0;
  for (long long k = 0; k < nsteps; ++k)
  {
    const double t_next = (k + 1 == nsteps) ? t1 : t0 + dir * step * static_cast<double>(k + 1);
    X = rk4_step(rhs, t, X, t_next - t);
    if (!X.allFinite())
    {
      throw Error(ErrorKind::NonFinite,
                  "integrate_matrix_ode: non-finite state at t=" + std::to_string(t_next));
    }
    t = t_next;
    on_step(t, X);
  }
  return X;
}

template <typename Rhs>
Matrix integrate_matrix_ode(Rhs &&rhs, const Matrix &X0, double t0, double t1, double step)
{
  return integrate_matrix_ode(std::forward<Rhs>(rhs), X0, t0, t1, step, [](double, Matrix &) {});
}

// Commutator [A, B].
inline Matrix commutator(const Matrix &A, const Matrix &B)
{
  return A * B - B * A;
}

}  // namespace nhqm
