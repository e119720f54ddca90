// SPDX-License-Identifier: Apache-2.0

// Reference computations for tests. Nothing here calls into the library's numerical kernels.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace ref
{

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using LMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

// Plain power series, sum_{k<terms} A^k / k!, in long double.
inline Matrix series_expm(const Matrix &A, int terms = 60)
{
  const LMatrix X = A.cast<std::complex<long double>>();
  LMatrix term = LMatrix::Identity(X.rows(), X.cols());
  LMatrix sum = term;
  for (int k = 1; k < terms; ++k)
  {
    term = (term * X) / static_cast<long double>(k);
    sum += term;
  }
  return sum.cast<cplx>();
}

inline Matrix kron(const Matrix &A, const Matrix &B)
{
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      for (int k = 0; k < B.rows(); ++k)
        for (int l = 0; l < B.cols(); ++l)
          K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
  return K;
}

// Conventional partial trace by explicit index loops; keep_a selects which factor survives.
inline Matrix ptrace(const Matrix &X, int da, int db, bool keep_a)
{
  if (keep_a)
  {
    Matrix out = Matrix::Zero(da, da);
    for (int a = 0; a < da; ++a)
      for (int ap = 0; ap < da; ++ap)
        for (int b = 0; b < db; ++b)
          out(a, ap) += X(a * db + b, ap * db + b);
    return out;
  }
  Matrix out = Matrix::Zero(db, db);
  for (int b = 0; b < db; ++b)
    for (int bp = 0; bp < db; ++bp)
      for (int a = 0; a < da; ++a)
        out(b, bp) += X(a * db + b, a * db + bp);
  return out;
}

// Square root through the general (non-Hermitian) eigensolver.
inline Matrix psd_sqrt(const Matrix &A)
{
  Eigen::ComplexEigenSolver<Matrix> es(A);
  Vector d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i)
    d(i) = std::sqrt(std::max(0.0, d(i).real()));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().inverse();
}

inline double h2(double x)
{
  auto term = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
  return term(x) + term(1.0 - x);
}

inline double entropy(const Matrix &rho)
{
  Eigen::ComplexEigenSolver<Matrix> es(rho);
  double s = 0.0;
  for (int i = 0; i < rho.rows(); ++i)
  {
    const double p = es.eigenvalues()(i).real();
    if (p > 1e-15)
      s -= p * std::log(p);
  }
  return s;
}

// Wootters concurrence from the eigenvalues of R = rho (sy x sy) rho* (sy x sy), in long double:
// for rank-deficient rho the square roots of near-zero eigenvalues amplify rounding.
inline double concurrence(const Matrix &rho_in)
{
  using lc = std::complex<long double>;
  const LMatrix rho = rho_in.cast<lc>();
  LMatrix yy = LMatrix::Zero(4, 4);
  yy(0, 3) = -1.0L;
  yy(1, 2) = 1.0L;
  yy(2, 1) = 1.0L;
  yy(3, 0) = -1.0L;
  const LMatrix R = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<LMatrix> es(R);
  std::vector<long double> mu;
  for (int i = 0; i < 4; ++i)
    mu.push_back(std::sqrt(std::max(0.0L, es.eigenvalues()(i).real())));
  std::sort(mu.begin(), mu.end(), std::greater<>());
  return static_cast<double>(std::max(0.0L, mu[0] - mu[1] - mu[2] - mu[3]));
}

inline double eof_two_qubit(const Matrix &rho)
{
  const double c = concurrence(rho);
  return h2(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

inline Matrix pt_hamiltonian(double r, double s, double theta)
{
  Matrix H(2, 2);
  H << r * std::exp(cplx(0.0, theta)), s, s, r * std::exp(cplx(0.0, -theta));
  return H;
}

inline Matrix bender(double sin_alpha)
{
  const double c = std::sqrt(1.0 - sin_alpha * sin_alpha);
  Matrix G(2, 2);
  G << 1.0, cplx(0.0, -sin_alpha), cplx(0.0, sin_alpha), 1.0;
  return G / c;
}

inline std::vector<cplx> eigenvalues(const Matrix &A)
{
  Eigen::ComplexEigenSolver<Matrix> es(A);
  std::vector<cplx> v(es.eigenvalues().data(), es.eigenvalues().data() + A.rows());
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

// Central difference of a matrix-valued function.
template <typename F>
Matrix derivative(F f, double t, double h = 1e-5)
{
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

// Classic RK4 on a single complex scalar, used to cross-check the matrix integrator.
template <typename F>
cplx rk4_scalar(F f, cplx y, double t0, double t1, int steps)
{
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i)
  {
    const cplx k1 = f(t, y), k2 = f(t + h / 2, y + h / 2 * k1), k3 = f(t + h / 2, y + h / 2 * k2),
               k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return y;
}

}  // namespace ref
