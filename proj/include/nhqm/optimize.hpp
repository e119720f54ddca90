// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>
#include "nhqm/linalg.hpp"

namespace nhqm
{

struct NelderMeadOptions
{
  double initial_scale = 0.5;
  double xtol = 1e-8;  // simplex diameter
  double ftol = 1e-14;
  int max_evaluations = 20000;
};

struct NelderMeadResult
{
  RealVector x;
  double value = 0.0;
  int evaluations = 0;
};

// Adaptive-parameter Nelder-Mead (Gao & Han coefficients) for small dimensions.
template <typename F>
NelderMeadResult nelder_mead(F &&f, const RealVector &x0, const NelderMeadOptions &opt = {})
{
  const Eigen::Index n = x0.size();
  const double nd = static_cast<double>(n);
  const double alpha = 1.0, beta = 1.0 + 2.0 / nd, gamma = 0.75 - 0.5 / nd,
               delta = 1.0 - 1.0 / nd;

  std::vector<RealVector> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  int evals = 0;
  auto eval = [&](const RealVector &x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  for (Eigen::Index i = 0; i < n; ++i)
  {
    pts[i + 1](i) += (x0(i) != 0.0 ? opt.initial_scale * std::max(1.0, std::abs(x0(i)))
                                   : opt.initial_scale);
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  while (evals < opt.max_evaluations)
  {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      diameter = std::max(diameter, (pts[i] - pts[best]).lpNorm<Eigen::Infinity>());
    if (diameter < opt.xtol && std::abs(vals[worst] - vals[best]) <= opt.ftol)
      break;

    RealVector centroid = RealVector::Zero(n);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != worst)
        centroid += pts[i];
    centroid /= nd;

    const RealVector xr = centroid + alpha * (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best])
    {
      const RealVector xe = centroid + beta * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr)
      {
        pts[worst] = xe;
        vals[worst] = fe;
      }
      else
      {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second])
    {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const RealVector xc = outside ? RealVector(centroid + gamma * (xr - centroid))
                                  : RealVector(centroid - gamma * (centroid - pts[worst]));
    const double fc = eval(xc);
    if (fc < std::min(fr, vals[worst]))
    {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
      if (i == best)
        continue;
      pts[i] = pts[best] + delta * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  return {pts[static_cast<std::size_t>(it - vals.begin())], *it, evals};
}

// Objective over the unitary group. For the perturbation W -> exp(iK) W with Hermitian K,
// the first-order change is df = 2 Re tr(i K Z).
struct UnitaryEvaluation
{
  double value = 0.0;
  Matrix Z;
};

struct UnitarySearchOptions
{
  double gradient_tol = 1e-10;
  double value_tol = 1e-15;
  int max_iterations = 3000;
};

struct UnitarySearchResult
{
  Matrix W;
  double value = 0.0;
  int iterations = 0;
};

namespace detail
{

inline Matrix lie_gradient(const Matrix &Z)
{
  return 1i * (Z - Z.adjoint());
}

inline double lie_inner(const Matrix &A, const Matrix &B)
{
  return (A.adjoint() * B).trace().real();
}

// exp(i tau D) for Hermitian D via one eigendecomposition reused across line-search trials.
class HermitianExponential
{
public:
  explicit HermitianExponential(const Matrix &D)
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(D));
    Q_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
  }

  Matrix operator()(double tau) const
  {
    Vector phases(lambda_.size());
    for (Eigen::Index k = 0; k < lambda_.size(); ++k)
      phases(k) = std::exp(1i * (tau * lambda_(k)));
    return Q_ * phases.asDiagonal() * Q_.adjoint();
  }

private:
  Matrix Q_;
  RealVector lambda_;
};

inline Matrix reunitarize(const Matrix &W)
{
  Eigen::HouseholderQR<Matrix> qr(W);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < W.cols(); ++k)
  {
    const cplx d = R(k, k);
    if (std::abs(d) > 0.0)
      Q.col(k) *= d / std::abs(d);
  }
  return Q;
}

}  // namespace detail

// Polak-Ribiere conjugate gradient on U(m) with Armijo backtracking along geodesics.
template <typename F>
UnitarySearchResult minimize_over_unitary(F &&f, Matrix W, const UnitarySearchOptions &opt = {})
{
  UnitaryEvaluation cur = f(W);
  Matrix grad = detail::lie_gradient(cur.Z);
  Matrix dir = -grad;
  double step = 1.0 / std::max(1e-12, grad.norm());
  int stalled = 0;
  const auto restart_period = std::max<Eigen::Index>(W.rows() * W.rows(), 4);
  int it = 0;
  for (; it < opt.max_iterations; ++it)
  {
    const double gnorm = grad.norm();
    if (gnorm < opt.gradient_tol)
      break;
    double slope = detail::lie_inner(grad, dir);
    if (slope >= 0.0)
    {
      dir = -grad;
      slope = -gnorm * gnorm;
    }
    const detail::HermitianExponential expo(dir);
    double tau = std::min(2.0 * step, 1e3 / std::max(1e-300, dir.norm()));
    Matrix W_new;
    UnitaryEvaluation trial;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt)
    {
      W_new = expo(tau) * W;
      trial = f(W_new);
      if (trial.value <= cur.value + 1e-4 * tau * slope)
      {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted)
    {
      // Direction exhausted; fall back to steepest descent once, then stop.
      if ((dir + grad).norm() <= 1e-14 * gnorm)
        break;
      dir = -grad;
      continue;
    }
    step = tau;
    const double improvement = cur.value - trial.value;
    W = (it % 50 == 49) ? detail::reunitarize(W_new) : W_new;
    const Matrix grad_new = detail::lie_gradient(trial.Z);
    cur = std::move(trial);
    if (improvement <= opt.value_tol * std::max(1.0, std::abs(cur.value)))
    {
      if (++stalled >= 5)
      {
        grad = grad_new;
        ++it;
        break;
      }
    }
    else
    {
      stalled = 0;
    }
    double beta = 0.0;
    if ((it + 1) % restart_period != 0)
    {
      beta = std::max(0.0, detail::lie_inner(grad_new, grad_new - grad) /
                               std::max(1e-300, detail::lie_inner(grad, grad)));
    }
    dir = -grad_new + beta * dir;
    grad = grad_new;
  }
  if (it > 0)
    W = detail::reunitarize(W);
  return {W, f(W).value, it};
}

}  // namespace nhqm
