// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <memory>
#include <ostream>
#include <utility>
#include <vector>
#include "nhqm/hamiltonian.hpp"
#include "nhqm/linalg.hpp"
#include "nhqm/metric.hpp"

namespace nhqm
{

// <psi|G|phi>.
inline cplx inner(const Vector &psi, const Vector &phi, const Matrix &G)
{
  require_hpd(G, "inner");
  if (psi.size() != G.rows() || phi.size() != G.rows())
    throw Error(ErrorKind::BadShape, "inner: vector and metric dimensions differ");
  return psi.dot(G * phi);
}

inline double generalized_norm2(const Vector &psi, const Matrix &G)
{
  return inner(psi, psi, G).real();
}

// exp(-i H (t1 - t0)) for constant Hamiltonians.
inline Matrix propagator(const Matrix &H, double dt)
{
  return expm(H, cplx(0.0, -dt));
}

inline Vector propagate_state(const HamiltonianModel &h, const Vector &psi0, double t0, double t1,
                              double step)
{
  if (psi0.size() != h.dim())
    throw Error(ErrorKind::BadShape, "propagate_state: state and Hamiltonian dimensions differ");
  if (!psi0.allFinite())
    throw Error(ErrorKind::NonFinite, "propagate_state: non-finite initial state");
  if (h.is_time_independent())
  {
    const Vector out = propagator(materialize(h, t0), t1 - t0) * psi0;
    if (!out.allFinite())
      throw Error(ErrorKind::NonFinite, "propagate_state: overflow");
    return out;
  }
  const Matrix X = integrate_matrix_ode(
      [&h](double t, const Matrix &Y) -> Matrix { return -1i * (materialize(h, t) * Y); },
      Matrix(psi0), t0, t1, step);
  return X.col(0);
}

// |psi(t)> queried on demand: closed form for constant H, cached RK4 otherwise.
class StateTrajectory
{
public:
  StateTrajectory(HamiltonianModel h, Vector psi0, double t0, double step)
    : h_(std::move(h)), psi0_(std::move(psi0)), t0_(t0), step_(step)
  {
    if (psi0_.size() != h_.dim())
      throw Error(ErrorKind::BadShape, "StateTrajectory: state and Hamiltonian dimensions differ");
    if (h_.is_time_independent())
    {
      H_ = materialize(h_, t0_);
    }
    else
    {
      auto hh = h_;
      flow_ = std::make_shared<detail::CachedFlow>(
          [hh](double t, const Matrix &Y) -> Matrix { return -1i * (materialize(hh, t) * Y); },
          nullptr, nullptr, step_);
      flow_->seed(t0_, Matrix(psi0_));
    }
  }

  Vector at(double t) const
  {
    if (flow_)
      return flow_->at(t).col(0);
    return propagator(H_, t - t0_) * psi0_;
  }

  const Vector &initial() const { return psi0_; }
  double t0() const { return t0_; }

private:
  HamiltonianModel h_;
  Vector psi0_;
  double t0_;
  double step_;
  Matrix H_;
  std::shared_ptr<detail::CachedFlow> flow_;
};

inline Matrix liouville_rhs(const Matrix &H, const Matrix &rho)
{
  return -1i * commutator(H, rho);
}

// d rho/dt = -i [H(t), rho] by RK4; on_step(t, rho) sees every grid point.
template <typename OnStep>
Matrix evolve_gdm(const HamiltonianModel &h, const Matrix &rho0, double t0, double t1, double step,
                  OnStep &&on_step)
{
  require_square(rho0, "evolve_gdm");
  require_finite(rho0, "evolve_gdm");
  if (rho0.rows() != h.dim())
    throw Error(ErrorKind::BadShape, "evolve_gdm: density and Hamiltonian dimensions differ");
  return integrate_matrix_ode(
      [&h](double t, const Matrix &X) { return liouville_rhs(materialize(h, t), X); }, rho0, t0,
      t1, step, [&](double t, Matrix &X) { on_step(t, static_cast<const Matrix &>(X)); });
}

inline Matrix evolve_gdm(const HamiltonianModel &h, const Matrix &rho0, double t0, double t1,
                         double step)
{
  return evolve_gdm(h, rho0, t0, t1, step, [](double, const Matrix &) {});
}

// i d rhoN/dt = H rhoN - rhoN H^dagger + tr[rhoN (H^dagger - H)] rhoN.
inline Matrix normalized_density_rhs(const Matrix &H, const Matrix &rhoN)
{
  const Matrix Hd = H.adjoint();
  const cplx tr = (rhoN * (Hd - H)).trace();
  return -1i * (H * rhoN - rhoN * Hd + tr * rhoN);
}

template <typename OnStep>
Matrix evolve_normalized_density(const HamiltonianModel &h, const Matrix &rhoN0, double t0,
                                 double t1, double step, OnStep &&on_step)
{
  require_square(rhoN0, "evolve_normalized_density");
  require_finite(rhoN0, "evolve_normalized_density");
  if (rhoN0.rows() != h.dim())
    throw Error(ErrorKind::BadShape, "evolve_normalized_density: dimension mismatch");
  return integrate_matrix_ode(
      [&h](double t, const Matrix &X) { return normalized_density_rhs(materialize(h, t), X); },
      rhoN0, t0, t1, step,
      [&](double t, Matrix &X) { on_step(t, static_cast<const Matrix &>(X)); });
}

inline Matrix evolve_normalized_density(const HamiltonianModel &h, const Matrix &rhoN0, double t0,
                                        double t1, double step)
{
  return evolve_normalized_density(h, rhoN0, t0, t1, step, [](double, const Matrix &) {});
}

// CSV: t, re_psi1, im_psi1, ..., norm2_g, norm2_conv.
inline void write_state_csv(std::ostream &os, const StateTrajectory &psi,
                            const MetricTrajectory &metric, const std::vector<double> &times)
{
  const Eigen::Index n = psi.initial().size();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i)
    os << ",re_psi" << i + 1 << ",im_psi" << i + 1;
  os << ",norm2_g,norm2_conv\n";
  char buf[80];
  for (double t : times)
  {
    const Vector v = psi.at(t);
    const Matrix G = metric.at(t);
    std::snprintf(buf, sizeof buf, "%.17g", t);
    os << buf;
    for (Eigen::Index i = 0; i < n; ++i)
    {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", v(i).real(), v(i).imag());
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", generalized_norm2(v, G), v.squaredNorm());
    os << buf;
  }
}

}  // namespace nhqm
