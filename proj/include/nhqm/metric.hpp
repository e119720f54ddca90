// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>
#include "nhqm/hamiltonian.hpp"
#include "nhqm/linalg.hpp"
#include "nhqm/optimize.hpp"

namespace nhqm
{

// dG/dt = i (G H - H^dagger G), hbar = 1.
inline Matrix metric_rhs(const Matrix &H, const Matrix &G)
{
  return 1i * (G * H - H.adjoint() * G);
}

inline Matrix metric_rhs(const HamiltonianModel &h, double t, const Matrix &G)
{
  return metric_rhs(materialize(h, t), G);
}

namespace detail
{

// Fixed-step RK4 flow with a memoized sample cache and cubic Hermite interpolation.
// Extensions always take whole steps away from the current cache bounds, so the set of
// cached samples does not depend on the order of queries.
class CachedFlow
{
public:
  using Rhs = std::function<Matrix(double, const Matrix &)>;
  using Project = std::function<void(Matrix &)>;
  using Validate = std::function<void(double, const Matrix &)>;

  CachedFlow(Rhs rhs, Project project, Validate validate, double step)
    : rhs_(std::move(rhs)), project_(std::move(project)), validate_(std::move(validate)),
      step_(step)
  {
    if (!(step > 0.0) || !std::isfinite(step))
      throw Error(ErrorKind::BadShape, "step must be positive and finite");
  }

  void seed(double t0, Matrix X0)
  {
    std::lock_guard lock(mutex_);
    if (project_)
      project_(X0);
    if (validate_)
      validate_(t0, X0);
    cache_.clear();
    cache_.emplace(t0, std::move(X0));
  }

  // Integrates from the nearest cache bound to exactly `t`, shortening the last step.
  void extend_exact(double t)
  {
    std::lock_guard lock(mutex_);
    const auto [lo, hi] = bounds_locked();
    if (t > hi)
      integrate_locked(hi, t, true);
    else if (t < lo)
      integrate_locked(lo, t, true);
  }

  Matrix at(double t) const
  {
    std::lock_guard lock(mutex_);
    auto [lo, hi] = bounds_locked();
    if (t > hi)
      integrate_locked(hi, t, false);
    else if (t < lo)
      integrate_locked(lo, t, false);
    return interpolate_locked(t);
  }

  std::vector<std::pair<double, Matrix>> samples() const
  {
    std::lock_guard lock(mutex_);
    return {cache_.begin(), cache_.end()};
  }

  double step() const { return step_; }

private:
  std::pair<double, double> bounds_locked() const
  {
    return {cache_.begin()->first, cache_.rbegin()->first};
  }

  void store_locked(double t, Matrix &X) const
  {
    if (project_)
      project_(X);
    if (validate_)
      validate_(t, X);
    cache_.emplace(t, X);
  }

  void integrate_locked(double from, double to, bool exact) const
  {
    Matrix X = cache_.at(from);
    if (exact)
    {
      integrate_matrix_ode(rhs_, X, from, to, step_,
                           [this](double t, Matrix &Y) { store_locked(t, Y); });
      return;
    }
    const double dir = to > from ? 1.0 : -1.0;
    const auto n = static_cast<long long>(std::ceil(std::abs(to - from) / step_ - 1e-9));
    double t = from;
    for (long long k = 1; k <= std::max<long long>(n, 1); ++k)
    {
      const double t_next = from + dir * step_ * static_cast<double>(k);
      X = rk4_step(rhs_, t, X, t_next - t);
      if (!X.allFinite())
        throw Error(ErrorKind::NonFinite, "flow diverged at t=" + std::to_string(t_next));
      store_locked(t_next, X);
      t = t_next;
    }
  }

  Matrix interpolate_locked(double t) const
  {
    auto upper = cache_.lower_bound(t);
    if (upper != cache_.end() && upper->first == t)
      return upper->second;
    auto lower = std::prev(upper);
    const double ta = lower->first, tb = upper->first;
    const Matrix &Xa = lower->second, &Xb = upper->second;
    const double h = tb - ta;
    const double u = (t - ta) / h;
    const Matrix Da = rhs_(ta, Xa), Db = rhs_(tb, Xb);
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    Matrix X = h00 * Xa + (h10 * h) * Da + h01 * Xb + (h11 * h) * Db;
    if (project_)
      project_(X);
    return X;
  }

  Rhs rhs_;
  Project project_;
  Validate validate_;
  double step_;
  mutable std::mutex mutex_;
  mutable std::map<double, Matrix> cache_;
};

inline void validate_metric_sample(double t, const Matrix &G)
{
  if (!G.allFinite())
    throw Error(ErrorKind::NonFinite, "metric sample non-finite at t=" + std::to_string(t));
  const auto c = check_hpd(G);
  if (!c.positive_definite)
    throw PositivityLost(t, c.min_eigenvalue);
}

}  // namespace detail

struct StationaryMetric
{
  Matrix G;
};

struct ClosedFormMetric
{
  std::function<Matrix(double)> at;
  std::string label;
};

struct IntegratedMetric
{
  Matrix G0;
  HamiltonianModel h;
  double t0 = 0.0;
  double step = 1e-3;
  std::shared_ptr<detail::CachedFlow> flow;
};

// G(t) as a stationary matrix, a closed form, or an RK4-integrated path.
class MetricTrajectory
{
public:
  using Kind = std::variant<StationaryMetric, ClosedFormMetric, IntegratedMetric>;

  explicit MetricTrajectory(Kind kind) : kind_(std::move(kind)) {}

  static MetricTrajectory stationary(Matrix G) { return MetricTrajectory(StationaryMetric{std::move(G)}); }
  static MetricTrajectory closed_form(std::function<Matrix(double)> f, std::string label)
  {
    return MetricTrajectory(ClosedFormMetric{std::move(f), std::move(label)});
  }

  Matrix at(double t) const
  {
    return std::visit(
        [t](const auto &k) -> Matrix {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, StationaryMetric>)
            return k.G;
          else if constexpr (std::is_same_v<T, ClosedFormMetric>)
            return k.at(t);
          else
            return k.flow->at(t);
        },
        kind_);
  }

  std::string label() const
  {
    return std::visit(
        [](const auto &k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, StationaryMetric>)
            return "stationary";
          else if constexpr (std::is_same_v<T, ClosedFormMetric>)
            return k.label;
          else
            return "integrated";
        },
        kind_);
  }

  // Cached (t, G) samples for integrated trajectories; empty otherwise.
  std::vector<std::pair<double, Matrix>> samples() const
  {
    if (const auto *k = std::get_if<IntegratedMetric>(&kind_))
      return k->flow->samples();
    return {};
  }

  const Kind &kind() const { return kind_; }

private:
  Kind kind_;
};

// Integrates the metric equation from G0 at t0 to t1 with fixed-step RK4. Each step is
// re-symmetrized and every cached sample is checked for positivity.
inline MetricTrajectory solve_metric(const HamiltonianModel &h, const Matrix &G0, double t0,
                                     double t1, double step)
{
  require_hpd(G0, "solve_metric initial metric");
  if (G0.rows() != h.dim())
    throw Error(ErrorKind::BadShape, "solve_metric: metric and Hamiltonian dimensions differ");
  auto flow = std::make_shared<detail::CachedFlow>(
      [h](double t, const Matrix &G) { return metric_rhs(h, t, G); },
      [](Matrix &G) { G = hermitian_part(G); }, detail::validate_metric_sample, step);
  flow->seed(t0, G0);
  flow->extend_exact(t1);
  return MetricTrajectory(IntegratedMetric{G0, h, t0, step, std::move(flow)});
}

struct MetricReport
{
  double hermiticity_residual = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool valid = false;
};

inline MetricReport check_metric(const Matrix &G)
{
  MetricReport r;
  r.hermiticity_residual = hermiticity_residual(G);
  const auto spec = hermitian_eig(G);
  r.min_eigenvalue = spec.values(0);
  r.max_eigenvalue = spec.values(spec.values.size() - 1);
  r.valid = check_hpd(G).positive_definite;
  return r;
}

namespace detail
{

// Frobenius-orthonormal basis of the n x n Hermitian matrices.
inline std::vector<Matrix> hermitian_basis(Eigen::Index n)
{
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(n * n));
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    Matrix E = Matrix::Zero(n, n);
    E(i, i) = 1.0;
    basis.push_back(E);
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
    {
      Matrix S = Matrix::Zero(n, n), A = Matrix::Zero(n, n);
      S(i, j) = S(j, i) = r;
      A(i, j) = cplx(0.0, r);
      A(j, i) = cplx(0.0, -r);
      basis.push_back(S);
      basis.push_back(A);
    }
  return basis;
}

// Hermitian solutions X of X H = H^dagger X, Frobenius-orthonormal.
inline std::vector<Matrix> intertwiner_null_space(const Matrix &H)
{
  const Eigen::Index n = H.rows();
  const auto basis = hermitian_basis(n);
  const Eigen::Index m = n * n;
  RealMatrix A(2 * m, m);
  for (Eigen::Index k = 0; k < m; ++k)
  {
    const Matrix &E = basis[static_cast<std::size_t>(k)];
    const Matrix R = E * H - H.adjoint() * E;
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index r = 0; r < n; ++r)
      {
        A(c * n + r, k) = R(r, c).real();
        A(m + c * n + r, k) = R(r, c).imag();
      }
  }
  Eigen::JacobiSVD<RealMatrix> svd(A, Eigen::ComputeFullV);
  const RealVector sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double tol = 1e-9 * std::max(smax, 1e-300);
  std::vector<Matrix> null;
  for (Eigen::Index i = 0; i < m; ++i)
  {
    const double s = i < sv.size() ? sv(i) : 0.0;
    if (smax == 0.0 || s <= tol)
    {
      Matrix N = Matrix::Zero(n, n);
      for (Eigen::Index k = 0; k < m; ++k)
        N += svd.matrixV()(k, i) * basis[static_cast<std::size_t>(k)];
      null.push_back(hermitian_part(N));
    }
  }
  return null;
}

inline Matrix combine(const std::vector<Matrix> &N, const RealVector &c)
{
  Matrix G = Matrix::Zero(N.front().rows(), N.front().cols());
  for (std::size_t i = 0; i < N.size(); ++i)
    G += c(static_cast<Eigen::Index>(i)) * N[i];
  return G;
}

inline double min_eig_normalized(const std::vector<Matrix> &N, const RealVector &c)
{
  const double norm = c.norm();
  if (norm == 0.0)
    return -1.0;
  return hermitian_eig(combine(N, c / norm)).values(0);
}

}  // namespace detail

// Stationary (pseudo-Hermitian) metric: Hermitian PD G with G H = H^dagger G, normalized to
// unit determinant. Among admissible G the one maximizing det G at fixed Frobenius norm is
// returned; throws NoStationaryMetric when no PD element exists.
inline Matrix stationary_metric(const HamiltonianModel &h)
{
  if (!h.is_time_independent())
    throw Error(ErrorKind::NoStationaryMetric, "stationary_metric needs a constant Hamiltonian");
  const Matrix H = materialize(h, 0.0);
  const Eigen::Index n = H.rows();
  const auto N = detail::intertwiner_null_space(H);
  if (N.empty())
    throw Error(ErrorKind::NoStationaryMetric, "G H = H^dagger G has only the trivial solution");
  const auto k = static_cast<Eigen::Index>(N.size());

  // Locate a positive-definite element by maximizing the normalized minimum eigenvalue.
  RealVector best_c;
  double best = -std::numeric_limits<double>::infinity();
  auto try_start = [&](const RealVector &c0) {
    RealVector c = c0;
    double v = detail::min_eig_normalized(N, c);
    if (k > 1 && v <= 1e-6)
    {
      NelderMeadOptions opt;
      opt.initial_scale = 0.5;
      opt.xtol = 1e-10;
      opt.max_evaluations = 4000;
      auto res = nelder_mead([&](const RealVector &x) { return -detail::min_eig_normalized(N, x); },
                             c0, opt);
      c = res.x;
      v = -res.value;
    }
    if (v > best)
    {
      best = v;
      best_c = c / c.norm();
    }
  };
  for (Eigen::Index i = 0; i < k && best <= 1e-6; ++i)
  {
    RealVector e = RealVector::Zero(k);
    e(i) = 1.0;
    try_start(e);
    try_start(-e);
  }
  if (best <= 1e-8)
  {
    throw Error(ErrorKind::NoStationaryMetric,
                "no positive-definite Hermitian solution of G H = H^dagger G");
  }

  // Newton on F(c) = |c|^2 / 2 - log det G(c); its unique minimizer is the max-det
  // direction on the unit sphere.
  RealVector c = best_c;
  auto objective = [&](const RealVector &x, double &value) -> bool {
    Eigen::LLT<Matrix> llt(detail::combine(N, x));
    if (llt.info() != Eigen::Success)
      return false;
    const Matrix L = llt.matrixL();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
    {
      const double d = L(i, i).real();
      if (!(d > 0.0))
        return false;
      logdet += 2.0 * std::log(d);
    }
    value = 0.5 * x.squaredNorm() - logdet;
    return true;
  };
  double F = 0.0;
  objective(c, F);
  for (int iter = 0; iter < 200; ++iter)
  {
    const Matrix G = detail::combine(N, c);
    const Matrix Ginv = G.llt().solve(identity(n));
    std::vector<Matrix> GN(N.size());
    RealVector grad(k);
    for (Eigen::Index i = 0; i < k; ++i)
    {
      GN[static_cast<std::size_t>(i)] = Ginv * N[static_cast<std::size_t>(i)];
      grad(i) = c(i) - GN[static_cast<std::size_t>(i)].trace().real();
    }
    RealMatrix hess = RealMatrix::Identity(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = i; j < k; ++j)
      {
        const double q =
            (GN[static_cast<std::size_t>(i)] * GN[static_cast<std::size_t>(j)]).trace().real();
        hess(i, j) += q;
        if (i != j)
          hess(j, i) += q;
      }
    const RealVector d = -hess.ldlt().solve(grad);
    const double decrement = -grad.dot(d);
    if (decrement < 1e-30)
      break;
    double tau = 1.0, F_new = 0.0;
    bool ok = false;
    for (int bt = 0; bt < 60; ++bt)
    {
      if (objective(c + tau * d, F_new) && F_new <= F - 1e-4 * tau * decrement)
      {
        ok = true;
        break;
      }
      tau *= 0.5;
    }
    if (!ok)
      break;
    c += tau * d;
    F = F_new;
  }
  Matrix G = hermitian_part(detail::combine(N, c));
  const double det = G.determinant().real();
  G /= std::pow(det, 1.0 / static_cast<double>(n));
  return G;
}

// G = (sum_n |n><n|)^{-1} for a complete set of kets.
inline Matrix metric_from_basis(const std::vector<Vector> &basis)
{
  if (basis.empty())
    throw Error(ErrorKind::SingularBasis, "empty basis");
  const Eigen::Index n = basis.front().size();
  if (static_cast<Eigen::Index>(basis.size()) != n)
    throw Error(ErrorKind::SingularBasis, "basis must contain exactly dim kets");
  Matrix S = Matrix::Zero(n, n);
  for (const auto &v : basis)
  {
    if (v.size() != n)
      throw Error(ErrorKind::BadShape, "basis kets have inconsistent dimensions");
    S += v * v.adjoint();
  }
  const auto spec = hermitian_eig(S);
  const double lo = spec.values(0), hi = spec.values(n - 1);
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw Error(ErrorKind::SingularBasis, "basis is (numerically) linearly dependent");
  return hermitian_part(spec.vectors * spec.values.cwiseInverse().cast<cplx>().asDiagonal() *
                        spec.vectors.adjoint());
}

// Covariantly constant transition function: dT/dt = -i [H(t), T].
class TransitionFunction
{
public:
  explicit TransitionFunction(std::shared_ptr<detail::CachedFlow> flow) : flow_(std::move(flow)) {}

  Matrix at(double t) const { return flow_->at(t); }

private:
  std::shared_ptr<detail::CachedFlow> flow_;
};

inline Matrix transition_rhs(const Matrix &H, const Matrix &T)
{
  return -1i * commutator(H, T);
}

inline TransitionFunction propagate_transition(const HamiltonianModel &h, const Matrix &T0,
                                               double t0, double t1, double step)
{
  require_square(T0, "propagate_transition");
  Eigen::FullPivLU<Matrix> lu(T0);
  if (!lu.isInvertible())
    throw Error(ErrorKind::SingularBasis, "transition function initial value is singular");
  auto flow = std::make_shared<detail::CachedFlow>(
      [h](double t, const Matrix &T) { return transition_rhs(materialize(h, t), T); }, nullptr,
      nullptr, step);
  flow->seed(t0, T0);
  flow->extend_exact(t1);
  return TransitionFunction(std::move(flow));
}

// CSV: t, re(g_11), im(g_11), re(g_12), ... in row-major order.
inline void write_metric_csv(std::ostream &os, const MetricTrajectory &traj,
                             const std::vector<double> &times)
{
  if (times.empty())
    return;
  const Matrix first = traj.at(times.front());
  const Eigen::Index n = first.rows();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      os << ",re_g" << i + 1 << j + 1 << ",im_g" << i + 1 << j + 1;
  os << "\n";
  char buf[64];
  for (double t : times)
  {
    const Matrix G = traj.at(t);
    std::snprintf(buf, sizeof buf, "%.17g", t);
    os << buf;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
      {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", G(i, j).real(), G(i, j).imag());
        os << buf;
      }
    os << "\n";
  }
}

}  // namespace nhqm
