// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include "nhqm/hamiltonian.hpp"
#include "nhqm/linalg.hpp"

// Closed-form metrics of the 2x2 PT-symmetric Hamiltonian
// [[r e^{i theta}, s], [s, r e^{-i theta}]] in each regime, plus the one-mode decay model.
// Scalar work is carried out in long double and rounded on output.

namespace nhqm::oracle
{

using real = long double;

struct UnbrokenParams
{
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
};

struct BrokenParams
{
  double Ap = 0.0, Am = 0.0, B = 0.0, C = 0.0;
};

struct EPParams
{
  double Ap = 0.0, Bp = 0.0, Cp = 0.0, Dp = 0.0;
};

enum class BasisChoice
{
  Standard,
  InstantDiagonal,
};

namespace detail
{

inline Matrix assemble(real g11, real g22, real re12, real im12)
{
  Matrix G(2, 2);
  G(0, 0) = cplx(static_cast<double>(g11), 0.0);
  G(1, 1) = cplx(static_cast<double>(g22), 0.0);
  G(0, 1) = cplx(static_cast<double>(re12), static_cast<double>(im12));
  G(1, 0) = std::conj(G(0, 1));
  return G;
}

inline void require_regime(const PTParams &p, PTRegime want, const char *where)
{
  if (p.s == 0.0)
    throw Error(ErrorKind::BadShape, std::string(where) + ": s must be nonzero");
  if (classify_regime(p) != want)
    throw Error(ErrorKind::ConstraintViolated,
                std::string(where) + ": parameters are in the " + to_string(classify_regime(p)) +
                    " regime");
}

inline real sin_alpha(const PTParams &p)
{
  return static_cast<real>(p.r) / static_cast<real>(p.s) * std::sin(static_cast<real>(p.theta));
}

inline real cos_alpha(const PTParams &p)
{
  const real sa = sin_alpha(p);
  return std::sqrt(1.0L - sa * sa);
}

}  // namespace detail

// C > sqrt(A^2 + B^2) and (C^2 - A^2 - B^2) cos^2(alpha) > D^2.
inline bool satisfies_constraints(const PTParams &p, const UnbrokenParams &c)
{
  const real ca = detail::cos_alpha(p);
  const real A = c.A, B = c.B, C = c.C, D = c.D;
  return C > std::sqrt(A * A + B * B) && (C * C - A * A - B * B) * ca * ca > D * D;
}

inline Matrix unbroken_metric(const PTParams &p, const UnbrokenParams &c, double t)
{
  detail::require_regime(p, PTRegime::Unbroken, "unbroken_metric");
  if (!satisfies_constraints(p, c))
    throw Error(ErrorKind::ConstraintViolated, "unbroken_metric: positivity constraints fail");
  const real sa = detail::sin_alpha(p), ca = detail::cos_alpha(p);
  const real alpha = std::asin(sa);
  const real phi0 = 2.0L * static_cast<real>(t) * static_cast<real>(p.s) * ca;
  const real pp = phi0 + alpha, pm = phi0 - alpha;
  const real A = c.A, B = c.B, C = c.C, D = c.D;
  const real g11 = -A * std::cos(pp) + B * std::sin(pp) + C;
  const real g22 = A * std::cos(pm) - B * std::sin(pm) + C;
  const real im12 = -(A * std::sin(phi0) + B * std::cos(phi0) + C * sa);
  return detail::assemble(g11, g22, D, im12);
}

// (1/cos alpha) [[1, -i sin alpha], [i sin alpha, 1]].
inline Matrix bender_metric(const PTParams &p)
{
  return unbroken_metric(p, {0.0, 0.0, static_cast<double>(1.0L / detail::cos_alpha(p)), 0.0},
                         0.0);
}

// Brute-force coefficients reproducing G0 at t = 0.
inline UnbrokenParams unbroken_params_from(const PTParams &p, const Matrix &G0)
{
  detail::require_regime(p, PTRegime::Unbroken, "unbroken_params_from");
  const real sa = detail::sin_alpha(p), ca = detail::cos_alpha(p);
  const real g11 = G0(0, 0).real(), g22 = G0(1, 1).real();
  const real m = 0.5L * (g11 + g22), n = -static_cast<real>(G0(0, 1).imag());
  UnbrokenParams c;
  c.A = static_cast<double>((g22 - g11) / (2.0L * ca));
  c.C = static_cast<double>((m - n * sa) / (ca * ca));
  c.B = static_cast<double>((n - m * sa) / (ca * ca));
  c.D = G0(0, 1).real();
  return c;
}

// Eigenkets at t = 0 for the Standard choice: a (e^{i alpha/2}, e^{-i alpha/2}) with
// eigenvalue r cos(theta) + s cos(alpha), b (e^{-i alpha/2}, -e^{i alpha/2}) with the other.
inline std::array<Vector, 2> standard_kets(const PTParams &p, cplx a, cplx b)
{
  const double alpha = static_cast<double>(std::asin(detail::sin_alpha(p)));
  const cplx h = std::exp(cplx(0.0, 0.5 * alpha));
  Vector u(2), v(2);
  u << a * h, a * std::conj(h);
  v << b * std::conj(h), -b * h;
  return {u, v};
}

inline Matrix unbroken_metric_from_bases(const PTParams &p, cplx a, cplx b, BasisChoice choice,
                                         double t)
{
  detail::require_regime(p, PTRegime::Unbroken, "unbroken_metric_from_bases");
  if (a == 0.0 || b == 0.0)
    throw Error(ErrorKind::BadShape, "unbroken_metric_from_bases: a and b must be nonzero");
  const real sa = detail::sin_alpha(p), ca = detail::cos_alpha(p);
  const real na = std::norm(std::complex<real>(a.real(), a.imag()));
  const real nb = std::norm(std::complex<real>(b.real(), b.imag()));
  if (choice == BasisChoice::Standard)
  {
    const real Ap = (na + nb) / (4.0L * na * nb * ca * ca);
    const real Am = (nb - na) / (4.0L * na * nb * ca);
    return detail::assemble(Ap, Ap, Am, -Ap * sa);
  }
  const real App = (na + nb) / (2.0L * na * nb * ca);
  const real Apm = (na - nb) / (2.0L * na * nb * ca);
  UnbrokenParams c;
  c.A = static_cast<double>(Apm);
  c.B = static_cast<double>(-App * sa / ca);
  c.C = static_cast<double>(App / ca);
  c.D = 0.0;
  return unbroken_metric(p, c, t);
}

inline real broken_lambda(const PTParams &p)
{
  const real rs = static_cast<real>(p.r) * std::sin(static_cast<real>(p.theta));
  const real s = p.s;
  return std::sqrt(rs * rs - s * s);
}

// A_{+/-} q > 0, B > -(A_+ + A_-) sgn(q), (4 A_+ A_- - B^2) lambda^2 > C^2 s^2 with
// q = (r/s) sin(theta).
inline bool satisfies_constraints(const PTParams &p, const BrokenParams &c)
{
  const real q = detail::sin_alpha(p);
  const real lam = broken_lambda(p), s = p.s;
  const real Ap = c.Ap, Am = c.Am, B = c.B, C = c.C;
  const real sg = q > 0 ? 1.0L : -1.0L;
  return Ap * q > 0 && Am * q > 0 && B > -(Ap + Am) * sg &&
         (4.0L * Ap * Am - B * B) * lam * lam > C * C * s * s;
}

inline Matrix broken_metric(const PTParams &p, const BrokenParams &c, double t)
{
  detail::require_regime(p, PTRegime::Broken, "broken_metric");
  if (!satisfies_constraints(p, c))
    throw Error(ErrorKind::ConstraintViolated, "broken_metric: positivity constraints fail");
  const real lam = broken_lambda(p), s = p.s, q = detail::sin_alpha(p);
  const real Lp = lam / s + q, Lm = lam / s - q;
  const real ep = std::exp(2.0L * lam * static_cast<real>(t)), em = 1.0L / ep;
  const real Ap = c.Ap, Am = c.Am, B = c.B;
  const real g11 = -Ap * Lm * ep + Am * Lp * em + B;
  const real g22 = Ap * Lp * ep - Am * Lm * em + B;
  const real im12 = -(Ap * ep + Am * em + B * q);
  return detail::assemble(g11, g22, c.C, im12);
}

// Completeness-relation coefficients: A_x = s / (4 |x|^2 lambda^2 w), w = r sin(theta) - lambda,
// with A_+ = A_b, A_- = A_a and B = C = 0.
inline BrokenParams broken_params_from_bases(const PTParams &p, cplx a, cplx b)
{
  detail::require_regime(p, PTRegime::Broken, "broken_params_from_bases");
  if (a == 0.0 || b == 0.0)
    throw Error(ErrorKind::BadShape, "broken_params_from_bases: a and b must be nonzero");
  const real lam = broken_lambda(p), s = p.s;
  const real w = static_cast<real>(p.r) * std::sin(static_cast<real>(p.theta)) - lam;
  auto coeff = [&](cplx x) {
    const real nx = std::norm(std::complex<real>(x.real(), x.imag()));
    return static_cast<double>(s / (4.0L * nx * lam * lam * w));
  };
  return {coeff(b), coeff(a), 0.0, 0.0};
}

// Kets a e^{lambda t} (s, -i w) and b e^{-lambda t} (i w, s), times e^{-i t r cos(theta)}.
inline std::array<Vector, 2> broken_kets(const PTParams &p, cplx a, cplx b, double t)
{
  const double lam = static_cast<double>(broken_lambda(p));
  const double w = p.r * std::sin(p.theta) - lam;
  const cplx ph = std::exp(cplx(0.0, -t * p.r * std::cos(p.theta)));
  Vector u(2), v(2);
  u << p.s, cplx(0.0, -w);
  v << cplx(0.0, w), p.s;
  return {Vector(a * std::exp(lam * t) * ph * u), Vector(b * std::exp(-lam * t) * ph * v)};
}

inline BrokenParams broken_params_from(const PTParams &p, const Matrix &G0)
{
  detail::require_regime(p, PTRegime::Broken, "broken_params_from");
  const double lam = static_cast<double>(broken_lambda(p)), q = p.sin_alpha();
  const double Lp = lam / p.s + q, Lm = lam / p.s - q;
  Eigen::Matrix3d M;
  M << -Lm, Lp, 1.0, Lp, -Lm, 1.0, 1.0, 1.0, q;
  const Eigen::Vector3d rhs(G0(0, 0).real(), G0(1, 1).real(), -G0(0, 1).imag());
  const Eigen::Vector3d x = M.fullPivLu().solve(rhs);
  return {x(0), x(1), x(2), G0(0, 1).real()};
}

// A' > 0, A'^2 - B'^2 - C'^2 - D'^2 > 0, (A'^2 - C'^2) r^2 sin^2(theta) > s^2 B'^2.
inline bool satisfies_constraints(const PTParams &p, const EPParams &c)
{
  const real rs = static_cast<real>(p.r) * std::sin(static_cast<real>(p.theta));
  const real s = p.s;
  const real A = c.Ap, B = c.Bp, C = c.Cp, D = c.Dp;
  return A > 0 && A * A - B * B - C * C - D * D > 0 && (A * A - C * C) * rs * rs > s * s * B * B;
}

inline Matrix ep_metric(const PTParams &p, const EPParams &c, double t)
{
  detail::require_regime(p, PTRegime::ExceptionalPoint, "ep_metric");
  if (!satisfies_constraints(p, c))
    throw Error(ErrorKind::ConstraintViolated, "ep_metric: positivity constraints fail");
  const real rs = static_cast<real>(p.r) * std::sin(static_cast<real>(p.theta));
  const real s = p.s, tt = t;
  const real A = c.Ap, B = c.Bp, C = c.Cp, D = c.Dp;
  const real k = A * rs + s * B;
  const real g11 = 2.0L * rs * k * tt * tt - 2.0L * (rs * (A + C) + s * B) * tt + (A + C);
  const real g22 = 2.0L * rs * k * tt * tt + 2.0L * (rs * (A - C) + s * B) * tt + (A - C);
  const real im12 = -(2.0L * s * k * tt * tt - 2.0L * C * s * tt - B);
  return detail::assemble(g11, g22, D, im12);
}

// Coefficients from the eigenvector / generalized-eigenvector basis.
inline EPParams ep_params_from_bases(const PTParams &p, cplx a, cplx b)
{
  if (a == 0.0)
    throw Error(ErrorKind::BadShape, "ep_params_from_bases: a must be nonzero");
  const real na = std::norm(std::complex<real>(a.real(), a.imag()));
  const real nb = std::norm(std::complex<real>(b.real(), b.imag()));
  const std::complex<real> ab = std::complex<real>(a.real(), a.imag()) *
                                std::conj(std::complex<real>(b.real(), b.imag()));
  const real q = detail::sin_alpha(p);
  const real a4 = na * na;
  EPParams c;
  c.Ap = static_cast<double>((3.0L * na + 2.0L * nb - 2.0L * ab.real()) / (2.0L * a4));
  c.Bp = static_cast<double>(-q / a4 * (na + nb - ab.real()));
  c.Cp = static_cast<double>((-na + 2.0L * ab.real()) / (2.0L * a4));
  c.Dp = static_cast<double>(-q / a4 * ab.imag());
  return c;
}

// Eigenvector and generalized eigenvector evolved to time t.
inline std::array<Vector, 2> ep_kets(const PTParams &p, cplx a, cplx b, double t)
{
  const double q = p.sin_alpha();
  const cplx ph = std::exp(cplx(0.0, -t * p.r * std::cos(p.theta)));
  Vector u(2), v(2);
  u << a * cplx(0.0, q), a;
  v << a * p.r * t * std::sin(p.theta) + a - b, cplx(0.0, 1.0) * (-a * p.s * t + b * q);
  return {Vector(ph * u), Vector(ph * v)};
}

inline EPParams ep_params_from(const Matrix &G0)
{
  EPParams c;
  c.Ap = 0.5 * (G0(0, 0).real() + G0(1, 1).real());
  c.Cp = 0.5 * (G0(0, 0).real() - G0(1, 1).real());
  c.Bp = G0(0, 1).imag();
  c.Dp = G0(0, 1).real();
  return c;
}

// Closed-form metric of whichever regime p lies in, matched to G0 at t = 0.
inline Matrix pt_metric_from_initial(const PTParams &p, const Matrix &G0, double t)
{
  switch (classify_regime(p))
  {
    case PTRegime::Unbroken:
      return unbroken_metric(p, unbroken_params_from(p, G0), t);
    case PTRegime::Broken:
      return broken_metric(p, broken_params_from(p, G0), t);
    case PTRegime::ExceptionalPoint:
      return ep_metric(p, ep_params_from(G0), t);
  }
  return G0;
}

// G(t) = G0 e^{Gamma t} for H = omega - i Gamma / 2.
inline double decay_metric(double G0, double gamma, double t)
{
  if (!(G0 > 0.0))
    throw Error(ErrorKind::ConstraintViolated, "decay_metric: G0 must be positive");
  return static_cast<double>(static_cast<real>(G0) *
                             std::exp(static_cast<real>(gamma) * static_cast<real>(t)));
}

}  // namespace nhqm::oracle
