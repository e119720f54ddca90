// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include "nhqm/linalg.hpp"

namespace nhqm
{

// Parameters of the 2x2 PT-symmetric Hamiltonian [[r e^{i theta}, s], [s, r e^{-i theta}]].
struct PTParams
{
  double r = 0.0;
  double s = 1.0;
  double theta = 0.0;

  // (r/s) sin(theta), the sine of the mixing angle alpha.
  double sin_alpha() const { return r / s * std::sin(theta); }
  double r_sin_theta() const { return r * std::sin(theta); }
  // s^2 - r^2 sin^2(theta): positive unbroken, negative broken, zero at the EP.
  double discriminant() const { return s * s - r_sin_theta() * r_sin_theta(); }
};

enum class PTRegime
{
  Unbroken,
  Broken,
  ExceptionalPoint,
};

inline std::string to_string(PTRegime regime)
{
  switch (regime)
  {
    case PTRegime::Unbroken:
      return "unbroken";
    case PTRegime::Broken:
      return "broken";
    case PTRegime::ExceptionalPoint:
      return "exceptional_point";
  }
  return "unknown";
}

struct ConstantHamiltonian
{
  Matrix matrix;
};

struct TimeDependentHamiltonian
{
  std::function<Matrix(double)> at;
  Eigen::Index dim = 0;
};

struct PTQubit
{
  PTParams params;
};

// One-dimensional decaying mode H = omega - i gamma / 2.
struct DecayMode
{
  double omega = 0.0;
  double gamma = 0.0;
};

struct HamiltonianModel
{
  std::variant<ConstantHamiltonian, TimeDependentHamiltonian, PTQubit, DecayMode> kind;

  static HamiltonianModel constant(Matrix m)
  {
    require_square(m, "HamiltonianModel::constant");
    require_finite(m, "HamiltonianModel::constant");
    return {ConstantHamiltonian{std::move(m)}};
  }
  static HamiltonianModel time_dependent(std::function<Matrix(double)> f, Eigen::Index dim)
  {
    return {TimeDependentHamiltonian{std::move(f), dim}};
  }
  static HamiltonianModel pt_qubit(PTParams p)
  {
    if (p.s == 0.0 || !std::isfinite(p.s) || !std::isfinite(p.r) || !std::isfinite(p.theta))
    {
      throw Error(ErrorKind::BadShape, "PT qubit requires finite parameters and s != 0");
    }
    return {PTQubit{p}};
  }
  static HamiltonianModel decay(double omega, double gamma)
  {
    if (gamma < 0.0)
    {
      throw Error(ErrorKind::BadShape, "decay rate gamma must be non-negative");
    }
    return {DecayMode{omega, gamma}};
  }

  bool is_time_independent() const
  {
    return !std::holds_alternative<TimeDependentHamiltonian>(kind);
  }

  Eigen::Index dim() const
  {
    return std::visit(
        [](const auto &k) -> Eigen::Index {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ConstantHamiltonian>)
            return k.matrix.rows();
          else if constexpr (std::is_same_v<T, TimeDependentHamiltonian>)
            return k.dim;
          else if constexpr (std::is_same_v<T, PTQubit>)
            return 2;
          else
            return 1;
        },
        kind);
  }
};

inline Matrix pt_matrix(const PTParams &p)
{
  Matrix H(2, 2);
  H << p.r * std::exp(1i * p.theta), p.s, p.s, p.r * std::exp(-1i * p.theta);
  return H;
}

inline Matrix materialize(const HamiltonianModel &h, double t)
{
  return std::visit(
      [t](const auto &k) -> Matrix {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ConstantHamiltonian>)
        {
          return k.matrix;
        }
        else if constexpr (std::is_same_v<T, TimeDependentHamiltonian>)
        {
          Matrix m = k.at(t);
          require_square(m, "time-dependent Hamiltonian");
          require_finite(m, "time-dependent Hamiltonian");
          return m;
        }
        else if constexpr (std::is_same_v<T, PTQubit>)
        {
          return pt_matrix(k.params);
        }
        else
        {
          Matrix m(1, 1);
          m(0, 0) = cplx(k.omega, -0.5 * k.gamma);
          return m;
        }
      },
      h.kind);
}

inline double default_tol_regime(const PTParams &p)
{
  const double rs = p.r_sin_theta();
  return 1e-12 * std::max(p.s * p.s, rs * rs);
}

inline PTRegime classify_regime(const PTParams &p, double tol_regime)
{
  const double d = p.discriminant();
  if (std::abs(d) <= tol_regime)
    return PTRegime::ExceptionalPoint;
  return d > 0.0 ? PTRegime::Unbroken : PTRegime::Broken;
}

inline PTRegime classify_regime(const PTParams &p)
{
  return classify_regime(p, default_tol_regime(p));
}

// lambda_{+/-} = r cos(theta) +/- sqrt(s^2 - r^2 sin^2 theta); the root is imaginary when
// broken. Throws Degenerate at the exceptional point.
inline std::pair<cplx, cplx> pt_eigenvalues(const PTParams &p)
{
  const auto regime = classify_regime(p);
  if (regime == PTRegime::ExceptionalPoint)
  {
    throw Error(ErrorKind::Degenerate,
                "PT Hamiltonian is defective at the exceptional point (single eigenvalue " +
                    std::to_string(p.r * std::cos(p.theta)) + ")");
  }
  const double centre = p.r * std::cos(p.theta);
  if (regime == PTRegime::Unbroken)
  {
    // s cos(alpha) carries the sign of s.
    const double cos_alpha = std::sqrt(1.0 - p.sin_alpha() * p.sin_alpha());
    const double split = p.s * cos_alpha;
    return {cplx(centre + split, 0.0), cplx(centre - split, 0.0)};
  }
  const double lambda = std::sqrt(-p.discriminant());
  return {cplx(centre, lambda), cplx(centre, -lambda)};
}

}  // namespace nhqm
