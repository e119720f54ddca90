// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>
#include "nhqm/linalg.hpp"

namespace nhqm
{

struct EnsembleMember
{
  double probability = 0.0;
  Vector ket;
};

using Ensemble = std::vector<EnsembleMember>;

// rho = sum_i p_i |psi_i><psi_i| G, with the metric it was built against. dim_a * dim_b is the
// full dimension; single systems use dim_b = 1.
struct GeneralizedDensityMatrix
{
  Matrix rho;
  Matrix metric;
  std::optional<Ensemble> ensemble;
  Eigen::Index dim_a = 0;
  Eigen::Index dim_b = 1;

  Eigen::Index dim() const { return rho.rows(); }
  // rho G^{-1}.
  Matrix bare() const { return metric.llt().solve(rho.adjoint()).adjoint(); }
};

enum class Subsystem
{
  A,
  B,
};

inline void check_dims(Eigen::Index dim, Eigen::Index dim_a, Eigen::Index dim_b, const char *where)
{
  if (dim_a < 1 || dim_b < 1 || dim_a * dim_b != dim)
    throw Error(ErrorKind::BadShape, std::string(where) + ": dim_a * dim_b must equal dim");
}

inline GeneralizedDensityMatrix gdm_from_ensemble(const Ensemble &ensemble, const Matrix &G,
                                                  Eigen::Index dim_a = 0, Eigen::Index dim_b = 1)
{
  require_hpd(G, "gdm_from_ensemble");
  const Eigen::Index n = G.rows();
  if (dim_a == 0)
    dim_a = n / dim_b;
  check_dims(n, dim_a, dim_b, "gdm_from_ensemble");
  if (ensemble.empty())
    throw Error(ErrorKind::BadWeights, "gdm_from_ensemble: empty ensemble");
  double total = 0.0;
  Matrix bare = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < ensemble.size(); ++i)
  {
    const auto &m = ensemble[i];
    if (!(m.probability >= 0.0) || !std::isfinite(m.probability))
      throw Error(ErrorKind::BadWeights, "gdm_from_ensemble: negative or non-finite weight");
    if (m.ket.size() != n)
      throw Error(ErrorKind::BadShape, "gdm_from_ensemble: ket dimension differs from metric");
    const double norm2 = m.ket.dot(G * m.ket).real();
    if (std::abs(norm2 - 1.0) > 1e-10)
    {
      throw Error(ErrorKind::UnnormalizedMember,
                  "gdm_from_ensemble: member " + std::to_string(i) + " has <psi|G|psi> = " +
                      std::to_string(norm2));
    }
    total += m.probability;
    bare += m.probability * (m.ket * m.ket.adjoint());
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorKind::BadWeights, "gdm_from_ensemble: weights sum to " + std::to_string(total));
  return {bare * G, G, ensemble, dim_a, dim_b};
}

// Pure-state GDM |psi><psi| G.
inline GeneralizedDensityMatrix gdm_pure(const Vector &psi, const Matrix &G, Eigen::Index dim_a = 0,
                                         Eigen::Index dim_b = 1)
{
  return gdm_from_ensemble({{1.0, psi}}, G, dim_a, dim_b);
}

// Scales psi so that <psi|G|psi> = 1.
inline Vector normalize_in(const Vector &psi, const Matrix &G)
{
  const double n2 = psi.dot(G * psi).real();
  if (!(n2 > 0.0))
    throw Error(ErrorKind::UnnormalizedState, "normalize_in: zero generalized norm");
  return psi / std::sqrt(n2);
}

// G^{1/2} rho G^{-1/2}.
inline Matrix dress(const Matrix &rho, const Matrix &G)
{
  const auto roots = hpd_roots(G);
  return roots.sqrt * rho * roots.inv_sqrt;
}

inline Matrix dress(const GeneralizedDensityMatrix &rho)
{
  return dress(rho.rho, rho.metric);
}

// Inverse of dress: G^{-1/2} rho_hat G^{1/2}.
inline Matrix undress(const Matrix &rho_hat, const Matrix &G)
{
  const auto roots = hpd_roots(G);
  return roots.inv_sqrt * rho_hat * roots.sqrt;
}

// sum_n <n|G A|n> over a basis with sum_n |n><n| G = I.
inline cplx generalized_trace(const Matrix &A, const std::vector<Vector> &basis, const Matrix &G)
{
  const Eigen::Index n = G.rows();
  if (A.rows() != n || A.cols() != n)
    throw Error(ErrorKind::BadShape, "generalized_trace: operator and metric shapes differ");
  Matrix S = Matrix::Zero(n, n);
  for (const auto &v : basis)
  {
    if (v.size() != n)
      throw Error(ErrorKind::BadShape, "generalized_trace: basis ket has wrong dimension");
    S += v * v.adjoint();
  }
  const double res = (S * G - identity(n)).norm();
  if (!(res <= 1e-10))
    throw Error(ErrorKind::IncompleteBasis,
                "generalized_trace: completeness residual " + std::to_string(res));
  cplx tr = 0.0;
  const Matrix GA = G * A;
  for (const auto &v : basis)
    tr += v.dot(GA * v);
  return tr;
}

// Contracts subsystem `over` of X (index i_a * dim_b + i_b) against W:
// over B: sum X[(a,b),(a',b')] W[b',b]; over A: sum X[(a,b),(a',b')] W[a',a].
inline Matrix contract(const Matrix &X, Eigen::Index dim_a, Eigen::Index dim_b, Subsystem over,
                       const Matrix &W)
{
  check_dims(X.rows(), dim_a, dim_b, "contract");
  if (over == Subsystem::B)
  {
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (Eigen::Index a = 0; a < dim_a; ++a)
      for (Eigen::Index ap = 0; ap < dim_a; ++ap)
      {
        cplx s = 0.0;
        for (Eigen::Index b = 0; b < dim_b; ++b)
          for (Eigen::Index bp = 0; bp < dim_b; ++bp)
            s += X(a * dim_b + b, ap * dim_b + bp) * W(bp, b);
        out(a, ap) = s;
      }
    return out;
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (Eigen::Index b = 0; b < dim_b; ++b)
    for (Eigen::Index bp = 0; bp < dim_b; ++bp)
    {
      cplx s = 0.0;
      for (Eigen::Index a = 0; a < dim_a; ++a)
        for (Eigen::Index ap = 0; ap < dim_a; ++ap)
          s += X(a * dim_b + b, ap * dim_b + bp) * W(ap, a);
      out(b, bp) = s;
    }
  return out;
}

inline Matrix conventional_partial_trace(const Matrix &X, Eigen::Index dim_a, Eigen::Index dim_b,
                                         Subsystem over)
{
  return contract(X, dim_a, dim_b, over, identity(over == Subsystem::A ? dim_a : dim_b));
}

inline double product_metric_residual(const Matrix &G, const Matrix &G_a, const Matrix &G_b)
{
  if (G_a.rows() * G_b.rows() != G.rows())
    return std::numeric_limits<double>::infinity();
  return (G - kron(G_a, G_b)).norm() / std::max(1.0, G.norm());
}

// Reduced GDM carrying the metric of the kept subsystem.
inline GeneralizedDensityMatrix partial_trace(const GeneralizedDensityMatrix &rho, const Matrix &G_a,
                                              const Matrix &G_b, Subsystem over)
{
  check_dims(rho.dim(), rho.dim_a, rho.dim_b, "partial_trace");
  if (G_a.rows() != rho.dim_a || G_b.rows() != rho.dim_b)
    throw Error(ErrorKind::BadShape, "partial_trace: subsystem metric dimensions differ");
  const double res = product_metric_residual(rho.metric, G_a, G_b);
  if (!(res <= 1e-10))
    throw Error(ErrorKind::NonProductMetric,
                "partial_trace: metric is not G_A (x) G_B (residual " + std::to_string(res) + ")");
  const Matrix bare = rho.bare();
  if (over == Subsystem::B)
  {
    const Matrix r = contract(bare, rho.dim_a, rho.dim_b, Subsystem::B, G_b) * G_a;
    return {r, G_a, std::nullopt, rho.dim_a, 1};
  }
  const Matrix r = contract(bare, rho.dim_a, rho.dim_b, Subsystem::A, G_a) * G_b;
  return {r, G_b, std::nullopt, rho.dim_b, 1};
}

inline cplx expectation(const GeneralizedDensityMatrix &rho, const Matrix &O)
{
  if (O.rows() != rho.dim() || O.cols() != rho.dim())
    throw Error(ErrorKind::BadShape, "expectation: operator dimension differs");
  return (rho.rho * O).trace();
}

struct GdmValidity
{
  double self_adjoint_residual = 0.0;  // |rho^dagger G - G rho|_F
  double trace_error = 0.0;            // |tr rho - 1|
  double min_dressed_eigenvalue = 0.0;
  double max_dressed_eigenvalue = 0.0;
  bool valid = false;
};

inline GdmValidity check_gdm(const Matrix &rho, const Matrix &G)
{
  GdmValidity v;
  v.self_adjoint_residual = (rho.adjoint() * G - G * rho).norm();
  v.trace_error = std::abs(rho.trace() - 1.0);
  const auto spec = hermitian_eig(dress(rho, G));
  v.min_dressed_eigenvalue = spec.values(0);
  v.max_dressed_eigenvalue = spec.values(spec.values.size() - 1);
  v.valid = v.self_adjoint_residual <= 1e-10 && v.trace_error <= 1e-10 &&
            v.min_dressed_eigenvalue >= -1e-12;
  return v;
}

inline GdmValidity check_gdm(const GeneralizedDensityMatrix &rho)
{
  return check_gdm(rho.rho, rho.metric);
}

}  // namespace nhqm
