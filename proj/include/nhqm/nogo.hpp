// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>
#include "nhqm/density.hpp"
#include "nhqm/dynamics.hpp"
#include "nhqm/entanglement.hpp"
#include "nhqm/metric.hpp"
#include "nhqm/operators.hpp"
#include "nhqm/optimize.hpp"
#include "nhqm/parallel.hpp"
#include "nhqm/random.hpp"

namespace nhqm
{

enum class Theorem
{
  NoCloning,
  NoDeleting,
  NoSignaling,
  NoPerfectDiscrimination,
  EntanglementInvariance,
  NoEntanglementIncrease,
};

inline std::string to_string(Theorem t)
{
  switch (t)
  {
    case Theorem::NoCloning:
      return "no_cloning";
    case Theorem::NoDeleting:
      return "no_deleting";
    case Theorem::NoSignaling:
      return "no_signaling";
    case Theorem::NoPerfectDiscrimination:
      return "no_discrimination";
    case Theorem::EntanglementInvariance:
      return "entanglement_invariance";
    case Theorem::NoEntanglementIncrease:
      return "no_increase";
  }
  return "unknown";
}

// Diagnostic values reported alongside a verdict; controls never decide the verdict.
struct ReportControl
{
  std::string name;
  double value = 0.0;
  std::string note;
};

struct NoGoReport
{
  Theorem theorem = Theorem::NoSignaling;
  std::string variant;
  int trials = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
  std::uint64_t seed = 0;
  std::vector<ReportControl> controls;

  void finalize() { verdict = max_residual <= tolerance; }
};

namespace detail
{

inline Ensemble random_ensemble(Rng &rng, const Matrix &G, std::size_t members)
{
  const auto p = random_probabilities(rng, members);
  Ensemble e;
  e.reserve(members);
  for (std::size_t i = 0; i < members; ++i)
    e.push_back({p[i], normalize_in(random_ket(rng, G.rows()), G)});
  return e;
}

struct CompositeSample
{
  Matrix G_a, G_b;
  GeneralizedDensityMatrix rho;
};

inline CompositeSample random_composite(Rng &rng, Eigen::Index dim_a, Eigen::Index dim_b,
                                        std::size_t members)
{
  CompositeSample s;
  s.G_a = random_hpd(rng, dim_a);
  s.G_b = random_hpd(rng, dim_b);
  const Matrix G = kron(s.G_a, s.G_b);
  s.rho = gdm_from_ensemble(random_ensemble(rng, G, members), G, dim_a, dim_b);
  return s;
}

// sum_j M_j X M_j^dagger on the bare matrix.
inline Matrix apply_kraus_bare(const Matrix &bare, const std::vector<Matrix> &M)
{
  Matrix out = Matrix::Zero(bare.rows(), bare.cols());
  for (const auto &m : M)
    out += m * bare * m.adjoint();
  return out;
}

inline std::vector<Matrix> lift(const std::vector<Matrix> &ops, Eigen::Index dim_other,
                                Subsystem side)
{
  std::vector<Matrix> out;
  out.reserve(ops.size());
  for (const auto &o : ops)
    out.push_back(side == Subsystem::A ? kron(o, identity(dim_other)) : kron(identity(dim_other), o));
  return out;
}

inline double max_of(const std::vector<double> &v)
{
  double m = 0.0;
  for (double x : v)
    m = std::max(m, x);
  return m;
}

inline double min_of(const std::vector<double> &v)
{
  double m = std::numeric_limits<double>::infinity();
  for (double x : v)
    m = std::min(m, x);
  return v.empty() ? 0.0 : m;
}

}  // namespace detail

enum class SignalingMeasurement
{
  RandomDressed,
  Identity,
};

struct NoSignalingOptions
{
  Eigen::Index dim_a = 2;
  Eigen::Index dim_b = 2;
  std::size_t members = 3;
  std::size_t outcomes = 2;
  SignalingMeasurement measurement = SignalingMeasurement::RandomDressed;
  // When both are set the random state and metrics are evolved to `time` before measuring.
  std::optional<HamiltonianModel> h_a;
  std::optional<HamiltonianModel> h_b;
  double time = 1.0;
  double step = 1e-3;
  double tolerance = 1e-10;
};

// Reduced state of B before and after a non-selective measurement on A, with the undressed
// measurement as a control.
inline NoGoReport check_no_signaling(int trials, std::uint64_t seed,
                                     const NoSignalingOptions &opt = {})
{
  const Eigen::Index da = opt.dim_a, db = opt.dim_b;
  std::vector<double> residual(static_cast<std::size_t>(trials)), control(residual.size());
  parallel_for(residual.size(), [&](std::size_t i) {
    auto rng = make_rng(seed, i);
    auto s = detail::random_composite(rng, da, db, opt.members);
    if (opt.h_a && opt.h_b)
    {
      if (opt.h_a->dim() != da || opt.h_b->dim() != db)
        throw Error(ErrorKind::BadShape, "check_no_signaling: Hamiltonian dimensions differ");
      s.G_a = solve_metric(*opt.h_a, s.G_a, 0.0, opt.time, opt.step).at(opt.time);
      s.G_b = solve_metric(*opt.h_b, s.G_b, 0.0, opt.time, opt.step).at(opt.time);
      const Matrix Ha = materialize(*opt.h_a, 0.0), Hb = materialize(*opt.h_b, 0.0);
      auto h = (opt.h_a->is_time_independent() && opt.h_b->is_time_independent())
                   ? HamiltonianModel::constant(kron(Ha, identity(db)) + kron(identity(da), Hb))
                   : HamiltonianModel::time_dependent(
                         [ha = *opt.h_a, hb = *opt.h_b, da, db](double t) {
                           return Matrix(kron(materialize(ha, t), identity(db)) +
                                         kron(identity(da), materialize(hb, t)));
                         },
                         da * db);
      Ensemble evolved;
      for (const auto &m : *s.rho.ensemble)
        evolved.push_back({m.probability, propagate_state(h, m.ket, 0.0, opt.time, opt.step)});
      const Matrix G = kron(s.G_a, s.G_b);
      for (auto &m : evolved)
        m.ket = normalize_in(m.ket, G);
      s.rho = gdm_from_ensemble(evolved, G, da, db);
    }
    const Matrix bare = s.rho.bare();
    const Matrix before = contract(bare, da, db, Subsystem::A, s.G_a) * s.G_b;
    std::vector<Matrix> K;
    if (opt.measurement == SignalingMeasurement::Identity)
      K = {identity(da)};
    else
      K = random_kraus_set(rng, da, opt.outcomes);
    const std::vector<Matrix> M = opt.measurement == SignalingMeasurement::Identity
                                      ? K
                                      : matrices(dress_measurement_set(K, s.G_a));
    const Matrix after_bare = detail::apply_kraus_bare(bare, detail::lift(M, db, Subsystem::A));
    const Matrix after = contract(after_bare, da, db, Subsystem::A, s.G_a) * s.G_b;
    residual[i] = (after - before).norm();
    const Matrix ctrl_bare = detail::apply_kraus_bare(bare, detail::lift(K, db, Subsystem::A));
    control[i] = (contract(ctrl_bare, da, db, Subsystem::A, s.G_a) * s.G_b - before).norm();
  });
  NoGoReport r;
  r.theorem = Theorem::NoSignaling;
  r.variant = opt.measurement == SignalingMeasurement::Identity ? "identity" : "dressed";
  r.trials = trials;
  r.seed = seed;
  r.tolerance = opt.tolerance;
  r.max_residual = detail::max_of(residual);
  r.controls.push_back({"undressed_max_residual", detail::max_of(control),
                        "conventional measurement operators; not a violation"});
  r.controls.push_back({"undressed_min_residual", detail::min_of(control),
                        "conventional measurement operators; not a violation"});
  r.finalize();
  return r;
}

struct EntanglementTrialOptions
{
  int restarts = 16;
  std::size_t max_members = 4;
  double tolerance_pure = 1e-8;
  double tolerance_mixed = 1e-4;
};

// Local generalized unitary on side A or B (chosen per trial), as a full-space operator.
inline Matrix random_local_dressed_unitary(Rng &rng, const Matrix &G_a, const Matrix &G_b)
{
  const bool on_a = uniform(rng) < 0.5;
  if (on_a)
  {
    const Matrix U = dress_unitary(haar_unitary(rng, G_a.rows()), G_a).matrix;
    return kron(U, identity(G_b.rows()));
  }
  const Matrix U = dress_unitary(haar_unitary(rng, G_b.rows()), G_b).matrix;
  return kron(identity(G_a.rows()), U);
}

// Pure-state variant: |E_P(U psi) - E_P(psi)|.
inline NoGoReport check_entanglement_invariance_pure(int trials, std::uint64_t seed,
                                                     const EntanglementTrialOptions &opt = {})
{
  std::vector<double> residual(static_cast<std::size_t>(trials));
  parallel_for(residual.size(), [&](std::size_t i) {
    auto rng = make_rng(seed, i);
    const Matrix G_a = random_hpd(rng, 2), G_b = random_hpd(rng, 2);
    const Matrix G = kron(G_a, G_b);
    const Vector psi = normalize_in(random_ket(rng, 4), G);
    const Matrix U = random_local_dressed_unitary(rng, G_a, G_b);
    const Vector moved = normalize_in(U * psi, G);
    residual[i] = std::abs(entropy_pure(moved, G_a, G_b) - entropy_pure(psi, G_a, G_b));
  });
  NoGoReport r;
  r.theorem = Theorem::EntanglementInvariance;
  r.variant = "pure";
  r.trials = trials;
  r.seed = seed;
  r.tolerance = opt.tolerance_pure;
  r.max_residual = detail::max_of(residual);
  r.finalize();
  return r;
}

inline GeneralizedDensityMatrix random_two_qubit_gdm(Rng &rng, std::size_t max_members)
{
  const Matrix G_a = random_hpd(rng, 2), G_b = random_hpd(rng, 2);
  const Matrix G = kron(G_a, G_b);
  const auto members =
      static_cast<std::size_t>(std::uniform_int_distribution<int>(2, static_cast<int>(max_members))(rng));
  return gdm_from_ensemble(detail::random_ensemble(rng, G, members), G, 2, 2);
}

// Mixed-state variant: |EoF(U rho U^{-1}) - EoF(rho)| with shared optimizer seeds.
inline NoGoReport check_entanglement_invariance_mixed(int trials, std::uint64_t seed,
                                                      const EntanglementTrialOptions &opt = {})
{
  std::vector<double> residual(static_cast<std::size_t>(trials));
  parallel_for(residual.size(), [&](std::size_t i) {
    auto rng = make_rng(seed, i);
    const Matrix G_a = random_hpd(rng, 2), G_b = random_hpd(rng, 2);
    const Matrix G = kron(G_a, G_b);
    const auto members = static_cast<std::size_t>(
        std::uniform_int_distribution<int>(2, static_cast<int>(opt.max_members))(rng));
    const auto rho = gdm_from_ensemble(detail::random_ensemble(rng, G, members), G, 2, 2);
    const Matrix U = random_local_dressed_unitary(rng, G_a, G_b);
    GeneralizedDensityMatrix moved{U * rho.bare() * U.adjoint() * G, G, std::nullopt, 2, 2};
    EofOptions eo;
    eo.restarts = opt.restarts;
    eo.seed = seed ^ (0x9e3779b97f4a7c15ull * (i + 1));
    residual[i] = std::abs(eof_optimize(moved, eo) - eof_optimize(rho, eo));
  });
  NoGoReport r;
  r.theorem = Theorem::EntanglementInvariance;
  r.variant = "mixed";
  r.trials = trials;
  r.seed = seed;
  r.tolerance = opt.tolerance_mixed;
  r.max_residual = detail::max_of(residual);
  r.finalize();
  return r;
}

// Non-selective dressed measurement on B; residual max(0, EoF(rho') - EoF(rho)).
inline NoGoReport check_no_increase(int trials, std::uint64_t seed,
                                    const EntanglementTrialOptions &opt = {})
{
  std::vector<double> residual(static_cast<std::size_t>(trials)), drop(residual.size());
  parallel_for(residual.size(), [&](std::size_t i) {
    auto rng = make_rng(seed, i);
    const Matrix G_a = random_hpd(rng, 2), G_b = random_hpd(rng, 2);
    const Matrix G = kron(G_a, G_b);
    const auto members = static_cast<std::size_t>(
        std::uniform_int_distribution<int>(2, static_cast<int>(opt.max_members))(rng));
    const auto rho = gdm_from_ensemble(detail::random_ensemble(rng, G, members), G, 2, 2);
    const auto outcomes = static_cast<std::size_t>(std::uniform_int_distribution<int>(2, 3)(rng));
    const auto M = matrices(dress_measurement_set(random_kraus_set(rng, 2, outcomes), G_b));
    const Matrix after = detail::apply_kraus_bare(rho.bare(), detail::lift(M, 2, Subsystem::B));
    GeneralizedDensityMatrix out{after * G, G, std::nullopt, 2, 2};
    EofOptions eo;
    eo.restarts = opt.restarts;
    eo.seed = seed ^ (0x9e3779b97f4a7c15ull * (i + 1));
    const double before = eof_optimize(rho, eo);
    const double later = eof_optimize(out, eo);
    residual[i] = std::max(0.0, later - before);
    drop[i] = before - later;
  });
  NoGoReport r;
  r.theorem = Theorem::NoEntanglementIncrease;
  r.trials = trials;
  r.seed = seed;
  r.tolerance = opt.tolerance_mixed;
  r.max_residual = detail::max_of(residual);
  r.controls.push_back({"max_decrease", detail::max_of(drop), "largest EoF reduction observed"});
  r.finalize();
  return r;
}

struct ClonerOptions
{
  int restarts = 64;
  std::uint64_t seed = 0;
  UnitarySearchOptions search{};
};

struct ClonerResult
{
  double residual = 0.0;  // best floor over restarts
  Matrix unitary;         // conventional unitary V; the cloner is G^{-1/2} V G^{1/2}
};

// Minimizes sum_k min_theta |C (psi_k (x) E) - e^{i theta} psi_k (x) psi_k|_G^2 over generalized
// unitaries C on the metric G_1 (x) G_2.
inline ClonerResult search_cloner(const std::vector<Vector> &states, const Vector &blank,
                                  const Matrix &G_1, const Matrix &G_2,
                                  const ClonerOptions &opt = {})
{
  if (states.empty())
    throw Error(ErrorKind::BadShape, "search_cloner: no input states");
  const Eigen::Index d = G_1.rows();
  if (G_2.rows() != d || blank.size() != d)
    throw Error(ErrorKind::BadShape, "search_cloner: slot dimensions differ");
  const auto roots = hpd_roots(kron(G_1, G_2));
  std::vector<Vector> in, out;
  double constant = 0.0;
  for (const auto &s : states)
  {
    if (s.size() != d)
      throw Error(ErrorKind::BadShape, "search_cloner: state dimension differs");
    in.push_back(roots.sqrt * kron(s, blank));
    out.push_back(roots.sqrt * kron(s, s));
    constant += in.back().squaredNorm() + out.back().squaredNorm();
  }
  auto f = [&](const Matrix &V) {
    UnitaryEvaluation e;
    e.Z = Matrix::Zero(V.rows(), V.cols());
    double value = constant;
    for (std::size_t k = 0; k < in.size(); ++k)
    {
      const Vector Va = V * in[k];
      const cplx z = out[k].dot(Va);
      const double az = std::abs(z);
      value -= 2.0 * az;
      if (az > 1e-300)
        e.Z -= (std::conj(z) / az) * (Va * out[k].adjoint());
    }
    e.value = value;
    return e;
  };
  const int restarts = std::max(1, opt.restarts);
  std::vector<UnitarySearchResult> results(static_cast<std::size_t>(restarts));
  parallel_for(results.size(), [&](std::size_t i) {
    auto rng = make_rng(opt.seed, i);
    results[i] = minimize_over_unitary(f, haar_unitary(rng, d * d), opt.search);
  });
  ClonerResult best;
  best.residual = std::numeric_limits<double>::infinity();
  for (auto &r : results)
    if (r.value < best.residual)
    {
      best.residual = r.value;
      best.unitary = std::move(r.W);
    }
  best.residual = std::max(best.residual, 0.0);
  return best;
}

enum class DeletingBranch
{
  DegenerateBlank,
  Swapping,
  Inconsistent,
  NotDeleting,
  ConsistentDeleter,  // would contradict the theorem
};

inline std::string to_string(DeletingBranch b)
{
  switch (b)
  {
    case DeletingBranch::DegenerateBlank:
      return "degenerate_blank";
    case DeletingBranch::Swapping:
      return "swapping";
    case DeletingBranch::Inconsistent:
      return "inconsistent";
    case DeletingBranch::NotDeleting:
      return "not_deleting";
    case DeletingBranch::ConsistentDeleter:
      return "consistent_deleter";
  }
  return "unknown";
}

struct DeletingReport
{
  cplx contracted;        // X = <psi,E| G D |psi,psi>
  cplx target;            // <psi|psi>_G <E|E>_G
  cplx scaled_lhs;        // <a psi,E| G D |a psi,a psi>
  cplx scaled_rhs;        // |a|^2 X
  double deletion_residual = 0.0;
  double scaling_residual = 0.0;
  double blank_norm2 = 0.0;
  DeletingBranch branch = DeletingBranch::NotDeleting;
  bool violation = false;
};

// Evaluates the rescaling argument against deletion for a candidate map D on the two-slot
// space with metric G (x) G.
inline DeletingReport check_deleting_scaling(const Matrix &D, const Vector &psi, cplx a,
                                             const Matrix &G, const Vector &blank,
                                             double tol = 1e-10)
{
  const Eigen::Index d = G.rows();
  if (D.rows() != d * d || D.cols() != d * d || psi.size() != d || blank.size() != d)
    throw Error(ErrorKind::BadShape, "check_deleting_scaling: dimension mismatch");
  require_hpd(G, "check_deleting_scaling");
  const Matrix GG = kron(G, G);
  const Vector pp = kron(psi, psi), pe = kron(psi, blank);
  DeletingReport r;
  r.blank_norm2 = blank.dot(G * blank).real();
  const Vector Dpp = D * pp;
  r.contracted = pe.dot(GG * Dpp);
  r.target = psi.dot(G * psi) * r.blank_norm2;
  const Vector apsi = a * psi;
  r.scaled_lhs = kron(apsi, blank).dot(GG * (D * kron(apsi, apsi)));
  r.scaled_rhs = std::norm(a) * r.contracted;
  r.deletion_residual = std::abs(r.contracted - r.target);
  r.scaling_residual = std::abs(r.scaled_lhs - r.scaled_rhs);

  const double out2 = Dpp.dot(GG * Dpp).real();
  const double pp2 = pp.dot(GG * pp).real();
  const double overlap2 = std::norm(pp.dot(GG * Dpp));
  const bool parallel = out2 > tol && std::abs(overlap2 - out2 * pp2) <= 1e-8 * out2 * pp2;
  if (r.blank_norm2 <= tol)
    r.branch = DeletingBranch::DegenerateBlank;
  else if (parallel)
    r.branch = DeletingBranch::Swapping;
  else if (r.deletion_residual <= tol)
    r.branch = r.scaling_residual > tol ? DeletingBranch::Inconsistent
                                        : DeletingBranch::ConsistentDeleter;
  else
    r.branch = DeletingBranch::NotDeleting;
  r.violation = r.branch == DeletingBranch::ConsistentDeleter;
  return r;
}

// Two-slot swap |x, y> -> |y, x>.
inline Matrix swap_operator(Eigen::Index d)
{
  Matrix S = Matrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      S(j * d + i, i * d + j) = 1.0;
  return S;
}

// Random metrics, states and candidate maps: an exact deleter of one state, the swap and a
// random linear map. The residual counts branches that would contradict the theorem.
inline NoGoReport check_no_deleting(int trials, std::uint64_t seed, Eigen::Index dim = 2)
{
  std::vector<double> violations(static_cast<std::size_t>(trials)),
      inconsistency(violations.size());
  parallel_for(violations.size(), [&](std::size_t i) {
    auto rng = make_rng(seed, i);
    const Matrix G = random_hpd(rng, dim);
    const Vector psi = normalize_in(random_ket(rng, dim), G);
    const Vector blank = normalize_in(random_ket(rng, dim), G);
    cplx a(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0));
    if (std::abs(a - 1.0) < 0.1 || std::abs(a) < 0.1)
      a += 0.5;
    const Matrix GG = kron(G, G);
    const Vector pp = kron(psi, psi), pe = kron(psi, blank);
    const Matrix deleter = pe * (pp.adjoint() * GG) / pp.dot(GG * pp).real();
    const Matrix candidates[] = {deleter, swap_operator(dim), random_matrix(rng, dim * dim)};
    double v = 0.0, inc = 0.0;
    for (const auto &D : candidates)
    {
      const auto rep = check_deleting_scaling(D, psi, a, G, blank);
      v += rep.violation ? 1.0 : 0.0;
      if (rep.branch == DeletingBranch::Inconsistent)
        inc = std::max(inc, rep.scaling_residual);
    }
    violations[i] = v;
    inconsistency[i] = inc;
  });
  NoGoReport r;
  r.theorem = Theorem::NoDeleting;
  r.trials = trials;
  r.seed = seed;
  r.tolerance = 0.0;
  r.max_residual = detail::max_of(violations);
  r.controls.push_back({"min_deleter_inconsistency", detail::min_of(inconsistency),
                        "scaling mismatch of the exact single-state deleter"});
  r.finalize();
  return r;
}

// Three qubit states with pairwise |<<psi|phi>>| = 1/2, expressed against G.
inline std::vector<Vector> trine_states(const Matrix &G)
{
  const Matrix inv_sqrt = hpd_roots(G).inv_sqrt;
  std::vector<Vector> out;
  for (int k = 0; k < 3; ++k)
  {
    const double ang = 2.0 * pi * k / 3.0;
    Vector v(2);
    v << std::cos(ang / 2.0), std::sin(ang / 2.0);
    out.push_back(inv_sqrt * v);
  }
  return out;
}

struct ClonerCheckOptions
{
  int restarts = 64;
  double floor = 0.05;
  double orthogonal_tolerance = 1e-6;
};

// Floor of the cloning residual for the overlapping trine set against metric G (both slots).
inline NoGoReport check_no_cloning(std::uint64_t seed, const Matrix &G,
                                   const ClonerCheckOptions &opt = {})
{
  const auto states = trine_states(G);
  const Matrix inv_sqrt = hpd_roots(G).inv_sqrt;
  Vector e0(2), e1(2);
  e0 << 1.0, 0.0;
  e1 << 0.0, 1.0;
  const Vector blank = inv_sqrt * e0;
  ClonerOptions co;
  co.restarts = opt.restarts;
  co.seed = seed;
  const auto overlapping = search_cloner(states, blank, G, G, co);
  const auto orthogonal = search_cloner({inv_sqrt * e0, inv_sqrt * e1}, blank, G, G, co);
  NoGoReport r;
  r.theorem = Theorem::NoCloning;
  r.trials = opt.restarts;
  r.seed = seed;
  r.tolerance = 0.0;
  r.max_residual = std::max(0.0, opt.floor - overlapping.residual);
  r.controls.push_back({"overlapping_floor", overlapping.residual,
                        "best cloning residual for pairwise overlap 1/2"});
  r.controls.push_back({"orthogonal_floor", orthogonal.residual,
                        "best cloning residual for a G-orthonormal pair"});
  r.finalize();
  return r;
}

struct DiscriminationOptions
{
  int restarts = 8;
  std::uint64_t seed = 0;
  UnitarySearchOptions search{};
};

struct DiscriminationResult
{
  double success = 0.0;
  double ceiling = 0.0;
  double overlap = 0.0;
  std::vector<Matrix> measurement;  // dressed pair M_0, M_1
};

inline double helstrom_ceiling(double overlap)
{
  return 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - overlap * overlap)));
}

// Best equal-prior success probability over dressed two-outcome measurements.
inline DiscriminationResult optimize_discrimination(const Vector &psi, const Vector &phi,
                                                    const Matrix &G,
                                                    const DiscriminationOptions &opt = {})
{
  const Eigen::Index d = G.rows();
  if (psi.size() != d || phi.size() != d)
    throw Error(ErrorKind::BadShape, "check_discrimination: dimension mismatch");
  const Vector a = normalize_in(psi, G), b = normalize_in(phi, G);
  DiscriminationResult res;
  res.overlap = std::abs(a.dot(G * b));
  if (res.overlap <= 1e-12)
    throw Error(ErrorKind::OrthogonalInput,
                "check_discrimination: states are G-orthogonal and perfectly distinguishable");
  res.ceiling = helstrom_ceiling(res.overlap);
  const auto roots = hpd_roots(G);
  std::vector<Vector> x(2, Vector::Zero(2 * d));
  x[0].head(d) = roots.sqrt * a;
  x[1].head(d) = roots.sqrt * b;
  auto f = [&](const Matrix &U) {
    UnitaryEvaluation e;
    e.Z = Matrix::Zero(2 * d, 2 * d);
    double success = 0.0;
    for (Eigen::Index j = 0; j < 2; ++j)
    {
      const Vector y = U * x[static_cast<std::size_t>(j)];
      success += 0.5 * y.segment(j * d, d).squaredNorm();
      Matrix yyP = Matrix::Zero(2 * d, 2 * d);
      yyP.middleCols(j * d, d) = y * y.segment(j * d, d).adjoint();
      e.Z -= 0.5 * yyP;
    }
    e.value = -success;
    return e;
  };
  const int restarts = std::max(1, opt.restarts);
  std::vector<UnitarySearchResult> results(static_cast<std::size_t>(restarts));
  parallel_for(results.size(), [&](std::size_t i) {
    auto rng = make_rng(opt.seed, i);
    results[i] = minimize_over_unitary(f, haar_unitary(rng, 2 * d), opt.search);
  });
  const auto best = std::min_element(results.begin(), results.end(),
                                     [](const auto &l, const auto &r) { return l.value < r.value; });
  std::vector<Matrix> K = {best->W.block(0, 0, d, d), best->W.block(d, 0, d, d)};
  for (const auto &k : K)
    res.measurement.push_back(dress_operator(k, roots));
  // Success evaluated with the dressed operators on the original kets.
  res.success = 0.5 * (res.measurement[0] * a).dot(G * (res.measurement[0] * a)).real() +
                0.5 * (res.measurement[1] * b).dot(G * (res.measurement[1] * b)).real();
  return res;
}

struct DiscriminationCheckOptions
{
  Eigen::Index dim = 2;
  int restarts = 4;
  double tolerance = 1e-6;
};

inline NoGoReport check_discrimination(int trials, std::uint64_t seed,
                                       const DiscriminationCheckOptions &opt = {})
{
  std::vector<double> residual(static_cast<std::size_t>(trials)), gap(residual.size());
  parallel_for(residual.size(), [&](std::size_t i) {
    auto rng = make_rng(seed, i);
    const Matrix G = random_hpd(rng, opt.dim);
    Vector psi, phi;
    do
    {
      psi = random_ket(rng, opt.dim);
      phi = random_ket(rng, opt.dim);
    } while (std::abs(normalize_in(psi, G).dot(G * normalize_in(phi, G))) < 1e-6);
    DiscriminationOptions d;
    d.restarts = opt.restarts;
    d.seed = seed ^ (0x9e3779b97f4a7c15ull * (i + 1));
    const auto res = optimize_discrimination(psi, phi, G, d);
    residual[i] = std::max(0.0, res.success - res.ceiling);
    gap[i] = res.ceiling - res.success;
  });
  NoGoReport r;
  r.theorem = Theorem::NoPerfectDiscrimination;
  r.trials = trials;
  r.seed = seed;
  r.tolerance = opt.tolerance;
  r.max_residual = detail::max_of(residual);
  r.controls.push_back({"max_gap_below_ceiling", detail::max_of(gap),
                        "largest shortfall of the optimized success probability"});
  r.finalize();
  return r;
}

}  // namespace nhqm
