// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>
#include "nhqm/appendix_oracle.hpp"
#include "nhqm/config.hpp"
#include "nhqm/dynamics.hpp"
#include "nhqm/entanglement.hpp"
#include "nhqm/metric.hpp"
#include "nhqm/nogo.hpp"

namespace nhqm
{

enum ExitCode
{
  ExitSuccess = 0,
  ExitVerificationFailed = 1,
  ExitError = 2,
};

namespace detail
{

inline std::string fmt(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<double> sample_times(const TimeSpec &t)
{
  std::vector<double> out(static_cast<std::size_t>(t.samples));
  for (int i = 0; i < t.samples; ++i)
    out[static_cast<std::size_t>(i)] =
        i + 1 == t.samples ? t.t1 : t.t0 + (t.t1 - t.t0) * static_cast<double>(i) / (t.samples - 1);
  return out;
}

inline PTParams require_pt(const RunConfig &c, const std::string &label)
{
  if (!c.hamiltonian || c.hamiltonian->kind != "pt_qubit")
    throw ValidationError("initial_metric.label", "oracle " + label + " needs a pt_qubit Hamiltonian");
  return c.hamiltonian->pt;
}

// Closed-form metric selected by an oracle label, as a function of absolute time.
inline std::function<Matrix(double)> oracle_metric(const RunConfig &c)
{
  const auto &m = c.initial_metric;
  const auto &P = m.params;
  auto re = [&](const char *k) { return P.at(k).real(); };
  if (m.label == "decay")
  {
    if (!c.hamiltonian || c.hamiltonian->kind != "decay")
      throw ValidationError("initial_metric.label", "oracle decay needs a decay Hamiltonian");
    const double G0 = re("G0"), gamma = c.hamiltonian->gamma;
    oracle::decay_metric(G0, gamma, 0.0);
    return [G0, gamma](double t) { return Matrix::Constant(1, 1, oracle::decay_metric(G0, gamma, t)); };
  }
  const PTParams p = require_pt(c, m.label);
  if (m.label == "bender")
  {
    const Matrix G = oracle::bender_metric(p);
    return [G](double) { return G; };
  }
  if (m.label == "unbroken")
  {
    const oracle::UnbrokenParams u{re("A"), re("B"), re("C"), re("D")};
    oracle::unbroken_metric(p, u, 0.0);
    return [p, u](double t) { return oracle::unbroken_metric(p, u, t); };
  }
  if (m.label == "broken")
  {
    const oracle::BrokenParams b{re("Ap"), re("Am"), re("B"), re("C")};
    oracle::broken_metric(p, b, 0.0);
    return [p, b](double t) { return oracle::broken_metric(p, b, t); };
  }
  if (m.label == "ep")
  {
    const oracle::EPParams e{re("Ap"), re("Bp"), re("Cp"), re("Dp")};
    oracle::ep_metric(p, e, 0.0);
    return [p, e](double t) { return oracle::ep_metric(p, e, t); };
  }
  const cplx a = P.at("a"), b = P.at("b");
  if (m.label == "standard" || m.label == "instant_diagonal")
  {
    const auto choice =
        m.label == "standard" ? oracle::BasisChoice::Standard : oracle::BasisChoice::InstantDiagonal;
    oracle::unbroken_metric_from_bases(p, a, b, choice, 0.0);
    return [p, a, b, choice](double t) { return oracle::unbroken_metric_from_bases(p, a, b, choice, t); };
  }
  if (m.label == "broken_bases")
  {
    const auto bp = oracle::broken_params_from_bases(p, a, b);
    oracle::broken_metric(p, bp, 0.0);
    return [p, bp](double t) { return oracle::broken_metric(p, bp, t); };
  }
  const auto ep = oracle::ep_params_from_bases(p, a, b);
  oracle::ep_metric(p, ep, 0.0);
  return [p, ep](double t) { return oracle::ep_metric(p, ep, t); };
}

inline Matrix initial_metric(const RunConfig &c, const HamiltonianModel &h)
{
  const auto &m = c.initial_metric;
  if (m.kind == "identity")
    return identity(h.dim());
  if (m.kind == "stationary")
    return stationary_metric(h);
  if (m.kind == "explicit")
  {
    require_hpd(m.matrix, "initial_metric.matrix");
    return m.matrix;
  }
  return oracle_metric(c)(c.time.t0);
}

inline void emit(const RunConfig &c, const std::string &text)
{
  if (c.output.path.empty())
  {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(c.output.path, std::ios::binary);
  if (!f)
    throw Error(ErrorKind::ValidationError, "cannot open output path " + c.output.path);
  f << text;
}

inline int run_metric(const RunConfig &c)
{
  const auto h = c.hamiltonian->model();
  const Matrix G0 = initial_metric(c, h);
  const auto traj = solve_metric(h, G0, c.time.t0, c.time.t1, c.time.step);
  std::optional<std::function<Matrix(double)>> oracle;
  if (c.initial_metric.kind == "oracle")
    oracle = oracle_metric(c);
  const auto times = sample_times(c.time);
  std::ostringstream os;
  if (c.output.format == "csv")
  {
    std::ostringstream body;
    write_metric_csv(body, traj, times);
    if (!oracle)
    {
      os << body.str();
    }
    else
    {
      std::istringstream lines(body.str());
      std::string line;
      std::getline(lines, line);
      os << line << ",oracle_err\n";
      for (double t : times)
      {
        std::getline(lines, line);
        os << line << "," << fmt(((*oracle)(t) - traj.at(t)).norm()) << "\n";
      }
    }
  }
  else
  {
    io::json j;
    j["t"] = times;
    io::json ms = io::json::array(), errs = io::json::array();
    for (double t : times)
    {
      const Matrix G = traj.at(t);
      ms.push_back(io::to_json(G));
      if (oracle)
        errs.push_back(((*oracle)(t) - G).norm());
    }
    j["metric"] = ms;
    if (oracle)
      j["oracle_err"] = errs;
    os << j.dump(2) << "\n";
  }
  emit(c, os.str());
  return ExitSuccess;
}

inline int run_evolve(const RunConfig &c)
{
  const auto h = c.hamiltonian->model();
  const Matrix G0 = initial_metric(c, h);
  const auto metric = solve_metric(h, G0, c.time.t0, c.time.t1, c.time.step);
  const StateTrajectory psi(h, c.state, c.time.t0, c.time.step);
  const auto times = sample_times(c.time);
  std::ostringstream os;
  if (c.output.format == "csv")
  {
    write_state_csv(os, psi, metric, times);
  }
  else
  {
    io::json j;
    j["t"] = times;
    io::json states = io::json::array(), ng = io::json::array(), nc = io::json::array();
    for (double t : times)
    {
      const Vector v = psi.at(t);
      states.push_back(io::to_json(v));
      ng.push_back(generalized_norm2(v, metric.at(t)));
      nc.push_back(v.squaredNorm());
    }
    j["state"] = states;
    j["norm2_g"] = ng;
    j["norm2_conv"] = nc;
    os << j.dump(2) << "\n";
  }
  emit(c, os.str());
  return ExitSuccess;
}

struct SweepRow
{
  double r = 0.0, s = 0.0, theta = 0.0;
  PTRegime regime = PTRegime::Unbroken;
  double gap = 0.0;
  double growth = 0.0;
};

inline SweepRow sweep_point(double r, double s, double theta)
{
  if (s == 0.0)
    throw ValidationError("sweep.s", "grid contains s = 0");
  SweepRow row{r, s, theta};
  const PTParams p{r, s, theta};
  row.regime = classify_regime(p);
  if (row.regime != PTRegime::ExceptionalPoint)
  {
    const auto [lp, lm] = pt_eigenvalues(p);
    row.gap = std::abs(lp - lm);
  }
  if (row.regime == PTRegime::Broken)
    row.growth = 2.0 * std::sqrt(-p.discriminant());
  return row;
}

inline int run_sweep(const RunConfig &c)
{
  const auto &sw = c.sweep;
  const std::size_t n = static_cast<std::size_t>(sw.r.count) * sw.s.count * sw.theta.count;
  std::vector<SweepRow> rows(n);
  parallel_for(n, [&](std::size_t k) {
    const int it = static_cast<int>(k % sw.theta.count);
    const int is = static_cast<int>((k / sw.theta.count) % sw.s.count);
    const int ir = static_cast<int>(k / (static_cast<std::size_t>(sw.theta.count) * sw.s.count));
    rows[k] = sweep_point(sw.r.at(ir), sw.s.at(is), sw.theta.at(it));
  });
  std::ostringstream os;
  if (c.output.format == "csv")
  {
    os << "r,s,theta,regime,eigenvalue_gap,growth_exponent\n";
    for (const auto &row : rows)
      os << fmt(row.r) << "," << fmt(row.s) << "," << fmt(row.theta) << "," << to_string(row.regime)
         << "," << fmt(row.gap) << "," << fmt(row.growth) << "\n";
  }
  else
  {
    io::json arr = io::json::array();
    for (const auto &row : rows)
      arr.push_back({{"r", row.r},
                     {"s", row.s},
                     {"theta", row.theta},
                     {"regime", to_string(row.regime)},
                     {"eigenvalue_gap", row.gap},
                     {"growth_exponent", row.growth}});
    os << arr.dump(2) << "\n";
  }
  emit(c, os.str());
  return ExitSuccess;
}

inline std::vector<NoGoReport> run_suite(const std::string &suite, int trials, std::uint64_t seed)
{
  if (suite == "no_cloning")
  {
    auto rng = make_rng(seed, 0xc10e);
    ClonerCheckOptions o;
    o.restarts = trials;
    return {check_no_cloning(seed, random_hpd(rng, 2), o)};
  }
  if (suite == "no_deleting")
    return {check_no_deleting(trials, seed)};
  if (suite == "no_signaling")
    return {check_no_signaling(trials, seed)};
  if (suite == "no_discrimination")
    return {check_discrimination(trials, seed)};
  if (suite == "entanglement_invariance")
    return {check_entanglement_invariance_pure(trials, seed),
            check_entanglement_invariance_mixed(trials, seed)};
  return {check_no_increase(trials, seed)};
}

inline int run_verify(const RunConfig &c)
{
  io::json out = io::json::array();
  bool all_pass = true;
  for (const auto seed : c.verify.seeds)
  {
    io::json reports = io::json::array();
    bool pass = true;
    for (const auto &suite : c.verify.suites)
      for (const auto &r : run_suite(suite, c.verify.trials.at(suite), seed))
      {
        pass = pass && r.verdict;
        reports.push_back(io::to_json(r));
      }
    all_pass = all_pass && pass;
    out.push_back({{"seed", seed}, {"verdict", pass ? "pass" : "fail"}, {"reports", reports}});
  }
  std::ostringstream os;
  if (c.output.format == "json")
  {
    os << out.dump(2) << "\n";
  }
  else
  {
    os << "seed,theorem,variant,trials,max_residual,tolerance,verdict\n";
    for (const auto &s : out)
      for (const auto &r : s["reports"])
        os << s["seed"].get<std::uint64_t>() << "," << r["theorem"].get<std::string>() << ","
           << r.value("variant", "") << "," << r["trials"].get<int>() << ","
           << fmt(r["max_residual"].get<double>()) << "," << fmt(r["tolerance"].get<double>())
           << "," << r["verdict"].get<std::string>() << "\n";
  }
  emit(c, os.str());
  return all_pass ? ExitSuccess : ExitVerificationFailed;
}

inline int run_entangle(const RunConfig &c)
{
  const auto &e = c.entangle;
  const Matrix G = kron(e.metric_a, e.metric_b);
  require_hpd(G, "entangle metric");
  Ensemble ens;
  for (const auto &[p, ket] : e.ensemble)
    ens.push_back({p, normalize_in(ket, G)});
  const auto rho = gdm_from_ensemble(ens, G, e.dim_a, e.dim_b);
  EofOptions opt;
  opt.ensemble_size = e.ensemble_size;
  opt.restarts = e.restarts;
  opt.seed = c.seed;
  const Matrix rho_hat = dress(rho);
  const auto res = eof_optimize_dressed(rho_hat, e.dim_a, e.dim_b, opt);
  io::json j;
  j["eof"] = res.value;
  j["rank"] = res.rank;
  j["ensemble_size"] = res.ensemble_size;
  j["restarts"] = e.restarts;
  j["seed"] = c.seed;
  if (e.dim_a == 2 && e.dim_b == 2)
    j["concurrence_eof"] = concurrence_oracle(hermitian_part(rho_hat));
  j["gdm"] = io::to_json(rho);
  std::ostringstream os;
  if (c.output.format == "json")
  {
    os << j.dump(2) << "\n";
  }
  else
  {
    os << "eof,rank,ensemble_size,concurrence_eof\n"
       << fmt(res.value) << "," << res.rank << "," << res.ensemble_size << ","
       << (j.contains("concurrence_eof") ? fmt(j["concurrence_eof"].get<double>()) : "") << "\n";
  }
  emit(c, os.str());
  return ExitSuccess;
}

}  // namespace detail

// Dispatches a validated config. Errors propagate as exceptions.
inline int run(const RunConfig &c)
{
  switch (c.task)
  {
    case Task::Metric:
      return detail::run_metric(c);
    case Task::Evolve:
      return detail::run_evolve(c);
    case Task::Sweep:
      return detail::run_sweep(c);
    case Task::Verify:
      return detail::run_verify(c);
    case Task::Entangle:
      return detail::run_entangle(c);
  }
  return ExitError;
}

}  // namespace nhqm
