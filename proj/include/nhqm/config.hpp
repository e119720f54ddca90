// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>
#include "nhqm/hamiltonian.hpp"
#include "nhqm/io.hpp"

namespace nhqm
{

enum class Task
{
  Metric,
  Evolve,
  Sweep,
  Verify,
  Entangle,
};

inline std::string to_string(Task t)
{
  switch (t)
  {
    case Task::Metric:
      return "metric";
    case Task::Evolve:
      return "evolve";
    case Task::Sweep:
      return "sweep";
    case Task::Verify:
      return "verify";
    case Task::Entangle:
      return "entangle";
  }
  return "unknown";
}

inline std::optional<Task> task_from_string(const std::string &s)
{
  for (Task t : {Task::Metric, Task::Evolve, Task::Sweep, Task::Verify, Task::Entangle})
    if (to_string(t) == s)
      return t;
  return std::nullopt;
}

struct HamiltonianSpec
{
  std::string kind;  // pt_qubit | constant | decay
  PTParams pt;
  Matrix matrix;
  double omega = 0.0;
  double gamma = 0.0;

  HamiltonianModel model() const
  {
    if (kind == "pt_qubit")
      return HamiltonianModel::pt_qubit(pt);
    if (kind == "decay")
      return HamiltonianModel::decay(omega, gamma);
    return HamiltonianModel::constant(matrix);
  }
};

struct MetricSpec
{
  std::string kind = "identity";  // identity | stationary | oracle | explicit
  std::string label;
  std::map<std::string, cplx> params;
  Matrix matrix;
};

struct TimeSpec
{
  double t0 = 0.0;
  double t1 = 1.0;
  double step = 1e-3;
  int samples = 101;
};

struct OutputSpec
{
  std::string format;  // csv | json
  std::string path;    // empty: standard output
};

struct Range
{
  double from = 0.0;
  double to = 0.0;
  int count = 1;

  double at(int i) const
  {
    return count <= 1 ? from : from + (to - from) * static_cast<double>(i) / (count - 1);
  }
};

struct SweepSpec
{
  Range r, s, theta;
};

struct VerifySpec
{
  std::vector<std::string> suites;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, int> trials;
};

struct EntangleSpec
{
  Eigen::Index dim_a = 2;
  Eigen::Index dim_b = 2;
  Matrix metric_a;
  Matrix metric_b;
  std::vector<std::pair<double, Vector>> ensemble;
  Eigen::Index ensemble_size = 0;
  int restarts = 16;
};

struct RunConfig
{
  Task task = Task::Metric;
  std::optional<HamiltonianSpec> hamiltonian;
  MetricSpec initial_metric;
  TimeSpec time;
  OutputSpec output;
  std::uint64_t seed = 0;
  Vector state;
  SweepSpec sweep;
  VerifySpec verify;
  EntangleSpec entangle;
};

inline const std::vector<std::string> &all_suites()
{
  static const std::vector<std::string> s = {"no_cloning",        "no_deleting",
                                             "no_signaling",      "no_discrimination",
                                             "entanglement_invariance", "no_increase"};
  return s;
}

inline const std::map<std::string, int> &default_trials()
{
  static const std::map<std::string, int> t = {
      {"no_cloning", 64},        {"no_deleting", 100},
      {"no_signaling", 1000},    {"no_discrimination", 200},
      {"entanglement_invariance", 20}, {"no_increase", 20},
  };
  return t;
}

namespace detail
{

using io::json;

// Rejects keys outside `allowed` and gives typed access with field paths.
class Reader
{
public:
  Reader(const json &j, std::string path, std::set<std::string> allowed)
    : j_(j), path_(std::move(path))
  {
    if (!j.is_object())
      throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
    for (const auto &[key, value] : j.items())
      if (!allowed.count(key))
        throw ValidationError(field(key), "unknown key");
  }

  std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string &key) const { return j_.contains(key); }
  const json &raw(const std::string &key) const
  {
    if (!j_.contains(key))
      throw ValidationError(field(key), "required");
    return j_.at(key);
  }

  double number(const std::string &key) const
  {
    const auto &v = raw(key);
    if (!v.is_number())
      throw ValidationError(field(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
      throw ValidationError(field(key), "must be finite");
    return x;
  }
  double number(const std::string &key, double fallback) const
  {
    return has(key) ? number(key) : fallback;
  }
  long long integer(const std::string &key) const
  {
    const auto &v = raw(key);
    if (!v.is_number_integer())
      throw ValidationError(field(key), "expected an integer");
    return v.get<long long>();
  }
  long long integer(const std::string &key, long long fallback) const
  {
    return has(key) ? integer(key) : fallback;
  }
  std::string string(const std::string &key) const
  {
    const auto &v = raw(key);
    if (!v.is_string())
      throw ValidationError(field(key), "expected a string");
    return v.get<std::string>();
  }
  Reader object(const std::string &key, std::set<std::string> allowed) const
  {
    return Reader(raw(key), field(key), std::move(allowed));
  }
  Matrix matrix(const std::string &key) const { return io::matrix_from_json(raw(key), field(key)); }
  Vector vector(const std::string &key) const { return io::vector_from_json(raw(key), field(key)); }
  cplx complex(const std::string &key) const { return io::complex_from_json(raw(key), field(key)); }

private:
  const json &j_;
  std::string path_;
};

struct OracleParam
{
  std::string name;
  bool complex;
};

inline const std::map<std::string, std::vector<OracleParam>> &oracle_labels()
{
  static const std::map<std::string, std::vector<OracleParam>> m = {
      {"bender", {}},
      {"unbroken", {{"A", false}, {"B", false}, {"C", false}, {"D", false}}},
      {"broken", {{"Ap", false}, {"Am", false}, {"B", false}, {"C", false}}},
      {"ep", {{"Ap", false}, {"Bp", false}, {"Cp", false}, {"Dp", false}}},
      {"standard", {{"a", true}, {"b", true}}},
      {"instant_diagonal", {{"a", true}, {"b", true}}},
      {"broken_bases", {{"a", true}, {"b", true}}},
      {"ep_bases", {{"a", true}, {"b", true}}},
      {"decay", {{"G0", false}}},
  };
  return m;
}

inline HamiltonianSpec parse_hamiltonian(const Reader &root)
{
  const auto &raw = root.raw("hamiltonian");
  if (!raw.is_object() || !raw.contains("kind"))
    throw ValidationError("hamiltonian.kind", "required");
  HamiltonianSpec h;
  h.kind = Reader(raw, "hamiltonian", {"kind", "r", "s", "theta", "matrix", "omega", "gamma"})
               .string("kind");
  if (h.kind == "pt_qubit")
  {
    const Reader r(raw, "hamiltonian", {"kind", "r", "s", "theta"});
    h.pt.r = r.number("r");
    h.pt.s = r.number("s");
    h.pt.theta = r.number("theta");
    if (h.pt.r < 0.0)
      throw ValidationError("hamiltonian.r", "must be non-negative");
    if (h.pt.s == 0.0)
      throw ValidationError("hamiltonian.s", "must be nonzero");
  }
  else if (h.kind == "constant")
  {
    const Reader r(raw, "hamiltonian", {"kind", "matrix"});
    h.matrix = r.matrix("matrix");
  }
  else if (h.kind == "decay")
  {
    const Reader r(raw, "hamiltonian", {"kind", "omega", "gamma"});
    h.omega = r.number("omega");
    h.gamma = r.number("gamma");
    if (h.gamma < 0.0)
      throw ValidationError("hamiltonian.gamma", "must be non-negative");
  }
  else
  {
    throw ValidationError("hamiltonian.kind", "expected pt_qubit, constant or decay");
  }
  return h;
}

inline MetricSpec parse_metric(const Reader &root)
{
  MetricSpec m;
  if (!root.has("initial_metric"))
    return m;
  const auto &raw = root.raw("initial_metric");
  if (!raw.is_object() || !raw.contains("kind"))
    throw ValidationError("initial_metric.kind", "required");
  m.kind = Reader(raw, "initial_metric", {"kind", "label", "params", "matrix"}).string("kind");
  if (m.kind == "identity" || m.kind == "stationary")
  {
    Reader(raw, "initial_metric", {"kind"});
  }
  else if (m.kind == "explicit")
  {
    m.matrix = Reader(raw, "initial_metric", {"kind", "matrix"}).matrix("matrix");
  }
  else if (m.kind == "oracle")
  {
    const Reader r(raw, "initial_metric", {"kind", "label", "params"});
    m.label = r.string("label");
    const auto it = oracle_labels().find(m.label);
    if (it == oracle_labels().end())
      throw ValidationError("initial_metric.label", "unknown oracle label");
    std::set<std::string> names;
    for (const auto &p : it->second)
      names.insert(p.name);
    if (it->second.empty())
    {
      if (r.has("params"))
        Reader(r.raw("params"), "initial_metric.params", {});
    }
    else
    {
      const Reader pr = r.object("params", names);
      for (const auto &p : it->second)
        m.params[p.name] = p.complex ? pr.complex(p.name) : cplx(pr.number(p.name), 0.0);
    }
  }
  else
  {
    throw ValidationError("initial_metric.kind", "expected identity, stationary, oracle or explicit");
  }
  return m;
}

inline Range parse_range(const Reader &r, const std::string &key)
{
  Range out;
  if (r.raw(key).is_number())
  {
    out.from = out.to = r.number(key);
    return out;
  }
  const Reader rr = r.object(key, {"from", "to", "count"});
  out.from = rr.number("from");
  out.to = rr.number("to", out.from);
  const auto count = rr.integer("count", 1);
  if (count < 1 || count > 1000000)
    throw ValidationError(rr.field("count"), "must be between 1 and 1000000");
  out.count = static_cast<int>(count);
  return out;
}

}  // namespace detail

// Validates a JSON config. `task_hint` supplies the task when the document omits it.
inline RunConfig parse_config(const std::string &text, std::optional<Task> task_hint = std::nullopt)
{
  using detail::Reader;
  const auto doc = io::parse_json(text);
  const Reader root(doc, "",
                    {"task", "hamiltonian", "initial_metric", "time", "output", "seed", "state",
                     "sweep", "verify", "entangle"});
  RunConfig c;
  if (root.has("task"))
  {
    const auto t = task_from_string(root.string("task"));
    if (!t)
      throw ValidationError("task", "expected metric, evolve, sweep, verify or entangle");
    if (task_hint && *task_hint != *t)
      throw ValidationError("task", "conflicts with the task given on the command line");
    c.task = *t;
  }
  else if (task_hint)
  {
    c.task = *task_hint;
  }
  else
  {
    throw ValidationError("task", "required");
  }

  std::set<std::string> used = {"task", "output", "seed"};
  switch (c.task)
  {
    case Task::Metric:
      used.insert({"hamiltonian", "initial_metric", "time"});
      break;
    case Task::Evolve:
      used.insert({"hamiltonian", "initial_metric", "time", "state"});
      break;
    case Task::Sweep:
      used.insert("sweep");
      break;
    case Task::Verify:
      used.insert("verify");
      break;
    case Task::Entangle:
      used.insert("entangle");
      break;
  }
  for (const auto &[key, value] : doc.items())
    if (!used.count(key))
      throw ValidationError(key, "not used by task " + to_string(c.task));

  if (root.has("seed"))
  {
    const auto s = root.integer("seed");
    if (s < 0)
      throw ValidationError("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (root.has("output"))
  {
    const Reader o = root.object("output", {"format", "path"});
    if (o.has("format"))
      c.output.format = o.string("format");
    if (o.has("path"))
      c.output.path = o.string("path");
  }
  if (c.output.format.empty())
    c.output.format = (c.task == Task::Verify || c.task == Task::Entangle) ? "json" : "csv";
  if (c.output.format != "csv" && c.output.format != "json")
    throw ValidationError("output.format", "expected csv or json");

  if (used.count("time"))
  {
    if (!root.has("time"))
      throw ValidationError("time", "required");
    {
      const Reader t = root.object("time", {"t0", "t1", "step", "samples"});
      c.time.t0 = t.number("t0", 0.0);
      c.time.t1 = t.number("t1");
      c.time.step = t.number("step", 1e-3);
      const auto samples = t.integer("samples", 101);
      if (samples < 2 || samples > 10000000)
        throw ValidationError("time.samples", "must be between 2 and 10000000");
      c.time.samples = static_cast<int>(samples);
    }
    if (!(c.time.step > 0.0))
      throw ValidationError("time.step", "must be positive");
    if (!(c.time.t1 > c.time.t0))
      throw ValidationError("time.t1", "must exceed t0");
  }

  if (used.count("hamiltonian"))
  {
    c.hamiltonian = detail::parse_hamiltonian(root);
    c.initial_metric = detail::parse_metric(root);
    const auto dim = c.hamiltonian->model().dim();
    if (c.initial_metric.kind == "explicit" && c.initial_metric.matrix.rows() != dim)
      throw ValidationError("initial_metric.matrix", "dimension differs from the Hamiltonian");
  }
  if (c.task == Task::Evolve)
  {
    c.state = root.vector("state");
    if (c.state.size() != c.hamiltonian->model().dim())
      throw ValidationError("state", "dimension differs from the Hamiltonian");
  }
  if (c.task == Task::Sweep)
  {
    const Reader s = root.object("sweep", {"r", "s", "theta"});
    c.sweep.r = detail::parse_range(s, "r");
    c.sweep.s = detail::parse_range(s, "s");
    c.sweep.theta = detail::parse_range(s, "theta");
  }
  if (c.task == Task::Verify)
  {
    c.verify.suites = all_suites();
    c.verify.trials = default_trials();
    c.verify.seeds = {c.seed};
    if (root.has("verify"))
    {
      const Reader v = root.object("verify", {"suites", "seeds", "trials"});
      if (v.has("suites"))
      {
        const auto &raw = v.raw("suites");
        if (raw.is_string() && raw.get<std::string>() == "all")
        {
        }
        else if (raw.is_array())
        {
          c.verify.suites.clear();
          for (const auto &x : raw)
          {
            if (!x.is_string() || !default_trials().count(x.get<std::string>()))
              throw ValidationError("verify.suites", "unknown suite");
            c.verify.suites.push_back(x.get<std::string>());
          }
          if (c.verify.suites.empty())
            throw ValidationError("verify.suites", "must not be empty");
        }
        else
        {
          throw ValidationError("verify.suites", "expected \"all\" or an array of suite names");
        }
      }
      if (v.has("seeds"))
      {
        const auto &raw = v.raw("seeds");
        c.verify.seeds.clear();
        if (!raw.is_array() || raw.empty())
          throw ValidationError("verify.seeds", "expected a non-empty array of integers");
        for (const auto &x : raw)
        {
          if (!x.is_number_integer() || x.get<long long>() < 0)
            throw ValidationError("verify.seeds", "seeds must be non-negative integers");
          c.verify.seeds.push_back(x.get<std::uint64_t>());
        }
      }
      if (v.has("trials"))
      {
        std::set<std::string> names(all_suites().begin(), all_suites().end());
        const Reader tr = v.object("trials", names);
        for (const auto &n : names)
          if (tr.has(n))
          {
            const auto k = tr.integer(n);
            if (k < 1)
              throw ValidationError(tr.field(n), "must be positive");
            c.verify.trials[n] = static_cast<int>(k);
          }
      }
    }
  }
  if (c.task == Task::Entangle)
  {
    const Reader e = root.object("entangle", {"dim_a", "dim_b", "metric_a", "metric_b", "ensemble",
                                              "ensemble_size", "restarts"});
    c.entangle.dim_a = e.integer("dim_a", 2);
    c.entangle.dim_b = e.integer("dim_b", 2);
    if (c.entangle.dim_a < 1 || c.entangle.dim_b < 1)
      throw ValidationError("entangle.dim_a", "dimensions must be positive");
    c.entangle.metric_a =
        e.has("metric_a") ? e.matrix("metric_a") : identity(c.entangle.dim_a);
    c.entangle.metric_b =
        e.has("metric_b") ? e.matrix("metric_b") : identity(c.entangle.dim_b);
    if (c.entangle.metric_a.rows() != c.entangle.dim_a)
      throw ValidationError("entangle.metric_a", "dimension differs from dim_a");
    if (c.entangle.metric_b.rows() != c.entangle.dim_b)
      throw ValidationError("entangle.metric_b", "dimension differs from dim_b");
    const auto &raw = e.raw("ensemble");
    if (!raw.is_array() || raw.empty())
      throw ValidationError("entangle.ensemble", "expected a non-empty array");
    for (std::size_t i = 0; i < raw.size(); ++i)
    {
      const Reader m(raw[i], "entangle.ensemble[" + std::to_string(i) + "]", {"p", "ket"});
      Vector ket = m.vector("ket");
      if (ket.size() != c.entangle.dim_a * c.entangle.dim_b)
        throw ValidationError(m.field("ket"), "dimension differs from dim_a * dim_b");
      c.entangle.ensemble.emplace_back(m.number("p"), std::move(ket));
    }
    c.entangle.ensemble_size = e.integer("ensemble_size", 0);
    c.entangle.restarts = static_cast<int>(e.integer("restarts", 16));
    if (c.entangle.ensemble_size < 0 || c.entangle.restarts < 1)
      throw ValidationError("entangle.restarts", "ensemble_size must be >= 0 and restarts >= 1");
  }
  return c;
}

// Normalized form: every field explicit, keys in a fixed order.
inline io::json to_json(const RunConfig &c)
{
  using io::json;
  json j;
  j["task"] = to_string(c.task);
  if (c.hamiltonian)
  {
    const auto &h = *c.hamiltonian;
    json hj;
    hj["kind"] = h.kind;
    if (h.kind == "pt_qubit")
    {
      hj["r"] = h.pt.r;
      hj["s"] = h.pt.s;
      hj["theta"] = h.pt.theta;
    }
    else if (h.kind == "decay")
    {
      hj["omega"] = h.omega;
      hj["gamma"] = h.gamma;
    }
    else
    {
      hj["matrix"] = io::to_json(h.matrix);
    }
    j["hamiltonian"] = hj;
    json mj;
    mj["kind"] = c.initial_metric.kind;
    if (c.initial_metric.kind == "explicit")
      mj["matrix"] = io::to_json(c.initial_metric.matrix);
    if (c.initial_metric.kind == "oracle")
    {
      mj["label"] = c.initial_metric.label;
      json pj = json::object();
      for (const auto &p : detail::oracle_labels().at(c.initial_metric.label))
      {
        const cplx v = c.initial_metric.params.at(p.name);
        pj[p.name] = p.complex ? io::to_json(v) : json(v.real());
      }
      mj["params"] = pj;
    }
    j["initial_metric"] = mj;
  }
  if (c.task == Task::Metric || c.task == Task::Evolve)
    j["time"] = {{"t0", c.time.t0}, {"t1", c.time.t1}, {"step", c.time.step},
                 {"samples", c.time.samples}};
  if (c.task == Task::Evolve)
    j["state"] = io::to_json(c.state);
  if (c.task == Task::Sweep)
  {
    auto range = [](const Range &r) {
      return json{{"from", r.from}, {"to", r.to}, {"count", r.count}};
    };
    j["sweep"] = {{"r", range(c.sweep.r)}, {"s", range(c.sweep.s)}, {"theta", range(c.sweep.theta)}};
  }
  if (c.task == Task::Verify)
  {
    json trials = json::object();
    for (const auto &n : all_suites())
      trials[n] = c.verify.trials.at(n);
    j["verify"] = {{"suites", c.verify.suites}, {"seeds", c.verify.seeds}, {"trials", trials}};
  }
  if (c.task == Task::Entangle)
  {
    json ens = json::array();
    for (const auto &[p, ket] : c.entangle.ensemble)
      ens.push_back({{"p", p}, {"ket", io::to_json(ket)}});
    j["entangle"] = {{"dim_a", c.entangle.dim_a},
                     {"dim_b", c.entangle.dim_b},
                     {"metric_a", io::to_json(c.entangle.metric_a)},
                     {"metric_b", io::to_json(c.entangle.metric_b)},
                     {"ensemble", ens},
                     {"ensemble_size", c.entangle.ensemble_size},
                     {"restarts", c.entangle.restarts}};
  }
  j["output"] = {{"format", c.output.format}, {"path", c.output.path}};
  j["seed"] = c.seed;
  return j;
}

}  // namespace nhqm
