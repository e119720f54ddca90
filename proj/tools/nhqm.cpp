// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include "CLI11.hpp"
#include "nhqm/config.hpp"
#include "nhqm/runner.hpp"

int main(int argc, char **argv)
{
  CLI::App app{"Metric, dynamics and no-go verification for finite non-Hermitian systems"};
  std::string task, config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> step;
  app.add_option("task", task, "metric | evolve | sweep | verify | entangle")
      ->required()
      ->check(CLI::IsMember({"metric", "evolve", "sweep", "verify", "entangle"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out, "output path (overrides output.path)");
  app.add_option("--seed", seed, "random seed (overrides seed)");
  app.add_option("--step", step, "integration step (overrides time.step)");
  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : nhqm::ExitError;
  }

  try
  {
    std::ifstream f(config_path, std::ios::binary);
    if (!f)
    {
      std::cerr << "nhqm: cannot read " << config_path << "\n";
      return nhqm::ExitError;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    auto config = nhqm::parse_config(buf.str(), nhqm::task_from_string(task));
    if (!out.empty())
      config.output.path = out;
    if (seed)
    {
      config.seed = *seed;
      if (config.task == nhqm::Task::Verify)
        config.verify.seeds = {*seed};
    }
    if (step)
    {
      if (!(*step > 0.0))
        throw nhqm::ValidationError("--step", "must be positive");
      config.time.step = *step;
    }
    return nhqm::run(config);
  }
  catch (const nhqm::ValidationError &e)
  {
    std::cerr << "nhqm: invalid config: " << e.field() << ": " << e.detail() << "\n";
  }
  catch (const nhqm::ParseError &e)
  {
    std::cerr << "nhqm: malformed JSON at line " << e.line() << ": " << e.what() << "\n";
  }
  catch (const std::exception &e)
  {
    std::cerr << "nhqm: " << e.what() << "\n";
  }
  return nhqm::ExitError;
}
