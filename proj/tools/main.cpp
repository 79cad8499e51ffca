// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <CLI11.hpp>
#include "eigenrom/commands.hpp"
#include "eigenrom/error.hpp"

int main(int argc, char **argv)
{
  using namespace eigenrom;
  CLI::App app{"Gaussian-process surrogates for parametric eigenvalue problems"};
  app.require_subcommand(1);

  std::string config_path, out_dir, model_path;
  int jobs = 0;
  std::uint64_t seed = 0;
  const std::vector<std::pair<const char *, const char *>> commands = {
      {"fom", "Solve the full-order problem at the test design"},
      {"train", "Fit the surrogate on the training design"},
      {"predict", "Query a trained surrogate at the test design"},
      {"evaluate", "Compare a trained surrogate against full-order solves"}};
  for (const auto &[name, help] : commands)
  {
    CLI::App *sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--model", model_path, "Model file (default <out>/rom_model.json)");
    sub->add_option("--jobs", jobs, "Worker threads (fallback: EIGENROM_JOBS)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Global seed");
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? kExitSuccess : kExitInvalidConfig;
  }

  const CLI::App *sub = app.get_subcommands().front();
  ConfigOverrides ov;
  if (sub->count("--out"))
  {
    ov.output_dir = out_dir;
  }
  if (sub->count("--model"))
  {
    ov.model_path = model_path;
  }
  if (sub->count("--jobs"))
  {
    ov.jobs = jobs;
  }
  if (sub->count("--seed"))
  {
    ov.seed = seed;
  }

  try
  {
    const RunConfig cfg = load_config(config_path, ov);
    const std::string name = sub->get_name();
    if (name == "fom")
    {
      return cmd_fom(cfg, std::cerr);
    }
    if (name == "train")
    {
      return cmd_train(cfg, std::cerr);
    }
    if (name == "predict")
    {
      return cmd_predict(cfg, std::cerr);
    }
    return cmd_evaluate(cfg, std::cerr);
  }
  catch (const InvalidInput &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
  catch (const FormatError &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
  catch (const NumericalFailure &e)
  {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
