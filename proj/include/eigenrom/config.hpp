// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_CONFIG_HPP
#define EIGENROM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <json.hpp>
#include "eigenrom/gpr.hpp"
#include "eigenrom/problems.hpp"
#include "eigenrom/rom.hpp"
#include "eigenrom/sampling.hpp"

namespace eigenrom
{

// Errors a run can be judged by; unset entries are not checked.
struct Tolerances
{
  std::optional<double> lambda_abs;
  std::optional<double> lambda_rel;
  std::optional<double> vec_inf;
  std::optional<double> vec_l2_rel;
  std::optional<double> min_coverage;
};

// Command-line values that override the file.
struct ConfigOverrides
{
  std::optional<std::string> output_dir;
  std::optional<std::string> model_path;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
};

//
// Parsed and validated run description. Precedence: command-line flags, then file
// values, then defaults.
//
struct RunConfig
{
  ProblemId problem = ProblemId::Ho1d;
  Discretization disc;
  RomMode mode;
  std::uint64_t seed = 1;
  std::optional<SampleDesign> training;
  SampleDesign test;
  bool has_test = false;
  double epsilon = 1e-8;
  GprFitConfig gpr;
  Tolerances tolerances;
  int fom_eigs = 0;  // 0: as many as the mode covers
  bool fom_vectors = false;
  bool predict_vectors = true;
  int curve_points = 201;
  double curve_margin = 0.05;
  std::string output_dir = ".";
  std::string model_path;  // empty: <output_dir>/rom_model.json
  int jobs = 0;            // 0: EIGENROM_JOBS, then hardware threads

  nlohmann::json source;  // file contents after overrides

  ProblemSpec spec() const { return problem_spec(problem); }
  std::string resolved_model_path() const;
};

// Throws InvalidInput on any schema or range violation.
RunConfig parse_config(const nlohmann::json &j, const ConfigOverrides &overrides = {});
RunConfig load_config(const std::string &path, const ConfigOverrides &overrides = {});

}  // namespace eigenrom

#endif  // EIGENROM_CONFIG_HPP
