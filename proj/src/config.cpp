// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include "eigenrom/error.hpp"
#include "eigenrom/rng.hpp"

namespace eigenrom
{

namespace
{

void check_keys(const nlohmann::json &j, const std::set<std::string> &allowed, const char *where)
{
  EIGENROM_VERIFY(j.is_object(), InvalidInput, where, " must be a JSON object");
  for (const auto &item : j.items())
  {
    EIGENROM_VERIFY(allowed.count(item.key()), InvalidInput, "unknown key \"", item.key(),
                    "\" in ", where);
  }
}

template <typename T>
T get_or(const nlohmann::json &j, const char *key, T fallback)
{
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

SampleDesign parse_design(const nlohmann::json &j, const ParameterBox &box,
                          std::uint64_t default_seed, const char *where)
{
  check_keys(j, {"kind", "counts", "n", "seed", "points"}, where);
  const DesignKind kind = design_kind_from_string(j.at("kind").get<std::string>());
  const std::uint64_t seed = get_or<std::uint64_t>(j, "seed", default_seed);
  switch (kind)
  {
    case DesignKind::UniformGrid:
      return uniform_grid(box, j.at("counts").get<std::vector<int>>());
    case DesignKind::LatinHypercube:
      return latin_hypercube(box, j.at("n").get<int>(), seed);
    case DesignKind::Random:
      return random_uniform(box, j.at("n").get<int>(), seed);
    case DesignKind::Explicit:
    {
      SampleDesign d;
      d.kind = DesignKind::Explicit;
      d.points = j.at("points").get<std::vector<ParameterPoint>>();
      for (const auto &p : d.points)
      {
        EIGENROM_VERIFY(static_cast<int>(p.size()) == box.dim(), InvalidInput, where,
                        " point has dimension ", p.size(), ", problem expects ", box.dim());
        for (double v : p)
        {
          EIGENROM_VERIFY(std::isfinite(v), InvalidInput, where, " point is not finite");
        }
      }
      return d;
    }
  }
  detail::Throw<InvalidInput>("unsupported design kind in ", where);
}

std::optional<double> tolerance(const nlohmann::json &j, const char *key)
{
  if (!j.contains(key))
  {
    return std::nullopt;
  }
  const double v = j.at(key).get<double>();
  EIGENROM_VERIFY(v >= 0.0, InvalidInput, "tolerance ", key, " must be non-negative");
  return v;
}

}  // namespace

std::string RunConfig::resolved_model_path() const
{
  if (!model_path.empty())
  {
    return model_path;
  }
  return (std::filesystem::path(output_dir) / "rom_model.json").string();
}

RunConfig parse_config(const nlohmann::json &file, const ConfigOverrides &overrides)
{
  nlohmann::json j = file;
  if (overrides.output_dir)
  {
    j["output"] = *overrides.output_dir;
  }
  if (overrides.model_path)
  {
    j["model"] = *overrides.model_path;
  }
  if (overrides.seed)
  {
    j["seed"] = *overrides.seed;
  }
  if (overrides.jobs)
  {
    j["jobs"] = *overrides.jobs;
  }

  try
  {
    check_keys(j, {"problem", "mesh", "mode", "seed", "training", "test", "epsilon", "gpr",
                   "tolerances", "fom", "predict", "output", "model", "jobs"},
               "config");
    RunConfig cfg;
    cfg.problem = problem_id_from_string(j.at("problem").get<std::string>());
    const ProblemSpec spec = problem_spec(cfg.problem);

    const auto &mj = j.at("mesh");
    check_keys(mj, {"h", "n", "pattern", "quadrature", "interface_width"}, "mesh");
    EIGENROM_VERIFY(mj.contains("h") != mj.contains("n"), InvalidInput,
                    "mesh needs exactly one of \"h\" and \"n\"");
    if (mj.contains("h"))
    {
      cfg.disc.h = mj.at("h").get<double>();
    }
    else
    {
      const int n = mj.at("n").get<int>();
      EIGENROM_VERIFY(n >= 1, InvalidInput, "mesh n must be positive");
      cfg.disc.h = (spec.domain.x1 - spec.domain.x0) / n;
    }
    EIGENROM_VERIFY(std::isfinite(cfg.disc.h) && cfg.disc.h > 0.0, InvalidInput,
                    "mesh size must be positive");
    EIGENROM_VERIFY(cfg.disc.h <= 0.5 * (spec.domain.x1 - spec.domain.x0), InvalidInput,
                    "mesh size is too coarse for the domain");
    if (mj.contains("pattern"))
    {
      cfg.disc.pattern = triangle_pattern_from_string(mj.at("pattern").get<std::string>());
    }
    if (mj.contains("quadrature"))
    {
      cfg.disc.quadrature = quadrature_rule_from_string(mj.at("quadrature").get<std::string>());
    }
    cfg.disc.interface_width = get_or<double>(mj, "interface_width", 2.0);
    EIGENROM_VERIFY(cfg.disc.interface_width > 0.0, InvalidInput,
                    "interface_width must be positive");

    if (j.contains("mode"))
    {
      const auto &md = j.at("mode");
      check_keys(md, {"kind", "eigen_index", "n_e"}, "mode");
      const std::string kind = md.at("kind").get<std::string>();
      if (kind == "single")
      {
        cfg.mode = RomMode::single(get_or<int>(md, "eigen_index", 1));
      }
      else if (kind == "simultaneous")
      {
        cfg.mode = RomMode::simultaneous(md.at("n_e").get<int>());
      }
      else
      {
        detail::Throw<InvalidInput>("mode kind must be \"single\" or \"simultaneous\"");
      }
    }
    if (spec.nonlinearity)
    {
      EIGENROM_VERIFY(cfg.mode.kind == RomMode::Kind::Single && cfg.mode.eigen_index == 1,
                      InvalidInput, "nonlinear problems support single mode with eigen_index 1");
    }

    cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
    if (j.contains("training"))
    {
      cfg.training = parse_design(j.at("training"), spec.parameter_box, DeriveSeed(cfg.seed, 1),
                                  "training");
      validate_design(*cfg.training, spec.parameter_box);
    }
    if (j.contains("test"))
    {
      cfg.test = parse_design(j.at("test"), spec.parameter_box, DeriveSeed(cfg.seed, 3), "test");
      cfg.has_test = true;
    }

    cfg.epsilon = get_or<double>(j, "epsilon", 1e-8);
    EIGENROM_VERIFY(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, InvalidInput,
                    "epsilon must lie in (0, 1)");

    cfg.gpr.seed = DeriveSeed(cfg.seed, 2);
    if (j.contains("gpr"))
    {
      const auto &gj = j.at("gpr");
      check_keys(gj, {"starts", "seed", "max_iterations"}, "gpr");
      cfg.gpr.starts = get_or<int>(gj, "starts", cfg.gpr.starts);
      cfg.gpr.seed = get_or<std::uint64_t>(gj, "seed", cfg.gpr.seed);
      cfg.gpr.max_iterations = get_or<int>(gj, "max_iterations", cfg.gpr.max_iterations);
    }
    EIGENROM_VERIFY(cfg.gpr.starts >= 1, InvalidInput, "gpr.starts must be at least 1");
    EIGENROM_VERIFY(cfg.gpr.max_iterations >= 1, InvalidInput,
                    "gpr.max_iterations must be at least 1");

    if (j.contains("tolerances"))
    {
      const auto &tj = j.at("tolerances");
      check_keys(tj, {"lambda_abs", "lambda_rel", "vec_inf", "vec_l2_rel", "min_coverage"},
                 "tolerances");
      cfg.tolerances.lambda_abs = tolerance(tj, "lambda_abs");
      cfg.tolerances.lambda_rel = tolerance(tj, "lambda_rel");
      cfg.tolerances.vec_inf = tolerance(tj, "vec_inf");
      cfg.tolerances.vec_l2_rel = tolerance(tj, "vec_l2_rel");
      cfg.tolerances.min_coverage = tolerance(tj, "min_coverage");
    }
    if (j.contains("fom"))
    {
      const auto &fj = j.at("fom");
      check_keys(fj, {"n_eigs", "vectors"}, "fom");
      cfg.fom_eigs = get_or<int>(fj, "n_eigs", 0);
      cfg.fom_vectors = get_or<bool>(fj, "vectors", false);
      EIGENROM_VERIFY(cfg.fom_eigs >= 0, InvalidInput, "fom.n_eigs must be non-negative");
      EIGENROM_VERIFY(!spec.nonlinearity || cfg.fom_eigs <= 1, InvalidInput,
                      "nonlinear problems provide the ground state only");
    }
    if (j.contains("predict"))
    {
      const auto &pj = j.at("predict");
      check_keys(pj, {"vectors", "curve_points", "curve_margin"}, "predict");
      cfg.predict_vectors = get_or<bool>(pj, "vectors", true);
      cfg.curve_points = get_or<int>(pj, "curve_points", 201);
      cfg.curve_margin = get_or<double>(pj, "curve_margin", 0.05);
      EIGENROM_VERIFY(cfg.curve_points >= 2, InvalidInput, "predict.curve_points must be >= 2");
      EIGENROM_VERIFY(cfg.curve_margin >= 0.0, InvalidInput,
                      "predict.curve_margin must be non-negative");
    }
    cfg.output_dir = get_or<std::string>(j, "output", ".");
    cfg.model_path = get_or<std::string>(j, "model", "");
    cfg.jobs = get_or<int>(j, "jobs", 0);
    EIGENROM_VERIFY(cfg.jobs >= 0, InvalidInput, "jobs must be non-negative");
    cfg.source = j;
    return cfg;
  }
  catch (const nlohmann::json::exception &e)
  {
    detail::Throw<InvalidInput>("invalid config: ", e.what());
  }
}

RunConfig load_config(const std::string &path, const ConfigOverrides &overrides)
{
  std::ifstream in(path, std::ios::binary);
  EIGENROM_VERIFY(in.good(), InvalidInput, "cannot open config ", path);
  nlohmann::json j;
  try
  {
    in >> j;
  }
  catch (const nlohmann::json::exception &e)
  {
    detail::Throw<InvalidInput>("config ", path, " is not valid JSON: ", e.what());
  }
  return parse_config(j, overrides);
}

}  // namespace eigenrom
