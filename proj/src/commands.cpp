// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/commands.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include "eigenrom/csv.hpp"
#include "eigenrom/error.hpp"
#include "eigenrom/parallel.hpp"

namespace eigenrom
{

namespace
{

namespace fs = std::filesystem;

std::string out_path(const RunConfig &cfg, const std::string &name)
{
  return (fs::path(cfg.output_dir) / name).string();
}

void ensure_output_dir(const RunConfig &cfg)
{
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  EIGENROM_VERIFY(!ec && fs::is_directory(cfg.output_dir), InvalidInput,
                  "cannot create output directory ", cfg.output_dir);
}

std::vector<std::string> mu_header(int d)
{
  std::vector<std::string> h;
  for (int i = 0; i < d; i++)
  {
    h.push_back("mu_" + std::to_string(i + 1));
  }
  return h;
}

void write_field(const std::string &path, const Mesh &mesh, const Eigen::VectorXd &interior)
{
  std::vector<std::string> header = {"x"};
  if (mesh.dim == 2)
  {
    header.emplace_back("y");
  }
  header.emplace_back("value");
  CsvWriter csv(path, header);
  const Eigen::VectorXd full = mesh.extend(interior);
  for (int v = 0; v < mesh.num_vertices(); v++)
  {
    csv << mesh.vertices[v].x();
    if (mesh.dim == 2)
    {
      csv << mesh.vertices[v].y();
    }
    csv << full(v);
    csv.end_row();
  }
}

std::string utc_timestamp()
{
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream oss;
  oss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return oss.str();
}

}  // namespace

void check_provenance(const RunConfig &cfg, const RomModel &model)
{
  EIGENROM_VERIFY(cfg.problem == model.problem, InvalidInput, "config problem ",
                  to_string(cfg.problem), " does not match the model's ", to_string(model.problem));
  EIGENROM_VERIFY(cfg.disc == model.disc, InvalidInput,
                  "config discretization (h = ", cfg.disc.h, ", ", to_string(cfg.disc.pattern),
                  ", ", to_string(cfg.disc.quadrature),
                  ") does not match the model's (h = ", model.disc.h, ", ",
                  to_string(model.disc.pattern), ", ", to_string(model.disc.quadrature), ")");
}

int cmd_fom(const RunConfig &cfg, std::ostream &log)
{
  ensure_output_dir(cfg);
  const ProblemSpec spec = cfg.spec();
  const auto positions = cfg.mode.positions();
  const int count = cfg.fom_eigs > 0 ? cfg.fom_eigs : positions.back() + 1;
  const FomSolver fom(spec, cfg.disc);
  const int nt = cfg.test.size();
  log << "fom: " << spec.name() << ", " << fom.num_dofs() << " dofs, " << nt
      << " parameter points, " << count << " eigenpairs each\n";

  std::vector<std::vector<Eigenpair>> results(nt);
  parallel_for(nt, resolve_jobs(cfg.jobs),
               [&](int t) { results[t] = fom.solve(cfg.test.points[t], count); });

  std::vector<std::string> header = mu_header(spec.parameter_box.dim());
  header.emplace_back("k");
  header.emplace_back("lambda");
  CsvWriter csv(out_path(cfg, "fom_eigenvalues.csv"), header);
  for (int t = 0; t < nt; t++)
  {
    for (const auto &p : results[t])
    {
      for (double m : cfg.test.points[t])
      {
        csv << m;
      }
      csv << p.index + 1 << p.value;
      csv.end_row();
      if (cfg.fom_vectors)
      {
        write_field(out_path(cfg, "fom_vector_" + std::to_string(t) + "_k" +
                                      std::to_string(p.index + 1) + ".csv"),
                    fom.mesh(), p.vector);
      }
    }
  }
  return kExitSuccess;
}

int cmd_train(const RunConfig &cfg, std::ostream &log)
{
  EIGENROM_VERIFY(cfg.training.has_value(), InvalidInput, "train needs a \"training\" design");
  ensure_output_dir(cfg);
  const ProblemSpec spec = cfg.spec();
  OfflineOptions opts;
  opts.epsilon = cfg.epsilon;
  opts.gpr = cfg.gpr;
  opts.jobs = resolve_jobs(cfg.jobs);

  const auto t0 = std::chrono::steady_clock::now();
  const RomModel model = offline_train(spec, cfg.disc, *cfg.training, cfg.mode, opts);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string model_path = cfg.resolved_model_path();
  save(model, model_path);

  nlohmann::json manifest;
  manifest["schema"] = "eigenrom-manifest/1";
  manifest["model_file"] = model_path;
  manifest["problem"] = spec.name();
  manifest["discretization"] = {{"h", cfg.disc.h},
                                {"pattern", to_string(cfg.disc.pattern)},
                                {"quadrature", to_string(cfg.disc.quadrature)},
                                {"interface_width", cfg.disc.interface_width}};
  manifest["n_dofs"] = model.n_dofs;
  manifest["epsilon"] = cfg.epsilon;
  manifest["seeds"] = {{"global", cfg.seed},
                       {"training_design", cfg.training->seed},
                       {"gpr", cfg.gpr.seed}};
  manifest["design"] = {{"kind", to_string(cfg.training->kind)},
                        {"points", cfg.training->points}};
  manifest["pod_dimension"] = model.basis.n;
  manifest["pod_energy"] = model.basis.energy;
  manifest["eigenvalue_regressors"] = model.eigenvalue_models.size();
  manifest["coefficient_regressors"] = model.coefficient_models.size();
  manifest["regressors"] = model.regressor_count();
  manifest["jobs"] = opts.jobs;
  manifest["wall_time_seconds"] = wall;
  manifest["created_utc"] = utc_timestamp();
  manifest["config"] = cfg.source;
  std::ofstream out(out_path(cfg, "manifest.json"), std::ios::binary | std::ios::trunc);
  EIGENROM_VERIFY(out.good(), InvalidInput, "cannot write manifest.json");
  out << manifest.dump(1) << '\n';

  log << "train: " << spec.name() << ", " << model.n_dofs << " dofs, " << cfg.training->size()
      << " snapshots, POD dimension " << model.basis.n << ", " << model.regressor_count()
      << " regressors, " << std::fixed << std::setprecision(2) << wall << " s\n";
  return kExitSuccess;
}

int cmd_predict(const RunConfig &cfg, std::ostream &log)
{
  ensure_output_dir(cfg);
  const RomModel model = load(cfg.resolved_model_path());
  check_provenance(cfg, model);
  const ProblemSpec spec = cfg.spec();
  const int d = spec.parameter_box.dim();
  const Mesh mesh = spec.build_mesh(model.disc);

  std::vector<std::string> header = mu_header(d);
  for (const char *c : {"k", "lambda", "lambda_lo", "lambda_hi", "out_of_box"})
  {
    header.emplace_back(c);
  }
  CsvWriter csv(out_path(cfg, "dd_eigenvalues.csv"), header);
  int outside = 0;
  for (int t = 0; t < cfg.test.size(); t++)
  {
    const Prediction pred = online_predict(model, cfg.test.points[t]);
    outside += pred.out_of_box;
    for (size_t b = 0; b < pred.eigen_indices.size(); b++)
    {
      for (double m : pred.mu)
      {
        csv << m;
      }
      csv << pred.eigen_indices[b] << pred.eigenvalues[b].mean << pred.eigenvalues[b].lower
          << pred.eigenvalues[b].upper << (pred.out_of_box ? 1 : 0);
      csv.end_row();
      if (cfg.predict_vectors)
      {
        write_field(out_path(cfg, "dd_vector_" + std::to_string(t) + "_k" +
                                      std::to_string(pred.eigen_indices[b]) + ".csv"),
                    mesh, pred.eigenvectors[b]);
      }
    }
  }

  // Dense regressor curves over the widened box.
  std::vector<std::string> ch = {"regressor"};
  for (const auto &h : mu_header(d))
  {
    ch.push_back(h);
  }
  for (const char *c : {"mean", "lower", "upper"})
  {
    ch.emplace_back(c);
  }
  CsvWriter curves(out_path(cfg, "gpr_curves.csv"), ch);
  std::vector<std::vector<double>> axes(d);
  for (int i = 0; i < d; i++)
  {
    const double lo = spec.parameter_box.lo[i], hi = spec.parameter_box.hi[i];
    const double a = lo - cfg.curve_margin * (hi - lo), b = hi + cfg.curve_margin * (hi - lo);
    for (int q = 0; q < cfg.curve_points; q++)
    {
      axes[i].push_back(a + (b - a) * q / (cfg.curve_points - 1.0));
    }
  }
  std::vector<std::pair<std::string, const GprModel *>> regs;
  for (size_t b = 0; b < model.eigenvalue_models.size(); b++)
  {
    regs.emplace_back("lambda_k" + std::to_string(model.mode.positions()[b] + 1),
                      &model.eigenvalue_models[b]);
  }
  for (size_t c = 0; c < model.coefficient_models.size(); c++)
  {
    regs.emplace_back("coef_" + std::to_string(c + 1), &model.coefficient_models[c]);
  }
  long total = 1;
  for (int i = 0; i < d; i++)
  {
    total *= cfg.curve_points;
  }
  for (const auto &[name, gp] : regs)
  {
    for (long t = 0; t < total; t++)
    {
      Eigen::VectorXd x(d);
      long rem = t;
      for (int i = d - 1; i >= 0; i--)
      {
        x(i) = axes[i][rem % cfg.curve_points];
        rem /= cfg.curve_points;
      }
      const GprPrediction p = gp->predict(x);
      curves << name;
      for (int i = 0; i < d; i++)
      {
        curves << x(i);
      }
      curves << p.mean << p.lower() << p.upper();
      curves.end_row();
    }
  }
  log << "predict: " << cfg.test.size() << " parameter points (" << outside
      << " outside the training box), " << regs.size() << " regressor curves\n";
  if (outside > 0)
  {
    log << "warning: " << outside << " queries lie outside the parameter box\n";
  }
  return kExitSuccess;
}

int cmd_evaluate(const RunConfig &cfg, std::ostream &log)
{
  EIGENROM_VERIFY(cfg.has_test, InvalidInput, "evaluate needs a \"test\" design");
  ensure_output_dir(cfg);
  const RomModel model = load(cfg.resolved_model_path());
  check_provenance(cfg, model);

  const ErrorReport report = evaluate(model, cfg.test, resolve_jobs(cfg.jobs));
  write_error_report(report, out_path(cfg, "error_report.csv"));

  std::vector<std::string> failures;
  const Tolerances &tol = cfg.tolerances;
  auto check = [&failures](const std::optional<double> &limit, double value, const char *name,
                           bool upper)
  {
    if (limit && (upper ? value > *limit : value < *limit))
    {
      std::ostringstream oss;
      oss << name << " = " << format_real(value) << (upper ? " exceeds " : " is below ")
          << format_real(*limit);
      failures.push_back(oss.str());
    }
  };
  check(tol.lambda_abs, report.max_lambda_err, "max |lambda_dd - lambda_fem|", true);
  check(tol.lambda_rel, report.max_lambda_rel_err, "max relative eigenvalue error", true);
  check(tol.vec_inf, report.max_vec_inf_err, "max eigenvector sup error", true);
  check(tol.vec_l2_rel, report.max_vec_l2_rel_err, "max eigenvector relative L2 error", true);
  check(tol.min_coverage, report.coverage, "band coverage", false);
  if (report.fom_failures > 0)
  {
    failures.push_back(std::to_string(report.fom_failures) + " full-order solves failed");
  }

  nlohmann::json summary = {{"rows", report.rows.size()},
                            {"max_lambda_err", report.max_lambda_err},
                            {"mean_lambda_err", report.mean_lambda_err},
                            {"max_lambda_rel_err", report.max_lambda_rel_err},
                            {"max_vec_inf_err", report.max_vec_inf_err},
                            {"max_vec_l2_rel_err", report.max_vec_l2_rel_err},
                            {"coverage", report.coverage},
                            {"fom_failures", report.fom_failures},
                            {"failures", failures}};
  std::ofstream out(out_path(cfg, "eval_summary.json"), std::ios::binary | std::ios::trunc);
  out << summary.dump(1) << '\n';

  log << "evaluate: " << report.rows.size() << " rows\n"
      << "  max |lambda_dd - lambda_fem| = " << format_real(report.max_lambda_err) << "\n"
      << "  mean |lambda_dd - lambda_fem| = " << format_real(report.mean_lambda_err) << "\n"
      << "  max eigenvector sup error = " << format_real(report.max_vec_inf_err) << "\n"
      << "  max eigenvector rel L2 error = " << format_real(report.max_vec_l2_rel_err) << "\n"
      << "  band coverage = " << format_real(report.coverage) << "\n";
  for (const auto &f : failures)
  {
    log << "  FAIL: " << f << "\n";
  }
  return failures.empty() ? kExitSuccess : kExitTolerance;
}

}  // namespace eigenrom
