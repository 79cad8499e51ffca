// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/rom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include "eigenrom/csv.hpp"
#include "eigenrom/error.hpp"
#include "eigenrom/parallel.hpp"
#include "eigenrom/rng.hpp"

namespace eigenrom
{

namespace
{

Eigen::MatrixXd design_matrix(const SampleDesign &design)
{
  const int n = design.size();
  const int d = n > 0 ? static_cast<int>(design.points.front().size()) : 0;
  Eigen::MatrixXd x(n, d);
  for (int a = 0; a < n; a++)
  {
    for (int i = 0; i < d; i++)
    {
      x(a, i) = design.points[a][i];
    }
  }
  return x;
}

Eigen::VectorXd to_vector(const ParameterPoint &p)
{
  return Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
}

Eigen::VectorXd box_vector(const std::vector<double> &v)
{
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Band band_of(const GprPrediction &p)
{
  return {p.mean, p.lower(), p.upper()};
}

double l2_norm(const SparseMatrix &mass, const Eigen::VectorXd &v)
{
  return std::sqrt(std::max(0.0, v.dot(mass * v)));
}

nlohmann::json design_to_json(const SampleDesign &design)
{
  return {{"kind", to_string(design.kind)}, {"seed", design.seed}, {"points", design.points}};
}

SampleDesign design_from_json(const nlohmann::json &j)
{
  SampleDesign d;
  d.kind = design_kind_from_string(j.at("kind").get<std::string>());
  d.seed = j.at("seed").get<std::uint64_t>();
  d.points = j.at("points").get<std::vector<ParameterPoint>>();
  return d;
}

}  // namespace

RomMode RomMode::single(int k)
{
  EIGENROM_VERIFY(k >= 1, InvalidInput, "eigen index must be at least 1, got ", k);
  RomMode m;
  m.kind = Kind::Single;
  m.eigen_index = k;
  m.n_e = 1;
  return m;
}

RomMode RomMode::simultaneous(int n_e)
{
  EIGENROM_VERIFY(n_e >= 1, InvalidInput, "simultaneous mode needs n_e >= 1, got ", n_e);
  RomMode m;
  m.kind = Kind::Simultaneous;
  m.eigen_index = 1;
  m.n_e = n_e;
  return m;
}

std::vector<int> RomMode::positions() const
{
  if (kind == Kind::Single)
  {
    return {eigen_index - 1};
  }
  std::vector<int> p(n_e);
  for (int i = 0; i < n_e; i++)
  {
    p[i] = i;
  }
  return p;
}

FomSolver::FomSolver(const ProblemSpec &spec, const Discretization &disc,
                     const SparseEigenOptions &eig)
    : spec_(spec), disc_(disc), eig_(eig)
{
  if (spec.nonlinearity)
  {
    nonlinear_ = make_nonlinear_system(spec, disc);
    mesh_ = nonlinear_->mesh;
  }
  else
  {
    mesh_ = spec.build_mesh(disc);
  }
  mesh_.validate();
  mass_ = apply_dirichlet(assemble_mass(mesh_, 1.0), mesh_);
}

std::vector<Eigenpair> FomSolver::solve(const ParameterPoint &mu, int count,
                                        const std::optional<Eigenpair> &init,
                                        int *iterations) const
{
  EIGENROM_VERIFY(static_cast<int>(mu.size()) == spec_.parameter_box.dim(), InvalidInput,
                  "parameter has dimension ", mu.size(), ", problem ", spec_.name(), " expects ",
                  spec_.parameter_box.dim());
  if (nonlinear_)
  {
    EIGENROM_VERIFY(count == 1, InvalidInput, "nonlinear problems provide the ground state only");
    const NonlinearSolution sol = solve_nonlinear(mu[0], *nonlinear_, init);
    if (iterations)
    {
      *iterations = sol.iterations;
    }
    return {fix_sign(sol.pair)};
  }
  const AssembledOperator op = spec_.assemble(mesh_, mu, disc_);
  auto pairs = solve_generalized(op.a_matrix, op.b_matrix, count, eig_);
  for (auto &p : pairs)
  {
    p = fix_sign(p);
  }
  if (iterations)
  {
    *iterations = 0;
  }
  return pairs;
}

void RomModel::validate() const
{
  const auto pos = mode.positions();
  const int blocks = static_cast<int>(pos.size());
  EIGENROM_VERIFY(basis.v.rows() == static_cast<Eigen::Index>(n_dofs) * blocks, FormatError,
                  "basis has ", basis.v.rows(), " rows, expected ", n_dofs * blocks);
  EIGENROM_VERIFY(basis.v.cols() == basis.n && basis.n >= 1, FormatError,
                  "basis dimension is inconsistent");
  const Eigen::MatrixXd gram = basis.v.transpose() * basis.v;
  EIGENROM_VERIFY((gram - Eigen::MatrixXd::Identity(basis.n, basis.n)).cwiseAbs().maxCoeff() <=
                      1e-10,
                  FormatError, "basis columns are not orthonormal");
  EIGENROM_VERIFY(static_cast<int>(coefficient_models.size()) == basis.n, FormatError, "model has ",
                  coefficient_models.size(), " coefficient regressors for a basis of size ",
                  basis.n);
  EIGENROM_VERIFY(static_cast<int>(eigenvalue_models.size()) == blocks, FormatError, "model has ",
                  eigenvalue_models.size(), " eigenvalue regressors, mode needs ", blocks);
  EIGENROM_VERIFY(basis.energy >= 1.0 - basis.epsilon - 1e-15, FormatError,
                  "basis energy is below the criterion");
  for (const auto *set : {&eigenvalue_models, &coefficient_models})
  {
    for (const auto &g : *set)
    {
      EIGENROM_VERIFY(g.num_points() == design.size(), FormatError,
                      "regressor training size does not match the design");
    }
  }
}

RomModel offline_train(const ProblemSpec &spec, const Discretization &disc,
                       const SampleDesign &design, const RomMode &mode,
                       const OfflineOptions &options)
{
  validate_design(design, spec.parameter_box);
  const std::vector<int> positions = mode.positions();
  const int count = *std::max_element(positions.begin(), positions.end()) + 1;
  EIGENROM_VERIFY(!spec.nonlinearity || count == 1, InvalidInput,
                  "nonlinear problems support the first eigenpair only");

  const FomSolver fom(spec, disc, options.eig);
  const int ns = design.size();
  std::vector<std::vector<Eigenpair>> solutions(ns);
  if (spec.nonlinearity)
  {
    // Parameter continuation along the alignment chain.
    std::optional<Eigenpair> seed;
    for (int j : alignment_chain(design.points))
    {
      try
      {
        solutions[j] = fom.solve(design.points[j], 1, seed);
      }
      catch (const Error &e)
      {
        detail::Throw<NumericalFailure>("full-order solve failed at design point ", j, ": ",
                                        e.what());
      }
      seed = solutions[j].front();
    }
  }
  else
  {
    parallel_for(ns, options.jobs,
                 [&](int j)
                 {
                   try
                   {
                     solutions[j] = fom.solve(design.points[j], count);
                   }
                   catch (const Error &e)
                   {
                     detail::Throw<NumericalFailure>("full-order solve failed at design point ",
                                                     j, ": ", e.what());
                   }
                 });
  }

  const int nh = fom.num_dofs();
  std::vector<SnapshotSet> sets;
  RomModel model;
  for (int p : positions)
  {
    SnapshotSet set;
    set.matrix.resize(nh, ns);
    set.parameters = design.points;
    set.eigen_indices = {p};
    std::vector<double> values(ns);
    for (int j = 0; j < ns; j++)
    {
      set.matrix.col(j) = solutions[j][p].vector;
      values[j] = solutions[j][p].value;
    }
    sets.push_back(std::move(set));
    model.training_eigenvalues.push_back(std::move(values));
  }
  const SnapshotSet snapshots = stack_snapshots(sets, static_cast<int>(positions.size()));
  model.basis = compute_pod(snapshots, options.epsilon);
  const Eigen::MatrixXd reduced = project(model.basis, snapshots.matrix);

  const Eigen::MatrixXd x = design_matrix(design);
  const Eigen::VectorXd lo = box_vector(spec.parameter_box.lo);
  const Eigen::VectorXd hi = box_vector(spec.parameter_box.hi);
  const int nv = static_cast<int>(positions.size());
  const int nreg = nv + model.basis.n;
  std::vector<GprModel> regs(nreg);
  parallel_for(nreg, options.jobs,
               [&](int r)
               {
                 GprFitConfig cfg = options.gpr;
                 cfg.seed = DeriveSeed(options.gpr.seed, static_cast<std::uint64_t>(r));
                 const Eigen::VectorXd y =
                     (r < nv) ? box_vector(model.training_eigenvalues[r])
                              : Eigen::VectorXd(reduced.row(r - nv).transpose());
                 regs[r] = fit(x, y, cfg, lo, hi);
               });

  model.problem = spec.id;
  model.disc = disc;
  model.n_dofs = nh;
  model.mode = mode;
  model.design = design;
  model.gpr = options.gpr;
  model.eigenvalue_models.assign(regs.begin(), regs.begin() + nv);
  model.coefficient_models.assign(regs.begin() + nv, regs.end());
  model.validate();
  return model;
}

Prediction online_predict(const RomModel &model, const ParameterPoint &mu)
{
  const ProblemSpec spec = problem_spec(model.problem);
  EIGENROM_VERIFY(static_cast<int>(mu.size()) == spec.parameter_box.dim(), InvalidInput,
                  "query has dimension ", mu.size(), ", model expects ", spec.parameter_box.dim());
  const Eigen::VectorXd x = to_vector(mu);
  Prediction pred;
  pred.mu = mu;
  pred.out_of_box = !spec.parameter_box.contains(mu);
  for (int p : model.mode.positions())
  {
    pred.eigen_indices.push_back(p + 1);
  }
  for (const auto &g : model.eigenvalue_models)
  {
    pred.eigenvalues.push_back(band_of(g.predict(x)));
  }
  const int n = model.basis.n;
  pred.coefficients.resize(n);
  for (int i = 0; i < n; i++)
  {
    const GprPrediction c = model.coefficient_models[i].predict(x);
    pred.coefficients(i) = c.mean;
    pred.coefficient_bands.push_back(band_of(c));
  }
  const Eigen::VectorXd full = model.basis.v * pred.coefficients;
  for (size_t b = 0; b < pred.eigen_indices.size(); b++)
  {
    pred.eigenvectors.push_back(full.segment(b * model.n_dofs, model.n_dofs));
  }
  return pred;
}

ErrorReport evaluate(const RomModel &model, const SampleDesign &test, int jobs)
{
  const ProblemSpec spec = problem_spec(model.problem);
  const FomSolver fom(spec, model.disc);
  EIGENROM_VERIFY(fom.num_dofs() == model.n_dofs, InvalidInput,
                  "discretization does not reproduce the model's ", model.n_dofs, " dofs");
  const auto positions = model.mode.positions();
  const int count = *std::max_element(positions.begin(), positions.end()) + 1;
  const int nb = static_cast<int>(positions.size());

  std::vector<ErrorRow> rows(static_cast<size_t>(test.size()) * nb);
  parallel_for(test.size(), jobs,
               [&](int t)
               {
                 const ParameterPoint &mu = test.points[t];
                 const Prediction pred = online_predict(model, mu);
                 std::vector<Eigenpair> exact;
                 std::string failure;
                 try
                 {
                   exact = fom.solve(mu, count);
                 }
                 catch (const Error &e)
                 {
                   failure = e.what();
                 }
                 for (int b = 0; b < nb; b++)
                 {
                   ErrorRow &row = rows[static_cast<size_t>(t) * nb + b];
                   row.mu = mu;
                   row.k = positions[b] + 1;
                   row.lambda_dd = pred.eigenvalues[b].mean;
                   row.lambda_lo = pred.eigenvalues[b].lower;
                   row.lambda_hi = pred.eigenvalues[b].upper;
                   if (!failure.empty())
                   {
                     row.fom_failed = true;
                     row.message = failure;
                     row.lambda_fem = row.vec_inf_err = row.vec_l2_rel_err =
                         std::numeric_limits<double>::quiet_NaN();
                     continue;
                   }
                   const Eigenpair &ref = exact[positions[b]];
                   const Eigen::VectorXd &u = pred.eigenvectors[b];
                   const Eigen::VectorXd em = u - ref.vector, ep = u + ref.vector;
                   row.lambda_fem = ref.value;
                   row.vec_inf_err = std::min(em.lpNorm<Eigen::Infinity>(),
                                              ep.lpNorm<Eigen::Infinity>());
                   row.vec_l2_rel_err = std::min(l2_norm(fom.mass(), em), l2_norm(fom.mass(), ep)) /
                                        l2_norm(fom.mass(), ref.vector);
                   row.covered = row.lambda_lo <= ref.value && ref.value <= row.lambda_hi;
                 }
               });

  ErrorReport report;
  report.rows = std::move(rows);
  int ok = 0, covered = 0;
  double sum = 0.0;
  for (const auto &row : report.rows)
  {
    if (row.fom_failed)
    {
      report.fom_failures++;
      continue;
    }
    const double err = std::abs(row.lambda_dd - row.lambda_fem);
    ok++;
    covered += row.covered;
    sum += err;
    report.max_lambda_err = std::max(report.max_lambda_err, err);
    report.max_lambda_rel_err =
        std::max(report.max_lambda_rel_err, err / std::max(std::abs(row.lambda_fem), 1e-300));
    report.max_vec_inf_err = std::max(report.max_vec_inf_err, row.vec_inf_err);
    report.max_vec_l2_rel_err = std::max(report.max_vec_l2_rel_err, row.vec_l2_rel_err);
  }
  report.mean_lambda_err = ok > 0 ? sum / ok : 0.0;
  report.coverage = ok > 0 ? static_cast<double>(covered) / ok : 0.0;
  return report;
}

void write_error_report(const ErrorReport &report, const std::string &path)
{
  const int d = report.rows.empty() ? 0 : static_cast<int>(report.rows.front().mu.size());
  std::vector<std::string> header;
  for (int i = 0; i < d; i++)
  {
    header.push_back("mu_" + std::to_string(i + 1));
  }
  for (const char *c : {"k", "lambda_fem", "lambda_dd", "lambda_lo", "lambda_hi", "vec_inf_err",
                        "vec_l2_rel_err"})
  {
    header.emplace_back(c);
  }
  CsvWriter csv(path, header);
  for (const auto &row : report.rows)
  {
    for (double m : row.mu)
    {
      csv << m;
    }
    csv << row.k << row.lambda_fem << row.lambda_dd << row.lambda_lo << row.lambda_hi
        << row.vec_inf_err << row.vec_l2_rel_err;
    csv.end_row();
  }
}

nlohmann::json to_json(const RomModel &model)
{
  nlohmann::json j;
  j["schema"] = kModelSchema;
  j["problem"] = to_string(model.problem);
  j["discretization"] = {{"h", model.disc.h},
                         {"pattern", to_string(model.disc.pattern)},
                         {"quadrature", to_string(model.disc.quadrature)},
                         {"interface_width", model.disc.interface_width}};
  j["n_dofs"] = model.n_dofs;
  if (model.mode.kind == RomMode::Kind::Single)
  {
    j["mode"] = {{"kind", "single"}, {"eigen_index", model.mode.eigen_index}};
  }
  else
  {
    j["mode"] = {{"kind", "simultaneous"}, {"n_e", model.mode.n_e}};
  }
  j["design"] = design_to_json(model.design);
  j["gpr"] = {{"starts", model.gpr.starts},
              {"seed", model.gpr.seed},
              {"max_iterations", model.gpr.max_iterations},
              {"gradient_tolerance", model.gpr.gradient_tolerance}};
  j["training_eigenvalues"] = model.training_eigenvalues;

  const PodBasis &b = model.basis;
  nlohmann::json cols = nlohmann::json::array();
  for (int c = 0; c < b.n; c++)
  {
    cols.push_back(std::vector<double>(b.v.col(c).data(), b.v.col(c).data() + b.v.rows()));
  }
  j["basis"] = {{"rows", b.v.rows()},
                {"n", b.n},
                {"epsilon", b.epsilon},
                {"energy", b.energy},
                {"singular_values",
                 std::vector<double>(b.singular_values.data(),
                                     b.singular_values.data() + b.singular_values.size())},
                {"columns", cols}};
  nlohmann::json ev = nlohmann::json::array(), cv = nlohmann::json::array();
  for (const auto &g : model.eigenvalue_models)
  {
    ev.push_back(g.to_json());
  }
  for (const auto &g : model.coefficient_models)
  {
    cv.push_back(g.to_json());
  }
  j["eigenvalue_models"] = ev;
  j["coefficient_models"] = cv;
  return j;
}

RomModel rom_from_json(const nlohmann::json &j)
{
  try
  {
    EIGENROM_VERIFY(j.contains("schema") && j.at("schema").is_string(), FormatError,
                    "model file has no schema field");
    const std::string schema = j.at("schema").get<std::string>();
    EIGENROM_VERIFY(schema == kModelSchema, FormatError, "unsupported model schema \"", schema,
                    "\", expected \"", kModelSchema, "\"");
    RomModel m;
    m.problem = problem_id_from_string(j.at("problem").get<std::string>());
    const auto &dj = j.at("discretization");
    m.disc.h = dj.at("h").get<double>();
    m.disc.pattern = triangle_pattern_from_string(dj.at("pattern").get<std::string>());
    m.disc.quadrature = quadrature_rule_from_string(dj.at("quadrature").get<std::string>());
    m.disc.interface_width = dj.at("interface_width").get<double>();
    m.n_dofs = j.at("n_dofs").get<int>();
    const auto &mj = j.at("mode");
    const std::string kind = mj.at("kind").get<std::string>();
    if (kind == "single")
    {
      m.mode = RomMode::single(mj.at("eigen_index").get<int>());
    }
    else if (kind == "simultaneous")
    {
      m.mode = RomMode::simultaneous(mj.at("n_e").get<int>());
    }
    else
    {
      detail::Throw<FormatError>("unknown mode kind \"", kind, "\"");
    }
    m.design = design_from_json(j.at("design"));
    const auto &gj = j.at("gpr");
    m.gpr.starts = gj.at("starts").get<int>();
    m.gpr.seed = gj.at("seed").get<std::uint64_t>();
    m.gpr.max_iterations = gj.at("max_iterations").get<int>();
    m.gpr.gradient_tolerance = gj.at("gradient_tolerance").get<double>();
    m.training_eigenvalues = j.at("training_eigenvalues").get<std::vector<std::vector<double>>>();

    const auto &bj = j.at("basis");
    const Eigen::Index rows = bj.at("rows").get<Eigen::Index>();
    m.basis.n = bj.at("n").get<int>();
    m.basis.epsilon = bj.at("epsilon").get<double>();
    m.basis.energy = bj.at("energy").get<double>();
    const auto sv = bj.at("singular_values").get<std::vector<double>>();
    m.basis.singular_values = Eigen::Map<const Eigen::VectorXd>(sv.data(), sv.size());
    const auto &cols = bj.at("columns");
    EIGENROM_VERIFY(static_cast<int>(cols.size()) == m.basis.n, FormatError,
                    "basis column count mismatch");
    m.basis.v.resize(rows, m.basis.n);
    for (int c = 0; c < m.basis.n; c++)
    {
      const auto col = cols[c].get<std::vector<double>>();
      EIGENROM_VERIFY(static_cast<Eigen::Index>(col.size()) == rows, FormatError,
                      "basis column ", c, " has the wrong length");
      m.basis.v.col(c) = Eigen::Map<const Eigen::VectorXd>(col.data(), rows);
    }
    for (const auto &g : j.at("eigenvalue_models"))
    {
      m.eigenvalue_models.push_back(GprModel::from_json(g));
    }
    for (const auto &g : j.at("coefficient_models"))
    {
      m.coefficient_models.push_back(GprModel::from_json(g));
    }
    m.validate();
    return m;
  }
  catch (const nlohmann::json::exception &e)
  {
    detail::Throw<FormatError>("malformed model file: ", e.what());
  }
  catch (const InvalidInput &e)
  {
    detail::Throw<FormatError>("invalid model file: ", e.what());
  }
}

void save(const RomModel &model, const std::string &path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  EIGENROM_VERIFY(out.good(), InvalidInput, "cannot open ", path, " for writing");
  out << to_json(model).dump(1) << '\n';
  EIGENROM_VERIFY(out.good(), InvalidInput, "failed writing ", path);
}

RomModel load(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  EIGENROM_VERIFY(in.good(), FormatError, "cannot open model file ", path);
  nlohmann::json j;
  try
  {
    in >> j;
  }
  catch (const nlohmann::json::exception &e)
  {
    detail::Throw<FormatError>("model file ", path, " is not valid JSON: ", e.what());
  }
  return rom_from_json(j);
}

}  // namespace eigenrom
