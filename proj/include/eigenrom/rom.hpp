// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_ROM_HPP
#define EIGENROM_ROM_HPP

#include <optional>
#include <string>
#include <vector>
#include <Eigen/Dense>
#include <json.hpp>
#include "eigenrom/eigensolve.hpp"
#include "eigenrom/gpr.hpp"
#include "eigenrom/nonlinear.hpp"
#include "eigenrom/pod.hpp"
#include "eigenrom/problems.hpp"
#include "eigenrom/sampling.hpp"

namespace eigenrom
{

inline constexpr const char *kModelSchema = "eigenrom/1";

//
// Which eigenpairs a surrogate covers. eigen_index is 1-based (k-th smallest);
// simultaneous mode covers 1..n_e.
//
struct RomMode
{
  enum class Kind
  {
    Single,
    Simultaneous
  };
  Kind kind = Kind::Single;
  int eigen_index = 1;
  int n_e = 1;

  static RomMode single(int k);
  static RomMode simultaneous(int n_e);

  // 0-based sorted positions covered.
  std::vector<int> positions() const;
  bool operator==(const RomMode &) const = default;
};

//
// Full-order solver bound to one problem and discretization.
//
class FomSolver
{
public:
  FomSolver(const ProblemSpec &spec, const Discretization &disc,
            const SparseEigenOptions &eig = {});

  // The `count` smallest eigenpairs at mu, B-normalized and sign-fixed. Nonlinear
  // problems return the ground state only and accept a continuation seed.
  std::vector<Eigenpair> solve(const ParameterPoint &mu, int count,
                               const std::optional<Eigenpair> &init = std::nullopt,
                               int *iterations = nullptr) const;

  const ProblemSpec &spec() const { return spec_; }
  const Discretization &discretization() const { return disc_; }
  const Mesh &mesh() const { return mesh_; }
  // Unweighted mass on interior dofs, used for L2 norms.
  const SparseMatrix &mass() const { return mass_; }
  int num_dofs() const { return mesh_.num_dofs(); }

private:
  ProblemSpec spec_;
  Discretization disc_;
  SparseEigenOptions eig_;
  Mesh mesh_;
  SparseMatrix mass_;
  std::optional<NonlinearSystem> nonlinear_;
};

struct OfflineOptions
{
  double epsilon = 1e-8;
  GprFitConfig gpr;
  int jobs = 1;
  SparseEigenOptions eig;
};

struct RomModel
{
  ProblemId problem = ProblemId::Ho1d;
  Discretization disc;
  int n_dofs = 0;
  RomMode mode;
  PodBasis basis;
  std::vector<GprModel> eigenvalue_models;
  std::vector<GprModel> coefficient_models;
  SampleDesign design;
  GprFitConfig gpr;
  // Training snapshots' eigenvalues per covered position, design order.
  std::vector<std::vector<double>> training_eigenvalues;

  int regressor_count() const
  {
    return static_cast<int>(eigenvalue_models.size() + coefficient_models.size());
  }
  // Throws FormatError when the model is internally inconsistent.
  void validate() const;
};

struct Band
{
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct Prediction
{
  ParameterPoint mu;
  bool out_of_box = false;
  std::vector<int> eigen_indices;  // 1-based
  std::vector<Band> eigenvalues;
  std::vector<Eigen::VectorXd> eigenvectors;  // N_h entries each
  Eigen::VectorXd coefficients;
  std::vector<Band> coefficient_bands;
};

RomModel offline_train(const ProblemSpec &spec, const Discretization &disc,
                       const SampleDesign &design, const RomMode &mode,
                       const OfflineOptions &options = {});

Prediction online_predict(const RomModel &model, const ParameterPoint &mu);

struct ErrorRow
{
  ParameterPoint mu;
  int k = 1;
  double lambda_fem = 0.0;
  double lambda_dd = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double vec_inf_err = 0.0;
  double vec_l2_rel_err = 0.0;
  bool covered = false;
  bool fom_failed = false;
  std::string message;
};

struct ErrorReport
{
  std::vector<ErrorRow> rows;
  double max_lambda_err = 0.0;
  double mean_lambda_err = 0.0;
  double max_lambda_rel_err = 0.0;
  double max_vec_inf_err = 0.0;
  double max_vec_l2_rel_err = 0.0;
  double coverage = 0.0;  // fraction of rows whose FEM value lies in the band
  int fom_failures = 0;
};

ErrorReport evaluate(const RomModel &model, const SampleDesign &test, int jobs = 1);

// ErrorReport columns: mu_1..mu_d, k, lambda_fem, lambda_dd, lambda_lo, lambda_hi,
// vec_inf_err, vec_l2_rel_err.
void write_error_report(const ErrorReport &report, const std::string &path);

nlohmann::json to_json(const RomModel &model);
RomModel rom_from_json(const nlohmann::json &j);

void save(const RomModel &model, const std::string &path);
RomModel load(const std::string &path);

}  // namespace eigenrom

#endif  // EIGENROM_ROM_HPP
