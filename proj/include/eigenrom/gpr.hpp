// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_GPR_HPP
#define EIGENROM_GPR_HPP

#include <cstdint>
#include <optional>
#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <json.hpp>

namespace eigenrom
{

// Noise variance floor in standardized output units.
inline constexpr double kNoiseFloor = 1e-12;

//
// Linear-mean ARD squared-exponential GP hyperparameters, in normalized input and
// standardized output units. noise_variance includes the floor.
//
struct Hyperparameters
{
  Eigen::VectorXd mean_coeffs;  // [constant, slope_1, ..., slope_d]
  double signal_variance = 1.0;
  Eigen::VectorXd lengthscales;
  double noise_variance = kNoiseFloor + 1e-4;

  int dim() const { return static_cast<int>(lengthscales.size()); }
};

//
// Log-parameter vector used for optimization: log l_1..log l_d, log sigma_1 and
// log s with noise_variance = floor + s^2.
//
Eigen::VectorXd to_log_params(const Hyperparameters &hyper);
Hyperparameters from_log_params(const Eigen::VectorXd &eta);

// sigma_1^2 exp(-1/2 sum (x_i - x'_i)^2 / l_i^2).
double kernel(const Eigen::VectorXd &x, const Eigen::VectorXd &xp, const Hyperparameters &hyper);

// Kernel matrix between row sets.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd &x1, const Eigen::MatrixXd &x2,
                              const Hyperparameters &hyper);

// Cholesky factor of K_y with the jitter ladder applied on failure.
struct CovarianceFactor
{
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;  // absolute amount added to the diagonal
};

CovarianceFactor factor_covariance(Eigen::MatrixXd k);

struct LikelihoodResult
{
  double value = 0.0;
  Eigen::VectorXd gradient;     // with respect to to_log_params()
  Eigen::VectorXd mean_coeffs;  // profiled or fixed mean used
  double jitter = 0.0;
};

//
// Log marginal likelihood of y given X. With fixed_mean the mean coefficients are
// taken as given; otherwise they are profiled out by generalized least squares.
// Throws NumericalFailure when the covariance cannot be factored.
//
LikelihoodResult log_marginal_likelihood(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                                         const Hyperparameters &hyper,
                                         const std::optional<Eigen::VectorXd> &fixed_mean = {},
                                         bool with_gradient = true);

struct GprFitConfig
{
  int starts = 8;
  std::uint64_t seed = 1;
  int max_iterations = 200;
  double gradient_tolerance = 1e-7;
};

struct GprPrediction
{
  double mean = 0.0;
  double latent_variance = 0.0;      // clamped at zero
  double predictive_variance = 0.0;  // latent + noise
  double raw_latent_variance = 0.0;  // before clamping, output units

  double lower() const;
  double upper() const;
};

class GprModel
{
public:
  GprModel() = default;

  // Build from fixed hyperparameters. x_raw has one training input per row.
  static GprModel from_hyperparameters(const Eigen::MatrixXd &x_raw, const Eigen::VectorXd &y_raw,
                                       const Hyperparameters &hyper,
                                       const Eigen::VectorXd &input_lo,
                                       const Eigen::VectorXd &input_hi, double output_mean,
                                       double output_scale, bool profile_mean = true);

  GprPrediction predict(const Eigen::VectorXd &x_raw) const;

  const Hyperparameters &hyper() const { return hyper_; }
  double log_likelihood() const { return log_likelihood_; }
  double jitter() const { return jitter_; }
  int dim() const { return static_cast<int>(x_.cols()); }
  int num_points() const { return static_cast<int>(x_.rows()); }
  const Eigen::MatrixXd &normalized_inputs() const { return x_; }
  const Eigen::VectorXd &standardized_targets() const { return y_; }
  double output_mean() const { return output_mean_; }
  double output_scale() const { return output_scale_; }

  nlohmann::json to_json() const;
  // Rebuilds the factorization and checks the stored likelihood.
  static GprModel from_json(const nlohmann::json &j);

private:
  void build();
  Eigen::VectorXd normalize(const Eigen::VectorXd &x_raw) const;

  Hyperparameters hyper_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd input_lo_, input_hi_;
  double output_mean_ = 0.0, output_scale_ = 1.0;
  bool profile_mean_ = true;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  double log_likelihood_ = 0.0;
};

//
// Maximum-likelihood fit. Inputs are normalized by the given box (the data range
// when empty) and targets standardized to zero mean and unit variance.
//
GprModel fit(const Eigen::MatrixXd &x_raw, const Eigen::VectorXd &y_raw,
             const GprFitConfig &config = {}, const Eigen::VectorXd &box_lo = {},
             const Eigen::VectorXd &box_hi = {});

}  // namespace eigenrom

#endif  // EIGENROM_GPR_HPP
