// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <doctest.h>
#include <Eigen/Cholesky>
#include "eigenrom/error.hpp"
#include "eigenrom/gpr.hpp"
#include "eigenrom/rng.hpp"

using namespace eigenrom;

namespace
{

Hyperparameters hyper_1d(double sigma1_sq, double l, double noise)
{
  Hyperparameters h;
  h.signal_variance = sigma1_sq;
  h.lengthscales = Eigen::VectorXd::Constant(1, l);
  h.noise_variance = noise;
  h.mean_coeffs = Eigen::VectorXd::Zero(2);
  return h;
}

Eigen::MatrixXd random_inputs(SplitMix64 &rng, int n, int d)
{
  return Eigen::MatrixXd::NullaryExpr(n, d, [&] { return rng.Uniform(); });
}

Eigen::VectorXd unit_lo(int d)
{
  return Eigen::VectorXd::Zero(d);
}

Eigen::VectorXd unit_hi(int d)
{
  return Eigen::VectorXd::Ones(d);
}

}  // namespace

TEST_CASE("kernel values")
{
  const Hyperparameters h = hyper_1d(1.0, 1.0, kNoiseFloor);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 0.3), b = Eigen::VectorXd::Constant(1, 1.3);
  CHECK(kernel(a, a, h) == 1.0);
  CHECK(kernel(a, b, h) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(kernel(a, b, h) == doctest::Approx(0.606531).epsilon(1e-6));

  SplitMix64 rng(1);
  Hyperparameters h3;
  h3.signal_variance = 2.5;
  h3.lengthscales = Eigen::Vector3d(0.2, 1.0, 3.0);
  for (int t = 0; t < 100; t++)
  {
    const Eigen::VectorXd x = random_inputs(rng, 3, 1), y = random_inputs(rng, 3, 1);
    const double k = kernel(x, y, h3);
    CHECK(k == kernel(y, x, h3));
    CHECK(k > 0.0);
    CHECK(k <= 2.5);
  }
  CHECK_THROWS_AS(kernel(a, Eigen::Vector2d::Zero(), h), InvalidInput);
}

TEST_CASE("log-parameter mapping round-trips")
{
  Hyperparameters h;
  h.lengthscales = Eigen::Vector2d(0.3, 4.0);
  h.signal_variance = 0.7;
  h.noise_variance = kNoiseFloor + 2.5e-5;
  h.mean_coeffs = Eigen::Vector3d::Zero();
  const Eigen::VectorXd eta = to_log_params(h);
  REQUIRE(eta.size() == 4);
  const Hyperparameters back = from_log_params(eta);
  CHECK(back.lengthscales(0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(back.lengthscales(1) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(back.signal_variance == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(back.noise_variance == doctest::Approx(h.noise_variance).epsilon(1e-12));
}

TEST_CASE("single-point likelihood")
{
  Eigen::MatrixXd x(1, 1);
  x << 0.4;
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  const Hyperparameters h = hyper_1d(1.0 - kNoiseFloor, 1.0, kNoiseFloor);
  const LikelihoodResult r = log_marginal_likelihood(x, y, h, Eigen::VectorXd(Eigen::VectorXd::Zero(2)));
  CHECK(r.value == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(-0.918939).epsilon(1e-6));
}

TEST_CASE("likelihood gradient matches central differences")
{
  SplitMix64 rng(12);
  for (int d : {1, 2})
  {
    for (int trial = 0; trial < 10; trial++)
    {
      const int n = d == 1 ? 5 : 9;
      const Eigen::MatrixXd x = random_inputs(rng, n, d);
      Eigen::VectorXd y(n);
      for (int i = 0; i < n; i++)
      {
        y(i) = std::sin(3 * x(i, 0)) + rng.Uniform(-0.3, 0.3);
      }
      Eigen::VectorXd eta(d + 2);
      for (int i = 0; i < d; i++)
      {
        eta(i) = std::log(rng.Uniform(0.1, 2.0));
      }
      eta(d) = std::log(rng.Uniform(0.5, 2.0));
      eta(d + 1) = std::log(rng.Uniform(0.01, 0.3));
      for (bool profiled : {true, false})
      {
        std::optional<Eigen::VectorXd> fixed;
        if (!profiled)
        {
          fixed = Eigen::VectorXd::Constant(d + 1, 0.2);
        }
        const LikelihoodResult r = log_marginal_likelihood(x, y, from_log_params(eta), fixed);
        const double step = 1e-5;
        for (int k = 0; k < eta.size(); k++)
        {
          Eigen::VectorXd ep = eta, em = eta;
          ep(k) += step;
          em(k) -= step;
          const double fd = (log_marginal_likelihood(x, y, from_log_params(ep), fixed, false).value -
                             log_marginal_likelihood(x, y, from_log_params(em), fixed, false).value) /
                            (2 * step);
          INFO("d = ", d, " k = ", k, " analytic ", r.gradient(k), " fd ", fd);
          CHECK(std::abs(r.gradient(k) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("exact affine mean leaves only the determinant term")
{
  Eigen::MatrixXd x(5, 1);
  x << 0.0, 0.2, 0.5, 0.7, 1.0;
  const Eigen::VectorXd y = (2.0 - 3.0 * x.col(0).array()).matrix();
  const Hyperparameters h = hyper_1d(1.0, 0.4, kNoiseFloor + 1e-6);
  const LikelihoodResult r = log_marginal_likelihood(x, y, h);
  CHECK(r.mean_coeffs(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.mean_coeffs(1) == doctest::Approx(-3.0).epsilon(1e-8));
  Eigen::MatrixXd k = kernel_matrix(x, x, h);
  k.diagonal().array() += h.noise_variance;
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  const double logdet = 2 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double expected = -0.5 * logdet - 2.5 * std::log(2 * std::numbers::pi);
  CHECK(std::abs(r.value - expected) <= 1e-8 * std::abs(expected));
}

TEST_CASE("two-point posterior matches the dense formula")
{
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 1.0;
  const Eigen::Vector2d y(0.0, 1.0);
  const Hyperparameters h = hyper_1d(1.0, 1.0, 1e-4);
  const GprModel m =
      GprModel::from_hyperparameters(x, y, h, unit_lo(1), unit_hi(1), 0.0, 1.0, false);
  const GprPrediction p = m.predict(Eigen::VectorXd::Constant(1, 0.5));

  Eigen::Matrix2d k;
  k << 1.0 + 1e-4, std::exp(-0.5), std::exp(-0.5), 1.0 + 1e-4;
  const Eigen::Vector2d ks(std::exp(-0.125), std::exp(-0.125));
  const Eigen::Vector2d w = k.inverse() * ks;
  CHECK(std::abs(p.mean - w.dot(y)) <= 1e-10);
  CHECK(std::abs(p.latent_variance - (1.0 - ks.dot(w))) <= 1e-10);
  CHECK(std::abs(p.predictive_variance - (1.0 - ks.dot(w) + 1e-4)) <= 1e-10);
  CHECK(p.lower() == doctest::Approx(p.mean - 1.96 * std::sqrt(p.predictive_variance)));
  CHECK(p.upper() == doctest::Approx(p.mean + 1.96 * std::sqrt(p.predictive_variance)));
}

TEST_CASE("interpolation at the noise floor and prior reversion far away")
{
  SplitMix64 rng(31);
  const int n = 8;
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; i++)
  {
    x(i, 0) = (i + rng.Uniform(0.1, 0.9)) / n;
    y(i) = std::cos(4 * x(i, 0));
  }
  Hyperparameters h = hyper_1d(1.0, 0.3, kNoiseFloor);
  for (bool profiled : {true, false})
  {
    const GprModel m =
        GprModel::from_hyperparameters(x, y, h, unit_lo(1), unit_hi(1), 0.0, 1.0, profiled);
    for (int i = 0; i < n; i++)
    {
      CHECK(std::abs(m.predict(x.row(i).transpose()).mean - y(i)) <= 1e-6);
    }
    const GprPrediction far = m.predict(Eigen::VectorXd::Constant(1, 50.0));
    const Eigen::VectorXd &th = m.hyper().mean_coeffs;
    CHECK(far.mean == doctest::Approx(th(0) + th(1) * 50.0).epsilon(1e-12));
    CHECK(far.latent_variance == doctest::Approx(h.signal_variance).epsilon(1e-12));
  }
}

TEST_CASE("posterior variance bounds and monotone conditioning")
{
  SplitMix64 rng(77);
  for (int trial = 0; trial < 20; trial++)
  {
    const int n = 3 + static_cast<int>(rng.Below(8));
    const Eigen::MatrixXd x = random_inputs(rng, n + 1, 1);
    const Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(n + 1, [&] { return rng.Uniform(-1, 1); });
    const Hyperparameters h = hyper_1d(rng.Uniform(0.5, 2.0), rng.Uniform(0.05, 1.0),
                                       kNoiseFloor + rng.Uniform(0.0, 1e-3));
    const GprModel small = GprModel::from_hyperparameters(x.topRows(n), y.head(n), h, unit_lo(1),
                                                          unit_hi(1), 0.0, 1.0);
    const GprModel big = GprModel::from_hyperparameters(x, y, h, unit_lo(1), unit_hi(1), 0.0, 1.0);
    for (int q = 0; q < 50; q++)
    {
      const Eigen::VectorXd xq = Eigen::VectorXd::Constant(1, rng.Uniform(-0.5, 1.5));
      const GprPrediction ps = small.predict(xq), pb = big.predict(xq);
      CHECK(ps.latent_variance <= h.signal_variance + 1e-12);
      CHECK(ps.raw_latent_variance >= -1e-10);
      CHECK(pb.raw_latent_variance >= -1e-10);
      CHECK(pb.latent_variance <= ps.latent_variance + 1e-9);
      CHECK(ps.lower() <= ps.mean);
      CHECK(ps.mean <= ps.upper());
    }
  }
}

TEST_CASE("fit to constant data")
{
  Eigen::MatrixXd x(6, 1);
  x << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(6, 3.25);
  const GprModel m = fit(x, y);
  const double floor_std = std::sqrt(kNoiseFloor);
  for (double q : {1.0, 2.7, 6.0, 0.0, 8.0})
  {
    const GprPrediction p = m.predict(Eigen::VectorXd::Constant(1, q));
    CHECK(p.mean == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(std::sqrt(p.predictive_variance) <= 10 * floor_std * m.output_scale());
  }
}

TEST_CASE("fit to affine data reproduces the law")
{
  Eigen::MatrixXd x(5, 1);
  x << 1.0, 1.5, 2.5, 3.0, 4.0;
  const Eigen::VectorXd y = (0.5 + 1.7 * x.col(0).array()).matrix();
  const GprModel m = fit(x, y);
  for (double q : {1.2, 2.0, 3.7})
  {
    const double expected = 0.5 + 1.7 * q;
    CHECK(std::abs(m.predict(Eigen::VectorXd::Constant(1, q)).mean - expected) <=
          1e-6 * std::abs(expected));
  }
}

TEST_CASE("fit is deterministic and reproduces smooth data")
{
  SplitMix64 rng(4);
  const int n = 15;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; i++)
  {
    x(i, 0) = rng.Uniform(0.1, 0.2);
    x(i, 1) = rng.Uniform(1.0, 8.0);
    y(i) = 30 + 5 * x(i, 0) + std::sin(x(i, 1));
  }
  const Eigen::Vector2d lo(0.1, 1.0), hi(0.2, 8.0);
  GprFitConfig cfg;
  cfg.seed = 123;
  const GprModel a = fit(x, y, cfg, lo, hi);
  const GprModel b = fit(x, y, cfg, lo, hi);
  CHECK(to_log_params(a.hyper()) == to_log_params(b.hyper()));
  CHECK(a.hyper().mean_coeffs == b.hyper().mean_coeffs);
  CHECK(a.log_likelihood() == b.log_likelihood());
  for (int i = 0; i < n; i++)
  {
    CHECK(std::abs(a.predict(x.row(i).transpose()).mean - y(i)) <= 1e-3);
  }
  // Likelihood at the optimum is not improved by small feasible perturbations.
  Eigen::VectorXd lower(4), upper(4);
  lower << std::log(1e-3), std::log(1e-3), std::log(1e-8), std::log(1e-9);
  upper << std::log(1e3), std::log(1e3), std::log(1e4), std::log(10.0);
  const Eigen::MatrixXd xn = a.normalized_inputs();
  const Eigen::VectorXd yn = a.standardized_targets();
  const Eigen::VectorXd eta = to_log_params(a.hyper());
  const double best = log_marginal_likelihood(xn, yn, from_log_params(eta), {}, false).value;
  for (int k = 0; k < eta.size(); k++)
  {
    for (double s : {-1e-3, 1e-3})
    {
      Eigen::VectorXd e = eta;
      e(k) += s;
      if (e(k) < lower(k) || e(k) > upper(k))
      {
        continue;
      }
      INFO("k = ", k, " eta = ", eta(k));
      CHECK(log_marginal_likelihood(xn, yn, from_log_params(e), {}, false).value <= best + 1e-6);
    }
  }
}

TEST_CASE("fit rejects bad input")
{
  Eigen::MatrixXd x(1, 1);
  x << 0.0;
  CHECK_THROWS_AS(fit(x, Eigen::VectorXd::Zero(1)), InvalidInput);
  Eigen::MatrixXd x2(2, 1);
  x2 << 0.0, 2.0;
  CHECK_THROWS_AS(fit(x2, Eigen::VectorXd::Zero(3)), InvalidInput);
  CHECK_THROWS_AS(fit(x2, Eigen::VectorXd::Zero(2), {}, unit_lo(1), unit_hi(1)), InvalidInput);
}

TEST_CASE("jitter ladder")
{
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(4, 4);
  const CovarianceFactor cf = factor_covariance(ones);
  CHECK(cf.jitter > 0.0);
  CHECK(cf.jitter <= 1e-6 * 1.0 + 1e-20);
  CHECK(cf.llt.info() == Eigen::Success);
  CHECK(factor_covariance(Eigen::MatrixXd::Identity(3, 3)).jitter == 0.0);
  CHECK_THROWS_AS(factor_covariance(-Eigen::MatrixXd::Identity(3, 3)), NumericalFailure);
}

TEST_CASE("JSON round trip and tamper detection")
{
  SplitMix64 rng(9);
  Eigen::MatrixXd x(10, 1);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; i++)
  {
    x(i, 0) = 1.0 + 8.0 * i / 9.0;
    y(i) = 0.5 * x(i, 0) + 0.1 * std::sin(x(i, 0));
  }
  const GprModel m = fit(x, y, {}, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 9.0));
  const nlohmann::json j = m.to_json();
  const GprModel back = GprModel::from_json(nlohmann::json::parse(j.dump()));
  for (int t = 0; t < 20; t++)
  {
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(1, rng.Uniform(0.0, 10.0));
    const GprPrediction a = m.predict(q), b = back.predict(q);
    CHECK(std::abs(a.mean - b.mean) <= 1e-12 * std::max(1.0, std::abs(a.mean)));
    CHECK(std::abs(a.predictive_variance - b.predictive_variance) <=
          1e-12 * std::max(1.0, a.predictive_variance));
  }

  nlohmann::json bad = j;
  bad["hyperparameters"]["lengthscales"][0] = bad["hyperparameters"]["lengthscales"][0].get<double>() * 1.5;
  CHECK_THROWS_AS(GprModel::from_json(bad), FormatError);
  nlohmann::json missing = j;
  missing.erase("y");
  CHECK_THROWS_AS(GprModel::from_json(missing), FormatError);
}
