// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/gpr.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>
#include "eigenrom/error.hpp"
#include "eigenrom/rng.hpp"

namespace eigenrom
{

namespace
{

struct Evaluation
{
  LikelihoodResult result;
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd alpha;
};

Eigen::MatrixXd mean_basis(const Eigen::MatrixXd &x)
{
  Eigen::MatrixXd h(x.rows(), x.cols() + 1);
  h.col(0).setOnes();
  h.rightCols(x.cols()) = x;
  return h;
}

Evaluation evaluate(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                    const Hyperparameters &hyper, const std::optional<Eigen::VectorXd> &fixed_mean,
                    bool with_gradient)
{
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  EIGENROM_VERIFY(y.size() == n, InvalidInput, "GP has ", n, " inputs but ", y.size(), " targets");
  EIGENROM_VERIFY(hyper.dim() == d, InvalidInput, "GP hyperparameters have ", hyper.dim(),
                  " lengthscales for ", d, "-dimensional inputs");

  const Eigen::MatrixXd kk = kernel_matrix(x, x, hyper);
  Eigen::MatrixXd ky = kk;
  ky.diagonal().array() += hyper.noise_variance;
  CovarianceFactor cf = factor_covariance(std::move(ky));

  Evaluation ev;
  const Eigen::MatrixXd h = mean_basis(x);
  if (fixed_mean)
  {
    EIGENROM_VERIFY(fixed_mean->size() == d + 1, InvalidInput, "mean needs ", d + 1,
                    " coefficients");
    ev.result.mean_coeffs = *fixed_mean;
  }
  else
  {
    const Eigen::MatrixXd kih = cf.llt.solve(h);
    const Eigen::MatrixXd a = h.transpose() * kih;
    Eigen::LLT<Eigen::MatrixXd> allt(a);
    EIGENROM_VERIFY(allt.info() == Eigen::Success, NumericalFailure,
                    "linear mean basis is rank deficient on the training inputs");
    ev.result.mean_coeffs = allt.solve(kih.transpose() * y);
  }
  const Eigen::VectorXd r = y - h * ev.result.mean_coeffs;
  ev.alpha = cf.llt.solve(r);
  const Eigen::MatrixXd l = cf.llt.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  ev.result.value =
      -0.5 * r.dot(ev.alpha) - 0.5 * logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
  ev.result.jitter = cf.jitter;
  EIGENROM_VERIFY(std::isfinite(ev.result.value), NumericalFailure,
                  "log likelihood is not finite");

  if (with_gradient)
  {
    const Eigen::MatrixXd kinv = cf.llt.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd w = ev.alpha * ev.alpha.transpose() - kinv;
    ev.result.gradient.resize(d + 2);
    for (int i = 0; i < d; i++)
    {
      const double inv_l2 = 1.0 / (hyper.lengthscales(i) * hyper.lengthscales(i));
      double acc = 0.0;
      for (int b = 0; b < n; b++)
      {
        for (int a = 0; a < n; a++)
        {
          const double diff = x(a, i) - x(b, i);
          acc += w(a, b) * kk(a, b) * diff * diff * inv_l2;
        }
      }
      ev.result.gradient(i) = 0.5 * acc;
    }
    ev.result.gradient(d) = (w.array() * kk.array()).sum();
    ev.result.gradient(d + 1) = (hyper.noise_variance - kNoiseFloor) * w.trace();
  }
  ev.llt = std::move(cf.llt);
  return ev;
}

using Vec = Eigen::VectorXd;

struct Optimum
{
  Vec x;
  double f = std::numeric_limits<double>::infinity();
};

// Projected quasi-Newton minimization of a smooth function over a box. eval
// returns false when the function cannot be evaluated at a point.
template <typename Eval>
std::optional<Optimum> minimize_box(Eval &&eval, Vec x, const Vec &lo, const Vec &hi,
                                    int max_iterations, double gtol)
{
  const int n = static_cast<int>(x.size());
  x = x.cwiseMax(lo).cwiseMin(hi);
  double f;
  Vec g;
  if (!eval(x, f, g))
  {
    return std::nullopt;
  }
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;

  for (int it = 0; it < max_iterations; it++)
  {
    std::vector<char> active(n, 0);
    Vec pg = g;
    for (int i = 0; i < n; i++)
    {
      if ((x(i) <= lo(i) && g(i) > 0.0) || (x(i) >= hi(i) && g(i) < 0.0))
      {
        active[i] = 1;
        pg(i) = 0.0;
      }
    }
    if (pg.lpNorm<Eigen::Infinity>() < gtol)
    {
      break;
    }
    Vec dir = -(hinv * pg);
    for (int i = 0; i < n; i++)
    {
      if (active[i])
      {
        dir(i) = 0.0;
      }
    }
    if (dir.dot(pg) >= 0.0)
    {
      hinv.setIdentity();
      dir = -pg;
    }

    double step = 1.0, fn = 0.0;
    Vec xn, gn;
    bool accepted = false;
    for (int ls = 0; ls < 50; ls++)
    {
      xn = (x + step * dir).cwiseMax(lo).cwiseMin(hi);
      if (eval(xn, fn, gn) && fn <= f + 1e-4 * g.dot(xn - x))
      {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
    {
      break;
    }

    const Vec s = xn - x;
    const Vec yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm())
    {
      if (!scaled)
      {
        hinv *= sy / yv.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * yv.transpose();
      hinv = left * hinv * left.transpose() + rho * s * s.transpose();
    }
    const double df = f - fn;
    x = xn;
    f = fn;
    g = gn;
    if (df <= 1e-13 * (1.0 + std::abs(f)) && s.lpNorm<Eigen::Infinity>() < 1e-10)
    {
      break;
    }
  }
  return Optimum{x, f};
}

}  // namespace

Eigen::VectorXd to_log_params(const Hyperparameters &hyper)
{
  const int d = hyper.dim();
  Eigen::VectorXd eta(d + 2);
  eta.head(d) = hyper.lengthscales.array().log();
  eta(d) = 0.5 * std::log(hyper.signal_variance);
  const double extra = std::max(hyper.noise_variance - kNoiseFloor, 1e-300);
  eta(d + 1) = 0.5 * std::log(extra);
  return eta;
}

Hyperparameters from_log_params(const Eigen::VectorXd &eta)
{
  const int d = static_cast<int>(eta.size()) - 2;
  EIGENROM_VERIFY(d >= 1, InvalidInput, "log-parameter vector too short");
  Hyperparameters h;
  h.lengthscales = eta.head(d).array().exp();
  h.signal_variance = std::exp(2.0 * eta(d));
  h.noise_variance = kNoiseFloor + std::exp(2.0 * eta(d + 1));
  h.mean_coeffs = Eigen::VectorXd::Zero(d + 1);
  return h;
}

double kernel(const Eigen::VectorXd &x, const Eigen::VectorXd &xp, const Hyperparameters &hyper)
{
  EIGENROM_VERIFY(x.size() == xp.size() && x.size() == hyper.dim(), InvalidInput,
                  "kernel argument dimensions do not match");
  double r2 = 0.0;
  for (int i = 0; i < x.size(); i++)
  {
    const double t = (x(i) - xp(i)) / hyper.lengthscales(i);
    r2 += t * t;
  }
  return hyper.signal_variance * std::exp(-0.5 * r2);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd &x1, const Eigen::MatrixXd &x2,
                              const Hyperparameters &hyper)
{
  EIGENROM_VERIFY(x1.cols() == x2.cols() && x1.cols() == hyper.dim(), InvalidInput,
                  "kernel argument dimensions do not match");
  Eigen::MatrixXd k(x1.rows(), x2.rows());
  for (int b = 0; b < x2.rows(); b++)
  {
    for (int a = 0; a < x1.rows(); a++)
    {
      double r2 = 0.0;
      for (int i = 0; i < x1.cols(); i++)
      {
        const double t = (x1(a, i) - x2(b, i)) / hyper.lengthscales(i);
        r2 += t * t;
      }
      k(a, b) = hyper.signal_variance * std::exp(-0.5 * r2);
    }
  }
  return k;
}

CovarianceFactor factor_covariance(Eigen::MatrixXd k)
{
  CovarianceFactor cf;
  cf.llt.compute(k);
  if (cf.llt.info() == Eigen::Success)
  {
    return cf;
  }
  const double mean_diag = k.diagonal().mean();
  for (double gamma = 1e-10; gamma <= 1.0000001e-6; gamma *= 10.0)
  {
    const double jitter = gamma * mean_diag;
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    cf.llt.compute(kj);
    if (cf.llt.info() == Eigen::Success)
    {
      cf.jitter = jitter;
      return cf;
    }
  }
  detail::Throw<NumericalFailure>("covariance matrix is singular after the jitter ladder");
}

LikelihoodResult log_marginal_likelihood(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                                         const Hyperparameters &hyper,
                                         const std::optional<Eigen::VectorXd> &fixed_mean,
                                         bool with_gradient)
{
  return evaluate(x, y, hyper, fixed_mean, with_gradient).result;
}

double GprPrediction::lower() const
{
  return mean - 1.96 * std::sqrt(predictive_variance);
}

double GprPrediction::upper() const
{
  return mean + 1.96 * std::sqrt(predictive_variance);
}

GprModel GprModel::from_hyperparameters(const Eigen::MatrixXd &x_raw, const Eigen::VectorXd &y_raw,
                                        const Hyperparameters &hyper,
                                        const Eigen::VectorXd &input_lo,
                                        const Eigen::VectorXd &input_hi, double output_mean,
                                        double output_scale, bool profile_mean)
{
  const int d = static_cast<int>(x_raw.cols());
  EIGENROM_VERIFY(input_lo.size() == d && input_hi.size() == d, InvalidInput,
                  "input box has the wrong dimension");
  EIGENROM_VERIFY((input_hi - input_lo).minCoeff() > 0.0, InvalidInput, "input box is degenerate");
  EIGENROM_VERIFY(output_scale > 0.0, InvalidInput, "output scale must be positive");
  GprModel m;
  m.hyper_ = hyper;
  m.input_lo_ = input_lo;
  m.input_hi_ = input_hi;
  m.output_mean_ = output_mean;
  m.output_scale_ = output_scale;
  m.profile_mean_ = profile_mean;
  m.x_.resize(x_raw.rows(), d);
  for (int a = 0; a < x_raw.rows(); a++)
  {
    m.x_.row(a) = m.normalize(x_raw.row(a).transpose()).transpose();
  }
  m.y_ = (y_raw.array() - output_mean) / output_scale;
  if (!profile_mean && m.hyper_.mean_coeffs.size() != d + 1)
  {
    m.hyper_.mean_coeffs = Eigen::VectorXd::Zero(d + 1);
  }
  m.build();
  return m;
}

void GprModel::build()
{
  std::optional<Eigen::VectorXd> fixed;
  if (!profile_mean_)
  {
    fixed = hyper_.mean_coeffs;
  }
  Evaluation ev = evaluate(x_, y_, hyper_, fixed, false);
  hyper_.mean_coeffs = ev.result.mean_coeffs;
  factor_ = std::move(ev.llt);
  alpha_ = std::move(ev.alpha);
  jitter_ = ev.result.jitter;
  log_likelihood_ = ev.result.value;
}

Eigen::VectorXd GprModel::normalize(const Eigen::VectorXd &x_raw) const
{
  EIGENROM_VERIFY(x_raw.size() == input_lo_.size(), InvalidInput, "query has dimension ",
                  x_raw.size(), ", model expects ", input_lo_.size());
  return ((x_raw - input_lo_).array() / (input_hi_ - input_lo_).array()).matrix();
}

GprPrediction GprModel::predict(const Eigen::VectorXd &x_raw) const
{
  const Eigen::VectorXd xq = normalize(x_raw);
  const int n = num_points();
  Eigen::VectorXd kstar(n);
  for (int a = 0; a < n; a++)
  {
    kstar(a) = kernel(x_.row(a).transpose(), xq, hyper_);
  }
  Eigen::VectorXd hq(dim() + 1);
  hq(0) = 1.0;
  hq.tail(dim()) = xq;
  const double mean_s = hq.dot(hyper_.mean_coeffs) + kstar.dot(alpha_);
  const Eigen::VectorXd v = factor_.matrixL().solve(kstar);
  const double latent_s = hyper_.signal_variance - v.squaredNorm();

  const double s2 = output_scale_ * output_scale_;
  GprPrediction p;
  p.mean = output_mean_ + output_scale_ * mean_s;
  p.raw_latent_variance = latent_s * s2;
  p.latent_variance = std::max(latent_s, 0.0) * s2;
  p.predictive_variance = p.latent_variance + (hyper_.noise_variance + jitter_) * s2;
  return p;
}

nlohmann::json GprModel::to_json() const
{
  nlohmann::json j;
  j["input_lo"] = std::vector<double>(input_lo_.data(), input_lo_.data() + input_lo_.size());
  j["input_hi"] = std::vector<double>(input_hi_.data(), input_hi_.data() + input_hi_.size());
  j["output_mean"] = output_mean_;
  j["output_scale"] = output_scale_;
  j["profile_mean"] = profile_mean_;
  nlohmann::json xs = nlohmann::json::array();
  for (int a = 0; a < x_.rows(); a++)
  {
    std::vector<double> row(x_.cols());
    for (int i = 0; i < x_.cols(); i++)
    {
      row[i] = x_(a, i);
    }
    xs.push_back(row);
  }
  j["x"] = xs;
  j["y"] = std::vector<double>(y_.data(), y_.data() + y_.size());
  j["hyperparameters"] = {
      {"mean_coeffs", std::vector<double>(hyper_.mean_coeffs.data(),
                                          hyper_.mean_coeffs.data() + hyper_.mean_coeffs.size())},
      {"signal_variance", hyper_.signal_variance},
      {"lengthscales", std::vector<double>(hyper_.lengthscales.data(),
                                           hyper_.lengthscales.data() + hyper_.lengthscales.size())},
      {"noise_variance", hyper_.noise_variance}};
  j["jitter"] = jitter_;
  j["log_likelihood"] = log_likelihood_;
  return j;
}

GprModel GprModel::from_json(const nlohmann::json &j)
{
  auto vec = [](const nlohmann::json &a)
  {
    const auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
  };
  try
  {
    GprModel m;
    m.input_lo_ = vec(j.at("input_lo"));
    m.input_hi_ = vec(j.at("input_hi"));
    m.output_mean_ = j.at("output_mean").get<double>();
    m.output_scale_ = j.at("output_scale").get<double>();
    m.profile_mean_ = j.at("profile_mean").get<bool>();
    const auto &xs = j.at("x");
    const int d = static_cast<int>(m.input_lo_.size());
    m.x_.resize(xs.size(), d);
    for (size_t a = 0; a < xs.size(); a++)
    {
      const auto row = xs[a].get<std::vector<double>>();
      EIGENROM_VERIFY(static_cast<int>(row.size()) == d, FormatError, "GP input row ", a,
                      " has the wrong dimension");
      for (int i = 0; i < d; i++)
      {
        m.x_(a, i) = row[i];
      }
    }
    m.y_ = vec(j.at("y"));
    const auto &h = j.at("hyperparameters");
    m.hyper_.mean_coeffs = vec(h.at("mean_coeffs"));
    m.hyper_.signal_variance = h.at("signal_variance").get<double>();
    m.hyper_.lengthscales = vec(h.at("lengthscales"));
    m.hyper_.noise_variance = h.at("noise_variance").get<double>();
    EIGENROM_VERIFY(m.hyper_.signal_variance > 0.0 && m.hyper_.lengthscales.size() == d &&
                        m.hyper_.lengthscales.minCoeff() > 0.0 &&
                        m.hyper_.noise_variance >= kNoiseFloor &&
                        m.hyper_.mean_coeffs.size() == d + 1,
                    FormatError, "GP hyperparameters are invalid");
    EIGENROM_VERIFY(m.y_.size() == m.x_.rows() && m.output_scale_ > 0.0 &&
                        (m.input_hi_ - m.input_lo_).minCoeff() > 0.0,
                    FormatError, "GP data block is inconsistent");

    const Eigen::VectorXd stored_mean = m.hyper_.mean_coeffs;
    const double stored_ll = j.at("log_likelihood").get<double>();
    m.build();
    EIGENROM_VERIFY(std::abs(m.log_likelihood_ - stored_ll) <= 1e-8 * std::max(1.0, std::abs(stored_ll)),
                    FormatError, "GP log likelihood ", m.log_likelihood_,
                    " does not reproduce the stored value ", stored_ll);
    EIGENROM_VERIFY((m.hyper_.mean_coeffs - stored_mean).lpNorm<Eigen::Infinity>() <=
                        1e-8 * (1.0 + stored_mean.lpNorm<Eigen::Infinity>()),
                    FormatError, "GP mean coefficients do not reproduce the stored values");
    return m;
  }
  catch (const nlohmann::json::exception &e)
  {
    detail::Throw<FormatError>("malformed GP model: ", e.what());
  }
  catch (const NumericalFailure &e)
  {
    detail::Throw<FormatError>("GP model cannot be rebuilt: ", e.what());
  }
}

GprModel fit(const Eigen::MatrixXd &x_raw, const Eigen::VectorXd &y_raw,
             const GprFitConfig &config, const Eigen::VectorXd &box_lo,
             const Eigen::VectorXd &box_hi)
{
  const int n = static_cast<int>(x_raw.rows());
  const int d = static_cast<int>(x_raw.cols());
  EIGENROM_VERIFY(n >= 2, InvalidInput, "GP fit needs at least 2 points, got ", n);
  EIGENROM_VERIFY(d >= 1, InvalidInput, "GP inputs need at least one dimension");
  EIGENROM_VERIFY(y_raw.size() == n, InvalidInput, "GP has ", n, " inputs but ", y_raw.size(),
                  " targets");
  EIGENROM_VERIFY(x_raw.allFinite() && y_raw.allFinite(), InvalidInput,
                  "GP training data is not finite");
  EIGENROM_VERIFY(config.starts >= 1, InvalidInput, "GP fit needs at least one start");

  Eigen::VectorXd lo = box_lo, hi = box_hi;
  if (lo.size() == 0)
  {
    lo = x_raw.colwise().minCoeff().transpose();
    hi = x_raw.colwise().maxCoeff().transpose();
    for (int i = 0; i < d; i++)
    {
      if (hi(i) <= lo(i))
      {
        hi(i) = lo(i) + 1.0;
      }
    }
  }
  EIGENROM_VERIFY(lo.size() == d && hi.size() == d, InvalidInput, "GP input box dimension mismatch");
  for (int a = 0; a < n; a++)
  {
    for (int i = 0; i < d; i++)
    {
      const double slack = 1e-12 * (hi(i) - lo(i));
      EIGENROM_VERIFY(x_raw(a, i) >= lo(i) - slack && x_raw(a, i) <= hi(i) + slack, InvalidInput,
                      "GP training input ", a, " lies outside the declared box");
    }
  }

  const double mean = y_raw.mean();
  const double sd = std::sqrt((y_raw.array() - mean).square().sum() / n);
  const double scale = sd > 0.0 ? sd : 1.0;

  Eigen::MatrixXd xn(n, d);
  for (int i = 0; i < d; i++)
  {
    xn.col(i) = (x_raw.col(i).array() - lo(i)) / (hi(i) - lo(i));
  }
  const Eigen::VectorXd ys = (y_raw.array() - mean) / scale;

  Eigen::VectorXd blo(d + 2), bhi(d + 2);
  blo.head(d).setConstant(std::log(1e-3));
  bhi.head(d).setConstant(std::log(1e3));
  blo(d) = std::log(1e-8);
  bhi(d) = std::log(1e4);
  blo(d + 1) = std::log(1e-9);
  bhi(d + 1) = std::log(10.0);

  auto objective = [&](const Eigen::VectorXd &eta, double &f, Eigen::VectorXd &g)
  {
    try
    {
      const LikelihoodResult r = log_marginal_likelihood(xn, ys, from_log_params(eta));
      if (!std::isfinite(r.value) || !r.gradient.allFinite())
      {
        return false;
      }
      f = -r.value;
      g = -r.gradient;
      return true;
    }
    catch (const NumericalFailure &)
    {
      return false;
    }
  };

  SplitMix64 rng(config.seed);
  std::optional<Optimum> best;
  for (int s = 0; s < config.starts; s++)
  {
    Eigen::VectorXd eta(d + 2);
    if (s == 0)
    {
      eta.head(d).setConstant(std::log(0.5));
      eta(d) = 0.0;
      eta(d + 1) = std::log(1e-2);
    }
    else
    {
      for (int i = 0; i < d; i++)
      {
        eta(i) = rng.Uniform(std::log(1e-2), std::log(10.0));
      }
      eta(d) = rng.Uniform(std::log(0.1), std::log(10.0));
      eta(d + 1) = rng.Uniform(std::log(1e-6), 0.0);
    }
    const auto opt =
        minimize_box(objective, eta, blo, bhi, config.max_iterations, config.gradient_tolerance);
    if (opt && (!best || opt->f < best->f))
    {
      best = opt;
    }
  }
  EIGENROM_VERIFY(best.has_value(), NumericalFailure, "every GP fit start failed to factor");

  const Hyperparameters hyper = from_log_params(best->x);
  return GprModel::from_hyperparameters(x_raw, y_raw, hyper, lo, hi, mean, scale, true);
}

}  // namespace eigenrom
