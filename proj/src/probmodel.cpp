#include "strkm/probmodel.hpp"

#include <cmath>
#include <numbers>

#include "strkm/errors.hpp"

namespace strkm {

void GaussianLatent::validate() const {
  const Eigen::Index m = u.dim();
  if (lambda.size() != m || latent_mean.size() != m) throw ShapeError("GaussianLatent: size mismatch");
  if (!(sigma >= 0.0) || !(delta >= 0.0)) throw ConfigError("GaussianLatent: sigma, delta >= 0");
  if ((lambda.array() < 0.0).any()) throw ContractError("GaussianLatent: lambda must be >= 0");
}

Mat GaussianLatent::covariance() const {
  validate();
  const Mat& um = u.matrix();
  const Eigen::Index l = um.rows();
  const Vec v = code_variances();
  Mat s = um * v.asDiagonal() * um.transpose();
  s += delta * delta * (Mat::Identity(l, l) - um * um.transpose());
  return 0.5 * (s + s.transpose());
}

Mat GaussianLatent::precision() const {
  validate();
  const Vec v = code_variances();
  if (!(delta > 0.0) || (v.array() <= 0.0).any()) {
    throw DegeneracyError("latent covariance is singular (delta or lambda + sigma^2 is zero)");
  }
  const Mat& um = u.matrix();
  const Eigen::Index l = um.rows();
  Mat p = um * v.cwiseInverse().asDiagonal() * um.transpose();
  p += (Mat::Identity(l, l) - um * um.transpose()) / (delta * delta);
  return 0.5 * (p + p.transpose());
}

double GaussianLatent::log_det() const {
  validate();
  const Vec v = code_variances();
  if (!(delta > 0.0) || (v.array() <= 0.0).any()) {
    throw DegeneracyError("latent covariance is singular (delta or lambda + sigma^2 is zero)");
  }
  const double perp = static_cast<double>(u.ambient_dim() - u.dim());
  return v.array().log().sum() + perp * std::log(delta * delta);
}

void ElboParams::validate() const {
  if (!(gamma > 0.0) || !(sigma0_sq > 0.0) || !(sigma > 0.0) || !(delta > 0.0)) {
    throw ConfigError("ELBO parameters gamma, sigma0^2, sigma, delta must be > 0");
  }
}

double kl_qU_q(const Vec& phi, const StiefelPoint& u, const ElboParams& p) {
  p.validate();
  const Mat& um = u.matrix();
  if (phi.size() != um.rows()) throw ShapeError("kl_qU_q: phi does not match U");
  const double l = static_cast<double>(um.rows());
  const double m = static_cast<double>(um.cols());
  const double g2 = p.gamma * p.gamma, s2 = p.sigma * p.sigma, d2 = p.delta * p.delta;
  const Vec perp = phi - um * (um.transpose() * phi);
  const double log_ratio = l * std::log(g2) - m * std::log(s2) - (l - m) * std::log(d2);
  return 0.5 * ((m * s2 + (l - m) * d2) / g2 + perp.squaredNorm() / g2 - l + log_ratio);
}

double kl_qU_prior(const Vec& phi, const GaussianLatent& prior, const ElboParams& p) {
  p.validate();
  if (!(prior.delta > 0.0)) throw DegeneracyError("kl_qU_prior: prior delta must be > 0");
  const Mat& um = prior.u.matrix();
  if (phi.size() != um.rows()) throw ShapeError("kl_qU_prior: phi does not match U");
  const double l = static_cast<double>(um.rows());
  const double m = static_cast<double>(um.cols());
  const double s2 = p.sigma * p.sigma, d2 = p.delta * p.delta, pd2 = prior.delta * prior.delta;
  const Vec v = prior.code_variances();
  if ((v.array() <= 0.0).any()) throw DegeneracyError("kl_qU_prior: singular prior");
  // Everything diagonalizes in the U-basis.
  const double trace = (s2 * v.cwiseInverse()).sum() + (l - m) * d2 / pd2;
  const Vec h = um.transpose() * phi - prior.latent_mean;
  const double quad = h.cwiseAbs2().cwiseQuotient(v).sum();
  const double log_det = v.array().log().sum() + (l - m) * std::log(pd2);
  return 0.5 * (trace + quad + log_det - l - m * std::log(s2) - (l - m) * std::log(d2));
}

LowerBound lower_bound(const StRkmModel& model, const Mat& images, const ElboParams& p,
                       int mc_samples, std::uint64_t seed) {
  p.validate();
  if (!model.corrected()) throw ContractError("lower_bound: model has no principal values");
  if (images.rows() < 1) throw ContractError("lower_bound: empty batch");
  if (mc_samples < 1) throw ConfigError("lower_bound: mc_samples must be >= 1");
  const GaussianLatent prior = fit_latent_prior(model, images, p.sigma, p.delta);
  const Mat& um = model.u.matrix();
  const Eigen::Index n = images.rows(), l = um.rows(), m = um.cols();
  const double d = static_cast<double>(images.cols());

  const Mat phi = encode_batch(model, images);
  const Mat z0 = phi * um * um.transpose();
  Rng eps_rng(seed, 1), perp_rng(seed, 2);
  double sq = 0.0;
  for (int s = 0; s < mc_samples; ++s) {
    const Mat eps = randn(n, m, eps_rng);
    Mat xi = randn(n, l, perp_rng);
    xi -= (xi * um) * um.transpose();
    const Mat z = z0 + p.sigma * eps * um.transpose() + p.delta * xi;
    sq += (images - model.decoder.forward_batch(z)).squaredNorm();
  }
  LowerBound lb;
  lb.term1 = -sq / (static_cast<double>(n) * mc_samples) / (2.0 * p.sigma0_sq) -
             0.5 * d * std::log(2.0 * std::numbers::pi * p.sigma0_sq);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec f = phi.row(i).transpose();
    lb.term2 += kl_qU_q(f, model.u, p);
    lb.term3 += kl_qU_prior(f, prior, p);
  }
  lb.term2 /= static_cast<double>(n);
  lb.term3 /= static_cast<double>(n);
  lb.total = lb.term1 - lb.term2 - lb.term3;
  return lb;
}

GaussianLatent fit_code_prior(const Mat& codes, const StiefelPoint& u, double sigma, double delta) {
  if (codes.rows() < 1) throw ContractError("fit_code_prior: empty dataset");
  if (codes.cols() != u.dim()) throw ShapeError("fit_code_prior: codes do not match U");
  const Vec mean = codes.colwise().mean().transpose();
  const Mat c = codes.rowwise() - mean.transpose();
  const Vec var = c.colwise().squaredNorm().transpose() / static_cast<double>(codes.rows());
  GaussianLatent g{u, var, sigma, delta, mean};
  g.validate();
  return g;
}

GaussianLatent fit_latent_prior(const StRkmModel& model, const Mat& images, double sigma,
                                double delta) {
  if (!model.corrected()) throw ContractError("fit_latent_prior: model has no principal values");
  if (images.rows() < 1) throw ContractError("fit_latent_prior: empty dataset");
  const Mat codes = latent_codes(model, images);
  GaussianLatent g{model.u, model.principal_values, sigma, delta,
                   codes.colwise().mean().transpose()};
  g.validate();
  return g;
}

GaussianLatent stored_latent_prior(const StRkmModel& model, double sigma, double delta) {
  if (!model.corrected()) throw ContractError("stored_latent_prior: model has no principal values");
  GaussianLatent g{model.u, model.principal_values, sigma, delta,
                   model.u.matrix().transpose() * model.feature_mean};
  g.validate();
  return g;
}

Mat generate(const StRkmModel& model, const GaussianLatent& prior, int k, std::uint64_t seed) {
  prior.validate();
  if (k < 0) throw ConfigError("generate: k must be >= 0");
  if (k == 0) return Mat(0, model.input_dim());
  Rng rng(seed);
  const Vec sd = prior.code_variances().cwiseSqrt();
  Mat h = randn(k, prior.u.dim(), rng) * sd.asDiagonal();
  h.rowwise() += prior.latent_mean.transpose();
  return model.decoder.forward_batch(h * prior.u.matrix().transpose());
}

Mat traverse(const StRkmModel& model, const GaussianLatent& prior, int component, double a,
             double b, int steps, bool origin_base) {
  prior.validate();
  if (component < 1 || component > prior.u.dim()) {
    throw ConfigError("traverse: component must lie in [1, m]");
  }
  if (steps < 2) throw ConfigError("traverse: steps must be >= 2");
  if (!std::isfinite(a) || !std::isfinite(b)) throw ConfigError("traverse: range must be finite");
  const Mat& um = prior.u.matrix();
  const Vec base = origin_base ? Vec::Zero(um.rows()) : Vec(um * prior.latent_mean);
  const Vec dir = um.col(component - 1);
  Mat z(steps, um.rows());
  for (int s = 0; s < steps; ++s) {
    const double t = a + (b - a) * s / (steps - 1);
    z.row(s) = (base + t * dir).transpose();
  }
  return model.decoder.forward_batch(z);
}

double traverse_half_width(const GaussianLatent& prior, int component) {
  if (component < 1 || component > prior.u.dim()) {
    throw ConfigError("traverse: component must lie in [1, m]");
  }
  return 3.0 * std::sqrt(prior.code_variances()[component - 1]);
}

}  // namespace strkm
