#pragma once

#include <cstdint>

#include "strkm/model.hpp"

namespace strkm {

// Latent prior N(mu, Sigma) with Sigma = U (diag(lambda) + sigma^2 I) U^T
// + delta^2 P_perp. In code coordinates h = U^T z the prior is
// N(latent_mean, diag(lambda) + sigma^2 I); mu = U latent_mean.
struct GaussianLatent {
  StiefelPoint u;
  Vec lambda;
  double sigma = 0.0;
  double delta = 1e-6;
  Vec latent_mean;  // m

  void validate() const;
  Mat covariance() const;
  // Via the U-basis; throws DegeneracyError unless delta > 0 and every
  // lambda_j + sigma^2 > 0.
  Mat precision() const;
  double log_det() const;
  Vec code_variances() const { return lambda.array() + sigma * sigma; }
};

// gamma: std of the encoder density q = N(phi, gamma^2 I); sigma0_sq:
// decoder variance (fixed at 1/2); sigma, delta: q_U = N(P_U phi,
// sigma^2 P_U + delta^2 P_perp).
struct ElboParams {
  double gamma = 1.0;
  double sigma0_sq = 0.5;
  double sigma = 1e-3;
  double delta = 1e-6;

  void validate() const;
};

double kl_qU_q(const Vec& phi, const StiefelPoint& u, const ElboParams& p);

// KL(q_U || N(U latent_mean, Sigma)). Uses the prior's U, lambda and
// delta; sigma comes from the ElboParams.
double kl_qU_prior(const Vec& phi, const GaussianLatent& prior, const ElboParams& p);

struct LowerBound {
  double term1 = 0.0;  // E_{q_U} log p(x|z), constants included
  double term2 = 0.0;  // KL(q_U || q)
  double term3 = 0.0;  // KL(q_U || prior)
  double total = 0.0;  // I - II - III
};

// Batch means of the three terms. Term I is Monte Carlo with `mc_samples`
// draws z = P_U phi + sigma U eps + delta P_perp xi per point.
LowerBound lower_bound(const StRkmModel& model, const Mat& images, const ElboParams& p,
                       int mc_samples, std::uint64_t seed);

// Prior from code samples (rows of codes = U^T phi): mean and per-coordinate
// population variance as lambda.
GaussianLatent fit_code_prior(const Mat& codes, const StiefelPoint& u, double sigma, double delta);

// Prior with latent_mean = mean of U^T phi(x_i) and lambda = the corrected
// principal values.
GaussianLatent fit_latent_prior(const StRkmModel& model, const Mat& images, double sigma,
                                double delta = 1e-6);

// Prior from the stored feature mean alone: latent_mean = U^T mean, which
// equals the mean code over the data the model was corrected on.
GaussianLatent stored_latent_prior(const StRkmModel& model, double sigma, double delta = 1e-6);

// k decoded samples psi(U h), h ~ N(latent_mean, diag(lambda) + sigma^2 I).
Mat generate(const StRkmModel& model, const GaussianLatent& prior, int k, std::uint64_t seed);

// Decodes base + t_s u_i for `steps` equally spaced t in [a, b]; component
// is 1-based. The base is U latent_mean, or the origin if origin_base.
Mat traverse(const StRkmModel& model, const GaussianLatent& prior, int component, double a,
             double b, int steps, bool origin_base = false);

// Default traversal half-width 3 sqrt(lambda_i + sigma^2).
double traverse_half_width(const GaussianLatent& prior, int component);

}  // namespace strkm
