#pragma once

#include <string>
#include <vector>

#include "strkm/model.hpp"
#include "strkm/tape.hpp"

namespace strkm {

enum class LossType { deterministic, stochastic, split };

std::string to_string(LossType t);
LossType loss_type_from_string(const std::string& s);

// Auto-encoder loss variant. sigma is the latent noise scale inside the
// decoder input; mc_samples noise draws are averaged per evaluation.
struct LossKind {
  LossType type = LossType::deterministic;
  double sigma = 0.0;
  int mc_samples = 1;

  static LossKind deterministic() { return {}; }
  static LossKind stochastic(double sigma, int samples = 1) {
    return {LossType::stochastic, sigma, samples};
  }
  static LossKind split(double sigma, int samples = 1) { return {LossType::split, sigma, samples}; }

  // sigma > 0 with the deterministic tag, negative sigma or samples < 1
  // throw ConfigError.
  void validate() const;
  // A noisy variant with sigma = 0 reduces to the deterministic loss.
  bool noisy() const { return type != LossType::deterministic && sigma > 0.0; }
};

// Ablation with a frozen random U and the mollified complement projector.
// epsilon = 0 selects the exact projector.
struct FixedSubspace {
  bool enabled = false;
  double epsilon = 1e-5;
};

struct ObjectiveConfig {
  double lambda = 1.0;
  LossKind loss;
  FixedSubspace fixed_u;

  void validate() const;
};

// Model parameters bound to one tape.
struct ModelVars {
  NetworkVars encoder;
  NetworkVars decoder;
  ad::Var u;
};

enum class GradTarget { none, networks, subspace, all };

ModelVars bind(ad::Tape& tape, const StRkmModel& model, GradTarget target);

// Mean over batch rows of the per-sample auto-encoder loss.
ad::Var ae_loss(const StRkmModel& model, const ModelVars& vars, ad::Var phi, ad::Var x,
                const LossKind& kind, Rng& rng);

// (1/n) sum_i ||P_{U-perp} phi~_i||^2 over batch-centered features, via
// ||phi~||^2 - ||U^T phi~||^2.
ad::Var pca_term(ad::Var features, ad::Var u);

// Frozen-U variant: (1/n) sum_i ||(I - K U^T) phi~_i||^2 with the
// mollified factor K. eps = 0 falls back to pca_term.
ad::Var mollified_pca_term(ad::Var features, const Mat& u, double eps);

struct ObjectiveTerms {
  ad::Var total;
  ad::Var ae;   // unweighted mean AE loss
  ad::Var pca;
};

// lambda * mean AE loss + PCA term on the batch `x` (rows are samples).
ObjectiveTerms strkm_objective(const StRkmModel& model, const ModelVars& vars, ad::Var x,
                               const ObjectiveConfig& cfg, Rng& rng);

// (1/n) sum_i { ||x_i - psi(phi(x_i) + e_i)||^2 + alpha ||phi(x_i)||^2 },
// e_i ~ N(0, gamma^2 I), one draw per point.
ad::Var baseline_regularized_ae(const Network& encoder, const NetworkVars& encoder_vars,
                                const Network& decoder, const NetworkVars& decoder_vars,
                                ad::Var x, double alpha, double gamma, Rng& rng);

// Value-level conveniences (no gradients).
double ae_loss(const StRkmModel& model, const Vec& x, const LossKind& kind, Rng& rng);
double pca_term(const Mat& features, const Mat& u);

struct ObjectiveEvaluation {
  double total = 0.0;
  double ae = 0.0;
  double pca = 0.0;
  std::vector<Mat> encoder_grads;
  std::vector<Mat> decoder_grads;
  Mat u_grad;
};

// Evaluates the objective on a batch and the gradients selected by `target`.
ObjectiveEvaluation evaluate_objective(const StRkmModel& model, const Mat& x,
                                       const ObjectiveConfig& cfg, Rng& rng, GradTarget target);

}  // namespace strkm
