#include "strkm/objective.hpp"

#include <cmath>

#include "strkm/errors.hpp"

namespace strkm {

std::string to_string(LossType t) {
  switch (t) {
    case LossType::deterministic: return "deterministic";
    case LossType::stochastic: return "stochastic";
    case LossType::split: return "split";
  }
  return "unknown";
}

LossType loss_type_from_string(const std::string& s) {
  if (s == "deterministic") return LossType::deterministic;
  if (s == "stochastic") return LossType::stochastic;
  if (s == "split") return LossType::split;
  throw ConfigError("unknown loss type '" + s + "'");
}

void LossKind::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("loss sigma must be >= 0");
  if (type == LossType::deterministic && sigma > 0.0) {
    throw ConfigError("deterministic loss does not take sigma > 0");
  }
  if (mc_samples < 1) throw ConfigError("loss mc_samples must be >= 1");
}

void ObjectiveConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("objective lambda must be > 0");
  loss.validate();
  if (fixed_u.enabled && !(fixed_u.epsilon >= 0.0)) {
    throw ConfigError("fixed-U epsilon must be >= 0");
  }
}

ModelVars bind(ad::Tape& tape, const StRkmModel& model, GradTarget target) {
  const bool nets = target == GradTarget::networks || target == GradTarget::all;
  const bool sub = target == GradTarget::subspace || target == GradTarget::all;
  ModelVars v;
  v.encoder = bind(tape, model.encoder, nets);
  v.decoder = bind(tape, model.decoder, nets);
  v.u = sub ? tape.parameter(model.u.matrix()) : tape.constant(model.u.matrix());
  return v;
}

ad::Var ae_loss(const StRkmModel& model, const ModelVars& vars, ad::Var phi, ad::Var x,
                const LossKind& kind, Rng& rng) {
  kind.validate();
  ad::Tape& tape = *x.tape;
  const double n = static_cast<double>(x.rows());
  const Eigen::Index m = model.subspace_dim();

  ad::Var z = ad::matmul_nt(ad::matmul(phi, vars.u), vars.u);
  ad::Var clean = forward(model.decoder, vars.decoder, z);
  ad::Var base = ad::sum_squares(x - clean);

  if (!kind.noisy()) return ad::scale(base, 1.0 / n);

  ad::Var noisy_total;
  for (int s = 0; s < kind.mc_samples; ++s) {
    ad::Var eps = tape.constant(randn(x.rows(), m, rng));
    ad::Var zn = z + kind.sigma * ad::matmul_nt(eps, vars.u);
    ad::Var out = forward(model.decoder, vars.decoder, zn);
    ad::Var term = kind.type == LossType::stochastic ? ad::sum_squares(x - out)
                                                     : ad::sum_squares(clean - out);
    noisy_total = s == 0 ? term : noisy_total + term;
  }
  ad::Var noisy_mean = ad::scale(noisy_total, 1.0 / (n * kind.mc_samples));
  if (kind.type == LossType::stochastic) return noisy_mean;
  return ad::scale(base, 1.0 / n) + noisy_mean;
}

ad::Var pca_term(ad::Var features, ad::Var u) {
  if (features.rows() < 1) throw ContractError("pca_term: empty batch");
  if (features.cols() != u.rows()) throw ShapeError("pca_term: features do not match U");
  const double n = static_cast<double>(features.rows());
  ad::Var centered = ad::center_rows(features);
  ad::Var total = ad::sum_squares(centered);
  ad::Var inside = ad::sum_squares(ad::matmul(centered, u));
  return ad::scale(total - inside, 1.0 / n);
}

ad::Var mollified_pca_term(ad::Var features, const Mat& u, double eps) {
  ad::Tape& tape = *features.tape;
  if (eps == 0.0) return pca_term(features, tape.constant(u));
  if (features.rows() < 1) throw ContractError("pca_term: empty batch");
  if (features.cols() != u.rows()) throw ShapeError("pca_term: features do not match U");
  const double n = static_cast<double>(features.rows());
  ad::Var centered = ad::center_rows(features);
  ad::Var k = tape.constant(mollified_factor(u, eps));
  ad::Var uc = tape.constant(u);
  ad::Var perp = centered - ad::matmul_nt(ad::matmul(centered, uc), k);
  return ad::scale(ad::sum_squares(perp), 1.0 / n);
}

ObjectiveTerms strkm_objective(const StRkmModel& model, const ModelVars& vars, ad::Var x,
                               const ObjectiveConfig& cfg, Rng& rng) {
  cfg.validate();
  if (x.rows() < 1) throw ContractError("strkm_objective: empty batch");
  ad::Var phi = forward(model.encoder, vars.encoder, x);
  ObjectiveTerms t;
  t.ae = ae_loss(model, vars, phi, x, cfg.loss, rng);
  t.pca = cfg.fixed_u.enabled ? mollified_pca_term(phi, model.u.matrix(), cfg.fixed_u.epsilon)
                              : pca_term(phi, vars.u);
  t.total = ad::scale(t.ae, cfg.lambda) + t.pca;
  return t;
}

ad::Var baseline_regularized_ae(const Network& encoder, const NetworkVars& encoder_vars,
                                const Network& decoder, const NetworkVars& decoder_vars,
                                ad::Var x, double alpha, double gamma, Rng& rng) {
  if (!(alpha >= 0.0) || !(gamma >= 0.0)) throw ConfigError("baseline: alpha, gamma must be >= 0");
  ad::Tape& tape = *x.tape;
  const double n = static_cast<double>(x.rows());
  ad::Var phi = forward(encoder, encoder_vars, x);
  ad::Var z = phi;
  if (gamma > 0.0) z = phi + tape.constant(gamma * randn(phi.rows(), phi.cols(), rng));
  ad::Var recon = ad::sum_squares(x - forward(decoder, decoder_vars, z));
  ad::Var reg = ad::sum_squares(phi);
  return ad::scale(recon + alpha * reg, 1.0 / n);
}

double ae_loss(const StRkmModel& model, const Vec& x, const LossKind& kind, Rng& rng) {
  ad::Tape tape;
  ModelVars vars = bind(tape, model, GradTarget::none);
  ad::Var xv = tape.constant(x.transpose());
  ad::Var phi = forward(model.encoder, vars.encoder, xv);
  return ae_loss(model, vars, phi, xv, kind, rng).scalar();
}

double pca_term(const Mat& features, const Mat& u) {
  ad::Tape tape;
  return pca_term(tape.constant(features), tape.constant(u)).scalar();
}

ObjectiveEvaluation evaluate_objective(const StRkmModel& model, const Mat& x,
                                       const ObjectiveConfig& cfg, Rng& rng, GradTarget target) {
  ad::Tape tape;
  ModelVars vars = bind(tape, model, target);
  ObjectiveTerms t = strkm_objective(model, vars, tape.constant(x), cfg, rng);
  ObjectiveEvaluation ev;
  ev.total = t.total.scalar();
  ev.ae = t.ae.scalar();
  ev.pca = t.pca.scalar();
  if (!std::isfinite(ev.total)) throw NumericError("objective is not finite");
  if (target == GradTarget::none) return ev;

  std::vector<Mat> g = grad(tape, t.total);
  std::size_t k = 0;
  if (target == GradTarget::networks || target == GradTarget::all) {
    for (std::size_t i = 0; i < vars.encoder.params.size(); ++i) ev.encoder_grads.push_back(g[k++]);
    for (std::size_t i = 0; i < vars.decoder.params.size(); ++i) ev.decoder_grads.push_back(g[k++]);
  }
  if (target == GradTarget::subspace || target == GradTarget::all) ev.u_grad = g[k++];
  return ev;
}

}  // namespace strkm
