#include "strkm/model.hpp"

#include <string>

#include "strkm/errors.hpp"

namespace strkm {

StRkmModel::StRkmModel(Network enc, Network dec, StiefelPoint subspace)
    : encoder(std::move(enc)), decoder(std::move(dec)), u(std::move(subspace)) {
  feature_mean = Vec::Zero(u.ambient_dim());
  validate();
}

void StRkmModel::validate() const {
  if (encoder.empty() || decoder.empty()) throw ShapeError("model: empty encoder or decoder");
  if (encoder.output_dim() != u.ambient_dim()) {
    throw ShapeError("model: encoder output " + std::to_string(encoder.output_dim()) +
                     " != latent dim " + std::to_string(u.ambient_dim()));
  }
  if (decoder.input_dim() != u.ambient_dim()) {
    throw ShapeError("model: decoder input does not match latent dim");
  }
  if (decoder.output_dim() != encoder.input_dim()) {
    throw ShapeError("model: decoder output does not match encoder input");
  }
  if (feature_mean.size() != u.ambient_dim()) throw ShapeError("model: feature mean size");
  if (principal_values.size() != 0 && principal_values.size() != u.dim()) {
    throw ShapeError("model: principal values size");
  }
}

Vec encode(const StRkmModel& model, const Vec& x) { return model.encoder.forward(x); }

Vec latent_code(const StRkmModel& model, const Vec& x) {
  return model.u.matrix().transpose() * encode(model, x);
}

Vec project(const StRkmModel& model, const Vec& v) {
  if (v.size() != model.latent_dim()) throw ShapeError("project: dimension mismatch");
  const Mat& U = model.u.matrix();
  return U * (U.transpose() * v);
}

Vec decode(const StRkmModel& model, const Vec& z) { return model.decoder.forward(z); }

Vec reconstruct(const StRkmModel& model, const Vec& x) {
  return decode(model, project(model, encode(model, x)));
}

Mat encode_batch(const StRkmModel& model, const Mat& x) { return model.encoder.forward_batch(x); }

Mat latent_codes(const StRkmModel& model, const Mat& x) {
  return encode_batch(model, x) * model.u.matrix();
}

Mat reconstruct_batch(const StRkmModel& model, const Mat& x) {
  const Mat& U = model.u.matrix();
  const Mat z = (encode_batch(model, x) * U) * U.transpose();
  return model.decoder.forward_batch(z);
}

Mat mollified_factor(const Mat& u, double eps) {
  if (!(eps > 0.0)) throw ConfigError("mollified projector needs eps > 0");
  const Eigen::Index m = u.cols();
  const Mat resolvent = u.transpose() * u + eps * Mat::Identity(m, m);
  // K^T = resolvent^{-1} U^T; the resolvent is symmetric positive definite.
  const Mat kt = resolvent.llt().solve(u.transpose());
  return kt.transpose();
}

Vec mollified_perp_apply(const Mat& u, double eps, const Vec& v) {
  if (v.size() != u.rows()) throw ShapeError("mollified_perp_apply: dimension mismatch");
  const Mat k = mollified_factor(u, eps);
  return v - k * (u.transpose() * v);
}

}  // namespace strkm
