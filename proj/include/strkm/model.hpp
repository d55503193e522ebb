#pragma once

#include "strkm/ndmath.hpp"
#include "strkm/nnet.hpp"
#include "strkm/stiefel.hpp"

namespace strkm {

// Encoder (d -> l), decoder (l -> d) and the principal subspace range(U) of
// the latent space. feature_mean and principal_values are filled in by the
// final covariance correction after training.
struct StRkmModel {
  StRkmModel(Network encoder, Network decoder, StiefelPoint u);

  Network encoder;
  Network decoder;
  StiefelPoint u;
  Vec feature_mean;      // l, zero until corrected
  Vec principal_values;  // m, descending >= 0; empty until corrected

  Eigen::Index input_dim() const { return encoder.input_dim(); }
  Eigen::Index latent_dim() const { return u.ambient_dim(); }
  Eigen::Index subspace_dim() const { return u.dim(); }
  bool corrected() const { return principal_values.size() == subspace_dim(); }

  // Throws ShapeError unless d, l, m chain consistently.
  void validate() const;
};

Vec encode(const StRkmModel& model, const Vec& x);
// h = U^T phi(x)
Vec latent_code(const StRkmModel& model, const Vec& x);
// P_U v
Vec project(const StRkmModel& model, const Vec& v);
Vec decode(const StRkmModel& model, const Vec& z);
// psi(U U^T phi(x))
Vec reconstruct(const StRkmModel& model, const Vec& x);

// Batched variants; rows are samples.
Mat encode_batch(const StRkmModel& model, const Mat& x);
Mat latent_codes(const StRkmModel& model, const Mat& x);
Mat reconstruct_batch(const StRkmModel& model, const Mat& x);

// (I - U (U^T U + eps I)^{-1} U^T) v, evaluated with the m x m resolvent.
// Acts as eps/(1+eps) on range(U) and as the identity on its complement.
Vec mollified_perp_apply(const Mat& u, double eps, const Vec& v);

// The l x m factor K = U (U^T U + eps I)^{-1}, so that the mollified
// complement projector is I - K U^T.
Mat mollified_factor(const Mat& u, double eps);

}  // namespace strkm
