#pragma once

#include <cstdint>

#include "strkm/ndmath.hpp"

namespace strkm {

// Hard bound on ||U^T U - I||_F for any StiefelPoint.
inline constexpr double kStiefelTolerance = 1e-6;
// Iterates drifting past this are re-orthonormalized by QR.
inline constexpr double kStiefelRepairThreshold = 1e-8;

// A point of St(l, m): an l x m matrix with orthonormal columns.
class StiefelPoint {
 public:
  // Throws ContractError when l < m or the columns are not orthonormal.
  explicit StiefelPoint(Mat u);

  static StiefelPoint random(Eigen::Index ambient, Eigen::Index dim, Rng& rng);
  // First `dim` columns of the identity.
  static StiefelPoint canonical(Eigen::Index ambient, Eigen::Index dim);

  const Mat& matrix() const { return u_; }
  Eigen::Index ambient_dim() const { return u_.rows(); }
  Eigen::Index dim() const { return u_.cols(); }

  double orthonormality_error() const;
  // Projector U U^T.
  Mat projector() const { return u_ * u_.transpose(); }

 private:
  Mat u_;
};

// W = G' U^T - U G'^T with G' = G - U (U^T G) / 2. W is exactly skew.
Mat skew_lift(const Mat& g, const StiefelPoint& u);

// Fixed-point approximation of the Cayley transform
// (I - a/2 W)^{-1} (I + a/2 W) U, followed by QR repair past the drift
// threshold. Throws ContractError when W is not skew.
StiefelPoint cayley_retract(const StiefelPoint& u, const Mat& w, double alpha, int iterations);

// The Cayley transform evaluated with a direct linear solve.
Mat cayley_exact(const Mat& u, const Mat& w, double alpha);

struct CayleyAdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int iterations = 2;
};

// Momentum lives in the ambient l x m space; the second moment is a single
// scalar for the whole manifold parameter.
struct CayleyAdamState {
  explicit CayleyAdamState(CayleyAdamConfig config = {}) : config(config) {}

  CayleyAdamConfig config;
  Mat momentum;
  double second_moment = 0.0;
  std::int64_t step = 0;
};

// One Cayley-Adam descent step given the Euclidean gradient `g` at `u`.
// After retraction the momentum is re-expressed as W U+.
StiefelPoint cayley_adam_step(CayleyAdamState& state, const StiefelPoint& u, const Mat& g);

// argmin over St(l, m) of tr(U^T M U): eigenvectors of the m smallest
// eigenvalues, ordered so that U^T M U = diag(nu) with nu ascending. With
// repeated eigenvalues the eigh ordering decides among equivalent bases.
StiefelPoint min_trace_subspace(const Mat& m, Eigen::Index dim);

}  // namespace strkm
