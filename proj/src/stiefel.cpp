#include "strkm/stiefel.hpp"

#include <cmath>
#include <string>

#include "strkm/errors.hpp"

namespace strkm {

StiefelPoint::StiefelPoint(Mat u) : u_(std::move(u)) {
  if (u_.rows() < u_.cols() || u_.cols() < 1) {
    throw ContractError("StiefelPoint: need l >= m >= 1, got " + std::to_string(u_.rows()) + "x" +
                        std::to_string(u_.cols()));
  }
  const double err = strkm::orthonormality_error(u_);
  if (!(err <= kStiefelTolerance)) {
    throw ContractError("StiefelPoint: ||U^T U - I||_F = " + std::to_string(err));
  }
}

StiefelPoint StiefelPoint::random(Eigen::Index ambient, Eigen::Index dim, Rng& rng) {
  return StiefelPoint(qr_orthonormalize(randn(ambient, dim, rng)));
}

StiefelPoint StiefelPoint::canonical(Eigen::Index ambient, Eigen::Index dim) {
  return StiefelPoint(Mat::Identity(ambient, dim));
}

double StiefelPoint::orthonormality_error() const { return strkm::orthonormality_error(u_); }

Mat skew_lift(const Mat& g, const StiefelPoint& u) {
  const Mat& U = u.matrix();
  if (g.rows() != U.rows() || g.cols() != U.cols()) {
    throw ShapeError("skew_lift: gradient shape does not match U");
  }
  const Mat g_hat = g - 0.5 * U * (U.transpose() * g);
  const Mat a = g_hat * U.transpose();
  return a - a.transpose();
}

StiefelPoint cayley_retract(const StiefelPoint& u, const Mat& w, double alpha, int iterations) {
  const Mat& U = u.matrix();
  if (w.rows() != U.rows() || w.cols() != U.rows()) {
    throw ShapeError("cayley_retract: W must be l x l");
  }
  if (!std::isfinite(alpha)) throw ContractError("cayley_retract: non-finite step");
  if ((w + w.transpose()).norm() > 1e-10) {
    throw ContractError("cayley_retract: W is not skew-symmetric");
  }
  const Mat wu = w * U;
  Mat y = U + alpha * wu;
  for (int k = 0; k < iterations; ++k) {
    y = U + (0.5 * alpha) * (wu + w * y);
  }
  if (!y.allFinite()) throw NumericError("cayley_retract: non-finite iterate");
  if (orthonormality_error(y) > kStiefelRepairThreshold) {
    y = qr_orthonormalize(y);
  }
  return StiefelPoint(std::move(y));
}

Mat cayley_exact(const Mat& u, const Mat& w, double alpha) {
  const Eigen::Index l = w.rows();
  const Mat id = Mat::Identity(l, l);
  const Mat lhs = id - (0.5 * alpha) * w;
  const Mat rhs = (id + (0.5 * alpha) * w) * u;
  return lhs.partialPivLu().solve(rhs);
}

StiefelPoint cayley_adam_step(CayleyAdamState& state, const StiefelPoint& u, const Mat& g) {
  const Mat& U = u.matrix();
  if (g.rows() != U.rows() || g.cols() != U.cols()) {
    throw ShapeError("cayley_adam_step: gradient shape does not match U");
  }
  if (!g.allFinite()) throw NumericError("cayley_adam_step: non-finite gradient");
  if (state.momentum.size() == 0) state.momentum = Mat::Zero(U.rows(), U.cols());

  const auto& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  state.momentum = c.beta1 * state.momentum + (1.0 - c.beta1) * g;
  state.second_moment = c.beta2 * state.second_moment + (1.0 - c.beta2) * g.squaredNorm();

  const double alpha = c.lr * std::sqrt(1.0 - std::pow(c.beta2, t)) /
                       ((1.0 - std::pow(c.beta1, t)) * (std::sqrt(state.second_moment) + c.eps));
  const Mat w = skew_lift(state.momentum, u);
  StiefelPoint next = cayley_retract(u, w, -alpha, c.iterations);
  state.momentum = w * next.matrix();
  return next;
}

StiefelPoint min_trace_subspace(const Mat& m, Eigen::Index dim) {
  if (m.rows() != m.cols()) throw ShapeError("min_trace_subspace: M must be square");
  if (dim < 1 || dim > m.rows()) throw ConfigError("min_trace_subspace: need 1 <= m <= l");
  const Mat sym = 0.5 * (m + m.transpose());
  const EighResult e = eigh(sym);
  const Eigen::Index l = m.rows();
  Mat u(l, dim);
  for (Eigen::Index k = 0; k < dim; ++k) u.col(k) = e.vectors.col(l - 1 - k);
  return StiefelPoint(std::move(u));
}

}  // namespace strkm
