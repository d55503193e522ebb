#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strkm/model.hpp"

namespace strkm {

// E ||eps||^3 for eps ~ N(0, I_m): sqrt(2) (m+1) Gamma((m+1)/2) / Gamma(m/2).
double chi3_moment(int m);

// Per output coordinate a of the decoder:
//   mc_lhs    = MC mean of [x - psi(y + sigma U eps)]_a^2
//   rhs       = r_a^2 + sigma^2 ||U^T grad psi_a||^2 - sigma^2 r_a tr(U^T H_a U),
//               r = x - psi(y)
//   remainder = MC mean of the difference between the loss and its
//               second-order Taylor model (whose mean is rhs), i.e. a
//               control-variate estimate of lhs - rhs.
struct ExpansionReport {
  double sigma = 0.0;
  std::int64_t mc_samples = 0;
  std::vector<double> mc_lhs;
  std::vector<double> quadratic_rhs;
  std::vector<double> abs_diff;
  std::vector<double> mc_stderr;
  std::vector<double> remainder;
  std::vector<double> remainder_stderr;

  double max_abs_diff() const;
  double mean_abs_diff() const;
  double max_abs_remainder() const;

  std::string to_csv() const;
};

constexpr std::int64_t kMinExpansionSamples = 10000;
constexpr double kHessianStep = 1e-3;

// Requires smooth activations throughout the decoder (UnsupportedError
// otherwise), sigma > 0 and mc_samples >= 10^4.
ExpansionReport lemma_expansion_check(const Network& decoder, const Mat& u, const Vec& x,
                                      const Vec& y, double sigma, std::int64_t mc_samples,
                                      std::uint64_t seed);

// Delta = J(y) U via exact directional derivatives; returns Delta^T Delta.
Mat gram_matrix(const Network& decoder, const Mat& u, const Vec& y);

// ||offdiag(G)||_F / ||diag(G)||_F.
double diag_ratio(const Mat& g);

// Mean diag_ratio of the Gram matrix over the points y_i = P_U phi(x_i).
double mean_diag_ratio(const StRkmModel& model, const Mat& images);

}  // namespace strkm
