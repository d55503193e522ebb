#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strkm/ndmath.hpp"

namespace strkm {

struct LassoFit {
  Vec weights;           // on the original code scale
  Vec standard_weights;  // on standardized codes
  double intercept = 0.0;
  int sweeps = 0;
  bool converged = false;
};

constexpr double kDefaultLassoPenalty = 1e-2;

// Coordinate descent on (1/2n)||t - Xw - b||^2 + penalty ||w||_1 with
// columns of X standardized internally. Needs n > m.
LassoFit lasso_fit(const Mat& codes, const Vec& target, double penalty);

struct DciScores {
  Mat importance;          // m x F, R_jf = |standardized lasso weight|
  Vec informativeness;     // F, held-out RMSE
  Vec code_disentanglement;  // m
  Vec factor_completeness;   // F
  double disentanglement = 0.0;
  double completeness = 0.0;
};

// D and C from a nonnegative importance matrix. All-zero R throws
// DegeneracyError.
DciScores dci_from_importance(const Mat& r);

// Full protocol: seeded 80/20 split, one lasso per factor on the train part,
// RMSE on the held-out part. Factors must be normalized to [0, 1]; n >= 100.
DciScores dci(const Mat& codes, const Mat& factors, double penalty = kDefaultLassoPenalty,
              std::uint64_t seed = 0);

// W1 between two equally sized samples on the line (sorted differences).
double wasserstein1d(std::vector<double> a, std::vector<double> b);

struct SwdResult {
  double value = 0.0;
  double stderr_ = 0.0;  // over projections
};

constexpr int kMinProjections = 64;

// Mean over `projections` seeded random unit directions of the 1-D W1 of
// the projected rows. A smaller set is resampled with replacement to the
// size of the larger one.
SwdResult swd(const Mat& a, const Mat& b, int projections = 128, std::uint64_t seed = 0);

struct MetricRow {
  std::string metric;
  double value = 0.0;
  double stderr_ = 0.0;
};

// `metric,value,stderr` with a header line.
std::string metrics_csv(const std::vector<MetricRow>& rows);

}  // namespace strkm
