#include "strkm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strkm/errors.hpp"
#include "strkm/kvconfig.hpp"

namespace strkm {

namespace {

constexpr int kMaxSweeps = 10000;
constexpr double kLassoTol = 1e-8;

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// 1 - H(p)/log(k) for p = v/sum(v); a zero vector scores 0.
double one_minus_entropy(const Vec& v) {
  const double total = v.sum();
  if (!(total > 0.0)) return 0.0;
  if (v.size() == 1) return 1.0;
  double h = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double p = v[i] / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return 1.0 - h / std::log(static_cast<double>(v.size()));
}

}  // namespace

LassoFit lasso_fit(const Mat& codes, const Vec& target, double penalty) {
  const Eigen::Index n = codes.rows(), m = codes.cols();
  if (target.size() != n) throw ShapeError("lasso_fit: target length mismatch");
  if (n <= m) throw ContractError("lasso_fit: need more samples than code dimensions");
  if (!(penalty >= 0.0)) throw ConfigError("lasso_fit: penalty must be >= 0");

  const double nd = static_cast<double>(n);
  const Vec mu = codes.colwise().mean().transpose();
  Mat x = codes.rowwise() - mu.transpose();
  Vec sd = (x.colwise().squaredNorm().transpose() / nd).cwiseSqrt();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (sd[j] > 0.0) x.col(j) /= sd[j];
    else x.col(j).setZero();
  }
  const double tmean = target.mean();
  Vec resid = target.array() - tmean;

  LassoFit fit;
  fit.standard_weights = Vec::Zero(m);
  if (resid.cwiseAbs().maxCoeff() == 0.0) {
    fit.weights = Vec::Zero(m);
    fit.intercept = tmean;
    fit.converged = true;
    return fit;
  }
  Vec& w = fit.standard_weights;
  for (fit.sweeps = 1; fit.sweeps <= kMaxSweeps; ++fit.sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!(sd[j] > 0.0)) continue;
      const double rho = x.col(j).dot(resid) / nd + w[j];
      const double next = soft_threshold(rho, penalty);
      const double change = next - w[j];
      if (change != 0.0) {
        resid -= change * x.col(j);
        w[j] = next;
      }
      max_change = std::max(max_change, std::abs(change));
    }
    if (max_change < kLassoTol) {
      fit.converged = true;
      break;
    }
  }
  fit.sweeps = std::min(fit.sweeps, kMaxSweeps);
  fit.weights = Vec::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    if (sd[j] > 0.0) fit.weights[j] = w[j] / sd[j];
  }
  fit.intercept = tmean - fit.weights.dot(mu);
  return fit;
}

DciScores dci_from_importance(const Mat& r) {
  if (r.size() == 0) throw ShapeError("dci: empty importance matrix");
  if ((r.array() < 0.0).any() || !r.allFinite()) {
    throw ContractError("dci: importance must be finite and >= 0");
  }
  const double total = r.sum();
  if (!(total > 0.0)) throw DegeneracyError("dci: all-zero importance matrix");
  DciScores s;
  s.importance = r;
  s.code_disentanglement.resize(r.rows());
  s.factor_completeness.resize(r.cols());
  for (Eigen::Index j = 0; j < r.rows(); ++j) {
    const Vec row = r.row(j).transpose();
    s.code_disentanglement[j] = one_minus_entropy(row);
    s.disentanglement += row.sum() / total * s.code_disentanglement[j];
  }
  for (Eigen::Index f = 0; f < r.cols(); ++f) {
    s.factor_completeness[f] = one_minus_entropy(r.col(f));
  }
  s.completeness = s.factor_completeness.mean();
  return s;
}

DciScores dci(const Mat& codes, const Mat& factors, double penalty, std::uint64_t seed) {
  const Eigen::Index n = codes.rows();
  if (factors.rows() != n) throw ShapeError("dci: codes and factors differ in length");
  if (n < 100) throw ContractError("dci: need at least 100 samples");
  if ((factors.array() < 0.0).any() || (factors.array() > 1.0).any()) {
    throw ContractError("dci: factors must be normalized to [0, 1]");
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  const Eigen::Index n_train = (n * 4) / 5;
  const Eigen::Index n_test = n - n_train;
  Mat xtr(n_train, codes.cols()), xte(n_test, codes.cols());
  Mat ftr(n_train, factors.cols()), fte(n_test, factors.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int src = perm[static_cast<std::size_t>(i)];
    if (i < n_train) {
      xtr.row(i) = codes.row(src);
      ftr.row(i) = factors.row(src);
    } else {
      xte.row(i - n_train) = codes.row(src);
      fte.row(i - n_train) = factors.row(src);
    }
  }
  Mat r(codes.cols(), factors.cols());
  Vec rmse(factors.cols());
  for (Eigen::Index f = 0; f < factors.cols(); ++f) {
    const LassoFit fit = lasso_fit(xtr, ftr.col(f), penalty);
    r.col(f) = fit.standard_weights.cwiseAbs();
    const Vec pred = (xte * fit.weights).array() + fit.intercept;
    rmse[f] = std::sqrt((pred - fte.col(f)).squaredNorm() / static_cast<double>(n_test));
  }
  DciScores s = dci_from_importance(r);
  s.informativeness = rmse;
  return s;
}

double wasserstein1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ContractError("wasserstein1d: empty sample");
  if (a.size() != b.size()) throw ShapeError("wasserstein1d: sample sizes differ");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total / static_cast<double>(a.size());
}

SwdResult swd(const Mat& a, const Mat& b, int projections, std::uint64_t seed) {
  if (a.rows() == 0 || b.rows() == 0) throw ContractError("swd: empty image set");
  if (a.cols() != b.cols()) throw ShapeError("swd: image dims differ");
  if (projections < kMinProjections) throw ConfigError("swd: need at least 64 projections");

  const Mat* pa = &a;
  const Mat* pb = &b;
  Mat resampled;
  if (a.rows() != b.rows()) {
    const bool a_small = a.rows() < b.rows();
    const Mat& small = a_small ? a : b;
    const Eigen::Index target = std::max(a.rows(), b.rows());
    Rng pick(seed, 1);
    std::uniform_int_distribution<Eigen::Index> dist(0, small.rows() - 1);
    resampled.resize(target, a.cols());
    for (Eigen::Index i = 0; i < target; ++i) resampled.row(i) = small.row(dist(pick.engine()));
    (a_small ? pa : pb) = &resampled;
  }

  Rng rng(seed, 0);
  Mat dirs = randn(a.cols(), projections, rng);
  for (Eigen::Index k = 0; k < dirs.cols(); ++k) dirs.col(k).normalize();
  const Mat proj_a = *pa * dirs;
  const Mat proj_b = *pb * dirs;
  std::vector<double> per(static_cast<std::size_t>(projections));
  for (int k = 0; k < projections; ++k) {
    std::vector<double> va(proj_a.col(k).begin(), proj_a.col(k).end());
    std::vector<double> vb(proj_b.col(k).begin(), proj_b.col(k).end());
    per[static_cast<std::size_t>(k)] = wasserstein1d(std::move(va), std::move(vb));
  }
  SwdResult res;
  const double p = static_cast<double>(projections);
  res.value = std::accumulate(per.begin(), per.end(), 0.0) / p;
  double var = 0.0;
  for (double v : per) var += (v - res.value) * (v - res.value);
  res.stderr_ = std::sqrt(var / (p - 1.0) / p);
  return res;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::string out = "metric,value,stderr\n";
  for (const MetricRow& r : rows) {
    out += r.metric + ',' + kv::format(r.value) + ',' + kv::format(r.stderr_) + '\n';
  }
  return out;
}

}  // namespace strkm
