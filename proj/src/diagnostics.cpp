#include "strkm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strkm/errors.hpp"
#include "strkm/kvconfig.hpp"

namespace strkm {

double chi3_moment(int m) {
  if (m < 1) throw ConfigError("chi3_moment: m must be >= 1");
  const double md = m;
  return std::sqrt(2.0) * (md + 1.0) * std::exp(std::lgamma(0.5 * (md + 1.0)) - std::lgamma(0.5 * md));
}

double ExpansionReport::max_abs_diff() const {
  return abs_diff.empty() ? 0.0 : *std::max_element(abs_diff.begin(), abs_diff.end());
}

double ExpansionReport::mean_abs_diff() const {
  if (abs_diff.empty()) return 0.0;
  return std::accumulate(abs_diff.begin(), abs_diff.end(), 0.0) / static_cast<double>(abs_diff.size());
}

double ExpansionReport::max_abs_remainder() const {
  double best = 0.0;
  for (double r : remainder) best = std::max(best, std::abs(r));
  return best;
}

std::string ExpansionReport::to_csv() const {
  std::string out = "a,sigma,mc_samples,mc_lhs,quadratic_rhs,abs_diff,mc_stderr,remainder,remainder_stderr\n";
  for (std::size_t a = 0; a < mc_lhs.size(); ++a) {
    out += std::to_string(a) + ',' + kv::format(sigma) + ',' + std::to_string(mc_samples) + ',' +
           kv::format(mc_lhs[a]) + ',' + kv::format(quadratic_rhs[a]) + ',' +
           kv::format(abs_diff[a]) + ',' + kv::format(mc_stderr[a]) + ',' +
           kv::format(remainder[a]) + ',' + kv::format(remainder_stderr[a]) + '\n';
  }
  out += "max_abs_diff," + kv::format(sigma) + ',' + std::to_string(mc_samples) + ",,," +
         kv::format(max_abs_diff()) + ",,," + '\n';
  out += "mean_abs_diff," + kv::format(sigma) + ',' + std::to_string(mc_samples) + ",,," +
         kv::format(mean_abs_diff()) + ",,," + '\n';
  return out;
}

namespace {

Mat jacobian_times(const Network& decoder, const Vec& y, const Mat& u) {
  Mat d(decoder.output_dim(), u.cols());
  for (Eigen::Index k = 0; k < u.cols(); ++k) d.col(k) = decoder.jvp(y, u.col(k));
  return d;
}

}  // namespace

ExpansionReport lemma_expansion_check(const Network& decoder, const Mat& u, const Vec& x,
                                      const Vec& y, double sigma, std::int64_t mc_samples,
                                      std::uint64_t seed) {
  for (const Layer& layer : decoder.layers()) {
    if (!is_smooth(layer.activation)) {
      throw UnsupportedError("lemma_expansion_check needs a C^2 decoder, got activation " +
                             to_string(layer.activation));
    }
  }
  if (!(sigma > 0.0)) throw ConfigError("lemma_expansion_check: sigma must be > 0");
  if (mc_samples < kMinExpansionSamples) {
    throw ConfigError("lemma_expansion_check: need at least 10^4 samples");
  }
  if (y.size() != decoder.input_dim() || u.rows() != y.size() || x.size() != decoder.output_dim()) {
    throw ShapeError("lemma_expansion_check: dims do not match the decoder");
  }
  const Eigen::Index d = x.size(), m = u.cols();
  const Vec r = x - decoder.forward(y);
  const Mat jd = jacobian_times(decoder, y, u);  // d x m

  // hess[a](k, j) = u_k^T H_a u_j by central differences of J u_k along u_j.
  std::vector<Mat> hess(static_cast<std::size_t>(d), Mat::Zero(m, m));
  const double h = kHessianStep;
  for (Eigen::Index j = 0; j < m; ++j) {
    const Mat plus = jacobian_times(decoder, y + h * u.col(j), u);
    const Mat minus = jacobian_times(decoder, y - h * u.col(j), u);
    const Mat diff = (plus - minus) / (2.0 * h);
    for (Eigen::Index a = 0; a < d; ++a) hess[static_cast<std::size_t>(a)].col(j) = diff.row(a).transpose();
  }
  for (Mat& ha : hess) ha = (0.5 * (ha + ha.transpose())).eval();

  ExpansionReport rep;
  rep.sigma = sigma;
  rep.mc_samples = mc_samples;
  const double s2 = sigma * sigma;
  rep.quadratic_rhs.resize(static_cast<std::size_t>(d));
  for (Eigen::Index a = 0; a < d; ++a) {
    rep.quadratic_rhs[static_cast<std::size_t>(a)] =
        r[a] * r[a] + s2 * jd.row(a).squaredNorm() - s2 * r[a] * hess[static_cast<std::size_t>(a)].trace();
  }

  Vec sum_f = Vec::Zero(d), sum_f2 = Vec::Zero(d), sum_e = Vec::Zero(d), sum_e2 = Vec::Zero(d);
  Rng rng(seed);
  constexpr std::int64_t kChunk = 4096;
  for (std::int64_t done = 0; done < mc_samples; done += kChunk) {
    const Eigen::Index rows = static_cast<Eigen::Index>(std::min(kChunk, mc_samples - done));
    const Mat eps = randn(rows, m, rng);
    Mat z = (sigma * eps * u.transpose()).rowwise() + y.transpose();
    const Mat out = decoder.forward_batch(z);
    const Mat lin = eps * jd.transpose();  // rows x d: (J U eps)_a
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Vec e = eps.row(i).transpose();
      for (Eigen::Index a = 0; a < d; ++a) {
        const double res = x[a] - out(i, a);
        const double f = res * res;
        const double la = lin(i, a);
        const double quad = e.dot(hess[static_cast<std::size_t>(a)] * e);
        const double q = r[a] * r[a] - 2.0 * sigma * r[a] * la + s2 * (la * la - r[a] * quad);
        sum_f[a] += f;
        sum_f2[a] += f * f;
        sum_e[a] += f - q;
        sum_e2[a] += (f - q) * (f - q);
      }
    }
  }
  const double n = static_cast<double>(mc_samples);
  auto stderr_of = [n](double s, double s2sum) {
    const double mean = s / n;
    const double var = std::max(0.0, (s2sum / n - mean * mean)) * n / (n - 1.0);
    return std::sqrt(var / n);
  };
  for (Eigen::Index a = 0; a < d; ++a) {
    const double lhs = sum_f[a] / n;
    rep.mc_lhs.push_back(lhs);
    rep.abs_diff.push_back(std::abs(lhs - rep.quadratic_rhs[static_cast<std::size_t>(a)]));
    rep.mc_stderr.push_back(stderr_of(sum_f[a], sum_f2[a]));
    rep.remainder.push_back(sum_e[a] / n);
    rep.remainder_stderr.push_back(stderr_of(sum_e[a], sum_e2[a]));
  }
  return rep;
}

Mat gram_matrix(const Network& decoder, const Mat& u, const Vec& y) {
  if (y.size() != decoder.input_dim() || u.rows() != y.size()) {
    throw ShapeError("gram_matrix: dims do not match the decoder");
  }
  if (!y.allFinite()) throw NumericError("gram_matrix: non-finite latent point");
  const Mat delta = jacobian_times(decoder, y, u);
  Mat g = delta.transpose() * delta;
  return 0.5 * (g + g.transpose());
}

double diag_ratio(const Mat& g) {
  if (g.rows() != g.cols()) throw ShapeError("diag_ratio: matrix must be square");
  if (asymmetry(g) > 1e-12 * std::max(1.0, g.norm())) throw ContractError("diag_ratio: matrix must be symmetric");
  const double dn = g.diagonal().norm();
  if (!(dn > 0.0)) throw DegeneracyError("diag_ratio: zero diagonal");
  double off2 = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (i != j) off2 += g(i, j) * g(i, j);
  return std::sqrt(off2) / dn;
}

double mean_diag_ratio(const StRkmModel& model, const Mat& images) {
  if (images.rows() < 1) throw ContractError("mean_diag_ratio: no points");
  const Mat& u = model.u.matrix();
  const Mat y = encode_batch(model, images) * u * u.transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    total += diag_ratio(gram_matrix(model.decoder, u, y.row(i).transpose()));
  }
  return total / static_cast<double>(y.rows());
}

}  // namespace strkm
