#include "strkm/ndmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "strkm/errors.hpp"

namespace strkm {

namespace {

std::seed_seq make_seed_seq(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> parts;
  for (std::uint64_t w : words) {
    parts.push_back(static_cast<std::uint32_t>(w & 0xffffffffULL));
    parts.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  return std::seed_seq(parts.begin(), parts.end());
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  auto seq = make_seed_seq({seed});
  engine_.seed(seq);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  auto seq = make_seed_seq({seed, stream, 0x9e3779b97f4a7c15ULL});
  engine_.seed(seq);
}

double Rng::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

Mat randn(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat out(rows, cols);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = dist(rng.engine());
  return out;
}

double asymmetry(const Mat& m) { return (m - m.transpose()).norm(); }

double orthonormality_error(const Mat& a) {
  const Mat gram = a.transpose() * a;
  return (gram - Mat::Identity(a.cols(), a.cols())).norm();
}

bool all_finite(const Mat& m) { return m.allFinite(); }

EighResult eigh(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw ShapeError("eigh: matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected square");
  }
  const Eigen::Index n = m.rows();
  const double scale = m.norm();
  if (asymmetry(m) > 1e-12 * std::max(scale, 1e-300)) {
    throw ContractError("eigh: matrix is not symmetric");
  }
  Mat a = 0.5 * (m + m.transpose());
  Mat v = Mat::Identity(n, n);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-16 * scale || off == 0.0) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  EighResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    Vec col = v.col(src);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > 1e-12) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
    out.vectors.col(k) = col;
  }
  return out;
}

Mat qr_orthonormalize(const Mat& a) {
  if (a.rows() < a.cols()) {
    throw ShapeError("qr_orthonormalize: need rows >= cols");
  }
  Mat q(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Vec col = a.col(j);
    const double original = col.norm();
    // Two passes of modified Gram-Schmidt keep Q orthonormal to roundoff.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const double r = q.col(i).dot(col);
        col -= r * q.col(i);
      }
    }
    const double rjj = col.norm();
    if (!(original > 0.0) || !(rjj > 1e-10 * original)) {
      throw DegeneracyError("qr_orthonormalize: column " + std::to_string(j) +
                            " is linearly dependent on earlier columns");
    }
    q.col(j) = col / rjj;
  }
  return q;
}

}  // namespace strkm
