#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "strkm/diagnostics.hpp"
#include "strkm/errors.hpp"

using namespace strkm;

namespace {

Network linear_decoder(int l, int d, std::uint64_t seed) {
  Rng rng(seed);
  return Network({Layer{randn(d, l, rng), randn(1, d, rng), Activation::linear}});
}

// Central-difference Jacobian of the forward map along the columns of u.
Mat fd_delta(const Network& net, const Mat& u, const Vec& y, double h = 1e-6) {
  Mat delta(net.output_dim(), u.cols());
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const Vec dir = u.col(j);
    delta.col(j) = (net.forward(y + h * dir) - net.forward(y - h * dir)) / (2.0 * h);
  }
  return delta;
}

}  // namespace

TEST_CASE("chi3 moment") {
  CHECK(chi3_moment(1) == doctest::Approx(1.59577).epsilon(1e-5));
  CHECK(chi3_moment(2) == doctest::Approx(3.7599).epsilon(1e-4));
  for (int m = 1; m < 12; ++m) CHECK(chi3_moment(m + 1) > chi3_moment(m));
  CHECK_THROWS_AS(chi3_moment(0), ConfigError);
  for (int m : {1, 3}) {
    Rng rng(m);
    const int n = 2000000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double r2 = 0.0;
      for (int k = 0; k < m; ++k) {
        const double e = rng.normal();
        r2 += e * e;
      }
      s += r2 * std::sqrt(r2);
    }
    CHECK(std::abs(s / n - chi3_moment(m)) <= 0.005 * chi3_moment(m));
  }
}

TEST_CASE("lemma check on a linear decoder is exact up to MC error") {
  Rng rng(1);
  const Network dec = linear_decoder(4, 6, 2);
  const StiefelPoint u = StiefelPoint::random(4, 2, rng);
  const Vec x = randn(6, 1, rng), y = randn(4, 1, rng);
  const ExpansionReport rep = lemma_expansion_check(dec, u.matrix(), x, y, 0.3, 100000, 3);
  REQUIRE(rep.mc_lhs.size() == 6);
  const Mat wu = dec.layers()[0].weight * u.matrix();
  const Vec r = x - dec.forward(y);
  for (int a = 0; a < 6; ++a) {
    const double expect = r[a] * r[a] + 0.09 * wu.row(a).squaredNorm();
    CHECK(rep.quadratic_rhs[static_cast<std::size_t>(a)] == doctest::Approx(expect).epsilon(1e-9));
    CHECK(rep.abs_diff[static_cast<std::size_t>(a)] <= 4.0 * rep.mc_stderr[static_cast<std::size_t>(a)]);
    CHECK(std::abs(rep.remainder[static_cast<std::size_t>(a)]) <= 1e-9);
  }
  CHECK(rep.to_csv().rfind("a,sigma,mc_samples,mc_lhs,quadratic_rhs,abs_diff,mc_stderr,remainder,remainder_stderr\n", 0) == 0);
}

TEST_CASE("lemma check at a reconstructed point") {
  Rng rng(4);
  const Network dec = oracle::make_net({3, 6, 5}, {Activation::tanh, Activation::sigmoid}, 5);
  const StiefelPoint u = StiefelPoint::random(3, 2, rng);
  const Vec y = randn(3, 1, rng);
  const Vec x = dec.forward(y);
  const double sigma = 0.02;
  const ExpansionReport rep = lemma_expansion_check(dec, u.matrix(), x, y, sigma, 20000, 6);
  const Mat delta = fd_delta(dec, u.matrix(), y);
  for (int a = 0; a < 5; ++a) {
    const auto i = static_cast<std::size_t>(a);
    const double expect = sigma * sigma * delta.row(a).squaredNorm();
    CHECK(rep.quadratic_rhs[i] == doctest::Approx(expect).epsilon(1e-6));
    CHECK(std::abs(rep.remainder[i]) <= 1e-2 * expect);
  }
}

TEST_CASE("lemma check argument validation") {
  Rng rng(7);
  const Network prelu = oracle::make_net({3, 4, 5}, {Activation::prelu, Activation::sigmoid}, 1);
  const Mat u = StiefelPoint::random(3, 1, rng).matrix();
  const Vec x = randn(5, 1, rng), y = randn(3, 1, rng);
  CHECK_THROWS_AS(lemma_expansion_check(prelu, u, x, y, 0.1, 10000, 1), UnsupportedError);
  const Network smooth = oracle::make_net({3, 4, 5}, {Activation::tanh, Activation::sigmoid}, 1);
  CHECK_THROWS_AS(lemma_expansion_check(smooth, u, x, y, 0.1, 9999, 1), ConfigError);
  CHECK_THROWS_AS(lemma_expansion_check(smooth, u, x, y, 0.0, 10000, 1), ConfigError);
}

TEST_CASE("gram matrix") {
  Rng rng(8);
  // linear decoder with U spanning eigenvectors of A^T A gives a diagonal Gram
  const Network lin = linear_decoder(4, 7, 9);
  const Mat a = lin.layers()[0].weight;
  const EighResult e = eigh(a.transpose() * a);
  const Mat u = e.vectors.leftCols(2);
  const Mat g = gram_matrix(lin, u, randn(4, 1, rng));
  CHECK(std::abs(g(0, 1)) <= 1e-10 * g.norm());
  CHECK(g(0, 0) == doctest::Approx(e.values[0]).epsilon(1e-10));
  CHECK(diag_ratio(g) <= 1e-10);

  const Network dec = oracle::make_net({4, 6, 7}, {Activation::tanh, Activation::sigmoid}, 10);
  const StiefelPoint w = StiefelPoint::random(4, 3, rng);
  const Vec y = randn(4, 1, rng);
  const Mat gg = gram_matrix(dec, w.matrix(), y);
  const Mat fd = fd_delta(dec, w.matrix(), y);
  CHECK(oracle::max_rel_err(gg, fd.transpose() * fd, 1e-8) <= 1e-6);
  CHECK(asymmetry(gg) <= 1e-14);

  const Mat r = qr_orthonormalize(randn(3, 3, rng));
  const Mat rotated = gram_matrix(dec, w.matrix() * r, y);
  CHECK((rotated - r.transpose() * gg * r).norm() <= 1e-10 * gg.norm());

  const Mat g1 = gram_matrix(dec, w.matrix().leftCols(1), y);
  CHECK(g1.rows() == 1);
  CHECK(diag_ratio(g1) == 0.0);
}

TEST_CASE("diag_ratio") {
  CHECK(diag_ratio(Mat::Identity(3, 3)) == 0.0);
  CHECK(diag_ratio(Mat::Ones(2, 2)) == doctest::Approx(1.0));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 5.0;
  CHECK(diag_ratio(d) == 0.0);
  Mat z = Mat::Ones(2, 2);
  z.diagonal().setZero();
  CHECK_THROWS_AS(diag_ratio(z), DegeneracyError);
  Mat asym = Mat::Identity(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(diag_ratio(asym), ContractError);

  // uniform diagonal rescaling leaves the ratio unchanged
  Rng rng(11);
  const Mat b = randn(3, 3, rng);
  const Mat g = b.transpose() * b;
  CHECK(diag_ratio(7.5 * g) == doctest::Approx(diag_ratio(g)).epsilon(1e-12));
}
