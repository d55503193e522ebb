#include <doctest.h>

#include "oracles.hpp"
#include "strkm/errors.hpp"

using namespace strkm;

namespace {

Network zero_net(int in, int out, Activation act) {
  return Network({Layer{Mat::Zero(out, in), Mat::Zero(1, out), act}});
}

}  // namespace

TEST_CASE("encode, latent_code and reconstruct") {
  StRkmModel m = oracle::tiny_model(6, 4, 2, Activation::prelu, 3);
  Rng rng(1);
  const Vec x = randn(6, 1, rng).cwiseAbs().cwiseMin(1.0);
  CHECK(encode(m, x) == m.encoder.forward(x));
  CHECK(encode(m, x) == encode(m, x));

  const Vec phi = encode(m, x);
  const Vec h = latent_code(m, x);
  CHECK((h - m.u.matrix().transpose() * phi).norm() == 0.0);
  CHECK(h.norm() <= phi.norm() + 1e-15);
  CHECK((m.u.matrix().transpose() * project(m, phi) - h).norm() <= 1e-14);
  CHECK(reconstruct(m, x) == decode(m, project(m, encode(m, x))));

  const Vec xr = reconstruct(m, x);
  CHECK((xr.array() > 0.0).all());
  CHECK((xr.array() < 1.0).all());

  StRkmModel zero(zero_net(6, 4, Activation::linear), zero_net(4, 6, Activation::sigmoid),
                  StiefelPoint::canonical(4, 2));
  CHECK(encode(zero, x).norm() == 0.0);
  CHECK((reconstruct(zero, x).array() == 0.5).all());

  StRkmModel canon(m.encoder, m.decoder, StiefelPoint::canonical(4, 2));
  CHECK(latent_code(canon, x) == encode(canon, x).head(2));

  StRkmModel full(m.encoder, m.decoder, StiefelPoint::random(4, 4, rng));
  CHECK((reconstruct(full, x) - m.decoder.forward(m.encoder.forward(x))).norm() <= 1e-12);

  CHECK_THROWS_AS(encode(m, Vec::Ones(5)), ShapeError);
  CHECK_THROWS_AS(StRkmModel(m.encoder, m.decoder, StiefelPoint::canonical(5, 2)), ShapeError);
}

TEST_CASE("batched variants agree with per-sample ones") {
  StRkmModel m = oracle::tiny_model(6, 4, 2, Activation::tanh, 5);
  Rng rng(2);
  const Mat x = randn(3, 6, rng);
  const Mat codes = latent_codes(m, x);
  const Mat rec = reconstruct_batch(m, x);
  for (int i = 0; i < 3; ++i) {
    CHECK((codes.row(i).transpose() - latent_code(m, x.row(i).transpose())).norm() <= 1e-14);
    CHECK((rec.row(i).transpose() - reconstruct(m, x.row(i).transpose())).norm() <= 1e-14);
  }
}

TEST_CASE("projector identities") {
  Rng rng(4);
  StiefelPoint u = StiefelPoint::random(6, 2, rng);
  const Mat p = u.projector();
  const Mat perp = Mat::Identity(6, 6) - p;
  CHECK((p * p - p).norm() <= 1e-12);
  CHECK((p + perp - Mat::Identity(6, 6)).norm() <= 1e-12);
  const Vec phi = randn(6, 1, rng);
  const double lhs = (perp * phi).squaredNorm();
  const double rhs = phi.squaredNorm() - (u.matrix().transpose() * phi).squaredNorm();
  CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
}

TEST_CASE("mollified projector") {
  Rng rng(6);
  StiefelPoint u = StiefelPoint::random(5, 2, rng);
  const Mat& um = u.matrix();
  const Mat perp = Mat::Identity(5, 5) - u.projector();
  const Vec orth = perp * randn(5, 1, rng);
  CHECK((mollified_perp_apply(um, 1e-5, orth) - orth).norm() <= 1e-14);

  const Vec in_range = um.col(1);
  const double eps = 1e-5;
  CHECK((mollified_perp_apply(um, eps, in_range) - eps / (1.0 + eps) * in_range).norm() <= 1e-15);

  const Vec v = randn(5, 1, rng);
  for (double e : {1e-3, 1e-5, 1e-7}) {
    CHECK((mollified_perp_apply(um, e, v) - perp * v).norm() <= 10.0 * e * v.norm());
  }
  CHECK_THROWS_AS(mollified_perp_apply(um, 0.0, v), ConfigError);
  CHECK_THROWS_AS(mollified_perp_apply(um, -1.0, v), ConfigError);
}
