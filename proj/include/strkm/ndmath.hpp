#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace strkm {

// Dense row-major double matrix; the numeric currency of the whole library.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Seeded pseudo-random stream. There is no global generator: every random
// quantity in the library is drawn from an Rng passed in explicitly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  // Independent stream keyed by (seed, stream), e.g. (run seed, epoch).
  Rng(std::uint64_t seed, std::uint64_t stream);

  double normal();
  double uniform(double lo, double hi);
  std::uint64_t next_u64() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// I.i.d. standard normal matrix.
Mat randn(Eigen::Index rows, Eigen::Index cols, Rng& rng);

struct EighResult {
  Vec values;   // descending
  Mat vectors;  // columns are eigenvectors, orthonormal
};

// Symmetric eigendecomposition by cyclic Jacobi rotations. Eigenvalues are
// sorted descending; each eigenvector's first non-negligible entry is positive.
EighResult eigh(const Mat& m);

// Thin orthonormal factor of a full-column-rank matrix (R has positive
// diagonal). Throws DegeneracyError when a column is numerically dependent.
Mat qr_orthonormalize(const Mat& a);

// ||M - M^T||_F.
double asymmetry(const Mat& m);

// ||A^T A - I||_F.
double orthonormality_error(const Mat& a);

bool all_finite(const Mat& m);

}  // namespace strkm
