#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "strkm/ndmath.hpp"

namespace strkm {

using LevelMat = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FactorSpec {
  std::string name;
  int cardinality = 1;

  // Level value on an even grid in [0, 1].
  double value(int level) const {
    return cardinality > 1 ? static_cast<double>(level) / (cardinality - 1) : 0.0;
  }
};

// Grayscale images with the ground-truth factor levels that generated them.
struct FactorDataset {
  int height = 0;
  int width = 0;
  Mat images;       // n x (h*w), row-major pixels in [0, 1]
  LevelMat levels;  // n x F
  std::vector<FactorSpec> factors;

  Eigen::Index size() const { return images.rows(); }
  Eigen::Index pixel_count() const { return static_cast<Eigen::Index>(height) * width; }
  Eigen::Index num_factors() const { return static_cast<Eigen::Index>(factors.size()); }

  // Factor values normalized to [0, 1], n x F.
  Mat factor_values() const;
  // Rows selected by index, in order.
  Mat gather(std::span<const int> indices) const;

  // Throws ShapeError/ContractError when fields disagree.
  void validate() const;
};

bool operator==(const FactorDataset& a, const FactorDataset& b);

struct Shapes2fConfig {
  int grid = 16;
  int x_levels = 8;
  int y_levels = 8;
  int scale_levels = 4;
  int shape_levels = 2;  // square, disc
  double min_half_size = 1.5;
  double max_half_size = 3.0;
  int supersample = 4;
};

// Exhaustive factor grid (x, y, scale, shape; lexicographic, x slowest) of
// anti-aliased squares and discs. Positions step by whole pixels.
FactorDataset gen_shapes2f(const Shapes2fConfig& config = {});

// Row index of a factor tuple in an exhaustive lexicographic grid, and back.
std::size_t factor_index(std::span<const int> levels, std::span<const int> cardinalities);
std::vector<int> factor_tuple(std::size_t index, std::span<const int> cardinalities);

std::vector<std::uint8_t> serialize_dataset(const FactorDataset& ds);
FactorDataset parse_dataset(std::span<const std::uint8_t> bytes);
void save_dataset(const FactorDataset& ds, const std::filesystem::path& path);
FactorDataset load_dataset(const std::filesystem::path& path);

// Seeded permutation of [0, n) keyed by (seed, epoch), cut into consecutive
// batches; the last batch may be partial.
std::vector<std::vector<int>> minibatches(int n, int batch_size, std::uint64_t seed,
                                          std::uint64_t epoch);

}  // namespace strkm
