#include "strkm/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strkm/binio.hpp"
#include "strkm/errors.hpp"

namespace strkm {

namespace {

constexpr char kMagic[] = "SFDS1";
constexpr std::size_t kMagicLen = 5;
constexpr std::uint8_t kVersion = 1;

}  // namespace

Mat FactorDataset::factor_values() const {
  Mat out(levels.rows(), levels.cols());
  for (Eigen::Index i = 0; i < levels.rows(); ++i)
    for (Eigen::Index f = 0; f < levels.cols(); ++f)
      out(i, f) = factors[static_cast<std::size_t>(f)].value(levels(i, f));
  return out;
}

Mat FactorDataset::gather(std::span<const int> indices) const {
  Mat out(static_cast<Eigen::Index>(indices.size()), images.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const int i = indices[k];
    if (i < 0 || i >= images.rows()) throw ContractError("gather: index out of range");
    out.row(static_cast<Eigen::Index>(k)) = images.row(i);
  }
  return out;
}

void FactorDataset::validate() const {
  if (height < 1 || width < 1) throw ShapeError("dataset: image dims must be positive");
  if (images.cols() != pixel_count()) throw ShapeError("dataset: pixel count mismatch");
  if (levels.rows() != images.rows() || levels.cols() != num_factors()) {
    throw ShapeError("dataset: factor level matrix shape mismatch");
  }
  for (Eigen::Index i = 0; i < levels.rows(); ++i)
    for (Eigen::Index f = 0; f < levels.cols(); ++f) {
      const int lv = levels(i, f);
      if (lv < 0 || lv >= factors[static_cast<std::size_t>(f)].cardinality) {
        throw ContractError("dataset: factor level out of range at row " + std::to_string(i));
      }
    }
}

bool operator==(const FactorDataset& a, const FactorDataset& b) {
  if (a.height != b.height || a.width != b.width || a.factors.size() != b.factors.size()) {
    return false;
  }
  for (std::size_t f = 0; f < a.factors.size(); ++f) {
    if (a.factors[f].name != b.factors[f].name ||
        a.factors[f].cardinality != b.factors[f].cardinality) {
      return false;
    }
  }
  return a.images.rows() == b.images.rows() && a.images.cols() == b.images.cols() &&
         a.levels.rows() == b.levels.rows() && a.levels.cols() == b.levels.cols() &&
         a.images == b.images && a.levels == b.levels;
}

std::size_t factor_index(std::span<const int> levels, std::span<const int> cardinalities) {
  if (levels.size() != cardinalities.size()) throw ShapeError("factor_index: size mismatch");
  std::size_t idx = 0;
  for (std::size_t f = 0; f < levels.size(); ++f) {
    if (levels[f] < 0 || levels[f] >= cardinalities[f]) {
      throw ContractError("factor_index: level out of range");
    }
    idx = idx * static_cast<std::size_t>(cardinalities[f]) + static_cast<std::size_t>(levels[f]);
  }
  return idx;
}

std::vector<int> factor_tuple(std::size_t index, std::span<const int> cardinalities) {
  std::vector<int> out(cardinalities.size());
  for (std::size_t f = cardinalities.size(); f-- > 0;) {
    const auto card = static_cast<std::size_t>(cardinalities[f]);
    out[f] = static_cast<int>(index % card);
    index /= card;
  }
  if (index != 0) throw ContractError("factor_tuple: index out of range");
  return out;
}

FactorDataset gen_shapes2f(const Shapes2fConfig& c) {
  if (c.grid < 1 || c.supersample < 1) throw ConfigError("shapes2f: grid and supersample >= 1");
  if (c.x_levels < 2 || c.y_levels < 2 || c.scale_levels < 1) {
    throw ConfigError("shapes2f: x/y need >= 2 levels, scale >= 1");
  }
  if (c.shape_levels != 2) throw ConfigError("shapes2f: exactly 2 shapes (square, disc)");
  if (!(c.min_half_size > 0.0) || c.max_half_size < c.min_half_size) {
    throw ConfigError("shapes2f: need 0 < min_half_size <= max_half_size");
  }
  const double x0 = 0.5 * (c.grid - (c.x_levels - 1));
  const double y0 = 0.5 * (c.grid - (c.y_levels - 1));
  const double largest = c.scale_levels > 1 ? c.max_half_size
                                            : 0.5 * (c.min_half_size + c.max_half_size);
  if (x0 - largest < 0.0 || x0 + (c.x_levels - 1) + largest > c.grid ||
      y0 - largest < 0.0 || y0 + (c.y_levels - 1) + largest > c.grid) {
    throw ConfigError("shapes2f: shape larger than canvas at extreme positions");
  }

  FactorDataset ds;
  ds.height = c.grid;
  ds.width = c.grid;
  ds.factors = {{"x_position", c.x_levels},
                {"y_position", c.y_levels},
                {"scale", c.scale_levels},
                {"shape", c.shape_levels}};
  const int cards[] = {c.x_levels, c.y_levels, c.scale_levels, c.shape_levels};
  const std::size_t n = static_cast<std::size_t>(c.x_levels) * c.y_levels * c.scale_levels *
                        c.shape_levels;
  ds.images.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c.grid) * c.grid);
  ds.levels.resize(static_cast<Eigen::Index>(n), 4);

  const int s = c.supersample;
  const double inv_samples = 1.0 / (static_cast<double>(s) * s);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::vector<int> lv = factor_tuple(idx, cards);
    const double cx = x0 + lv[0];
    const double cy = y0 + lv[1];
    const double half =
        c.scale_levels > 1
            ? c.min_half_size + lv[2] * (c.max_half_size - c.min_half_size) / (c.scale_levels - 1)
            : 0.5 * (c.min_half_size + c.max_half_size);
    const bool disc = lv[3] == 1;
    const auto row = static_cast<Eigen::Index>(idx);
    for (int f = 0; f < 4; ++f) ds.levels(row, f) = lv[static_cast<std::size_t>(f)];
    for (int py = 0; py < c.grid; ++py) {
      for (int px = 0; px < c.grid; ++px) {
        int hits = 0;
        for (int sy = 0; sy < s; ++sy) {
          const double y = py + (sy + 0.5) / s - cy;
          for (int sx = 0; sx < s; ++sx) {
            const double x = px + (sx + 0.5) / s - cx;
            const bool inside = disc ? (x * x + y * y < half * half)
                                     : (std::abs(x) < half && std::abs(y) < half);
            hits += inside ? 1 : 0;
          }
        }
        // Stored values are exactly representable as float for bit-exact I/O.
        ds.images(row, static_cast<Eigen::Index>(py) * c.grid + px) =
            static_cast<double>(static_cast<float>(hits * inv_samples));
      }
    }
  }
  return ds;
}

std::vector<std::uint8_t> serialize_dataset(const FactorDataset& ds) {
  ds.validate();
  binio::Writer w;
  w.bytes(std::string_view(kMagic, kMagicLen));
  w.u8(kVersion);
  w.u32(static_cast<std::uint32_t>(ds.size()));
  w.u32(static_cast<std::uint32_t>(ds.height));
  w.u32(static_cast<std::uint32_t>(ds.width));
  w.u32(static_cast<std::uint32_t>(ds.num_factors()));
  for (const auto& f : ds.factors) {
    if (f.name.size() > 255) throw ConfigError("factor name longer than 255 bytes");
    w.u8(static_cast<std::uint8_t>(f.name.size()));
    w.bytes(f.name);
    w.u32(static_cast<std::uint32_t>(f.cardinality));
  }
  for (Eigen::Index i = 0; i < ds.levels.size(); ++i) {
    w.u16(static_cast<std::uint16_t>(ds.levels.data()[i]));
  }
  for (Eigen::Index i = 0; i < ds.images.size(); ++i) {
    w.f32(static_cast<float>(ds.images.data()[i]));
  }
  return w.take();
}

FactorDataset parse_dataset(std::span<const std::uint8_t> bytes) {
  binio::Reader r(bytes);
  if (bytes.size() < kMagicLen ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), kMagicLen) !=
          std::string_view(kMagic, kMagicLen)) {
    throw ParseError(0, "bad magic, expected SFDS1");
  }
  r.bytes(kMagicLen, "magic");
  const std::size_t version_at = r.offset();
  const std::uint8_t version = r.u8("version");
  if (version != kVersion) {
    throw ParseError(version_at, "unsupported version " + std::to_string(version));
  }
  const std::uint32_t n = r.u32("n");
  const std::size_t h_at = r.offset();
  const std::uint32_t h = r.u32("height");
  const std::uint32_t w = r.u32("width");
  if (h == 0 || w == 0) throw ParseError(h_at, "image dims must be positive");
  const std::uint32_t nf = r.u32("factor count");

  FactorDataset ds;
  ds.height = static_cast<int>(h);
  ds.width = static_cast<int>(w);
  for (std::uint32_t f = 0; f < nf; ++f) {
    const std::uint8_t len = r.u8("factor name length");
    FactorSpec spec;
    spec.name = r.bytes(len, "factor name");
    const std::size_t card_at = r.offset();
    const std::uint32_t card = r.u32("factor cardinality");
    if (card == 0 || card > 65536) throw ParseError(card_at, "bad factor cardinality");
    spec.cardinality = static_cast<int>(card);
    ds.factors.push_back(std::move(spec));
  }

  const std::size_t level_bytes = static_cast<std::size_t>(n) * nf * 2;
  const std::size_t pixel_bytes = static_cast<std::size_t>(n) * h * w * 4;
  r.require(level_bytes, "factor level section");
  ds.levels.resize(n, nf);
  for (Eigen::Index i = 0; i < ds.levels.size(); ++i) {
    const std::size_t at = r.offset();
    const std::uint16_t lv = r.u16("factor level");
    const auto f = static_cast<std::size_t>(i % nf);
    if (lv >= ds.factors[f].cardinality) {
      throw ParseError(at, "factor level " + std::to_string(lv) + " exceeds cardinality");
    }
    ds.levels.data()[i] = lv;
  }
  r.require(pixel_bytes, "pixel section");
  ds.images.resize(n, static_cast<Eigen::Index>(h) * w);
  for (Eigen::Index i = 0; i < ds.images.size(); ++i) {
    ds.images.data()[i] = static_cast<double>(r.f32("pixel"));
  }
  if (r.remaining() != 0) {
    throw ParseError(r.offset(), std::to_string(r.remaining()) + " trailing bytes");
  }
  return ds;
}

void save_dataset(const FactorDataset& ds, const std::filesystem::path& path) {
  binio::write_file(path, serialize_dataset(ds));
}

FactorDataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(binio::read_file(path));
}

std::vector<std::vector<int>> minibatches(int n, int batch_size, std::uint64_t seed,
                                          std::uint64_t epoch) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  std::vector<int> perm(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed, epoch);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<std::vector<int>> out;
  for (std::size_t start = 0; start < perm.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(perm.size(), start + static_cast<std::size_t>(batch_size));
    out.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                     perm.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace strkm
