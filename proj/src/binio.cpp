#include "strkm/binio.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "strkm/errors.hpp"

namespace strkm::binio {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& buf, T v) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.insert(buf.end(), raw, raw + sizeof(T));
}

}  // namespace

void Writer::bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
void Writer::u8(std::uint8_t v) { buf_.push_back(v); }
void Writer::u16(std::uint16_t v) { put(buf_, v); }
void Writer::u32(std::uint32_t v) { put(buf_, v); }
void Writer::f32(float v) { put(buf_, v); }
void Writer::f64(double v) { put(buf_, v); }

void Reader::require(std::size_t n, const char* what) const {
  if (remaining() < n) {
    throw ParseError(pos_, std::string("truncated ") + what + ": expected " + std::to_string(n) +
                               " bytes, got " + std::to_string(remaining()));
  }
}

std::string Reader::bytes(std::size_t n, const char* what) {
  require(n, what);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

namespace {

template <typename T>
T get(std::span<const std::uint8_t> data, std::size_t& pos) {
  T v;
  std::memcpy(&v, data.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::uint8_t Reader::u8(const char* what) {
  require(1, what);
  return data_[pos_++];
}

std::uint16_t Reader::u16(const char* what) {
  require(2, what);
  return get<std::uint16_t>(data_, pos_);
}

std::uint32_t Reader::u32(const char* what) {
  require(4, what);
  return get<std::uint32_t>(data_, pos_);
}

float Reader::f32(const char* what) {
  require(4, what);
  return get<float>(data_, pos_);
}

double Reader::f64(const char* what) {
  require(8, what);
  return get<double>(data_, pos_);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace strkm::binio
