#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Line-oriented `key = value` text with `#` comments.
namespace strkm::kv {

struct Entry {
  std::string key;
  std::string value;
  std::size_t offset = 0;  // byte offset of the line start
};

// Throws ParseError for lines without '=' or with an empty key.
std::vector<Entry> parse(std::string_view text);

double to_double(const Entry& e);
std::int64_t to_int(const Entry& e);
std::uint64_t to_uint(const Entry& e);
bool to_bool(const Entry& e);
std::vector<int> to_int_list(const Entry& e);

// Round-trip formatting (%.17g).
std::string format(double v);

}  // namespace strkm::kv
