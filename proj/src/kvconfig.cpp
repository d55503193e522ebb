#include "strkm/kvconfig.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "strkm/errors.hpp"

namespace strkm::kv {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const Entry& e, const char* kind) {
  throw ParseError(e.offset, "key '" + e.key + "': '" + e.value + "' is not " + kind);
}

}  // namespace

std::vector<Entry> parse(std::string_view text) {
  std::vector<Entry> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(pos, "expected key = value");
      Entry e;
      e.key = std::string(trim(line.substr(0, eq)));
      e.value = std::string(trim(line.substr(eq + 1)));
      e.offset = pos;
      if (e.key.empty()) throw ParseError(pos, "empty key");
      out.push_back(std::move(e));
    }
    pos = end + 1;
  }
  return out;
}

double to_double(const Entry& e) {
  if (e.value.empty()) bad(e, "a number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end != e.value.c_str() + e.value.size() || errno == ERANGE || !std::isfinite(v)) {
    bad(e, "a finite number");
  }
  return v;
}

std::int64_t to_int(const Entry& e) {
  std::int64_t v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last) bad(e, "an integer");
  return v;
}

std::uint64_t to_uint(const Entry& e) {
  std::uint64_t v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last) bad(e, "an unsigned integer");
  return v;
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  bad(e, "a boolean");
}

std::vector<int> to_int_list(const Entry& e) {
  std::vector<int> out;
  if (e.value.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = e.value.find(',', pos);
    Entry part{e.key, std::string(trim(std::string_view(e.value).substr(
                          pos, comma == std::string::npos ? std::string::npos : comma - pos))),
               e.offset};
    const std::int64_t v = to_int(part);
    if (v < 1 || v > 1 << 20) bad(e, "a list of positive sizes");
    out.push_back(static_cast<int>(v));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace strkm::kv
