#pragma once

// Small string helpers shared by the file readers.

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace poitour::text {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  for (;;) {
    const auto pos = line.find(sep, begin);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(begin));
      return out;
    }
    out.push_back(line.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

/// Strips a trailing CR left by CRLF files and a leading UTF-8 BOM on the first line.
inline std::string_view chomp(std::string_view line, bool first_line) noexcept {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (first_line && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
  return line;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) noexcept {
  s = trim(s);
  std::int64_t value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

inline std::optional<double> parse_double(std::string_view s) noexcept {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

/// Collapses whitespace runs to single underscores; leading/trailing whitespace is dropped.
inline std::string normalize_token(std::string_view name) {
  name = trim(name);
  std::string out;
  out.reserve(name.size());
  bool in_space = false;
  for (char c : name) {
    if (is_space(c)) {
      in_space = true;
      continue;
    }
    if (in_space) out.push_back('_');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace poitour::text
