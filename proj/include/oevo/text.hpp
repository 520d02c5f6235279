#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

#include "errors.hpp"

namespace oevo {

// Shortest round-trip decimal form. Every serialized double in the artifacts
// goes through here so that equal values always print as equal bytes.
inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError(what + ": not a number: '" + s + "'");
  }
  return v;
}

inline std::int64_t parse_int(const std::string& s, const std::string& what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError(what + ": not an integer: '" + s + "'");
  }
  return v;
}

inline std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError(what + ": not an unsigned integer: '" + s + "'");
  }
  return v;
}

inline bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "on" || s == "1") return true;
  if (s == "false" || s == "off" || s == "0") return false;
  throw ConfigError(what + ": not a boolean: '" + s + "'");
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// FNV-1a. Stable fingerprint for config identity checks in snapshots.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace oevo
