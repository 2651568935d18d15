#pragma once

#include <charconv>
#include <optional>
#include <string>

namespace bearraid {

/// Shortest round-trip decimal text for a double; stable across runs.
inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

/// Empty field for an undefined value.
inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace bearraid
