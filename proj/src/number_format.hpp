#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace panelspec::detail {

// Shortest round-trip decimal form; independent of locale.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace panelspec::detail
