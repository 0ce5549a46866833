#ifndef REACTSYNTH_SRC_TEXT_UTIL_HPP_
#define REACTSYNTH_SRC_TEXT_UTIL_HPP_

#include <charconv>
#include <string>

namespace reactsynth::detail {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Shortest round-trip text without exponent notation.
inline std::string format_double_fixed(double v)
{
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

}  // namespace reactsynth::detail

#endif  // REACTSYNTH_SRC_TEXT_UTIL_HPP_
