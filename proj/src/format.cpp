#include "ucd/format.hpp"

#include <array>
#include <charconv>

namespace ucd {

std::string exact(double v) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

std::string fixed(double v, int digits) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  std::string out(buf.data(), r.ptr);
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-')
    out.erase(0, 1);
  return out;
}

} // namespace ucd
