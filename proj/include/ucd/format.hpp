#ifndef UCD_FORMAT_HPP
#define UCD_FORMAT_HPP

#include <string>

namespace ucd {

/// Shortest decimal text that parses back to exactly `v`.
std::string exact(double v);

/// Fixed-point text with `digits` decimals (display rounding).
std::string fixed(double v, int digits = 1);

} // namespace ucd

#endif // UCD_FORMAT_HPP
