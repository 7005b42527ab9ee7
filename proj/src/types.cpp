#include "ucd/types.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

namespace ucd {

Commitment::Commitment(int units, std::uint32_t code) : size_(units), code_(code) {
  if (units < 0 || units > max_units)
    throw DomainError("commitment size out of range: " + std::to_string(units));
  if (units < 32 && (code >> units) != 0)
    throw DomainError("commitment code " + std::to_string(code) + " does not fit " +
                      std::to_string(units) + " units");
}

Commitment Commitment::from_bits(const std::vector<int>& bits) {
  Commitment c(static_cast<int>(bits.size()));
  for (int n = 0; n < c.size(); ++n) {
    if (bits[n] != 0 && bits[n] != 1)
      throw DomainError("commitment entries must be 0 or 1");
    c.set(n, bits[n] == 1);
  }
  return c;
}

Commitment Commitment::parse(std::string_view text) {
  std::vector<int> bits;
  for (char ch : text) {
    if (ch == '0' || ch == '1')
      bits.push_back(ch - '0');
    else if (!std::isspace(static_cast<unsigned char>(ch)) && ch != ',')
      throw DomainError("invalid commitment string '" + std::string(text) + "'");
  }
  return from_bits(bits);
}

void Commitment::set(int unit, bool value) {
  const std::uint32_t mask = 1u << (size_ - 1 - unit);
  code_ = value ? (code_ | mask) : (code_ & ~mask);
}

int Commitment::count() const { return std::popcount(code_); }

std::vector<int> Commitment::bits() const {
  std::vector<int> out(size_);
  for (int n = 0; n < size_; ++n)
    out[n] = on(n) ? 1 : 0;
  return out;
}

std::string Commitment::str() const {
  std::string out(size_, '0');
  for (int n = 0; n < size_; ++n)
    if (on(n))
      out[n] = '1';
  return out;
}

std::vector<Commitment> all_commitments(int units) {
  std::vector<Commitment> out;
  out.reserve(std::size_t{1} << units);
  for (std::uint32_t code = 0; code < (1u << units); ++code)
    out.emplace_back(units, code);
  return out;
}

Dispatch::Dispatch(const std::vector<double>& thermal, double dg, double dr)
    : values(static_cast<Eigen::Index>(thermal.size()) + 2) {
  for (std::size_t n = 0; n < thermal.size(); ++n)
    values(static_cast<Eigen::Index>(n)) = thermal[n];
  this->dg() = dg;
  this->dr() = dr;
}

std::string schedule_code(const Schedule& schedule) {
  const bool digits = std::all_of(schedule.begin(), schedule.end(),
                                  [](const Commitment& c) { return c.code() < 10; });
  std::string out;
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    if (digits) {
      out += static_cast<char>('0' + schedule[t].code());
    } else {
      if (t > 0)
        out += '-';
      out += schedule[t].str();
    }
  }
  return out;
}

Schedule parse_schedule(std::string_view code, int units) {
  Schedule out;
  if (code.find('-') != std::string_view::npos || (units > 3 && !code.empty())) {
    std::size_t start = 0;
    while (start <= code.size()) {
      const auto end = std::min(code.find('-', start), code.size());
      const auto c = Commitment::parse(code.substr(start, end - start));
      if (c.size() != units)
        throw DomainError("schedule entry has wrong unit count");
      out.push_back(c);
      start = end + 1;
    }
    return out;
  }
  for (char ch : code) {
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw DomainError("invalid schedule code '" + std::string(code) + "'");
    out.emplace_back(units, static_cast<std::uint32_t>(ch - '0'));
  }
  return out;
}

} // namespace ucd
