#ifndef UCD_TYPES_HPP
#define UCD_TYPES_HPP

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ucd {

template <typename Scalar> using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

/// Raised for violated domain contracts (infeasible modes, bad data, budget overruns).
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/**
 * On/off status of the N thermal units for one period.
 *
 * Unit 1 is the most significant bit of `code()`, so for two units the codes
 * 1, 2, 3 are [0,1], [1,0], [1,1]. Ordering commitments by code is the
 * tie-break order used by every scheduler.
 */
class Commitment {
public:
  static constexpr int max_units = 24;

  Commitment() = default;
  explicit Commitment(int units, std::uint32_t code = 0);

  static Commitment from_bits(const std::vector<int>& bits);
  /// Parses "011" (unit 1 first); whitespace and commas are ignored.
  static Commitment parse(std::string_view bits);

  int size() const { return size_; }
  std::uint32_t code() const { return code_; }
  bool on(int unit) const { return (code_ >> (size_ - 1 - unit)) & 1u; }
  void set(int unit, bool value);
  int count() const;

  std::vector<int> bits() const;
  std::string str() const;

  friend bool operator==(const Commitment& a, const Commitment& b) = default;
  friend auto operator<=>(const Commitment& a, const Commitment& b) = default;

private:
  int size_ = 0;
  std::uint32_t code_ = 0;
};

/// All 2^N commitments in code order.
std::vector<Commitment> all_commitments(int units);

/// Power outputs [P_1..P_N, P_DG, P_DR] in MW for one period.
struct Dispatch {
  Vector values;

  Dispatch() = default;
  explicit Dispatch(int units) : values(Vector::Zero(units + 2)) {}
  explicit Dispatch(Vector v) : values(std::move(v)) {}
  Dispatch(const std::vector<double>& thermal, double dg, double dr);

  int units() const { return static_cast<int>(values.size()) - 2; }
  double& thermal(int n) { return values(n); }
  double thermal(int n) const { return values(n); }
  double& dg() { return values(values.size() - 2); }
  double dg() const { return values(values.size() - 2); }
  double& dr() { return values(values.size() - 1); }
  double dr() const { return values(values.size() - 1); }
  auto thermal_block() const { return values.head(values.size() - 2); }

  friend bool operator==(const Dispatch& a, const Dispatch& b) {
    return a.values.size() == b.values.size() && a.values == b.values;
  }
};

/// Switching schedule I[1..T].
using Schedule = std::vector<Commitment>;

/// Digit form ("122333") when every code fits one digit, else bitstrings joined by '-'.
std::string schedule_code(const Schedule& schedule);
/// Inverse of schedule_code for a given unit count.
Schedule parse_schedule(std::string_view code, int units);

} // namespace ucd

#endif // UCD_TYPES_HPP
