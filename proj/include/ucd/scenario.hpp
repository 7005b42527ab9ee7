#ifndef UCD_SCENARIO_HPP
#define UCD_SCENARIO_HPP

#include "ucd/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ucd {

struct ThermalUnitParams {
  double a = 0, b = 0, c = 0;       // fuel cost: $/MW^2h, $/MWh, $/h
  double p_min = 0, p_max = 0;      // MW
  std::optional<double> ramp_down;  // MW per period, absent = unbounded
  std::optional<double> ramp_up;
  double c_bank = 0;                // $ per banked period
  double c_fix = 0;                 // $ fixed start-up
  double c_shut = 0;                // $ shutdown
  double alpha = 0, beta = 0, gamma = 0; // emission: ton/MW^2h, ton/MWh, ton/h
  double quota = 0;                 // ton over the horizon

  friend bool operator==(const ThermalUnitParams&, const ThermalUnitParams&) = default;
};

enum class VirtualRole { distributed_generation, demand_response };

/// Aggregated DG or DR unit with quadratic cost.
struct VirtualResourceParams {
  double a = 1, b = 0, c = 0;
  VirtualRole role = VirtualRole::distributed_generation;

  friend bool operator==(const VirtualResourceParams&, const VirtualResourceParams&) = default;
};

struct CetParams {
  double price = 0; // $/ton

  friend bool operator==(const CetParams&, const CetParams&) = default;
};

struct PeriodExogenous {
  double demand = 0;
  double dg_max = 0;
  double dr_max = 0;
  double reserve_lo = 0;
  double reserve_hi = 0;

  friend bool operator==(const PeriodExogenous&, const PeriodExogenous&) = default;
};

/**
 * One immutable problem instance.
 *
 * Periods are stored 0-based; period index t = 1..T maps to `periods[t - 1]`.
 */
struct Scenario {
  std::vector<ThermalUnitParams> units;
  VirtualResourceParams dg{1, 0, 0, VirtualRole::distributed_generation};
  VirtualResourceParams dr{1, 0, 0, VirtualRole::demand_response};
  CetParams cet;
  double eta_max = 1.0;
  std::vector<PeriodExogenous> periods;
  Dispatch initial_dispatch;
  Commitment initial_commitment;
  bool ramp_enforced = false;

  int units_count() const { return static_cast<int>(units.size()); }
  int horizon() const { return static_cast<int>(periods.size()); }
  const PeriodExogenous& period(int t) const { return periods.at(static_cast<std::size_t>(t - 1)); }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parse failure with the offending location ("line 12", "units[0].a").
class ScenarioParseError : public DomainError {
public:
  ScenarioParseError(std::string location, const std::string& what)
      : DomainError(location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

private:
  std::string location_;
};

/// Empty iff every invariant holds; each entry reads "<field>: <rule>".
std::vector<std::string> validate_scenario(const Scenario& s);

/// Parses a scenario document. Throws ScenarioParseError, including when the
/// parsed scenario fails validation.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical document (explicit reserves, every field present). Doubles are
/// written in shortest round-trip form, so parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// Hex SHA-256 of the canonical document.
std::string scenario_fingerprint(const Scenario& s);

} // namespace ucd

#endif // UCD_SCENARIO_HPP
