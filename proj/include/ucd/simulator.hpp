#ifndef UCD_SIMULATOR_HPP
#define UCD_SIMULATOR_HPP

#include "ucd/clho.hpp"
#include "ucd/oracle.hpp"

#include <iosfwd>
#include <optional>
#include <string_view>

namespace ucd {

/// After the scheduler dispatches period t, the realized state becomes `state`.
struct Disturbance {
  int t = 0;
  Dispatch state;
};

struct DisturbanceScript {
  std::vector<Disturbance> events; // strictly increasing t
};

/// Empty iff the script fits the scenario; entries read "disturb[i]: <rule>".
std::vector<std::string> validate_script(const DisturbanceScript& d, const Scenario& s);

/**
 * Parses "t=k:v1,v2,...". Either N thermal values (DG and DR then keep the
 * scheduled values) or N + 2 values including DG and DR.
 */
Disturbance parse_disturbance(std::string_view text, int units);

/// Where the realized state left the plan.
struct Divergence {
  int t = 0;
  Commitment planned_mode;
  Dispatch planned;
  Commitment realized_mode; // planned commitment plus any unit the override drives above 0
  Dispatch realized;
};

/// Realized vs optimal cost of the periods after a state the scheduler did not choose.
struct TailComparison {
  int from_t = 0; // first period of the tail; 1 for the initial state
  Commitment state_mode;
  Dispatch state;
  double realized_cost = 0; // sum of Q + kappa over from_t..T
  Schedule realized_schedule;
  bool interrupted = false;          // a later override falls inside the tail, so no optimum applies
  std::optional<double> oracle_cost; // absent when interrupted or over the oracle budget
  Schedule oracle_schedule;

  bool checked() const { return oracle_cost.has_value(); }
  bool matches(double tol = 1e-4) const;
};

struct RunReport {
  Trajectory trajectory;
  std::vector<Divergence> divergences;
  std::vector<TailComparison> comparisons;
};

/**
 * Closed-loop run: schedule_step from the initial state, overriding the
 * realized state where the script says so. The model is never retrained.
 */
RunReport simulate(const Scenario& s, const ValueModel& m, const DisturbanceScript& d = {},
                   const OracleOptions& opts = {});

void write_report_json(std::ostream& out, const RunReport& r, const Scenario& s);

/// Oracle enumeration with the CLHO schedule alongside.
struct ComparisonTable {
  std::vector<OracleResult> rows; // empty when the oracle budget is exceeded
  Trajectory clho;
  std::optional<Schedule> oracle_argmin;

  bool matches_oracle() const;
};

ComparisonTable compare_with_oracle(const Scenario& s, const ValueModel& m, const OracleOptions& opts = {});

/// Header `schedule,total_cost,oracle_argmin,clho`; a CLHO-only row when no oracle rows exist.
void write_comparison_csv(std::ostream& out, const ComparisonTable& c);

} // namespace ucd

#endif // UCD_SIMULATOR_HPP
