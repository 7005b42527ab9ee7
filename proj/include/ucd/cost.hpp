#ifndef UCD_COST_HPP
#define UCD_COST_HPP

#include "ucd/scenario.hpp"

namespace ucd {

struct Trajectory;

/// Cost charged at one period: running cost Q and switching cost kappa.
struct StageCost {
  double running = 0;
  double switching = 0;

  double total() const { return running + switching; }
};

/// a p^2 + b p + c.
double fuel_cost(const ThermalUnitParams& u, double p);

/// alpha p^2 + beta p + gamma, in tons.
double emission(const ThermalUnitParams& u, double p);

double virtual_cost(const VirtualResourceParams& v, double p);

/**
 * Running cost of one period.
 *
 * Sum over committed units of fuel plus priced emissions, plus the DG and DR
 * costs. Uncommitted units contribute nothing regardless of their entry in
 * `dispatch`. The quota rebate is horizon-level and is not included.
 */
double running_cost(const Scenario& s, const Commitment& mode, const Dispatch& dispatch);

/// Per-unit switching cost for the transition prev -> next of one unit.
double unit_switching_cost(const ThermalUnitParams& u, bool prev, bool next);

/**
 * Closed-form start-up/shutdown/banking cost of the transition prev -> next.
 *
 * Per unit: off->off and off->on cost C_b, on->on costs nothing, on->off costs
 * C_f + C_D. Over a full off-cycle of tau periods this totals C_f + C_b tau + C_D.
 */
double switching_cost(const Scenario& s, const Commitment& prev, const Commitment& next);

/// Banking-mode start-up cost C_b tau + C_f.
double startup_cost_reference(const ThermalUnitParams& u, int tau);

/// (sum of committed emissions - quota) * price, summed over units. May be negative.
double horizon_emission_cost(const Scenario& s, const Trajectory& traj);

/// -sum_n Q_n p_e: constant for a scenario.
double quota_rebate(const Scenario& s);

} // namespace ucd

#endif // UCD_COST_HPP
