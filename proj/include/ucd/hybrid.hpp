#ifndef UCD_HYBRID_HPP
#define UCD_HYBRID_HPP

#include "ucd/cost.hpp"
#include "ucd/dispatch.hpp"

#include <iosfwd>

namespace ucd {

struct TrajectoryStep {
  int t = 0;
  Commitment mode;
  Dispatch dispatch;
  StageCost cost;
  std::vector<double> emissions; // tons per unit, 0 when uncommitted
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double running_total = 0;
  double switching_total = 0;
  double emission_cost = 0; // priced tons minus quota rebate, as charged over the horizon
  double quota_rebate = 0;  // -sum Q_n p_e
  double grand_total = 0;   // running + switching + rebate
  double total_tons = 0;

  Schedule schedule() const;
};

/**
 * Runs the hybrid system under `schedule` from the scenario's initial state.
 * Throws InfeasibleModeError at the first period whose mode has no feasible
 * dispatch.
 */
Trajectory run_schedule(const Scenario& s, const Schedule& schedule);

/// Same from an arbitrary state entering period `first_t`; the schedule covers first_t..T.
Trajectory run_schedule_from(const Scenario& s, int first_t, const Commitment& prev_mode,
                             const Dispatch& prev_dispatch, const Schedule& schedule);

/// Builds one step from an already computed dispatch.
TrajectoryStep make_step(const Scenario& s, int t, const Commitment& prev_mode, const Commitment& mode,
                         const Dispatch& dispatch);

/// Recomputes totals from the steps.
void finalize(const Scenario& s, Trajectory& traj);

/// sum_t (Q + kappa) plus the quota rebate.
double total_cost(const Trajectory& traj);

/// Header `t,I_1..I_N,P_1..P_N,P_DG,P_DR,Q,kappa,emissions_ton,cumulative_cost`, one row per period.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

} // namespace ucd

#endif // UCD_HYBRID_HPP
