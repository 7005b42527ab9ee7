#include "ucd/hybrid.hpp"

#include "ucd/format.hpp"

#include <ostream>

namespace ucd {

Schedule Trajectory::schedule() const {
  Schedule out;
  for (const auto& s : steps)
    out.push_back(s.mode);
  return out;
}

TrajectoryStep make_step(const Scenario& s, int t, const Commitment& prev_mode, const Commitment& mode,
                         const Dispatch& dispatch) {
  TrajectoryStep step;
  step.t = t;
  step.mode = mode;
  step.dispatch = dispatch;
  step.cost.running = running_cost(s, mode, dispatch);
  step.cost.switching = switching_cost(s, prev_mode, mode);
  step.emissions.assign(static_cast<std::size_t>(s.units_count()), 0.0);
  for (int n = 0; n < s.units_count(); ++n)
    if (mode.on(n))
      step.emissions[n] = emission(s.units[n], dispatch.thermal(n));
  return step;
}

void finalize(const Scenario& s, Trajectory& traj) {
  traj.running_total = traj.switching_total = traj.total_tons = 0;
  for (const auto& step : traj.steps) {
    traj.running_total += step.cost.running;
    traj.switching_total += step.cost.switching;
    for (double e : step.emissions)
      traj.total_tons += e;
  }
  traj.quota_rebate = quota_rebate(s);
  traj.emission_cost = horizon_emission_cost(s, traj);
  traj.grand_total = traj.running_total + traj.switching_total + traj.quota_rebate;
}

Trajectory run_schedule_from(const Scenario& s, int first_t, const Commitment& prev_mode,
                             const Dispatch& prev_dispatch, const Schedule& schedule) {
  if (first_t < 1 || first_t + static_cast<int>(schedule.size()) - 1 != s.horizon())
    throw DomainError("schedule must cover periods " + std::to_string(first_t) + ".." +
                      std::to_string(s.horizon()));
  Trajectory traj;
  Commitment mode_prev = prev_mode;
  Dispatch p_prev = prev_dispatch;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const int t = first_t + static_cast<int>(k);
    const Dispatch p = mode_dynamics(s, t, schedule[k], p_prev);
    traj.steps.push_back(make_step(s, t, mode_prev, schedule[k], p));
    mode_prev = schedule[k];
    p_prev = p;
  }
  finalize(s, traj);
  return traj;
}

Trajectory run_schedule(const Scenario& s, const Schedule& schedule) {
  return run_schedule_from(s, 1, s.initial_commitment, s.initial_dispatch, schedule);
}

double total_cost(const Trajectory& traj) {
  double total = traj.quota_rebate;
  for (const auto& step : traj.steps)
    total += step.cost.running + step.cost.switching;
  return total;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n_units = traj.steps.empty() ? 0 : traj.steps.front().mode.size();
  out << "t";
  for (int n = 1; n <= n_units; ++n)
    out << ",I_" << n;
  for (int n = 1; n <= n_units; ++n)
    out << ",P_" << n;
  out << ",P_DG,P_DR,Q,kappa,emissions_ton,cumulative_cost\n";
  double cumulative = 0;
  for (const auto& step : traj.steps) {
    cumulative += step.cost.running + step.cost.switching;
    out << step.t;
    for (int n = 0; n < n_units; ++n)
      out << ',' << (step.mode.on(n) ? 1 : 0);
    for (int n = 0; n < n_units; ++n)
      out << ',' << exact(step.dispatch.thermal(n));
    double tons = 0;
    for (double e : step.emissions)
      tons += e;
    out << ',' << exact(step.dispatch.dg()) << ',' << exact(step.dispatch.dr()) << ','
        << exact(step.cost.running) << ',' << exact(step.cost.switching) << ',' << exact(tons) << ','
        << exact(cumulative) << '\n';
  }
}

} // namespace ucd
