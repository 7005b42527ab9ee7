#include "ucd/cost.hpp"

#include "ucd/hybrid.hpp"

namespace ucd {

double fuel_cost(const ThermalUnitParams& u, double p) { return (u.a * p + u.b) * p + u.c; }

double emission(const ThermalUnitParams& u, double p) { return (u.alpha * p + u.beta) * p + u.gamma; }

double virtual_cost(const VirtualResourceParams& v, double p) { return (v.a * p + v.b) * p + v.c; }

double running_cost(const Scenario& s, const Commitment& mode, const Dispatch& dispatch) {
  double total = 0;
  for (int n = 0; n < s.units_count(); ++n) {
    if (!mode.on(n))
      continue;
    const auto& u = s.units[n];
    const double p = dispatch.thermal(n);
    total += fuel_cost(u, p) + s.cet.price * emission(u, p);
  }
  return total + virtual_cost(s.dg, dispatch.dg()) + virtual_cost(s.dr, dispatch.dr());
}

double unit_switching_cost(const ThermalUnitParams& u, bool prev, bool next) {
  // Truth table of the bilinear form; evaluating the polynomial leaves round-off on on->on.
  if (!prev)
    return u.c_bank;
  return next ? 0.0 : u.c_fix + u.c_shut;
}

double switching_cost(const Scenario& s, const Commitment& prev, const Commitment& next) {
  double total = 0;
  for (int n = 0; n < s.units_count(); ++n)
    total += unit_switching_cost(s.units[n], prev.on(n), next.on(n));
  return total;
}

double startup_cost_reference(const ThermalUnitParams& u, int tau) { return u.c_bank * tau + u.c_fix; }

double horizon_emission_cost(const Scenario& s, const Trajectory& traj) {
  double total = 0;
  for (int n = 0; n < s.units_count(); ++n) {
    double tons = 0;
    for (const auto& step : traj.steps)
      if (step.mode.on(n))
        tons += emission(s.units[n], step.dispatch.thermal(n));
    total += (tons - s.units[n].quota) * s.cet.price;
  }
  return total;
}

double quota_rebate(const Scenario& s) {
  double total = 0;
  for (const auto& u : s.units)
    total -= u.quota * s.cet.price;
  return total;
}

} // namespace ucd
