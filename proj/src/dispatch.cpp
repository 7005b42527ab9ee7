#include "ucd/dispatch.hpp"

#include "ucd/cost.hpp"

namespace ucd {

namespace {

DispatchProblem assemble_impl(const Scenario& s, int t, const Commitment& mode, const Dispatch& prev,
                              bool with_ramps) {
  if (t < 1 || t > s.horizon())
    throw DomainError("period " + std::to_string(t) + " outside 1.." + std::to_string(s.horizon()));
  if (mode.size() != s.units_count())
    throw DomainError("commitment has " + std::to_string(mode.size()) + " entries, expected " +
                      std::to_string(s.units_count()));
  const int n_units = s.units_count();
  const auto& ex = s.period(t);
  const double price = s.cet.price;

  DispatchProblem out;
  out.period = t;
  out.mode = mode;
  auto& vars = out.variables;
  vars.dispatch_size = n_units + 2;
  for (int n = 0; n < n_units; ++n)
    if (mode.on(n))
      vars.coordinate.push_back(n);
  const int thermal_free = static_cast<int>(vars.coordinate.size());
  const int dg_col = ex.dg_max > 0 ? static_cast<int>(vars.coordinate.size()) : -1;
  if (dg_col >= 0)
    vars.coordinate.push_back(n_units);
  const int dr_col = ex.dr_max > 0 ? static_cast<int>(vars.coordinate.size()) : -1;
  if (dr_col >= 0)
    vars.coordinate.push_back(n_units + 1);

  const auto n_vars = static_cast<Eigen::Index>(vars.coordinate.size());
  auto& qp = out.qp;
  qp = QpProblem<double>(n_vars);
  qp.constant = s.dg.c + s.dr.c;
  double sum_min = 0, sum_max = 0;
  for (int j = 0; j < thermal_free; ++j) {
    const auto& u = s.units[vars.coordinate[j]];
    qp.quad(j) = u.a + price * u.alpha;
    qp.lin(j) = u.b + price * u.beta;
    qp.constant += u.c + price * u.gamma;
    sum_min += u.p_min;
    sum_max += u.p_max;
  }
  if (dg_col >= 0) {
    qp.quad(dg_col) = s.dg.a;
    qp.lin(dg_col) = s.dg.b;
  }
  if (dr_col >= 0) {
    qp.quad(dr_col) = s.dr.a;
    qp.lin(dr_col) = s.dr.b;
  }

  const Vector zero = Vector::Zero(n_vars);
  auto unit_row = [&](Eigen::Index j, double v) {
    Vector r = zero;
    r(j) = v;
    return r;
  };

  qp.add_equality(Vector::Ones(n_vars), ex.demand);

  Vector virtual_row = zero;
  if (dg_col >= 0)
    virtual_row(dg_col) = 1;
  if (dr_col >= 0)
    virtual_row(dr_col) = 1;
  qp.add_inequality(virtual_row, ex.demand - ex.reserve_lo - sum_min, "reserve_lo");
  qp.add_inequality(-virtual_row, sum_max - ex.demand - ex.reserve_hi, "reserve_hi");

  for (int j = 0; j < thermal_free; ++j) {
    const int n = vars.coordinate[j];
    const auto& u = s.units[n];
    const std::string tag = "unit" + std::to_string(n + 1);
    qp.add_inequality(unit_row(j, -1), -u.p_min, tag + ".p_min");
    qp.add_inequality(unit_row(j, 1), u.p_max, tag + ".p_max");
    if (with_ramps && s.ramp_enforced && prev.thermal(n) > 0) {
      if (u.ramp_up)
        qp.add_inequality(unit_row(j, 1), prev.thermal(n) + *u.ramp_up, tag + ".ramp_up");
      if (u.ramp_down)
        qp.add_inequality(unit_row(j, -1), *u.ramp_down - prev.thermal(n), tag + ".ramp_down");
    }
  }
  if (dg_col >= 0) {
    qp.add_inequality(unit_row(dg_col, -1), 0, "dg.min");
    qp.add_inequality(unit_row(dg_col, 1), ex.dg_max, "dg.max");
    Vector pen = zero;
    pen(dg_col) = 1 - s.eta_max;
    for (int j = 0; j < thermal_free; ++j)
      pen(j) = -s.eta_max;
    qp.add_inequality(pen, 0, "penetration");
  }
  if (dr_col >= 0) {
    qp.add_inequality(unit_row(dr_col, -1), 0, "dr.min");
    qp.add_inequality(unit_row(dr_col, 1), ex.dr_max, "dr.max");
  }
  return out;
}

} // namespace

DispatchProblem assemble(const Scenario& s, int t, const Commitment& mode, const Dispatch& prev) {
  return assemble_impl(s, t, mode, prev, true);
}

DispatchResult solve(const DispatchProblem& problem, const Scenario& s) {
  DispatchResult out;
  out.qp = ucd::solve(problem.qp);
  out.dispatch = Dispatch(s.units_count());
  if (!out.feasible()) {
    out.cost = std::numeric_limits<double>::infinity();
    return out;
  }
  for (std::size_t j = 0; j < problem.variables.coordinate.size(); ++j)
    out.dispatch.values(problem.variables.coordinate[j]) = out.qp.x(static_cast<Eigen::Index>(j));
  out.cost = out.qp.objective_value;
  return out;
}

DispatchResult dispatch_mode(const Scenario& s, int t, const Commitment& mode, const Dispatch& prev) {
  return solve(assemble(s, t, mode, prev), s);
}

Dispatch mode_dynamics(const Scenario& s, int t, const Commitment& mode, const Dispatch& prev) {
  auto r = dispatch_mode(s, t, mode, prev);
  if (!r.feasible())
    throw InfeasibleModeError(t, mode);
  return r.dispatch;
}

std::vector<Commitment> feasible_modes(const Scenario& s, int t, const Dispatch& prev) {
  std::vector<Commitment> out;
  for (const auto& mode : all_commitments(s.units_count()))
    if (phase_one(assemble_impl(s, t, mode, prev, true).qp).feasible)
      out.push_back(mode);
  return out;
}

std::vector<Commitment> feasible_modes_relaxed(const Scenario& s, int t) {
  std::vector<Commitment> out;
  const Dispatch none(s.units_count());
  for (const auto& mode : all_commitments(s.units_count()))
    if (phase_one(assemble_impl(s, t, mode, none, false).qp).feasible)
      out.push_back(mode);
  return out;
}

} // namespace ucd
