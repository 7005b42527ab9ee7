#include "properties.hpp"

#include "support.hpp"

#include <cmath>
#include <sstream>

namespace ucd::test {

namespace {

template <typename... Args> std::string describe(Args&&... args) {
  std::ostringstream out;
  out.precision(17);
  (out << ... << args);
  return out.str();
}

double expected_kappa(const ThermalUnitParams& u, bool prev, bool next) {
  if (!prev)
    return u.c_bank;
  return next ? 0.0 : u.c_fix + u.c_shut;
}

} // namespace

Outcome qp_kkt_and_dominance(int trials, std::uint64_t seed, int points_per_instance) {
  std::mt19937_64 rng(seed);
  Outcome out;
  int attempts = 0;
  while (out.trials < trials && attempts++ < 20 * trials) {
    const auto inst = random_instance(rng);
    const auto& s = inst.scenario;
    const auto problem = assemble(s, 1, inst.mode, s.initial_dispatch);
    const auto r = solve(problem, s);
    if (!r.feasible())
      continue;
    ++out.trials;
    const double kkt = kkt_residual(problem.qp, r.qp);
    out.worst = std::max(out.worst, kkt);
    if (kkt > 1e-8)
      out.fail(describe("KKT residual ", kkt, " for mode ", inst.mode.str()));
    for (const auto& p : feasible_points(s, 1, inst.mode, s.initial_dispatch, rng, points_per_instance)) {
      const double gap = r.cost - running_cost(s, inst.mode, p);
      if (gap > 1e-6) {
        out.fail(describe("feasible point beats the solver by ", gap));
        break;
      }
    }
  }
  return out;
}

Outcome switching_identities(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Outcome out;
  for (int i = 0; i < trials; ++i) {
    ++out.trials;
    const int units = std::uniform_int_distribution<int>(1, 6)(rng);
    Scenario s;
    for (int n = 0; n < units; ++n) {
      ThermalUnitParams u;
      u.a = 0.001;
      u.c_bank = uniform(rng, 0, 1000);
      u.c_fix = uniform(rng, 0, 1000);
      u.c_shut = uniform(rng, 0, 1000);
      s.units.push_back(u);
    }
    for (int n = 0; n < units; ++n)
      for (int prev = 0; prev < 2; ++prev)
        for (int next = 0; next < 2; ++next) {
          const double got = unit_switching_cost(s.units[n], prev, next);
          const double err = std::abs(got - expected_kappa(s.units[n], prev, next));
          out.worst = std::max(out.worst, err);
          if (err > 1e-9 || got < 0)
            out.fail(describe("truth table (", prev, "->", next, ") gave ", got));
        }

    const Commitment a(units, std::uniform_int_distribution<std::uint32_t>(0, (1u << units) - 1)(rng));
    const Commitment b(units, std::uniform_int_distribution<std::uint32_t>(0, (1u << units) - 1)(rng));
    double banking = 0, summed = 0;
    for (int n = 0; n < units; ++n) {
      if (!a.on(n))
        banking += s.units[n].c_bank;
      summed += expected_kappa(s.units[n], a.on(n), b.on(n));
    }
    if (std::abs(switching_cost(s, a, a) - banking) > 1e-9)
      out.fail("kappa(I, I) is not pure banking");
    if (std::abs(switching_cost(s, a, b) - summed) > 1e-9 || switching_cost(s, a, b) < 0)
      out.fail("kappa is not the per-unit sum");

    // on at s-1, off for tau periods, on again.
    const auto& u = s.units[0];
    const int tau = std::uniform_int_distribution<int>(1, 12)(rng);
    double cycle = unit_switching_cost(u, true, false);
    for (int k = 1; k < tau; ++k)
      cycle += unit_switching_cost(u, false, false);
    cycle += unit_switching_cost(u, false, true);
    const double reference = startup_cost_reference(u, tau - 1) + u.c_bank + u.c_shut;
    const double closed = u.c_fix + u.c_bank * tau + u.c_shut;
    const double err = std::max(std::abs(cycle - reference), std::abs(cycle - closed));
    out.worst = std::max(out.worst, err);
    if (err > 1e-9 * std::max(1.0, closed))
      out.fail(describe("off-cycle of ", tau, " periods costs ", cycle, ", expected ", closed));
  }
  return out;
}

Outcome bellman_consistency(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<Scenario> scenarios{load("example1_case1.ucd"), load("example1_case4.ucd"),
                                        with_ramps(load("example1_case4.ucd"), 150)};
  Outcome out;
  for (int i = 0; i < trials; ++i) {
    ++out.trials;
    const auto& s = scenarios[static_cast<std::size_t>(i) % scenarios.size()];
    const int t = std::uniform_int_distribution<int>(1, s.horizon() - 1)(rng);
    const auto prevs = t == 1 ? all_commitments(s.units_count()) : feasible_modes_relaxed(s, t - 1);
    const auto prev = prevs[std::uniform_int_distribution<std::size_t>(0, prevs.size() - 1)(rng)];
    const auto state = random_state(s, t, prev, rng);

    const auto here = exact_value_table(s, {{t, prev, state}}).entries.front();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& mode : all_commitments(s.units_count())) {
      const auto r = dispatch_mode(s, t, mode, state);
      if (!r.feasible())
        continue;
      const auto next = exact_value_table(s, {{t + 1, mode, r.dispatch}}).entries.front();
      best = std::min(best, r.cost + switching_cost(s, prev, mode) + next.value);
    }
    if (std::isinf(best) && std::isinf(here.value))
      continue;
    const double err = std::abs(here.value - best);
    out.worst = std::max(out.worst, err);
    if (!(err <= 1e-6))
      out.fail(describe("t=", t, " prev=", prev.str(), ": value ", here.value, " vs recursion ", best));
  }
  return out;
}

Outcome trajectory_determinism(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<Scenario> scenarios{load("example1_case4.ucd"), load("example2_case1.ucd"),
                                        load("example2_case3.ucd")};
  Outcome out;
  // Draws until `trials` schedules ran; relaxed mode sets make infeasible draws rare.
  for (int i = 0; out.trials < trials && i < 10 * trials; ++i) {
    const auto& s = scenarios[static_cast<std::size_t>(i) % scenarios.size()];
    const auto schedule = random_schedule(s, rng);
    Trajectory first, second;
    try {
      first = run_schedule(s, schedule);
      second = run_schedule(s, schedule);
    } catch (const InfeasibleModeError&) {
      continue;
    }
    ++out.trials;
    bool same = first.grand_total == second.grand_total && first.steps.size() == second.steps.size();
    for (std::size_t k = 0; same && k < first.steps.size(); ++k)
      same = first.steps[k].mode == second.steps[k].mode && first.steps[k].dispatch == second.steps[k].dispatch &&
             first.steps[k].cost.running == second.steps[k].cost.running &&
             first.steps[k].cost.switching == second.steps[k].cost.switching;
    if (!same)
      out.fail("repeated run differs for " + schedule_code(schedule));

    std::vector<Dispatch> dispatch;
    for (const auto& step : first.steps)
      dispatch.push_back(step.dispatch);
    const double direct = direct_objective(s, schedule, dispatch);
    const double err = std::abs(total_cost(first) - direct);
    out.worst = std::max(out.worst, err);
    if (err > 1e-6)
      out.fail(describe("total ", total_cost(first), " vs direct objective ", direct, " for ",
                        schedule_code(schedule)));
  }
  return out;
}

Outcome running_cost_convexity(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Outcome out;
  for (int i = 0; i < trials; ++i) {
    ++out.trials;
    const auto inst = random_instance(rng);
    const auto& s = inst.scenario;
    const int N = s.units_count();
    Commitment mode = inst.mode;
    if (mode.count() == 0)
      mode.set(0, true);
    Dispatch p(N), q(N);
    for (int n = 0; n < N; ++n) {
      p.thermal(n) = uniform(rng, 0, s.units[n].p_max);
      q.thermal(n) = mode.on(n) ? uniform(rng, 0, s.units[n].p_max) : p.thermal(n);
    }
    p.dg() = uniform(rng, 0, 100);
    q.dg() = uniform(rng, 0, 100);
    p.dr() = uniform(rng, 0, 40);
    q.dr() = uniform(rng, 0, 40);
    const Dispatch mid((p.values + q.values) / 2);
    const double gap = (running_cost(s, mode, p) + running_cost(s, mode, q)) / 2 - running_cost(s, mode, mid);
    if (!(gap > 0))
      out.fail(describe("midpoint gap ", gap));

    // Entries of uncommitted units never matter.
    Dispatch r = p;
    for (int n = 0; n < N; ++n)
      if (!mode.on(n))
        r.thermal(n) += 123.0;
    const double diff = std::abs(running_cost(s, mode, r) - running_cost(s, mode, p));
    out.worst = std::max(out.worst, diff);
    if (diff != 0)
      out.fail("running cost depends on an uncommitted unit");
  }
  return out;
}

Outcome penetration_and_balance(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Outcome out;
  int attempts = 0;
  while (out.trials < trials && attempts++ < 20 * trials) {
    const auto inst = random_instance(rng);
    const auto& s = inst.scenario;
    const auto r = dispatch_mode(s, 1, inst.mode, s.initial_dispatch);
    if (!r.feasible())
      continue;
    ++out.trials;
    const auto& p = r.dispatch;
    const double demand = s.period(1).demand;
    const double thermal = p.thermal_block().sum();
    const double balance = std::abs(thermal + p.dg() + p.dr() - demand);
    out.worst = std::max(out.worst, balance / std::max(1.0, demand));
    if (balance > 1e-6 * std::max(1.0, demand))
      out.fail(describe("balance off by ", balance));
    for (int n = 0; n < s.units_count(); ++n)
      if (!inst.mode.on(n) && p.thermal(n) != 0)
        out.fail("uncommitted unit carries output");
    if (p.dg() > 0 && p.dg() / (thermal + p.dg()) > s.eta_max + 1e-9)
      out.fail(describe("DG share ", p.dg() / (thermal + p.dg()), " above ", s.eta_max));
  }
  return out;
}

} // namespace ucd::test
