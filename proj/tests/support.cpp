#include "support.hpp"

#include <algorithm>
#include <cmath>

#ifndef UCD_DATA_DIR
#error "UCD_DATA_DIR must point at the bundled scenarios"
#endif

namespace ucd::test {

std::string data_path(const std::string& name) { return std::string(UCD_DATA_DIR) + "/" + name; }

Scenario load(const std::string& name) { return load_scenario(data_path(name)); }

Scenario with_ramps(Scenario s, double ramp) {
  for (auto& u : s.units) {
    u.ramp_up = ramp;
    u.ramp_down = ramp;
  }
  s.ramp_enforced = true;
  return s;
}

Scenario example1_with_demands(const std::vector<double>& demands) {
  Scenario s = load("example1_case1.ucd");
  s.periods.clear();
  for (double d : demands)
    s.periods.push_back({d, 0, 0, 0, 0});
  return s;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

RandomInstance random_instance(std::mt19937_64& rng) {
  const Scenario base = load("example2_case1.ucd");
  while (true) {
    RandomInstance out;
    Scenario& s = out.scenario;
    s = base;
    s.units.clear();
    std::vector<int> bits;
    for (const auto& u : base.units)
      if (std::bernoulli_distribution(0.6)(rng)) {
        s.units.push_back(u);
        bits.push_back(1);
      }
    if (s.units.empty())
      continue;
    // Occasionally keep a unit uncommitted so elimination is exercised.
    if (s.units.size() > 1 && std::bernoulli_distribution(0.3)(rng))
      bits[std::uniform_int_distribution<std::size_t>(0, bits.size() - 1)(rng)] = 0;
    out.mode = Commitment::from_bits(bits);

    double lo = 0, hi = 0;
    for (std::size_t n = 0; n < s.units.size(); ++n)
      if (bits[n]) {
        lo += s.units[n].p_min;
        hi += s.units[n].p_max;
      }
    PeriodExogenous e;
    e.dg_max = std::bernoulli_distribution(0.7)(rng) ? uniform(rng, 0, 100) : 0;
    e.dr_max = std::bernoulli_distribution(0.7)(rng) ? uniform(rng, 0, 40) : 0;
    e.demand = uniform(rng, lo, hi + e.dg_max + e.dr_max);
    const double reserve = std::bernoulli_distribution(0.5)(rng) ? 0.05 : 0.0;
    e.reserve_lo = reserve * e.demand;
    e.reserve_hi = reserve * e.demand;
    s.periods = {e};
    s.eta_max = uniform(rng, 0.02, 0.3);
    s.cet.price = std::vector<double>{0, 1, 10}[std::uniform_int_distribution<int>(0, 2)(rng)];
    s.initial_commitment = Commitment(static_cast<int>(s.units.size()));
    s.initial_dispatch = Dispatch(static_cast<int>(s.units.size()));
    return out;
  }
}

Schedule random_schedule(const Scenario& s, std::mt19937_64& rng) {
  Schedule out;
  for (int t = 1; t <= s.horizon(); ++t) {
    const auto modes = feasible_modes_relaxed(s, t);
    out.push_back(modes[std::uniform_int_distribution<std::size_t>(0, modes.size() - 1)(rng)]);
  }
  return out;
}

Dispatch random_state(const Scenario& s, int t, const Commitment& prev, std::mt19937_64& rng) {
  const auto& ex = s.period(std::max(1, t - 1));
  Dispatch p(s.units_count());
  for (int n = 0; n < s.units_count(); ++n)
    if (prev.on(n))
      p.thermal(n) = uniform(rng, s.units[n].p_min, s.units[n].p_max);
  p.dg() = uniform(rng, 0, ex.dg_max);
  p.dr() = uniform(rng, 0, ex.dr_max);
  return p;
}

double direct_objective(const Scenario& s, const Schedule& schedule, const std::vector<Dispatch>& dispatch) {
  const int T = s.horizon();
  double total = 0;
  for (int t = 1; t <= T; ++t) {
    const auto& p = dispatch[static_cast<std::size_t>(t - 1)];
    for (int n = 0; n < s.units_count(); ++n)
      if (schedule[static_cast<std::size_t>(t - 1)].on(n)) {
        const auto& u = s.units[n];
        const double x = p.thermal(n);
        total += u.a * x * x + u.b * x + u.c;
      }
    total += s.dg.a * p.dg() * p.dg() + s.dg.b * p.dg() + s.dg.c;
    total += s.dr.a * p.dr() * p.dr() + s.dr.b * p.dr() + s.dr.c;
  }
  // Emission trading over the whole horizon, quotas settled once.
  for (int n = 0; n < s.units_count(); ++n) {
    const auto& u = s.units[n];
    double tons = 0;
    for (int t = 1; t <= T; ++t)
      if (schedule[static_cast<std::size_t>(t - 1)].on(n)) {
        const double x = dispatch[static_cast<std::size_t>(t - 1)].thermal(n);
        tons += u.alpha * x * x + u.beta * x + u.gamma;
      }
    total += (tons - u.quota) * s.cet.price;
  }
  // Start-up/shutdown by off-runs. A restart after tau banked periods costs
  // C_b tau + C_f; the fixed part is committed at shutdown, so a run that is
  // still open at T carries it as well. A run open since t = 0 never pays C_f.
  // An open run is billed C_b for each period after its first.
  for (int n = 0; n < s.units_count(); ++n) {
    const auto& u = s.units[n];
    std::vector<int> on(static_cast<std::size_t>(T) + 1);
    on[0] = s.initial_commitment.on(n);
    for (int t = 1; t <= T; ++t)
      on[static_cast<std::size_t>(t)] = schedule[static_cast<std::size_t>(t - 1)].on(n);
    int k = 0;
    while (k <= T) {
      if (on[static_cast<std::size_t>(k)]) {
        ++k;
        continue;
      }
      const int start = k;
      while (k <= T && !on[static_cast<std::size_t>(k)])
        ++k;
      const bool after_shutdown = start > 0;
      const bool restarted = k <= T;
      const int banked = k - start; // off periods in the run, t = 0 included when open since then
      if (after_shutdown)
        total += u.c_shut + u.c_fix;
      if (restarted)
        total += u.c_bank * banked;
      else
        total += u.c_bank * (banked - 1);
    }
  }
  return total;
}

std::vector<double> equal_lambda_dispatch(const std::vector<ThermalUnitParams>& units, double demand) {
  double inv = 0, shift = 0;
  for (const auto& u : units) {
    inv += 1.0 / (2 * u.a);
    shift += u.b / (2 * u.a);
  }
  const double lambda = (demand + shift) / inv;
  std::vector<double> out;
  for (const auto& u : units)
    out.push_back((lambda - u.b) / (2 * u.a));
  return out;
}

std::vector<Dispatch> feasible_points(const Scenario& s, int t, const Commitment& mode, const Dispatch& prev,
                                      std::mt19937_64& rng, int count) {
  const auto problem = assemble(s, t, mode, prev);
  const auto& vars = problem.variables.coordinate;
  const auto& ex = s.period(t);
  std::vector<double> lo, hi;
  for (int c : vars) {
    if (c < s.units_count()) {
      lo.push_back(s.units[c].p_min);
      hi.push_back(s.units[c].p_max);
    } else {
      lo.push_back(0);
      hi.push_back(c == s.units_count() ? ex.dg_max : ex.dr_max);
    }
  }
  std::vector<Dispatch> out;
  for (int attempt = 0; attempt < 200 * count && static_cast<int>(out.size()) < count; ++attempt) {
    std::vector<double> y;
    for (std::size_t i = 0; i < vars.size(); ++i)
      y.push_back(uniform(rng, lo[i], hi[i]));
    auto at = [&](double theta, std::size_t i) { return std::clamp(y[i] + theta, lo[i], hi[i]); };
    auto total = [&](double theta) {
      double sum = 0;
      for (std::size_t i = 0; i < vars.size(); ++i)
        sum += at(theta, i);
      return sum;
    };
    double a = -1e4, b = 1e4;
    if (total(a) > ex.demand || total(b) < ex.demand)
      continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      (total(mid) < ex.demand ? a : b) = mid;
    }
    Vector x(static_cast<Eigen::Index>(vars.size()));
    Dispatch p(s.units_count());
    for (std::size_t i = 0; i < vars.size(); ++i) {
      x(static_cast<Eigen::Index>(i)) = at(0.5 * (a + b), i);
      p.values(vars[i]) = x(static_cast<Eigen::Index>(i));
    }
    if (problem.qp.infeasibility(x) <= 1e-7)
      out.push_back(p);
  }
  return out;
}

const std::vector<TableRow>& reference_costs() {
  static const std::vector<TableRow> rows{
      {"111333", 23350.7, 24550.7}, {"112333", 23259.5, 24759.5}, {"113333", 23568.7, 24468.7},
      {"121333", 23259.5, 25359.5}, {"122333", 23168.3, 24568.3}, {"123333", 23477.5, 24677.5},
      {"131333", 23568.7, 25068.7}, {"132333", 23477.5, 24677.5}, {"133333", 23786.7, 24386.7},
      {"211333", 23399.9, 25499.9}, {"212333", 23308.7, 25708.7}, {"213333", 23617.9, 25417.9},
      {"221333", 23308.7, 25308.7}, {"222333", 23217.5, 24517.5}, {"223333", 23526.7, 24626.7},
      {"231333", 23617.9, 25417.9}, {"232333", 23526.7, 25026.7}, {"233333", 23835.9, 24735.9},
  };
  return rows;
}

} // namespace ucd::test
