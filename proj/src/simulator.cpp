#include "ucd/simulator.hpp"

#include "ucd/format.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <ostream>

namespace ucd {

namespace {

using json = nlohmann::ordered_json;

json dispatch_json(const Dispatch& p) {
  std::vector<double> thermal(p.thermal_block().begin(), p.thermal_block().end());
  return {{"thermal", thermal}, {"dg", p.dg()}, {"dr", p.dr()}};
}

double parse_number(std::string_view text, std::string_view what) {
  double v = 0;
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc{} || r.ptr != end)
    throw DomainError("disturbance: bad " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

// NaN stands for "keep the scheduled value".
bool virtual_ok(double v) { return std::isnan(v) || (std::isfinite(v) && v >= 0); }

TailComparison tail_from(int t, const Commitment& mode, const Dispatch& state) {
  TailComparison c;
  c.from_t = t;
  c.state_mode = mode;
  c.state = state;
  return c;
}

} // namespace

std::vector<std::string> validate_script(const DisturbanceScript& d, const Scenario& s) {
  std::vector<std::string> out;
  int last = 0;
  for (std::size_t i = 0; i < d.events.size(); ++i) {
    const auto& e = d.events[i];
    const std::string at = "disturb[" + std::to_string(i) + "]";
    if (e.t < 1 || e.t > s.horizon())
      out.push_back(at + ": period must lie in 1.." + std::to_string(s.horizon()));
    if (e.t <= last)
      out.push_back(at + ": periods must be strictly increasing");
    last = e.t;
    if (e.state.units() != s.units_count())
      out.push_back(at + ": override has " + std::to_string(e.state.units()) + " thermal entries, expected " +
                    std::to_string(s.units_count()));
    else if (const auto thermal = e.state.thermal_block();
             (thermal.array() < 0).any() || !thermal.allFinite() || !virtual_ok(e.state.dg()) ||
             !virtual_ok(e.state.dr()))
      out.push_back(at + ": override entries must be finite and >= 0");
  }
  return out;
}

Disturbance parse_disturbance(std::string_view text, int units) {
  if (text.substr(0, 2) != "t=")
    throw DomainError("disturbance '" + std::string(text) + "': expected t=k:v1,v2,...");
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw DomainError("disturbance '" + std::string(text) + "': missing ':'");
  Disturbance d;
  const double t = parse_number(text.substr(2, colon - 2), "period");
  if (t != std::floor(t))
    throw DomainError("disturbance: period must be an integer");
  d.t = static_cast<int>(t);
  std::vector<double> values;
  auto rest = text.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    values.push_back(parse_number(rest.substr(0, comma), "value"));
    if (comma == std::string_view::npos)
      break;
    rest = rest.substr(comma + 1);
  }
  const auto n = static_cast<std::size_t>(units);
  if (values.size() == n) {
    d.state = Dispatch(values, std::nan(""), std::nan(""));
  } else if (values.size() == n + 2) {
    d.state = Dispatch(std::vector<double>(values.begin(), values.begin() + units), values[n], values[n + 1]);
  } else {
    throw DomainError("disturbance at t=" + std::to_string(d.t) + ": expected " + std::to_string(units) + " or " +
                      std::to_string(units + 2) + " values, got " + std::to_string(values.size()));
  }
  return d;
}

bool TailComparison::matches(double tol) const {
  return oracle_cost && std::abs(*oracle_cost - realized_cost) <= tol;
}

RunReport simulate(const Scenario& s, const ValueModel& m, const DisturbanceScript& d, const OracleOptions& opts) {
  check_fingerprint(m, s);
  if (const auto v = validate_script(d, s); !v.empty())
    throw DomainError(v.front());

  RunReport report;
  auto& traj = report.trajectory;
  report.comparisons.push_back(tail_from(1, s.initial_commitment, s.initial_dispatch));

  Commitment mode = s.initial_commitment;
  Dispatch p = s.initial_dispatch;
  auto next = d.events.begin();
  for (int t = 1; t <= s.horizon(); ++t) {
    const auto step = schedule_step(m, s, t, mode, p);
    if (next != d.events.end() && next->t == t) {
      Dispatch realized = next->state;
      if (std::isnan(realized.dg())) {
        realized.dg() = step.dispatch.dg();
        realized.dr() = step.dispatch.dr();
      }
      Commitment realized_mode = step.mode;
      for (int n = 0; n < s.units_count(); ++n)
        if (realized.thermal(n) > 0)
          realized_mode.set(n, true);
      report.divergences.push_back({t, step.mode, step.dispatch, realized_mode, realized});
      traj.steps.push_back(make_step(s, t, mode, realized_mode, realized));
      if (t < s.horizon())
        report.comparisons.push_back(tail_from(t + 1, realized_mode, realized));
      spdlog::info("t={}: realized state overridden to {}", t, realized_mode.str());
      mode = realized_mode;
      p = realized;
      ++next;
    } else {
      traj.steps.push_back(make_step(s, t, mode, step.mode, step.dispatch));
      mode = step.mode;
      p = step.dispatch;
    }
  }
  finalize(s, traj);

  for (auto& c : report.comparisons) {
    for (const auto& step : traj.steps)
      if (step.t >= c.from_t) {
        c.realized_cost += step.cost.total();
        c.realized_schedule.push_back(step.mode);
      }
    for (const auto& dv : report.divergences)
      c.interrupted = c.interrupted || dv.t >= c.from_t;
    if (c.interrupted)
      continue;
    try {
      const auto best = optimal_continuation(s, c.from_t, c.state_mode, c.state, opts);
      if (best.feasible()) {
        c.oracle_cost = best.cost;
        c.oracle_schedule = best.schedule;
      }
    } catch (const BudgetExceededError& e) {
      spdlog::warn("tail from t={} not checked against the oracle: {}", c.from_t, e.what());
    }
  }
  return report;
}

void write_report_json(std::ostream& out, const RunReport& r, const Scenario& s) {
  const auto& traj = r.trajectory;
  json root;
  root["format"] = "ucd-run-report";
  root["version"] = 1;
  root["fingerprint"] = scenario_fingerprint(s);
  root["schedule"] = schedule_code(traj.schedule());
  json steps = json::array();
  for (const auto& st : traj.steps)
    steps.push_back({{"t", st.t},
                     {"mode", st.mode.str()},
                     {"dispatch", dispatch_json(st.dispatch)},
                     {"running_cost", st.cost.running},
                     {"switching_cost", st.cost.switching},
                     {"emissions_ton", st.emissions}});
  root["trajectory"] = std::move(steps);
  json div = json::array();
  for (const auto& dv : r.divergences)
    div.push_back({{"t", dv.t},
                   {"planned_mode", dv.planned_mode.str()},
                   {"planned", dispatch_json(dv.planned)},
                   {"realized_mode", dv.realized_mode.str()},
                   {"realized", dispatch_json(dv.realized)}});
  root["divergences"] = std::move(div);
  json cmp = json::array();
  for (const auto& c : r.comparisons) {
    json e{{"from_t", c.from_t},
           {"state_mode", c.state_mode.str()},
           {"state", dispatch_json(c.state)},
           {"realized_tail_cost", c.realized_cost},
           {"realized_tail", schedule_code(c.realized_schedule)},
           {"interrupted", c.interrupted}};
    e["oracle_tail_cost"] = c.oracle_cost ? json(*c.oracle_cost) : json(nullptr);
    e["oracle_tail"] = c.checked() ? json(schedule_code(c.oracle_schedule)) : json(nullptr);
    e["matches_oracle"] = c.checked() ? json(c.matches()) : json(nullptr);
    cmp.push_back(std::move(e));
  }
  root["comparisons"] = std::move(cmp);
  root["totals"] = {{"running", traj.running_total},
                    {"switching", traj.switching_total},
                    {"quota_rebate", traj.quota_rebate},
                    {"total_cost", traj.grand_total}};
  root["emissions"] = {{"total_tons", traj.total_tons},
                       {"emission_cost", traj.emission_cost},
                       {"quota_rebate", traj.quota_rebate}};
  out << root.dump(2) << '\n';
}

bool ComparisonTable::matches_oracle() const { return oracle_argmin && clho.schedule() == *oracle_argmin; }

ComparisonTable compare_with_oracle(const Scenario& s, const ValueModel& m, const OracleOptions& opts) {
  check_fingerprint(m, s);
  ComparisonTable c;
  c.clho = greedy_schedule(m, s, 1, s.initial_commitment, s.initial_dispatch);
  try {
    c.rows = enumerate_all(s, opts);
  } catch (const BudgetExceededError& e) {
    spdlog::warn("oracle skipped, reporting the CLHO schedule only: {}", e.what());
    return c;
  }
  const OracleResult* best = nullptr;
  for (const auto& row : c.rows)
    if (!best || better_than(row.cost, row.schedule, best->cost, best->schedule))
      best = &row;
  if (best)
    c.oracle_argmin = best->schedule;
  return c;
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& c) {
  out << "schedule,total_cost,oracle_argmin,clho\n";
  const auto clho = c.clho.schedule();
  if (c.rows.empty()) {
    out << schedule_code(clho) << ',' << exact(total_cost(c.clho)) << ",,1\n";
    return;
  }
  for (const auto& row : c.rows)
    out << schedule_code(row.schedule) << ',' << exact(row.cost) << ','
        << (c.oracle_argmin && row.schedule == *c.oracle_argmin ? 1 : 0) << ',' << (row.schedule == clho ? 1 : 0)
        << '\n';
}

} // namespace ucd
