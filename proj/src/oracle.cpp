#include "ucd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <thread>

namespace ucd {

namespace {

using ModeSets = std::vector<std::vector<Commitment>>; // index t-1

ModeSets relaxed_mode_sets(const Scenario& s) {
  ModeSets out;
  for (int t = 1; t <= s.horizon(); ++t)
    out.push_back(feasible_modes_relaxed(s, t));
  return out;
}

std::uint64_t product_size(const ModeSets& sets, int t) {
  std::uint64_t total = 1;
  for (int k = t; k <= static_cast<int>(sets.size()); ++k) {
    const auto size = static_cast<std::uint64_t>(sets[k - 1].size());
    if (size == 0)
      return 0;
    if (total > std::numeric_limits<std::uint64_t>::max() / size)
      return std::numeric_limits<std::uint64_t>::max();
    total *= size;
  }
  return total;
}

void check_budget(const ModeSets& sets, int t, const OracleOptions& opts) {
  const auto size = product_size(sets, t);
  if (size > opts.budget)
    throw BudgetExceededError("enumeration from t=" + std::to_string(t) + " needs " + std::to_string(size) +
                              " schedule evaluations, budget is " + std::to_string(opts.budget));
}

unsigned worker_count(const OracleOptions& opts) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return opts.threads == 0 ? hw : opts.threads;
}

using Leaf = std::function<void(double, const Schedule&)>;

/// Depth-first walk of every feasible continuation; leaves receive the tail cost.
void walk(const Scenario& s, const ModeSets& sets, int t, const Commitment& prev_mode, const Dispatch& prev,
          double acc, Schedule& seq, const Leaf& leaf) {
  if (t > s.horizon()) {
    leaf(acc, seq);
    return;
  }
  for (const auto& mode : sets[t - 1]) {
    const auto r = dispatch_mode(s, t, mode, prev);
    if (!r.feasible())
      continue;
    seq.push_back(mode);
    walk(s, sets, t + 1, mode, r.dispatch, acc + r.cost + switching_cost(s, prev_mode, mode), seq, leaf);
    seq.pop_back();
  }
}

/// Runs `branch` for each first-period mode, concurrently when allowed, returning results in mode order.
template <typename R>
std::vector<R> per_first_mode(const Scenario& s, const ModeSets& sets, int t, const Commitment& prev_mode,
                              const Dispatch& prev, const OracleOptions& opts,
                              const std::function<R(const Commitment&, const Dispatch&, double)>& branch) {
  std::vector<Commitment> firsts;
  std::vector<DispatchResult> dispatches;
  for (const auto& mode : sets[t - 1]) {
    auto r = dispatch_mode(s, t, mode, prev);
    if (r.feasible()) {
      firsts.push_back(mode);
      dispatches.push_back(std::move(r));
    }
  }
  std::vector<R> out(firsts.size());
  auto run = [&](std::size_t i) {
    out[i] = branch(firsts[i], dispatches[i].dispatch, dispatches[i].cost + switching_cost(s, prev_mode, firsts[i]));
  };
  const unsigned workers = worker_count(opts);
  if (workers <= 1 || firsts.size() <= 1) {
    for (std::size_t i = 0; i < firsts.size(); ++i)
      run(i);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t i = 0; i < firsts.size(); ++i)
    jobs.push_back(std::async(std::launch::async, run, i));
  for (auto& j : jobs)
    j.get();
  return out;
}

Continuation search(const Scenario& s, const ModeSets& sets, int t, const Commitment& prev_mode,
                    const Dispatch& prev, const OracleOptions& opts) {
  if (t > s.horizon())
    return {};
  const auto branches = per_first_mode<Continuation>(
      s, sets, t, prev_mode, prev, opts, [&](const Commitment& first, const Dispatch& p, double first_cost) {
        Continuation best;
        Schedule seq{first};
        walk(s, sets, t + 1, first, p, first_cost, seq, [&](double cost, const Schedule& sched) {
          if (best.schedule.empty() || better_than(cost, sched, best.cost, best.schedule)) {
            best.cost = cost;
            best.schedule = sched;
          }
        });
        return best;
      });
  Continuation best;
  for (const auto& b : branches)
    if (b.feasible() && (!best.feasible() || better_than(b.cost, b.schedule, best.cost, best.schedule)))
      best = b;
  return best;
}

} // namespace

bool cost_tie(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool better_than(double cost_a, const Schedule& a, double cost_b, const Schedule& b) {
  if (!cost_tie(cost_a, cost_b))
    return cost_a < cost_b;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const Commitment& x, const Commitment& y) { return x.code() < y.code(); });
}

std::uint64_t enumeration_size(const Scenario& s, int t) { return product_size(relaxed_mode_sets(s), t); }

Continuation optimal_continuation(const Scenario& s, int t, const Commitment& prev_mode, const Dispatch& prev_dispatch,
                                  const OracleOptions& opts) {
  const auto sets = relaxed_mode_sets(s);
  check_budget(sets, t, opts);
  return search(s, sets, t, prev_mode, prev_dispatch, opts);
}

OracleResult enumerate_optimal(const Scenario& s, const OracleOptions& opts) {
  const auto best = optimal_continuation(s, 1, s.initial_commitment, s.initial_dispatch, opts);
  if (!best.feasible())
    throw DomainError("no feasible schedule");
  return {best.schedule, best.cost + quota_rebate(s)};
}

std::vector<OracleResult> enumerate_all(const Scenario& s, const OracleOptions& opts) {
  const auto sets = relaxed_mode_sets(s);
  check_budget(sets, 1, opts);
  const double rebate = quota_rebate(s);
  const auto branches = per_first_mode<std::vector<OracleResult>>(
      s, sets, 1, s.initial_commitment, s.initial_dispatch, opts,
      [&](const Commitment& first, const Dispatch& p, double first_cost) {
        std::vector<OracleResult> rows;
        Schedule seq{first};
        walk(s, sets, 2, first, p, first_cost, seq,
             [&](double cost, const Schedule& sched) { rows.push_back({sched, cost + rebate}); });
        return rows;
      });
  std::vector<OracleResult> out;
  for (const auto& b : branches)
    out.insert(out.end(), b.begin(), b.end());
  return out;
}

OracleResult graph_dp_optimal(const Scenario& s) {
  if (s.ramp_enforced)
    throw DomainError("graph DP requires ramp limits relaxed (ramp_enforced = false)");
  const int T = s.horizon();
  const auto modes = all_commitments(s.units_count());
  const auto K = modes.size();
  const double inf = std::numeric_limits<double>::infinity();
  const Dispatch none(s.units_count());

  // Arc cost without switching: Q_t(I).
  std::vector<std::vector<double>> running(static_cast<std::size_t>(T), std::vector<double>(K, inf));
  for (int t = 1; t <= T; ++t)
    for (std::size_t k = 0; k < K; ++k) {
      const auto r = dispatch_mode(s, t, modes[k], none);
      if (r.feasible())
        running[t - 1][k] = r.cost;
    }

  // value[t-1][j]: optimal cost of t..T entered with previous mode j.
  std::vector<std::vector<double>> value(static_cast<std::size_t>(T) + 1, std::vector<double>(K, 0.0));
  for (int t = T; t >= 1; --t)
    for (std::size_t j = 0; j < K; ++j) {
      double best = inf;
      for (std::size_t k = 0; k < K; ++k) {
        const double c = running[t - 1][k] + switching_cost(s, modes[j], modes[k]) + value[t][k];
        if (c < best)
          best = c;
      }
      value[t - 1][j] = best;
    }

  OracleResult out;
  std::size_t prev = s.initial_commitment.code();
  const double total = value[0][prev];
  if (!std::isfinite(total))
    throw DomainError("no feasible schedule");
  for (int t = 1; t <= T; ++t) {
    const double target = value[t - 1][prev];
    for (std::size_t k = 0; k < K; ++k) {
      const double c = running[t - 1][k] + switching_cost(s, modes[prev], modes[k]) + value[t][k];
      if (std::isfinite(c) && cost_tie(c, target)) {
        out.schedule.push_back(modes[k]);
        prev = k;
        break;
      }
    }
  }
  out.cost = total + quota_rebate(s);
  return out;
}

const ValueEntry* ValueTable::find(int t, const Commitment& prev_mode, const Dispatch& prev_dispatch) const {
  for (const auto& e : entries)
    if (e.sample.t == t && e.sample.prev_mode == prev_mode && e.sample.prev_dispatch == prev_dispatch)
      return &e;
  return nullptr;
}

ValueTable exact_value_table(const Scenario& s, const std::vector<ValueSample>& samples, const OracleOptions& opts) {
  const auto sets = relaxed_mode_sets(s);
  ValueTable table;
  for (const auto& sample : samples) {
    check_budget(sets, sample.t, opts);
    ValueEntry e;
    e.sample = sample;
    const auto best = search(s, sets, sample.t, sample.prev_mode, sample.prev_dispatch, opts);
    if (best.feasible()) {
      e.value = best.cost;
      e.first_mode = best.schedule.front();
      e.continuation = best.schedule;
    } else if (sample.t > s.horizon()) {
      e.value = 0;
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

} // namespace ucd
