#ifndef UCD_ORACLE_HPP
#define UCD_ORACLE_HPP

#include "ucd/hybrid.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace ucd {

struct OracleOptions {
  std::uint64_t budget = 10'000'000; // schedule evaluations
  unsigned threads = 0;              // 0 = hardware concurrency
};

struct OracleResult {
  Schedule schedule;
  double cost = std::numeric_limits<double>::infinity(); // total_cost, rebate included
};

/// Optimal continuation from a pre-decision state: periods t..T.
struct Continuation {
  Schedule schedule;
  double cost = std::numeric_limits<double>::infinity(); // sum of Q + kappa over t..T, no rebate
  bool feasible() const { return !schedule.empty(); }
};

class BudgetExceededError : public DomainError {
public:
  using DomainError::DomainError;
};

/// True when a and b are equal within the oracle's tie tolerance.
bool cost_tie(double a, double b);

/// (cost, schedule) ordering shared by every scheduler: lower cost, then smaller mode codes.
bool better_than(double cost_a, const Schedule& a, double cost_b, const Schedule& b);

/// Number of full schedules the enumeration would visit from period t (ramp rows ignored, so an upper bound).
std::uint64_t enumeration_size(const Scenario& s, int t = 1);

/**
 * Brute force over every schedule; exact with or without ramp limits.
 * Ties go to the lexicographically smallest sequence of mode codes.
 */
OracleResult enumerate_optimal(const Scenario& s, const OracleOptions& opts = {});

/// Every feasible schedule with its total cost, in lexicographic order.
std::vector<OracleResult> enumerate_all(const Scenario& s, const OracleOptions& opts = {});

/// Exact optimal continuation from (t, prev_mode, prev_dispatch) by enumeration.
Continuation optimal_continuation(const Scenario& s, int t, const Commitment& prev_mode, const Dispatch& prev_dispatch,
                                  const OracleOptions& opts = {});

/**
 * Shortest path over the layered commitment graph. Requires ramp limits
 * relaxed, where the dispatch at t depends only on (t, mode).
 */
OracleResult graph_dp_optimal(const Scenario& s);

struct ValueSample {
  int t = 1;
  Commitment prev_mode;
  Dispatch prev_dispatch;
};

struct ValueEntry {
  ValueSample sample;
  double value = std::numeric_limits<double>::infinity(); // +inf when no feasible continuation
  Commitment first_mode;
  Schedule continuation;
};

struct ValueTable {
  std::vector<ValueEntry> entries;

  /// Entry for an exactly matching sample, or nullptr.
  const ValueEntry* find(int t, const Commitment& prev_mode, const Dispatch& prev_dispatch) const;
};

/// Exact cost-to-go at each sample.
ValueTable exact_value_table(const Scenario& s, const std::vector<ValueSample>& samples,
                             const OracleOptions& opts = {});

} // namespace ucd

#endif // UCD_ORACLE_HPP
