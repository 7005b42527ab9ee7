#ifndef UCD_DISPATCH_HPP
#define UCD_DISPATCH_HPP

#include "ucd/qp.hpp"
#include "ucd/scenario.hpp"

#include <vector>

namespace ucd {

/// Which dispatch coordinate each QP variable stands for; other coordinates are fixed at 0.
struct VariableMap {
  std::vector<int> coordinate; // index into Dispatch::values
  int dispatch_size = 0;
};

/// Economic-dispatch QP for one period and one commitment.
struct DispatchProblem {
  QpProblem<double> qp;
  VariableMap variables;
  int period = 0;
  Commitment mode;
};

struct DispatchResult {
  QpSolution<double> qp;
  Dispatch dispatch;
  double cost = 0; // running cost at the dispatch

  bool feasible() const { return qp.status == QpStatus::optimal; }
};

/// Raised when a commitment admits no feasible dispatch.
class InfeasibleModeError : public DomainError {
public:
  InfeasibleModeError(int period, const Commitment& mode)
      : DomainError("commitment " + mode.str() + " is infeasible at t=" + std::to_string(period)),
        period_(period), mode_(mode) {}
  int period() const { return period_; }
  const Commitment& mode() const { return mode_; }

private:
  int period_;
  Commitment mode_;
};

/**
 * Builds the lower-level dispatch problem at period t (1-based) for commitment `mode`.
 *
 * Free variables are the committed thermal outputs and DG/DR when their cap is
 * positive. Rows: balance equality, lower/upper spinning reserve, thermal
 * boxes, ramp limits (only when enforced and the unit is committed now and had
 * positive output at t-1), DG box, linearised penetration cap, DR box.
 */
DispatchProblem assemble(const Scenario& s, int t, const Commitment& mode, const Dispatch& prev);

/// Solves an assembled problem and maps the solution back to a full dispatch vector.
DispatchResult solve(const DispatchProblem& problem, const Scenario& s);

/// Optimal dispatch under `mode`, or InfeasibleModeError.
Dispatch mode_dynamics(const Scenario& s, int t, const Commitment& mode, const Dispatch& prev);

/// assemble + solve; infeasibility is reported through the result.
DispatchResult dispatch_mode(const Scenario& s, int t, const Commitment& mode, const Dispatch& prev);

/// Commitments (in code order) whose dispatch problem at t is feasible.
std::vector<Commitment> feasible_modes(const Scenario& s, int t, const Dispatch& prev);

/// Same, ignoring ramp rows, so independent of the previous dispatch.
std::vector<Commitment> feasible_modes_relaxed(const Scenario& s, int t);

} // namespace ucd

#endif // UCD_DISPATCH_HPP
