#ifndef UCD_TESTS_SUPPORT_HPP
#define UCD_TESTS_SUPPORT_HPP

#include "ucd/clho.hpp"
#include "ucd/oracle.hpp"

#include <random>
#include <string>

namespace ucd::test {

Scenario load(const std::string& name); // file under the bundled data directory
std::string data_path(const std::string& name);

/// Example 1 with ramp limits switched on (R^U = R^D = `ramp` for both units).
Scenario with_ramps(Scenario s, double ramp);

/// Example 1 shortened to the listed demands (no switching costs).
Scenario example1_with_demands(const std::vector<double>& demands);

/// Uniform draw in [lo, hi].
double uniform(std::mt19937_64& rng, double lo, double hi);

/// A one-period instance built from a random subset of the Example-2 units.
struct RandomInstance {
  Scenario scenario;
  Commitment mode;
};
RandomInstance random_instance(std::mt19937_64& rng);

/// A schedule drawn uniformly from the relaxed feasible mode sets.
Schedule random_schedule(const Scenario& s, std::mt19937_64& rng);

/// Random previous dispatch from the trainer's sampling region for I_prev.
Dispatch random_state(const Scenario& s, int t, const Commitment& prev, std::mt19937_64& rng);

/**
 * Objective of the full model evaluated directly along a trajectory: fuel,
 * DG, DR, horizon emission cost with quotas, and start-up/shutdown costs
 * accounted per off-run of each unit instead of per transition.
 */
double direct_objective(const Scenario& s, const Schedule& schedule, const std::vector<Dispatch>& dispatch);

/// Lagrangian solution of min sum a_i x^2 + b_i x subject to sum x = D (boxes ignored).
std::vector<double> equal_lambda_dispatch(const std::vector<ThermalUnitParams>& units, double demand);

/// Random points of the dispatch polytope (projection onto the balance row, then rejection).
std::vector<Dispatch> feasible_points(const Scenario& s, int t, const Commitment& mode, const Dispatch& prev,
                                      std::mt19937_64& rng, int count);

/// Published reference totals per digit schedule. Columns: case 1, case 4.
struct TableRow {
  const char* schedule;
  double case1;
  double case4;
};
const std::vector<TableRow>& reference_costs();

} // namespace ucd::test

#endif // UCD_TESTS_SUPPORT_HPP
