#include "ucd/cli.hpp"

#include "ucd/format.hpp"
#include "ucd/simulator.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <fstream>
#include <iostream>
#include <ostream>

namespace ucd {

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void use_stderr_logger(bool verbose, bool quiet) {
  auto logger = spdlog::get("ucd");
  if (!logger)
    logger = spdlog::stderr_logger_mt("ucd");
  logger->set_pattern("ucd: %l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(quiet ? spdlog::level::err : verbose ? spdlog::level::debug : spdlog::level::info);
}

std::vector<double> parse_csv(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    double v = 0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
    if (r.ec != std::errc{} || r.ptr != item.data() + item.size())
      throw UsageError(flag + ": '" + std::string(item) + "' is not a number");
    out.push_back(v);
    if (comma == std::string_view::npos)
      return out;
    rest = rest.substr(comma + 1);
  }
}

/// N thermal values (DG/DR = 0) or N + 2 values.
Dispatch parse_state(const std::string& text, int units, const std::string& flag) {
  const auto v = parse_csv(text, flag);
  const auto n = static_cast<std::size_t>(units);
  if (v.size() == n)
    return Dispatch(v, 0, 0);
  if (v.size() == n + 2)
    return Dispatch(std::vector<double>(v.begin(), v.begin() + units), v[n], v[n + 1]);
  throw UsageError(flag + ": expected " + std::to_string(units) + " or " + std::to_string(units + 2) + " values");
}

Commitment parse_mode(const std::string& bits, int units, const std::string& flag) {
  Commitment c;
  try {
    c = Commitment::parse(bits);
  } catch (const DomainError& e) {
    throw UsageError(flag + ": " + e.what());
  }
  if (c.size() != units)
    throw UsageError(flag + ": expected " + std::to_string(units) + " bits, got '" + bits + "'");
  return c;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path);
  if (!f)
    throw DomainError("cannot write " + path);
  body(f);
  if (!f)
    throw DomainError("write failed for " + path);
}

std::string join(const Dispatch& p, int digits) {
  std::string out;
  for (int n = 0; n < p.units(); ++n)
    out += (n ? "," : "") + fixed(p.thermal(n), digits);
  return out;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Unit commitment and dispatch as optimal mode switching", "ucd"};
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging on stderr");
  app.add_flag("-q,--quiet", quiet, "Only errors on stderr");

  std::string scenario_path;
  std::string model_path;
  std::string trajectory_path;
  bool force = false;
  std::uint64_t budget = OracleOptions{}.budget;
  unsigned threads = 0;

  auto* validate = app.add_subcommand("validate", "Check a scenario document");
  validate->add_option("scenario", scenario_path, "Scenario file")->required();

  int t = 1;
  std::string mode_bits, prev_csv;
  int digits = 1;
  auto* dispatch = app.add_subcommand("dispatch", "Economic dispatch for one period and commitment");
  dispatch->add_option("scenario", scenario_path, "Scenario file")->required();
  dispatch->add_option("--t", t, "Period, 1-based")->required();
  dispatch->add_option("--mode", mode_bits, "Commitment bits, unit 1 first")->required();
  dispatch->add_option("--prev", prev_csv, "Previous dispatch (N or N+2 values); default: initial state");
  dispatch->add_option("--digits", digits, "Decimals printed")->check(CLI::Range(0, 17));

  bool enumerate = false, graph = false, dump_table = false;
  auto* oracle = app.add_subcommand("oracle", "Exact optimal schedule");
  oracle->add_option("scenario", scenario_path, "Scenario file")->required();
  auto* enum_flag = oracle->add_flag("--enumerate", enumerate, "Exhaustive enumeration (default)");
  oracle->add_flag("--graph", graph, "Shortest path over commitments; ramp limits must be relaxed")->excludes(enum_flag);
  oracle->add_flag("--dump-table", dump_table, "Print every feasible schedule (enumeration only)");
  oracle->add_option("--budget", budget, "Maximum schedule evaluations");
  oracle->add_option("--threads", threads, "Worker threads, 0 = hardware");
  oracle->add_option("--trajectory", trajectory_path, "Write the optimal trajectory CSV here");

  TrainConfig cfg;
  std::string basis_name = "quad", weights_path;
  auto* train_cmd = app.add_subcommand("train", "Fit the cost-to-go approximation");
  train_cmd->add_option("scenario", scenario_path, "Scenario file")->required();
  train_cmd->add_option("--out", model_path, "Model file to write")->required();
  train_cmd->add_option("--samples", cfg.samples, "Samples per (t, previous commitment)")->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", cfg.seed, "Random seed");
  train_cmd->add_option("--basis", basis_name, "Basis family")->check(CLI::IsMember({"quad", "linear"}));
  train_cmd->add_option("--regularization", cfg.regularization, "Ridge weight")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--threads", cfg.threads, "Worker threads, 0 = hardware");
  train_cmd->add_option("--weights-csv", weights_path, "Also export weights per (t, previous commitment)");

  int from_t = 1;
  std::string state_csv, state_mode;
  auto* schedule = app.add_subcommand("schedule", "Closed-loop schedule from a trained model");
  schedule->add_option("scenario", scenario_path, "Scenario file")->required();
  schedule->add_option("--model", model_path, "Model file")->required();
  auto* from_opt = schedule->add_option("--from-t", from_t, "First period to schedule");
  auto* state_opt = schedule->add_option("--state", state_csv, "Dispatch realized at from_t - 1");
  schedule->add_option("--state-mode", state_mode, "Commitment at from_t - 1; default: units with output > 0");
  from_opt->needs(state_opt);
  state_opt->needs(from_opt);
  schedule->add_flag("--force", force, "Accept a model trained on another scenario");

  std::vector<std::string> disturb;
  std::string report_path;
  auto* simulate_cmd = app.add_subcommand("simulate", "Closed-loop run with disturbances");
  simulate_cmd->add_option("scenario", scenario_path, "Scenario file")->required();
  simulate_cmd->add_option("--model", model_path, "Model file")->required();
  simulate_cmd->add_option("--disturb", disturb, "t=k:v1,v2,... override of the realized state")->take_all();
  simulate_cmd->add_option("--report", report_path, "JSON run report")->required();
  simulate_cmd->add_option("--budget", budget, "Oracle budget for tail checks");
  simulate_cmd->add_option("--trajectory", trajectory_path, "Also write the trajectory CSV here");

  auto* compare = app.add_subcommand("compare", "Every feasible schedule next to the CLHO schedule");
  compare->add_option("scenario", scenario_path, "Scenario file")->required();
  compare->add_option("--model", model_path, "Model file")->required();
  compare->add_option("--budget", budget, "Maximum schedule evaluations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, std::cerr);
    return rc == 0 ? exit_ok : exit_usage;
  }
  use_stderr_logger(verbose, quiet);

  try {
    const Scenario s = load_scenario(scenario_path);
    const OracleOptions opts{budget, threads};

    if (*validate) {
      out << "valid: " << s.units_count() << " units, " << s.horizon() << " periods, fingerprint "
          << scenario_fingerprint(s) << '\n';
    } else if (*dispatch) {
      if (t < 1 || t > s.horizon())
        throw UsageError("--t: must lie in 1.." + std::to_string(s.horizon()));
      const auto mode = parse_mode(mode_bits, s.units_count(), "--mode");
      const Dispatch prev = prev_csv.empty() ? s.initial_dispatch : parse_state(prev_csv, s.units_count(), "--prev");
      const auto p = mode_dynamics(s, t, mode, prev);
      spdlog::debug("running cost {} $, DG {} MW, DR {} MW", exact(running_cost(s, mode, p)), exact(p.dg()),
                    exact(p.dr()));
      out << join(p, digits) << '\n';
    } else if (*oracle) {
      OracleResult best;
      if (graph) {
        best = graph_dp_optimal(s);
      } else {
        const auto rows = enumerate_all(s, opts);
        if (rows.empty())
          throw DomainError("no feasible schedule");
        const OracleResult* pick = &rows.front();
        for (const auto& r : rows)
          if (better_than(r.cost, r.schedule, pick->cost, pick->schedule))
            pick = &r;
        best = *pick;
        spdlog::info("{} feasible schedules", rows.size());
        if (dump_table) {
          out << "schedule,total_cost\n";
          for (const auto& r : rows)
            out << schedule_code(r.schedule) << ',' << exact(r.cost) << '\n';
          out << '\n';
        }
      }
      out << "schedule,total_cost\n" << schedule_code(best.schedule) << ',' << exact(best.cost) << '\n';
      if (!trajectory_path.empty()) {
        const auto traj = run_schedule(s, best.schedule);
        write_file(trajectory_path, [&](std::ostream& f) { write_trajectory_csv(f, traj); });
      }
    } else if (*train_cmd) {
      const auto basis = default_basis(s, basis_name == "linear" ? BasisFamily::linear : BasisFamily::quadratic);
      const auto m = train(s, cfg, basis);
      save_model(m, model_path);
      spdlog::info("model with {} weight vectors written to {}", m.weights.size(), model_path);
      if (!weights_path.empty())
        write_file(weights_path, [&](std::ostream& f) { write_weights_csv(f, m); });
    } else if (*schedule) {
      const auto m = load_model(model_path, &s, force);
      Commitment prev = s.initial_commitment;
      Dispatch p = s.initial_dispatch;
      if (!state_csv.empty()) {
        if (from_t < 1 || from_t > s.horizon())
          throw UsageError("--from-t: must lie in 1.." + std::to_string(s.horizon()));
        p = parse_state(state_csv, s.units_count(), "--state");
        if (state_mode.empty()) {
          prev = Commitment(s.units_count());
          for (int n = 0; n < s.units_count(); ++n)
            prev.set(n, p.thermal(n) > 0);
        } else {
          prev = parse_mode(state_mode, s.units_count(), "--state-mode");
        }
      } else if (!state_mode.empty()) {
        throw UsageError("--state-mode needs --state");
      }
      const auto traj = greedy_schedule(m, s, from_t, prev, p);
      spdlog::info("schedule {} total cost {}", schedule_code(traj.schedule()), exact(total_cost(traj)));
      write_trajectory_csv(out, traj);
    } else if (*simulate_cmd) {
      const auto m = load_model(model_path, &s);
      DisturbanceScript script;
      for (const auto& d : disturb)
        script.events.push_back(parse_disturbance(d, s.units_count()));
      const auto report = simulate(s, m, script, opts);
      write_file(report_path, [&](std::ostream& f) { write_report_json(f, report, s); });
      if (!trajectory_path.empty())
        write_file(trajectory_path, [&](std::ostream& f) { write_trajectory_csv(f, report.trajectory); });
      write_trajectory_csv(out, report.trajectory);
      for (const auto& c : report.comparisons)
        if (c.checked() && !c.matches())
          spdlog::warn("tail from t={} costs {} against the optimal {}", c.from_t, exact(c.realized_cost),
                       exact(*c.oracle_cost));
    } else if (*compare) {
      const auto m = load_model(model_path, &s);
      const auto table = compare_with_oracle(s, m, opts);
      write_comparison_csv(out, table);
      if (table.oracle_argmin)
        spdlog::info("CLHO schedule {} {} the oracle argmin {}", schedule_code(table.clho.schedule()),
                     table.matches_oracle() ? "matches" : "differs from", schedule_code(*table.oracle_argmin));
    }
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return exit_usage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_domain;
  }
  return exit_ok;
}

} // namespace ucd
