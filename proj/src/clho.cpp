#include "ucd/clho.hpp"

#include "ucd/format.hpp"
#include "ucd/oracle.hpp"

#include <Eigen/Dense>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace ucd {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kModelFormat = "ucd-value-model";

std::string family_name(BasisFamily f) { return f == BasisFamily::quadratic ? "quad" : "linear"; }

BasisFamily family_from(const std::string& name) {
  if (name == "quad" || name == "quadratic")
    return BasisFamily::quadratic;
  if (name == "linear")
    return BasisFamily::linear;
  throw ModelError("unknown basis family '" + name + "'");
}

/// Dispatch results per mode at period t; only valid to share when ramps are relaxed.
using ModeCache = std::map<std::uint32_t, DispatchResult>;

struct Candidate {
  Commitment mode;
  DispatchResult result;
  double switching = 0;
  double score = std::numeric_limits<double>::infinity();
};

/// Evaluates every candidate mode at t from the state (prev, prev_dispatch).
std::vector<Candidate> evaluate(const ValueModel& m, const Scenario& s, int t, const Commitment& prev,
                                const Dispatch& prev_dispatch, const std::vector<Commitment>& modes,
                                const ModeCache* cache) {
  std::vector<Candidate> out;
  for (const auto& mode : modes) {
    Candidate c;
    c.mode = mode;
    if (cache) {
      const auto it = cache->find(mode.code());
      if (it == cache->end())
        continue;
      c.result = it->second;
    } else {
      c.result = dispatch_mode(s, t, mode, prev_dispatch);
    }
    if (!c.result.feasible())
      continue;
    c.switching = switching_cost(s, prev, mode);
    double future = 0;
    if (t < s.horizon())
      future = m.has(t + 1, mode) ? approx_value(m, t + 1, mode, c.result.dispatch)
                                  : std::numeric_limits<double>::infinity();
    c.score = c.result.cost + c.switching + future;
    out.push_back(std::move(c));
  }
  return out;
}

/// Lowest score; ties to the smaller mode code (candidates arrive in code order).
const Candidate* pick(const std::vector<Candidate>& cands) {
  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (!std::isfinite(c.score))
      continue;
    if (!best || (c.score < best->score && !cost_tie(c.score, best->score)))
      best = &c;
  }
  return best;
}

Dispatch sample_state(const Scenario& s, int t, const Commitment& prev, std::mt19937_64& rng) {
  const auto& ex = s.period(std::max(t - 1, 1));
  Dispatch p(s.units_count());
  for (int n = 0; n < s.units_count(); ++n)
    if (prev.on(n))
      p.thermal(n) = std::uniform_real_distribution<double>(s.units[n].p_min, s.units[n].p_max)(rng);
  p.dg() = std::uniform_real_distribution<double>(0, ex.dg_max)(rng);
  p.dr() = std::uniform_real_distribution<double>(0, ex.dr_max)(rng);
  return p;
}

struct Fit {
  Vector weights;
  FitInfo info;
};

Fit fit_weights(const BasisSpec& basis, const std::vector<Dispatch>& states, const std::vector<double>& targets,
                double regularization) {
  Fit out;
  const auto k = static_cast<Eigen::Index>(states.size());
  const Eigen::Index M = basis.feature_count();
  Matrix phi(k, M);
  Vector y(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    phi.row(i) = basis_vector(basis, states[static_cast<std::size_t>(i)]).transpose();
    y(i) = targets[static_cast<std::size_t>(i)];
  }
  // Column equilibration; weights are mapped back to the raw features below.
  Vector scale = phi.cwiseAbs().colwise().maxCoeff().transpose();
  int nonzero_columns = 0;
  for (Eigen::Index j = 0; j < M; ++j) {
    if (scale(j) > 0)
      ++nonzero_columns;
    else
      scale(j) = 1;
  }
  Matrix design = phi * scale.cwiseInverse().asDiagonal();
  Vector rhs = y;
  if (regularization > 0) {
    design.conservativeResize(k + M, M);
    design.bottomRows(M) = std::sqrt(regularization) * scale.cwiseInverse().asDiagonal().toDenseMatrix();
    rhs.conservativeResize(k + M);
    rhs.tail(M).setZero();
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
  const Vector v = cod.solve(rhs);
  out.weights = scale.cwiseInverse().cwiseProduct(v);
  out.info.samples = static_cast<int>(k);
  out.info.rank = static_cast<int>(cod.rank());
  out.info.residual = k > 0 ? std::sqrt((phi * out.weights - y).squaredNorm() / static_cast<double>(k)) : 0.0;
  if (out.info.rank < nonzero_columns)
    out.info.rank = -out.info.rank; // flagged; sign restored by caller after logging
  return out;
}

} // namespace

int BasisSpec::feature_count() const {
  const int k = static_cast<int>(coordinates.size());
  return family == BasisFamily::quadratic ? 2 * k + 1 : k + 1;
}

BasisSpec default_basis(const Scenario& s, BasisFamily family) {
  BasisSpec b;
  b.family = family;
  for (int n = 0; n < s.units_count(); ++n)
    b.coordinates.push_back(n);
  bool dg = false, dr = false;
  for (const auto& p : s.periods) {
    dg = dg || p.dg_max > 0;
    dr = dr || p.dr_max > 0;
  }
  if (dg)
    b.coordinates.push_back(s.units_count());
  if (dr)
    b.coordinates.push_back(s.units_count() + 1);
  return b;
}

Vector basis_vector(const BasisSpec& spec, const Dispatch& p) {
  const auto k = static_cast<Eigen::Index>(spec.coordinates.size());
  Vector phi(spec.feature_count());
  Eigen::Index at = 0;
  if (spec.family == BasisFamily::quadratic)
    for (Eigen::Index i = 0; i < k; ++i) {
      const double x = p.values(spec.coordinates[static_cast<std::size_t>(i)]);
      phi(at++) = x * x;
    }
  for (Eigen::Index i = 0; i < k; ++i)
    phi(at++) = p.values(spec.coordinates[static_cast<std::size_t>(i)]);
  phi(at) = 1.0;
  return phi;
}

bool ValueModel::has(int t, const Commitment& prev) const { return weights.count({t, prev.code()}) > 0; }

ValueModel train(const Scenario& s, const TrainConfig& cfg, std::optional<BasisSpec> basis) {
  if (const auto v = validate_scenario(s); !v.empty())
    throw DomainError("invalid scenario: " + v.front());
  ValueModel m;
  m.basis = basis ? *basis : default_basis(s);
  m.horizon = s.horizon();
  m.units = s.units_count();
  m.config = cfg;
  m.fingerprint = scenario_fingerprint(s);
  for (int c : m.basis.coordinates)
    if (c < 0 || c >= m.units + 2)
      throw ModelError("basis coordinate " + std::to_string(c) + " out of range");
  if (cfg.samples < m.basis.feature_count())
    spdlog::warn("{} samples per fit is below the {} basis features; fits are underdetermined", cfg.samples,
                 m.basis.feature_count());

  const int T = s.horizon();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = cfg.threads == 0 ? hw : cfg.threads;

  for (int t = T; t >= 1; --t) {
    const auto decisions = feasible_modes_relaxed(s, t);
    if (decisions.empty())
      throw DomainError("no feasible commitment at t=" + std::to_string(t));
    const auto prevs = t == 1 ? all_commitments(s.units_count()) : feasible_modes_relaxed(s, t - 1);

    std::optional<ModeCache> cache;
    if (!s.ramp_enforced) {
      cache.emplace();
      const Dispatch none(s.units_count());
      for (const auto& mode : decisions)
        (*cache)[mode.code()] = dispatch_mode(s, t, mode, none);
    }

    std::vector<Fit> fits(prevs.size());
    auto fit_one = [&](std::size_t i) {
      const auto& prev = prevs[i];
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                        static_cast<std::uint32_t>(t), prev.code()};
      std::mt19937_64 rng(seq);
      std::vector<Dispatch> states;
      std::vector<double> targets;
      int discarded = 0;
      for (int k = 0; k < cfg.samples; ++k) {
        const auto state = sample_state(s, t, prev, rng);
        const auto cands = evaluate(m, s, t, prev, state, decisions, cache ? &*cache : nullptr);
        const auto* best = pick(cands);
        if (!best) {
          ++discarded;
          continue;
        }
        states.push_back(state);
        targets.push_back(best->score);
      }
      if (!states.empty())
        fits[i] = fit_weights(m.basis, states, targets, cfg.regularization);
      fits[i].info.discarded = discarded;
    };
    if (workers <= 1 || prevs.size() <= 1) {
      for (std::size_t i = 0; i < prevs.size(); ++i)
        fit_one(i);
    } else {
      std::vector<std::future<void>> jobs;
      for (std::size_t i = 0; i < prevs.size(); ++i)
        jobs.push_back(std::async(std::launch::async, fit_one, i));
      for (auto& j : jobs)
        j.get();
    }

    for (std::size_t i = 0; i < prevs.size(); ++i) {
      auto& f = fits[i];
      if (f.info.discarded > 0)
        spdlog::debug("t={} prev={}: discarded {} samples with no feasible decision", t, prevs[i].str(),
                      f.info.discarded);
      if (f.info.samples == 0) {
        spdlog::debug("t={} prev={}: no usable samples, stage left untrained", t, prevs[i].str());
        continue;
      }
      if (f.info.rank < 0) {
        f.info.rank = -f.info.rank;
        spdlog::warn("t={} prev={}: rank-deficient fit (rank {}), using minimum-norm weights", t,
                     prevs[i].str(), f.info.rank);
      }
      m.weights[{t, prevs[i].code()}] = f.weights;
      m.fits[{t, prevs[i].code()}] = f.info;
    }
  }
  return m;
}

double approx_value(const ValueModel& m, int t, const Commitment& prev, const Dispatch& p) {
  if (t == m.horizon + 1)
    return 0.0;
  const auto it = m.weights.find({t, prev.code()});
  if (it == m.weights.end())
    throw ModelError("no trained weights for t=" + std::to_string(t) + " prev=" + prev.str());
  return it->second.dot(basis_vector(m.basis, p));
}

StepDecision schedule_step(const ValueModel& m, const Scenario& s, int t, const Commitment& prev,
                           const Dispatch& prev_dispatch) {
  if (m.units != s.units_count() || m.horizon != s.horizon())
    throw ModelError("model shape does not match the scenario");
  if (t < 1 || t > s.horizon())
    throw DomainError("period " + std::to_string(t) + " outside 1.." + std::to_string(s.horizon()));
  const auto cands = evaluate(m, s, t, prev, prev_dispatch, all_commitments(s.units_count()), nullptr);
  const auto* best = pick(cands);
  if (!best)
    throw DomainError("no feasible commitment at t=" + std::to_string(t) + " from the observed state");
  StepDecision out;
  out.mode = best->mode;
  out.dispatch = best->result.dispatch;
  out.cost = {best->result.cost, best->switching};
  out.score = best->score;
  return out;
}

Trajectory greedy_schedule(const ValueModel& m, const Scenario& s, int first_t, const Commitment& prev,
                           const Dispatch& prev_dispatch) {
  Trajectory traj;
  Commitment mode = prev;
  Dispatch p = prev_dispatch;
  for (int t = first_t; t <= s.horizon(); ++t) {
    const auto d = schedule_step(m, s, t, mode, p);
    traj.steps.push_back(make_step(s, t, mode, d.mode, d.dispatch));
    mode = d.mode;
    p = d.dispatch;
  }
  finalize(s, traj);
  return traj;
}

void check_fingerprint(const ValueModel& m, const Scenario& s) {
  if (m.fingerprint != scenario_fingerprint(s))
    throw ModelError("model fingerprint " + m.fingerprint.substr(0, 12) +
                     "... does not match the scenario; retrain or pass --force");
}

std::string serialize_model(const ValueModel& m) {
  json root;
  root["format"] = kModelFormat;
  root["version"] = ValueModel::format_version;
  root["fingerprint"] = m.fingerprint;
  root["horizon"] = m.horizon;
  root["units"] = m.units;
  root["basis"] = {{"family", family_name(m.basis.family)}, {"coordinates", m.basis.coordinates}};
  root["training"] = {{"samples", m.config.samples},
                      {"regularization", m.config.regularization},
                      {"seed", m.config.seed}};
  json ws = json::array();
  for (const auto& [key, w] : m.weights) {
    json e;
    e["t"] = key.first;
    e["prev"] = Commitment(m.units, key.second).str();
    e["weights"] = std::vector<double>(w.begin(), w.end());
    if (const auto it = m.fits.find(key); it != m.fits.end())
      e["fit"] = {{"samples", it->second.samples},
                  {"discarded", it->second.discarded},
                  {"rank", it->second.rank},
                  {"rms_residual", it->second.residual}};
    ws.push_back(std::move(e));
  }
  root["weights"] = std::move(ws);
  return root.dump(2) + "\n";
}

void save_model(const ValueModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw ModelError("cannot write model file " + path.string());
  out << serialize_model(m);
  if (!out)
    throw ModelError("write failed for model file " + path.string());
}

ValueModel parse_model(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model document is not valid: ") + e.what());
  }
  try {
    if (root.at("format") != kModelFormat)
      throw ModelError("not a value-model document");
    if (root.at("version") != ValueModel::format_version)
      throw ModelError("unsupported model version " + root.at("version").dump());
    ValueModel m;
    m.fingerprint = root.at("fingerprint").get<std::string>();
    m.horizon = root.at("horizon").get<int>();
    m.units = root.at("units").get<int>();
    m.basis.family = family_from(root.at("basis").at("family").get<std::string>());
    m.basis.coordinates = root.at("basis").at("coordinates").get<std::vector<int>>();
    const auto& tr = root.at("training");
    m.config.samples = tr.at("samples").get<int>();
    m.config.regularization = tr.at("regularization").get<double>();
    m.config.seed = tr.at("seed").get<std::uint64_t>();
    for (const auto& e : root.at("weights")) {
      const auto w = e.at("weights").get<std::vector<double>>();
      if (static_cast<int>(w.size()) != m.basis.feature_count())
        throw ModelError("weight vector length does not match the basis");
      const auto prev = Commitment::parse(e.at("prev").get<std::string>());
      if (prev.size() != m.units)
        throw ModelError("commitment width does not match the unit count");
      const std::pair key{e.at("t").get<int>(), prev.code()};
      m.weights[key] = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
      if (e.contains("fit")) {
        const auto& f = e.at("fit");
        m.fits[key] = {f.at("samples").get<int>(), f.at("discarded").get<int>(), f.at("rank").get<int>(),
                       f.at("rms_residual").get<double>()};
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw ModelError(std::string("model document is incomplete: ") + e.what());
  }
}

ValueModel load_model(const std::filesystem::path& path, const Scenario* scenario, bool force) {
  std::ifstream in(path);
  if (!in)
    throw ModelError("cannot open model file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto m = parse_model(buf.str());
  if (scenario && !force)
    check_fingerprint(m, *scenario);
  return m;
}

void write_weights_csv(std::ostream& out, const ValueModel& m) {
  out << "t,prev";
  for (int j = 1; j <= m.basis.feature_count(); ++j)
    out << ",w_" << j;
  out << '\n';
  for (const auto& [key, w] : m.weights) {
    out << key.first << ',' << Commitment(m.units, key.second).str();
    for (double v : w)
      out << ',' << exact(v);
    out << '\n';
  }
}

} // namespace ucd
