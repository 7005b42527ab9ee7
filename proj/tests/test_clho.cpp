#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ucd;

namespace {

const ValueModel& case1_model() {
  static const ValueModel m = train(test::load("example1_case1.ucd"));
  return m;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ucd_test_" + name);
}

} // namespace

TEST(Basis, DefaultFeatures) {
  const auto s = test::load("example1_case1.ucd");
  const auto spec = default_basis(s);
  EXPECT_EQ(spec.coordinates, (std::vector<int>{0, 1}));
  EXPECT_EQ(spec.feature_count(), 5);
  const Vector phi = basis_vector(spec, Dispatch({350, 0}, 0, 0));
  EXPECT_EQ(phi, (Vector(5) << 122500, 0, 350, 0, 1).finished());
  EXPECT_EQ(basis_vector(spec, Dispatch(2)), (Vector(5) << 0, 0, 0, 0, 1).finished());
  EXPECT_EQ(default_basis(test::load("example2_case1.ucd")).feature_count(), 15);
  EXPECT_EQ(default_basis(s, BasisFamily::linear).feature_count(), 3);
}

TEST(ApproxValue, ZeroWeightsAndTerminalBoundary) {
  ValueModel m = case1_model();
  const Dispatch p({250, 120}, 0, 0);
  EXPECT_EQ(approx_value(m, 7, Commitment::parse("11"), p), 0);
  for (auto& [key, w] : m.weights)
    w.setZero();
  EXPECT_EQ(approx_value(m, 3, Commitment::parse("10"), p), 0);
  EXPECT_THROW(approx_value(m, 3, Commitment::parse("00"), p), ModelError);
}

TEST(Train, WeightsExistForEveryReachablePreviousCommitment) {
  const auto s = test::load("example1_case1.ucd");
  const auto& m = case1_model();
  for (int t = 1; t <= s.horizon(); ++t) {
    const auto prevs = t == 1 ? all_commitments(2) : feasible_modes_relaxed(s, t - 1);
    for (const auto& prev : prevs)
      EXPECT_TRUE(m.has(t, prev)) << "t=" << t << " prev " << prev.str();
  }
  EXPECT_EQ(m.fingerprint, scenario_fingerprint(s));
}

TEST(Train, DeterministicInTheSeed) {
  const auto s = test::load("example1_case4.ucd");
  TrainConfig cfg;
  cfg.threads = 3;
  const auto a = train(s, cfg);
  cfg.threads = 1;
  const auto b = train(s, cfg);
  EXPECT_EQ(serialize_model(a), serialize_model(b));
  cfg.seed = 7;
  EXPECT_NE(serialize_model(train(s, cfg)), serialize_model(a));
}

TEST(Train, SinglePeriodFitIsExact) {
  const auto s = test::example1_with_demands({700});
  const auto m = train(s);
  for (const auto& [key, info] : m.fits)
    EXPECT_LE(info.residual, 1e-6) << "prev " << Commitment(2, key.second).str();
  std::mt19937_64 rng(3);
  const auto r = dispatch_mode(s, 1, Commitment::parse("11"), s.initial_dispatch);
  for (const auto& prev : all_commitments(2)) {
    const auto p = test::random_state(s, 1, prev, rng);
    EXPECT_NEAR(approx_value(m, 1, prev, p), r.cost + switching_cost(s, prev, Commitment::parse("11")), 1e-6);
  }
}

TEST(Train, NoFeasibleModeIsAnError) {
  EXPECT_THROW(train(test::example1_with_demands({200, 5000})), DomainError);
}

TEST(ApproxValue, CloseToTheExactCostToGo) {
  for (const char* name : {"example1_case1.ucd", "example1_case4.ucd"}) {
    const auto s = test::load(name);
    const auto m = train(s);
    std::mt19937_64 rng(99);
    double sum = 0, worst = 0;
    int count = 0;
    for (int t = 1; t <= s.horizon(); ++t) {
      const auto prevs = t == 1 ? all_commitments(2) : feasible_modes_relaxed(s, t - 1);
      for (const auto& prev : prevs)
        for (int k = 0; k < 10; ++k) {
          const auto p = test::random_state(s, t, prev, rng);
          const auto exact = exact_value_table(s, {{t, prev, p}}).entries.front().value;
          const double rel = std::abs(approx_value(m, t, prev, p) - exact) / std::abs(exact);
          sum += rel;
          worst = std::max(worst, rel);
          ++count;
        }
    }
    EXPECT_LE(sum / count, 0.01) << name;
    EXPECT_LE(worst, 0.05) << name;
  }
  // The grid named for t = 4 after "10".
  const auto s = test::load("example1_case1.ucd");
  for (double p1 = 150; p1 <= 600; p1 += 90) {
    const Dispatch p({p1, 0}, 0, 0);
    const auto exact = exact_value_table(s, {{4, Commitment::parse("10"), p}}).entries.front().value;
    EXPECT_NEAR(approx_value(case1_model(), 4, Commitment::parse("10"), p), exact, 0.01 * exact);
  }
}

TEST(Schedule, BothInitialStatesAndTheDisturbedTail) {
  const auto s = test::load("example1_case1.ucd");
  const auto& m = case1_model();
  const auto first = schedule_step(m, s, 1, Commitment::parse("01"), Dispatch({0, 200}, 0, 0));
  EXPECT_EQ(first.mode.str(), "01");
  EXPECT_NEAR(first.dispatch.thermal(1), 200, 1e-9);
  EXPECT_EQ(schedule_code(greedy_schedule(m, s, 1, s.initial_commitment, s.initial_dispatch).schedule()), "122333");
  // Started from ([1,0],[200,0]) with the same model.
  EXPECT_EQ(schedule_code(greedy_schedule(m, s, 1, Commitment::parse("10"), Dispatch({200, 0}, 0, 0)).schedule()),
            "122333");
  // Disturbed to [200,150] after t = 2.
  const auto tail = greedy_schedule(m, s, 3, Commitment::parse("11"), Dispatch({200, 150}, 0, 0));
  EXPECT_EQ(schedule_code(tail.schedule()), "2333");
  EXPECT_NEAR(tail.steps[0].dispatch.thermal(0), 350, 1e-9);
}

TEST(Schedule, RetrainedCaseFour) {
  const auto s = test::load("example1_case4.ucd");
  const auto m = train(s);
  EXPECT_EQ(schedule_code(greedy_schedule(m, s, 1, s.initial_commitment, s.initial_dispatch).schedule()), "133333");
}

TEST(Schedule, ClosedLoopMatchesTheOracleOnAGrid) {
  for (const char* name : {"example1_case1.ucd", "example1_case4.ucd"}) {
    const auto s = test::load(name);
    const auto m = std::string(name).find("case1") != std::string::npos ? case1_model() : train(s);
    std::vector<std::pair<Commitment, Dispatch>> starts{{Commitment::parse("01"), Dispatch({0, 200}, 0, 0)},
                                                        {Commitment::parse("10"), Dispatch({200, 0}, 0, 0)}};
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        starts.push_back({Commitment::parse("11"), Dispatch({150 + 112.5 * i, 100 + 75.0 * j}, 0, 0)});
    for (int t = 1; t <= s.horizon(); ++t)
      for (const auto& [mode, p] : starts) {
        const auto clho = greedy_schedule(m, s, t, mode, p);
        const auto best = optimal_continuation(s, t, mode, p);
        const double realized = clho.running_total + clho.switching_total;
        EXPECT_EQ(clho.schedule(), best.schedule) << name << " t=" << t << " from " << mode.str();
        EXPECT_NEAR(realized, best.cost, 1e-4) << name << " t=" << t << " from " << mode.str();
      }
  }
}

TEST(ModelFile, RoundTripIsBitwise) {
  const auto s = test::load("example1_case1.ucd");
  const auto& m = case1_model();
  const auto path = temp_file("model.json");
  save_model(m, path);
  const auto back = load_model(path, &s);
  EXPECT_EQ(back.basis, m.basis);
  EXPECT_EQ(back.fingerprint, m.fingerprint);
  ASSERT_EQ(back.weights.size(), m.weights.size());
  std::mt19937_64 rng(8);
  for (const auto& [key, w] : m.weights) {
    EXPECT_EQ(back.weights.at(key), w);
    const Commitment prev(2, key.second);
    const auto p = test::random_state(s, key.first, prev, rng);
    EXPECT_EQ(approx_value(back, key.first, prev, p), approx_value(m, key.first, prev, p));
  }
  EXPECT_EQ(serialize_model(back), serialize_model(m));
  std::filesystem::remove(path);
}

TEST(ModelFile, FingerprintMismatchIsRefused) {
  const auto other = test::load("example1_case4.ucd");
  const auto path = temp_file("model_fp.json");
  save_model(case1_model(), path);
  EXPECT_THROW(load_model(path, &other), ModelError);
  EXPECT_NO_THROW(load_model(path, &other, true));
  std::filesystem::remove(path);
}

TEST(ModelFile, TruncatedOrForeignDocuments) {
  const auto text = serialize_model(case1_model());
  EXPECT_THROW(parse_model(text.substr(0, text.size() / 2)), ModelError);
  EXPECT_THROW(parse_model(R"({"format": "something-else", "version": 1})"), ModelError);
  std::string future = text;
  future.replace(future.find("\"version\": 1"), 12, "\"version\": 9");
  EXPECT_THROW(parse_model(future), ModelError);
  EXPECT_THROW(load_model("/nonexistent/model.json"), ModelError);
}

TEST(ModelFile, WeightsCsv) {
  std::stringstream out;
  write_weights_csv(out, case1_model());
  std::string header;
  std::getline(out, header);
  EXPECT_EQ(header, "t,prev,w_1,w_2,w_3,w_4,w_5");
  int rows = 0;
  for (std::string line; std::getline(out, line);)
    ++rows;
  EXPECT_EQ(rows, static_cast<int>(case1_model().weights.size()));
}
