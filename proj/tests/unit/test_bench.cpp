#include <gtest/gtest.h>

#include <cmath>

#include "mcnsim/bench.hpp"

using namespace mcnsim;

namespace {

Platform small_platform() { return Platform::uniform({2, 2}, 4, 10.0, 10.0, 1.0, 0.1, 1.0); }

WorkloadSpec spec_of(WorkloadKind k, std::size_t tasks, std::uint64_t seed = 1) {
  WorkloadSpec s = WorkloadSpec::defaults(k);
  s.num_tasks = tasks;
  s.seed = seed;
  return s;
}

ExperimentConfig small_experiment(std::size_t seeds) {
  ExperimentConfig c;
  c.platform = small_platform();
  c.workloads = {{"layered", spec_of(WorkloadKind::kLayeredRandom, 16), std::nullopt}};
  c.strategies = {Strategy::kRandom, Strategy::kGrouped, Strategy::kGreedy, Strategy::kMab};
  for (std::uint64_t s = 0; s < seeds; ++s) c.seeds.push_back(s);
  c.mab.iterations = 20;
  return c;
}

}  // namespace

TEST(Generate, DataParallelHasNoEdges) {
  const TaskGraph g = generate(spec_of(WorkloadKind::kDataParallel, 4), 8);
  EXPECT_EQ(g.num_tasks(), 4u);
  EXPECT_TRUE(g.edges().empty());
}

TEST(Generate, PipelineChains) {
  WorkloadSpec s = WorkloadSpec::defaults(WorkloadKind::kPipeline);
  s.queries = 2;
  const TaskGraph g = generate(s, 8);
  EXPECT_EQ(g.num_tasks(), 10u);
  ASSERT_EQ(g.edges().size(), 8u);
  for (const Edge& e : g.edges()) {
    EXPECT_EQ(e.dst, e.src + 1);
    EXPECT_NE(e.dst % kPipelineStages, 0u);
  }
  EXPECT_EQ(g.entry_tasks(), (std::vector<TaskId>{0, 5}));
}

TEST(Generate, FineGrainedEdgesPointForward) {
  const TaskGraph g = generate(spec_of(WorkloadKind::kFineGrained, 30), 4);
  EXPECT_GT(g.edges().size(), 30u);
  for (const Edge& e : g.edges()) EXPECT_LT(e.src, e.dst);
}

TEST(Generate, LayeredRandomLinksEveryLaterLayerTask) {
  WorkloadSpec s = spec_of(WorkloadKind::kLayeredRandom, 64);
  s.depth = 8;
  const TaskGraph g = generate(s, 4);
  EXPECT_EQ(g.entry_tasks().size(), 8u);
  for (TaskId t = 8; t < 64; ++t) EXPECT_FALSE(g.predecessors(t).empty());
  for (const Edge& e : g.edges()) EXPECT_EQ(e.dst / 8, e.src / 8 + 1);
}

TEST(Generate, GranularityByKind) {
  const Platform p = small_platform();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double fine = granularity(generate(spec_of(WorkloadKind::kFineGrained, 64, seed), p), p);
    EXPECT_LT(fine, 1.0);
    WorkloadSpec dp = spec_of(WorkloadKind::kDataParallel, 64, seed);
    EXPECT_GT(granularity(generate(dp, p), p), 10.0);
  }
}

TEST(Generate, HomogeneousWhenHeterogeneityIsOne) {
  WorkloadSpec s = spec_of(WorkloadKind::kLayeredRandom, 20);
  s.heterogeneity_factor = 1.0;
  const TaskGraph g = generate(s, 5);
  for (TaskId t = 0; t < 20; ++t) {
    for (CoreId k = 1; k < 5; ++k) EXPECT_EQ(g.exec_time(t, k), g.exec_time(t, 0));
  }
}

TEST(Generate, HeterogeneityScalesByCoreSpeed) {
  WorkloadSpec s = spec_of(WorkloadKind::kDataParallel, 10);
  s.heterogeneity_factor = 3.0;
  const auto speeds = core_speeds(s, 6);
  const TaskGraph g = generate(s, 6);
  for (CoreId k = 0; k < 6; ++k) {
    EXPECT_GE(speeds[k], 1.0);
    EXPECT_LE(speeds[k], 3.0);
    EXPECT_NEAR(g.exec_time(3, k) * speeds[k], g.exec_time(3, 0) * speeds[0], 1e-9);
  }
}

TEST(Generate, DeterministicPerSeed) {
  const auto s = spec_of(WorkloadKind::kFineGrained, 25, 9);
  const TaskGraph a = generate(s, 4);
  const TaskGraph b = generate(s, 4);
  EXPECT_EQ(a.edges(), b.edges());
  EXPECT_EQ(a.exec_time_matrix(), b.exec_time_matrix());
  const TaskGraph c = generate(spec_of(WorkloadKind::kFineGrained, 25, 10), 4);
  EXPECT_NE(a.exec_time_matrix(), c.exec_time_matrix());
}

TEST(Generate, InvalidSpec) {
  auto kind_of = [](WorkloadSpec s) {
    try {
      generate(s, 4);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kInvalidInput;
  };
  WorkloadSpec s = spec_of(WorkloadKind::kLayeredRandom, 0);
  EXPECT_EQ(kind_of(s), ErrorKind::kInvalidSpec);
  s = spec_of(WorkloadKind::kLayeredRandom, 8);
  s.exec_time_range = {0.0, 1.0};
  EXPECT_EQ(kind_of(s), ErrorKind::kInvalidSpec);
  s = spec_of(WorkloadKind::kLayeredRandom, 8);
  s.heterogeneity_factor = 0.5;
  EXPECT_EQ(kind_of(s), ErrorKind::kInvalidSpec);
  s = spec_of(WorkloadKind::kLayeredRandom, 8);
  s.depth = 9;
  EXPECT_EQ(kind_of(s), ErrorKind::kInvalidSpec);
  s = spec_of(WorkloadKind::kFineGrained, 8);
  s.edge_probability = 1.5;
  EXPECT_EQ(kind_of(s), ErrorKind::kInvalidSpec);
  EXPECT_THROW(parse_workload_kind("streaming"), Error);
}

TEST(RunExperiment, CrossProductInNestingOrder) {
  const auto rows = run_experiment(small_experiment(10));
  ASSERT_EQ(rows.size(), 40u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].seed, i % 10);
    EXPECT_EQ(rows[i].report.strategy, std::string(to_string(small_experiment(1).strategies[i / 10])));
    EXPECT_EQ(rows[i].report.best_regret.has_value(), rows[i].report.strategy == "mab");
  }
}

TEST(RunExperiment, ParallelMatchesSerial) {
  ExperimentConfig c = small_experiment(6);
  const auto serial = run_experiment(c);
  c.parallel = 4;
  const auto parallel = run_experiment(c);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].report.makespan, parallel[i].report.makespan);
    EXPECT_EQ(serial[i].report.total_energy, parallel[i].report.total_energy);
    EXPECT_EQ(serial[i].report.timings, parallel[i].report.timings);
  }
}

TEST(RunExperiment, FailFastFlushesEarlierRows) {
  ExperimentConfig c = small_experiment(3);
  c.workloads.push_back({"bad", spec_of(WorkloadKind::kLayeredRandom, 8), NodeCoord{9, 9}});
  c.strategies = {Strategy::kRandom, Strategy::kGrouped};
  for (std::size_t parallel : {1u, 3u}) {
    c.parallel = parallel;
    std::vector<ExperimentRow> partial;
    EXPECT_THROW(run_experiment(c, [&](const auto& rows) { partial = rows; }), Error);
    // layered x {random, grouped} x 3 seeds, then bad x random x 3 seeds; the
    // first failing cell is bad x grouped x seed 0.
    ASSERT_EQ(partial.size(), 9u);
    EXPECT_EQ(partial.back().workload, "bad");
  }
}

TEST(RunExperiment, EmptyGridsRejected) {
  ExperimentConfig c = small_experiment(1);
  c.strategies.clear();
  EXPECT_THROW(run_experiment(c), Error);
  c = small_experiment(0);
  EXPECT_THROW(run_experiment(c), Error);
}

TEST(Summarize, MeansAndNormalisedColumns) {
  const auto rows = run_experiment(small_experiment(4));
  const auto summary = summarize(rows);
  ASSERT_EQ(summary.size(), 4u);
  EXPECT_EQ(summary[0].comparison.strategy, "random");
  EXPECT_EQ(summary[0].comparison.ratio.makespan, 1.0);
  double mab_sum = 0.0;
  for (const auto& r : rows) {
    if (r.report.strategy == "mab") mab_sum += r.report.makespan;
  }
  EXPECT_NEAR(summary[3].comparison.value.makespan, mab_sum / 4.0, 1e-9);
  EXPECT_EQ(summary[3].runs, 4u);
  EXPECT_NEAR(summary[3].comparison.ratio.makespan,
              summary[3].comparison.value.makespan / summary[0].comparison.value.makespan, 1e-12);
}

TEST(Summarize, WithoutRandomRatiosAreUndefined) {
  ExperimentConfig c = small_experiment(2);
  c.strategies = {Strategy::kGreedy};
  const auto summary = summarize(run_experiment(c));
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_TRUE(std::isnan(summary[0].comparison.ratio.makespan));
}
