#include <gtest/gtest.h>

#include <set>
#include <thread>

#include "qbench/harness.hpp"
#include "qbench/qubo.hpp"

using namespace qbench;
using namespace std::chrono_literals;

namespace {

struct ToyInstance {
  std::uint64_t index;
  std::uint64_t seed;
};

RunManifest toy_manifest(int instances, std::vector<std::string> solvers) {
  RunManifest m;
  m.master_seed = 7;
  m.num_instances = instances;
  m.budget.time_s = 0.05;
  m.solver_names = std::move(solvers);
  return m;
}

auto toy_generator = [](std::uint64_t index, std::uint64_t seed) { return ToyInstance{index, seed}; };

std::vector<SolverSpec<ToyInstance>> toy_registry() {
  return {
      {"alpha",
       [](const ToyInstance& inst, const Budget&, std::uint64_t seed) {
         return SolveOutcome{static_cast<double>((seed ^ inst.seed) % 1000) / 1000.0,
                             {{"energy_j", 1.5}, {"cost_usd", std::int64_t{2}}}};
       }},
      {"beta",
       [](const ToyInstance& inst, const Budget&, std::uint64_t) {
         return SolveOutcome{0.5, {{"instance", static_cast<std::int64_t>(inst.index)}}};
       }},
  };
}

Meta without_times(Meta m) {
  for (auto it = m.begin(); it != m.end();) {
    it = it->first.find("time") != std::string::npos ? m.erase(it) : std::next(it);
  }
  return m;
}

}  // namespace

TEST(derive_seed, deterministic_and_distinct) {
  const auto v = derive_seed(7, 0, 0);
  EXPECT_EQ(v, derive_seed(7, 0, 0));
  EXPECT_NE(v, derive_seed(7, 0, 1));
  EXPECT_NE(v, derive_seed(7, 1, 0));
  EXPECT_NE(v, derive_seed(8, 0, 0));
  EXPECT_LT(v, std::uint64_t{1} << 63);
}

TEST(derive_seed, no_collisions_on_small_grid) {
  for (std::uint64_t master : {0ULL, 1ULL, 7ULL, 42ULL, 0xffffffffffffffffULL}) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100; ++i) {
      for (std::uint64_t j = 0; j < 100; ++j) {
        const auto s = derive_seed(master, i, j);
        ASSERT_LT(s, std::uint64_t{1} << 63);
        ASSERT_TRUE(seen.insert(s).second) << master << " " << i << " " << j;
      }
      ASSERT_TRUE(seen.insert(instance_seed(master, i)).second);
    }
  }
}

TEST(budget_guard, fresh_guard_not_expired) {
  Budget b;
  b.time_s = 0.05;
  EXPECT_FALSE(budget_guard(b).expired());
}

TEST(budget_guard, expires_after_deadline) {
  Budget b;
  b.time_s = 0.001;
  const auto g = budget_guard(b);
  std::this_thread::sleep_for(10ms);
  EXPECT_TRUE(g.expired());
}

TEST(budget_guard, rejects_nonpositive_budget) {
  Budget b;
  b.time_s = 0.0;
  EXPECT_THROW(budget_guard(b), DomainError);
  EXPECT_THROW(BudgetGuard(-1.0), DomainError);
}

TEST(budget_guard, cooperative_loop_overshoot_is_small) {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto start = MonotonicClock::now();
    BudgetGuard g(0.05);
    volatile double sink = 0.0;
    while (!g.expired()) {
      for (int k = 0; k < 100; ++k) sink = sink + k;
    }
    worst = std::max(worst, seconds_since(start) - 0.05);
  }
  EXPECT_LT(worst, 0.005);
}

TEST(run_benchmark, counting_and_order) {
  const auto reg = toy_registry();
  const auto recs = run_benchmark<ToyInstance>(toy_manifest(3, {"alpha", "beta"}), reg, toy_generator);
  ASSERT_EQ(recs.size(), 6u);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    EXPECT_EQ(recs[k].instance_id, static_cast<std::int64_t>(k / 2));
    EXPECT_EQ(recs[k].solver, k % 2 == 0 ? "alpha" : "beta");
  }
}

TEST(run_benchmark, registry_order_wins_over_manifest_order) {
  const auto reg = toy_registry();
  const auto recs = run_benchmark<ToyInstance>(toy_manifest(1, {"beta", "alpha"}), reg, toy_generator);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].solver, "alpha");
  // Seeds follow the manifest position, not the execution position.
  EXPECT_EQ(std::get<std::int64_t>(recs[0].meta.at("seed")),
            static_cast<std::int64_t>(derive_seed(7, 0, 1)));
}

TEST(run_benchmark, seeds_unaffected_by_adding_a_solver) {
  const auto reg = toy_registry();
  const auto one = run_benchmark<ToyInstance>(toy_manifest(4, {"alpha"}), reg, toy_generator);
  const auto two = run_benchmark<ToyInstance>(toy_manifest(4, {"alpha", "beta"}), reg, toy_generator);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(one[i].quality, two[2 * i].quality);
    EXPECT_EQ(one[i].meta.at("seed"), two[2 * i].meta.at("seed"));
  }
}

TEST(run_benchmark, instance_generated_once_and_shared) {
  int generated = 0;
  std::vector<std::uint64_t> seen_by_solver;
  std::vector<SolverSpec<ToyInstance>> reg = {
      {"a", [&](const ToyInstance& i, const Budget&, std::uint64_t) {
         seen_by_solver.push_back(i.seed);
         return SolveOutcome{1.0, {}};
       }},
      {"b", [&](const ToyInstance& i, const Budget&, std::uint64_t) {
         seen_by_solver.push_back(i.seed);
         return SolveOutcome{1.0, {}};
       }},
  };
  run_benchmark<ToyInstance>(toy_manifest(3, {"a", "b"}), reg, [&](std::uint64_t i, std::uint64_t s) {
    ++generated;
    return ToyInstance{i, s};
  });
  EXPECT_EQ(generated, 3);
  ASSERT_EQ(seen_by_solver.size(), 6u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(seen_by_solver[2 * i], seen_by_solver[2 * i + 1]);
}

TEST(run_benchmark, identical_budget_for_every_call) {
  std::vector<Budget> budgets;
  std::vector<SolverSpec<ToyInstance>> reg = {
      {"a", [&](const ToyInstance&, const Budget& b, std::uint64_t) {
         budgets.push_back(b);
         return SolveOutcome{1.0, {}};
       }},
      {"b", [&](const ToyInstance&, const Budget& b, std::uint64_t) {
         budgets.push_back(b);
         return SolveOutcome{1.0, {}};
       }},
  };
  auto m = toy_manifest(5, {"a", "b"});
  m.budget.cost_usd = 3;
  run_benchmark<ToyInstance>(m, reg, toy_generator);
  ASSERT_EQ(budgets.size(), 10u);
  for (const auto& b : budgets) EXPECT_EQ(b, m.budget);
}

TEST(run_benchmark, declared_energy_and_cost_pass_through) {
  const auto reg = toy_registry();
  const auto recs = run_benchmark<ToyInstance>(toy_manifest(1, {"alpha", "beta"}), reg, toy_generator);
  EXPECT_EQ(recs[0].energy_j, 1.5);
  EXPECT_EQ(recs[0].cost_usd, 2.0);
  EXPECT_EQ(recs[1].energy_j, 0.0);
  EXPECT_EQ(recs[1].cost_usd, 0.0);
}

TEST(run_benchmark, unknown_solver_is_config_error) {
  const auto reg = toy_registry();
  EXPECT_THROW(run_benchmark<ToyInstance>(toy_manifest(1, {"gamma"}), reg, toy_generator),
               ConfigError);
  auto dup = reg;
  dup.push_back(reg[0]);
  EXPECT_THROW(run_benchmark<ToyInstance>(toy_manifest(1, {"alpha"}), dup, toy_generator),
               ConfigError);
}

TEST(run_benchmark, failing_solver_yields_tagged_zero_record) {
  std::vector<SolverSpec<ToyInstance>> reg = {
      {"ok", [](const ToyInstance&, const Budget&, std::uint64_t) { return SolveOutcome{0.9, {}}; }},
      {"bad", [](const ToyInstance& i, const Budget&, std::uint64_t) -> SolveOutcome {
         if (i.index == 1) throw std::runtime_error("diverged");
         return SolveOutcome{0.8, {}};
       }},
      {"wild", [](const ToyInstance&, const Budget&, std::uint64_t) { return SolveOutcome{1.7, {}}; }},
  };
  const auto recs = run_benchmark<ToyInstance>(toy_manifest(3, {"ok", "bad", "wild"}), reg, toy_generator);
  ASSERT_EQ(recs.size(), 9u);
  EXPECT_EQ(recs[4].solver, "bad");
  EXPECT_EQ(recs[4].quality, 0.0);
  EXPECT_EQ(std::get<std::string>(recs[4].meta.at("error")), "diverged");
  EXPECT_EQ(recs[1].quality, 0.8);
  EXPECT_EQ(recs[2].quality, 0.0);
  EXPECT_TRUE(recs[2].meta.count("error"));
}

TEST(run_benchmark, overshoot_is_flagged_not_dropped) {
  std::vector<SolverSpec<ToyInstance>> reg = {
      {"slow", [](const ToyInstance&, const Budget& b, std::uint64_t) {
         std::this_thread::sleep_for(std::chrono::duration<double>(b.time_s * 1.5));
         return SolveOutcome{1.0, {}};
       }},
      {"fast", [](const ToyInstance&, const Budget&, std::uint64_t) { return SolveOutcome{1.0, {}}; }},
  };
  auto m = toy_manifest(2, {"slow", "fast"});
  m.budget.time_s = 0.01;
  const auto recs = run_benchmark<ToyInstance>(m, reg, toy_generator);
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_TRUE(meta_flag(recs[0].meta, "budget_violation"));
  EXPECT_FALSE(meta_flag(recs[1].meta, "budget_violation"));
  EXPECT_GT(recs[0].time_s, 0.01 * 1.1);
}

TEST(run_benchmark, stage_traces_and_calibration_hook) {
  const auto reg = toy_registry();
  std::vector<StageTrace> traces;
  int calls = 0;
  BenchmarkOptions<ToyInstance> opts;
  opts.stage_traces = &traces;
  opts.calibrate = [&](const ToyInstance&, std::span<RunRecord> recs) {
    ++calls;
    EXPECT_EQ(recs.size(), 2u);
    for (auto& r : recs) r.quality = 0.25;
  };
  const auto recs = run_benchmark<ToyInstance>(toy_manifest(3, {"alpha", "beta"}), reg, toy_generator, opts);
  EXPECT_EQ(calls, 3);
  for (const auto& r : recs) EXPECT_EQ(r.quality, 0.25);
  ASSERT_EQ(traces.size(), 3u);
  for (const auto& t : traces) {
    EXPECT_TRUE(t.durations.count("generate"));
    EXPECT_TRUE(t.durations.count("solve:alpha"));
    EXPECT_TRUE(t.durations.count("solve:beta"));
    EXPECT_TRUE(t.durations.count("calibrate"));
  }
}

TEST(run_benchmark, manifest_validation) {
  const auto reg = toy_registry();
  auto m = toy_manifest(0, {"alpha"});
  EXPECT_THROW(run_benchmark<ToyInstance>(m, reg, toy_generator), ConfigError);
  m = toy_manifest(1, {"alpha"});
  m.target_quality = 1.5;
  EXPECT_THROW(run_benchmark<ToyInstance>(m, reg, toy_generator), DomainError);
  m = toy_manifest(1, {"alpha", "alpha"});
  EXPECT_THROW(run_benchmark<ToyInstance>(m, reg, toy_generator), ConfigError);
  m = toy_manifest(1, {"alpha"});
  m.budget.time_s = 0;
  EXPECT_THROW(run_benchmark<ToyInstance>(m, reg, toy_generator), DomainError);
}

TEST(run_benchmark, qubo_rerun_reproducible_in_iteration_mode) {
  auto m = toy_manifest(4, {"sa", "greedy"});
  m.budget.max_iterations = 2000;
  const auto reg = qubo::bundled_solvers();
  const auto gen = [](std::uint64_t, std::uint64_t seed) { return qubo::generate_qubo(16, 0.3, seed); };
  BenchmarkOptions<qubo::QuboInstance> opts;
  opts.calibrate = qubo::make_calibrator(qubo::kPolicySharedBounds);
  const auto a = run_benchmark<qubo::QuboInstance>(m, reg, gen, opts);
  const auto b = run_benchmark<qubo::QuboInstance>(m, reg, gen, opts);
  ASSERT_EQ(a.size(), 8u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].quality, b[k].quality);
    EXPECT_EQ(without_times(a[k].meta), without_times(b[k].meta));
    EXPECT_GE(a[k].quality, 0.0);
    EXPECT_LE(a[k].quality, 1.0);
  }
}
