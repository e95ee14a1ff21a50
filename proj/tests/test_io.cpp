#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "qbench/io.hpp"

using namespace qbench;
using json = nlohmann::json;

TEST(sha256, known_vectors) {
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(canonical_hash, independent_of_key_order) {
  const json a = json::parse(R"({"b": 1, "a": {"y": [1,2], "x": "s"}})");
  const json b = json::parse(R"({"a": {"x": "s", "y": [1,2]}, "b": 1})");
  EXPECT_EQ(io::canonical_hash(a), io::canonical_hash(b));
  const json c = json::parse(R"({"a": {"x": "s", "y": [2,1]}, "b": 1})");
  EXPECT_NE(io::canonical_hash(a), io::canonical_hash(c));
}

TEST(real, infinities_round_trip) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(io::real(inf), "+inf");
  EXPECT_EQ(io::real(-inf), "-inf");
  EXPECT_TRUE(io::real(std::nan("")).is_null());
  EXPECT_EQ(io::read_real(io::real(inf), "v"), inf);
  EXPECT_EQ(io::read_real(io::real(-inf), "v"), -inf);
  EXPECT_EQ(io::read_real(io::real(2.5), "v"), 2.5);
}

TEST(manifest, hash_ignores_source_key_order) {
  const auto a = io::manifest_from_json(json::parse(
      R"({"num_instances": 3, "budget": {"time_s": 0.1}, "solvers": ["sa"],
          "instance_generator": {"id": "qubo", "params": {"n": 8, "density": 0.5}}})"));
  const auto b = io::manifest_from_json(json::parse(
      R"({"instance_generator": {"params": {"density": 0.5, "n": 8}, "id": "qubo"},
          "solvers": ["sa"], "budget": {"time_s": 0.1}, "num_instances": 3})"));
  EXPECT_EQ(a.config_hash, b.config_hash);
  EXPECT_EQ(a.config_hash.size(), 64u);
  EXPECT_EQ(a.master_seed, 7u);
  auto c = a;
  c.master_seed = 8;
  EXPECT_NE(io::manifest_hash(c), a.config_hash);
}

TEST(manifest, round_trip_preserves_hash) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 200; ++c) {
    RunManifest m;
    m.master_seed = rng() >> 1;
    m.num_instances = 1 + static_cast<int>(rng() % 50);
    m.budget.time_s = 0.01 + u(rng);
    if (c % 2) m.budget.max_iterations = rng() % 1000;
    m.target_quality = u(rng);
    m.solver_names = {"sa", "greedy"};
    m.instance_generator_params = {{"n", 10}, {"density", u(rng)}};
    m.bootstrap.alpha = 0.01 + 0.5 * u(rng);
    m.sweep_taus = {u(rng), u(rng)};
    const auto back = io::manifest_from_json(json::parse(io::to_json(m).dump()));
    ASSERT_EQ(io::manifest_hash(back), io::manifest_hash(m));
    ASSERT_EQ(back.budget, m.budget);
    ASSERT_EQ(back.sweep_taus, m.sweep_taus);
  }
}

TEST(manifest, validation_errors_name_the_field) {
  try {
    io::manifest_from_json(json::parse(R"({"budget": {"time_s": 1}, "solvers": ["sa"],
                                           "instance_generator": {"id": "qubo"}})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("num_instances"), std::string::npos);
  }
  EXPECT_ANY_THROW(io::manifest_from_json(json::parse(
      R"({"num_instances": 1, "budget": {"time_s": -1}, "solvers": ["sa"],
          "instance_generator": {"id": "qubo"}})")));
}

TEST(records, round_trip) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RunRecord> rs;
  for (int i = 0; i < 100; ++i) {
    RunRecord r;
    r.solver = i % 2 ? "sa" : "greedy";
    r.instance_id = i / 2;
    r.quality = u(rng);
    r.time_s = u(rng);
    r.energy_j = u(rng);
    r.meta = {{"flag", i % 3 == 0}, {"count", std::int64_t{i}}, {"x", u(rng)}, {"s", std::string("v")}};
    rs.push_back(r);
  }
  const auto back = io::records_from_ndjson(io::records_to_ndjson(rs));
  ASSERT_EQ(back.size(), rs.size());
  for (std::size_t k = 0; k < rs.size(); ++k) EXPECT_EQ(back[k], rs[k]);
}

TEST(records, bad_line_reports_line_number) {
  const std::string text = "{\"solver\":\"a\",\"instance_id\":0,\"quality\":0.5,\"time_s\":1}\n{oops\n";
  try {
    io::records_from_ndjson(text);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(io::records_from_ndjson(
                   "{\"solver\":\"a\",\"instance_id\":0,\"quality\":1.5,\"time_s\":1}\n"),
               DomainError);
}

TEST(instances, round_trip_and_import_validation) {
  const auto q = qubo::generate_qubo(9, 0.4, 77);
  const auto back = io::instance_from_json(json::parse(io::to_json(q).dump()));
  EXPECT_EQ(back.values, q.values);
  auto j = io::to_json(q);
  j["values"][1] = 5.0;  // breaks symmetry
  EXPECT_ANY_THROW(io::instance_from_json(j));
  j = io::to_json(q);
  j["values"].erase(0);
  EXPECT_ANY_THROW(io::instance_from_json(j));
  j = io::to_json(q);
  j["values"][0] = 1.0;  // nonzero diagonal
  EXPECT_ANY_THROW(io::instance_from_json(j));
}

TEST(traces, milliseconds_on_disk) {
  const auto ts = io::traces_from_ndjson(R"({"run_id": "r", "stages_ms": {"a": 20, "b": 5}})");
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_DOUBLE_EQ(ts[0].durations.at("a"), 0.020);
  const auto back = io::traces_from_ndjson(io::traces_to_ndjson(ts));
  EXPECT_DOUBLE_EQ(back[0].durations.at("b"), 0.005);
  EXPECT_THROW(io::traces_from_ndjson(R"({"run_id": "r", "stages_ms": {"a": -1}})"), DomainError);
}

TEST(drift, array_or_object) {
  EXPECT_EQ(io::drift_samples_from_json(json::parse("[1, 2.5]")), (std::vector<double>{1, 2.5}));
  EXPECT_EQ(io::drift_samples_from_json(json::parse(R"({"drift_ppm": [3]})")),
            (std::vector<double>{3}));
  EXPECT_THROW(io::drift_samples_from_json(json::parse(R"({"x": 1})")), ConfigError);
}

TEST(documents, round_trip) {
  AuditReport r;
  r.mean_shares = {{"a", 0.25}, {"b", 0.75}};
  r.bottlenecks = {{"b", 0.75}};
  r.drift_mean_ppm = 3.0;
  r.drift_p95_ppm = 4.5;
  r.replicate_count = 4;
  r.skipped_runs = 1;
  EXPECT_EQ(io::audit_report_from_json(json::parse(io::to_json(r).dump())), r);

  SpeedupOutcome s;
  s.tau = 0.7;
  const auto s_back = io::speedup_from_json(json::parse(io::to_json(s).dump()));
  EXPECT_FALSE(s_back.reachable());
  s.value = 1.2;
  s.numerator_time = 12;
  s.denominator_time = 10;
  EXPECT_EQ(*io::speedup_from_json(io::to_json(s)).value, 1.2);

  ConfidenceInterval ci;
  ci.lower = 1.0;
  ci.upper = std::numeric_limits<double>::infinity();
  ci.n_boot = 10;
  ci.n_unreachable_resamples = 3;
  const auto ci_back = io::ci_from_json(json::parse(io::to_json(ci).dump()));
  EXPECT_EQ(ci_back.upper, ci.upper);
  EXPECT_EQ(ci_back.n_unreachable_resamples, 3);

  const Rubric rubric = default_rubric();
  const auto rb = io::rubric_from_json(io::to_json(rubric));
  EXPECT_EQ(io::canonical_hash(io::to_json(rb)), io::canonical_hash(io::to_json(rubric)));
}

TEST(write_atomic, replaces_whole_file) {
  const auto dir = std::filesystem::temp_directory_path() / "qbench_io_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / "x.json";
  io::write_json(p, json{{"a", 1}});
  io::write_json(p, json{{"b", 2}});
  EXPECT_EQ(io::read_json(p), (json{{"b", 2}}));
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    EXPECT_EQ(e.path().filename(), "x.json");
  }
  std::filesystem::remove_all(dir);
}
