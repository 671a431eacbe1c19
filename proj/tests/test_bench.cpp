#include "hippa/bench.hpp"
#include "hippa/parallel.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace hippa;
using nlohmann::json;
using oracle::v1;
using oracle::v2;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("hippa_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config() {
  return config_from_json(json::parse(R"({
    "name": "small", "objective": "ncr1", "budget": 3000, "seed": 5,
    "inits": [[-1, 1], [2, 2]], "random_inits": 1,
    "p": 2, "gamma": 5, "eps": 1e-8, "n_starts": 3,
    "solvers": [{"solver": "hippa"}, {"solver": "nm"}, {"solver": "sg-dss", "alpha": 0.5}, {"solver": "sg-gss"}]
  })"));
}

}  // namespace

TEST(RelativeError, Examples) {
  const Objective f1 = make_ncr1();
  EXPECT_EQ(relative_error(v2(1, 1), f1), 0.0);
  EXPECT_NEAR(relative_error(v2(1 + 1e-6, 1), f1), 1e-6 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(relative_error(v2(0, -1), make_ncr2()), std::sqrt(5.0) / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(relative_error(v2(0, -1), make_ncr2()), 1.581, 1e-3);
  EXPECT_EQ(relative_error(v1(3), make_abs_shift()), 0.5);
  EXPECT_THROW(relative_error(v1(0), make_negexp()), std::invalid_argument);
  EXPECT_THROW(relative_error(v1(0), f1), std::invalid_argument);
}

TEST(Config, FlatKeysDescribeOneSolver) {
  const ExperimentConfig c = config_from_json(
      json::parse(R"({"objective":"ncr2","solver":"hippa","p":1.25,"gamma":9.1,"eps":1e-6,"budget":100,"seed":3,"inits":[[0,0]]})"));
  ASSERT_EQ(c.solvers.size(), 1u);
  EXPECT_EQ(c.objective, "ncr2");
  EXPECT_EQ(c.solvers[0].p, 1.25);
  EXPECT_EQ(c.solvers[0].gamma, 9.1);
  EXPECT_EQ(c.eval_budget, 100);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, SolverEntriesInheritTopLevelValues) {
  const ExperimentConfig c = small_config();
  ASSERT_EQ(c.solvers.size(), 4u);
  EXPECT_EQ(c.solvers[0].gamma, 5.0);
  EXPECT_EQ(c.solvers[0].n_starts, 3);
  EXPECT_EQ(c.solvers[2].alpha, 0.5);
  EXPECT_EQ(c.solvers[3].id, "sg-gss");
}

TEST(Config, Errors) {
  EXPECT_THROW(config_from_json(json::parse(R"({"objectiv":"ncr1"})")), std::invalid_argument);
  EXPECT_THROW(config_from_json(json::parse(R"({"solvers":[{"budget":3}]})")), std::invalid_argument);
  EXPECT_THROW(config_from_json(json::parse(R"({"p":"two"})")), std::invalid_argument);
  EXPECT_THROW(config_from_json(json::parse(R"({"budget_mode":"cpu"})")), std::invalid_argument);
  EXPECT_THROW(config_from_json(json::parse("[1,2]")), std::invalid_argument);
  EXPECT_THROW(config_from_json(json::parse(R"({"objective":"nope","random_inits":1})")).validate(),
               std::invalid_argument);
  EXPECT_THROW(config_from_json(json::parse(R"({"solver":"pbm","random_inits":1})")).validate(),
               std::invalid_argument);
  EXPECT_THROW(config_from_json(json::parse(R"({"objective":"ncr1","inits":[[1]]})")).validate(),
               std::invalid_argument);
  EXPECT_THROW(config_from_json(json::parse(R"({"objective":"ncr1"})")).validate(), std::invalid_argument);
  EXPECT_THROW(load_config("/nonexistent/config.json"), std::runtime_error);
}

TEST(Config, JsonRoundTrip) {
  const ExperimentConfig c = small_config();
  const json j = to_json(c);
  EXPECT_EQ(to_json(config_from_json(j)), j);
  for (const auto& name : preset_names()) EXPECT_EQ(to_json(config_from_json(to_json(preset(name)))), to_json(preset(name)));
}

TEST(Config, SeedDeterminesRandomInits) {
  ExperimentConfig c;
  c.random_inits = 50;
  c.seed = 9;
  const auto a = c.initial_points(), b = c.initial_points();
  ASSERT_EQ(a.size(), 50u);
  EXPECT_EQ(a, b);
  for (const auto& x : a) {
    EXPECT_EQ(x.size(), 2);
    EXPECT_GE(x.minCoeff(), -4.0);
    EXPECT_LT(x.maxCoeff(), 4.0);
  }
  c.seed = 10;
  EXPECT_NE(c.initial_points(), a);
}

TEST(Experiment, RecordsAreOrderedAndBudgeted) {
  const ExperimentConfig c = small_config();
  const Report r = run_experiment(c);
  ASSERT_EQ(r.runs.size(), 12u);
  const Objective phi = make_ncr1();
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const RunRecord& rec = r.runs[i];
    EXPECT_EQ(rec.solver_index, static_cast<int>(i / 3));
    EXPECT_EQ(rec.init_index, static_cast<int>(i % 3));
    EXPECT_LE(rec.evals, 3000);
    EXPECT_TRUE(rec.flags.at("budget_respected"));
    ASSERT_TRUE(rec.rel_error);
    EXPECT_EQ(*rec.rel_error, relative_error(rec.x_final, phi));
    EXPECT_EQ(rec.f_final, phi(rec.x_final));
    EXPECT_FALSE(rec.elapsed);
    EXPECT_EQ(rec.trace.size(), static_cast<std::size_t>(rec.iterations + 1));
  }
  EXPECT_TRUE(r.runs[0].flags.at("monotone"));
  EXPECT_TRUE(r.runs[0].flags.at("summable"));
  EXPECT_TRUE(r.runs[0].iteration_bound.has_value());
}

TEST(Experiment, WallClockModeRecordsElapsed) {
  ExperimentConfig c = config_from_json(
      json::parse(R"({"objective":"ncr1","solver":"sg-dss","budget_mode":"wallclock","wallclock":0.01,"inits":[[0,0]]})"));
  const Report r = run_experiment(c);
  ASSERT_TRUE(r.runs[0].elapsed);
  EXPECT_GE(*r.runs[0].elapsed, 0.0);
  EXPECT_LT(*r.runs[0].elapsed, 1.0);
  EXPECT_EQ(r.runs[0].flags.count("budget_respected"), 0u);
}

TEST(Experiment, UnboundedEnvelopeIsReported) {
  const Report r = run_experiment(config_from_json(
      json::parse(R"({"objective":"negexp","solver":"hippa","inits":[[0.5]],"budget":20000})")));
  EXPECT_EQ(r.runs[0].status, "unbounded");
  EXPECT_FALSE(r.runs[0].rel_error);
  EXPECT_FALSE(r.pass());
}

TEST(Experiment, DeterministicAcrossWorkerCounts) {
  const ExperimentConfig c = small_config();
  ::setenv("HIPPA_WORKERS", "1", 1);
  const std::string one = to_json(run_experiment(c)).dump();
  ::setenv("HIPPA_WORKERS", "3", 1);
  const std::string three = to_json(run_experiment(c)).dump();
  ::unsetenv("HIPPA_WORKERS");
  EXPECT_EQ(one, three);
}

TEST(Report, WriteReadRoundTrip) {
  const fs::path d = fresh_dir("roundtrip");
  Report r = run_experiment(small_config());
  write_report(r, d / "rep.json");
  EXPECT_TRUE(fs::exists(d / "rep.traces"));
  const Report back = read_report(d / "rep.json");
  EXPECT_EQ(to_json(back), to_json(r));
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    ASSERT_EQ(back.runs[i].trace.size(), r.runs[i].trace.size());
    EXPECT_EQ(back.runs[i].trace.iterates, r.runs[i].trace.iterates);
    EXPECT_EQ(back.runs[i].trace.eval_counts, r.runs[i].trace.eval_counts);
    EXPECT_TRUE(back.runs[i].trace.consistent());
    EXPECT_EQ(*back.runs[i].rel_error, relative_error(back.runs[i].x_final, make_ncr1()));
  }
  fs::remove_all(d);
}

TEST(Report, RejectsUnknownSchemaVersion) {
  const fs::path d = fresh_dir("schema");
  Report r = run_experiment(small_config());
  json j = to_json(r);
  j["schema_version"] = 99;
  std::ofstream(d / "bad.json") << j.dump();
  EXPECT_THROW(read_report(d / "bad.json"), std::runtime_error);
  j.erase("schema_version");
  EXPECT_THROW(report_from_json(j), std::runtime_error);
  fs::remove_all(d);
}

TEST(Report, UnwritablePathThrows) {
  Report r = run_experiment(small_config());
  EXPECT_THROW(write_report(r, "/proc/hippa_no_such_dir/rep.json"), std::runtime_error);
}

TEST(Export, EmptyReportGivesHeaderOnlyFiles) {
  const fs::path d = fresh_dir("empty");
  Report r;
  for (auto fmt : {TraceFormat::csv, TraceFormat::records}) {
    const auto files = export_traces(r, fmt, d / to_string(fmt));
    ASSERT_EQ(files.size(), 1u);
    const auto [cols, rows] = read_trace_file(files[0]);
    EXPECT_EQ(cols, trace_columns(2));
    EXPECT_TRUE(rows.empty());
  }
  EXPECT_EQ(slurp(d / "csv" / "traces.csv"), "k,x0,x1,f,env,step,relerr,evals\n");
  fs::remove_all(d);
}

TEST(Export, OneRunRowCountAndExactRoundTrip) {
  const fs::path d = fresh_dir("onerun");
  const Report r = run_experiment(config_from_json(
      json::parse(R"({"objective":"ncr1","solver":"hippa","gamma":50,"eps":1e-6,"inits":[[-1,1]],"budget":20000})")));
  const RunRecord& run = r.runs[0];
  const Objective phi = make_ncr1();
  for (auto fmt : {TraceFormat::csv, TraceFormat::records}) {
    const auto files = export_traces(r, fmt, d / to_string(fmt));
    ASSERT_EQ(files.size(), 1u);
    const auto [cols, rows] = read_trace_file(files[0]);
    ASSERT_EQ(rows.size(), static_cast<std::size_t>(run.iterations + 1));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Vector x = v2(rows[k][1], rows[k][2]);
      EXPECT_EQ(x, run.trace.iterates[k]);
      EXPECT_EQ(rows[k][3], run.trace.f_values[k]);
      EXPECT_EQ(rows[k][6], relative_error(x, phi));
      EXPECT_EQ(rows[k][6], relative_error(run.trace.iterates[k], phi));
    }
    EXPECT_TRUE(std::isnan(rows[0][5]));
    EXPECT_EQ(rows.back()[6], *run.rel_error);
    const std::string first = slurp(files[0]);
    export_traces(r, fmt, d / to_string(fmt));
    EXPECT_EQ(slurp(files[0]), first);
  }
  fs::remove_all(d);
}

TEST(Export, FormatNames) {
  EXPECT_EQ(parse_trace_format("csv"), TraceFormat::csv);
  EXPECT_EQ(parse_trace_format("records"), TraceFormat::records);
  EXPECT_THROW(parse_trace_format("xml"), std::invalid_argument);
}

TEST(Presets, AreValidAndNamed) {
  for (const auto& name : preset_names()) {
    const ExperimentConfig c = preset(name);
    EXPECT_EQ(c.name, name);
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.budget_mode, BudgetMode::evals);
    EXPECT_EQ(c.eval_budget, 50000);
  }
  EXPECT_EQ(preset("table1").initial_points().size(), 5u);
  EXPECT_EQ(preset("fig4").solvers.size(), 6u);
  EXPECT_THROW(preset("fig7"), std::invalid_argument);
}

TEST(Presets, ChecksFailOnFabricatedRegressions) {
  Report r;
  r.config = preset("trap");
  RunRecord h, g;
  h.solver = "hippa";
  h.x_final = v2(0, -1);
  g.solver = "sg-gss";
  g.solver_index = 1;
  g.x_final = v2(1, 1);
  r.runs = {h, g};
  apply_preset_checks(r);
  EXPECT_FALSE(r.flags.at("hippa_within_1e-3_of_minimizer"));
  EXPECT_FALSE(r.flags.at("sg_gss_within_0.05_of_trap"));
  EXPECT_FALSE(r.pass());

  Report t;
  t.config = preset("table1");
  for (int i = 0; i < 5; ++i) {
    for (const char* s : {"nm", "hippa", "sg-dss"}) {
      RunRecord rec;
      rec.solver = s;
      rec.init_index = i;
      rec.rel_error = std::string(s) == "nm" ? 1e-9 : (std::string(s) == "hippa" ? 1e-8 : 0.3);
      t.runs.push_back(rec);
    }
  }
  apply_preset_checks(t);
  EXPECT_TRUE(t.flags.at("hippa_relerr_le_1e-6"));
  EXPECT_FALSE(t.flags.at("hippa_smallest_per_row"));
}

TEST(ProbeJson, Fields) {
  ProbeReport p;
  p.claim = "demo";
  p.samples = 3;
  p.margin.add(0.5);
  p.add_violation({"a", {1.0, 2.0}, 3.0, 4.0});
  const json j = to_json(p);
  EXPECT_EQ(j.at("claim"), "demo");
  EXPECT_EQ(j.at("violation_count"), 1);
  EXPECT_EQ(j.at("pass"), false);
  EXPECT_EQ(j.at("violations")[0].at("point"), json::array({1.0, 2.0}));
  EXPECT_EQ(j.at("margin").at("min"), 0.5);
}

TEST(Workers, EnvironmentVariable) {
  ::setenv("HIPPA_WORKERS", "3", 1);
  EXPECT_EQ(worker_count(), 3);
  ::setenv("HIPPA_WORKERS", "zero", 1);
  EXPECT_THROW(worker_count(), std::invalid_argument);
  ::setenv("HIPPA_WORKERS", "0", 1);
  EXPECT_THROW(worker_count(), std::invalid_argument);
  ::unsetenv("HIPPA_WORKERS");
  EXPECT_GE(worker_count(), 1);
}

TEST(Workers, ParallelForVisitsEveryIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 4);
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(
                   100, [](std::size_t i) { if (i == 57) throw std::runtime_error("boom"); }, 4),
               std::runtime_error);
}
