#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "../support/temp_dir.hpp"
#include "json.hpp"
#include "overgrad/overgrad.hpp"

namespace overgrad {
namespace {

using testing::slurp;
using testing::TempDir;

ExperimentConfig tiny(const std::filesystem::path& out) {
  ExperimentConfig c = recipe("smoke");
  c.output_dir = out;
  return c;
}

std::vector<std::string> violations_of(const std::string& text) {
  try {
    config_from_json(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

TEST(Config, JsonRoundTrip) {
  for (const auto& name : recipe_names()) {
    const ExperimentConfig c = recipe(name);
    EXPECT_EQ(config_to_json(config_from_json(config_to_json(c))), config_to_json(c)) << name;
  }
}

TEST(Config, MinimalDocument) {
  const auto c = config_from_json(R"({
    "dataset": {"source": "iid", "n": 4, "d": 3, "seed": 2},
    "network": {"m": 10, "seed": 1},
    "optimizer": {"method": "adaptive", "eta": 1, "max_iters": 5}
  })");
  EXPECT_EQ(c.dataset.n, 4u);
  EXPECT_EQ(c.optimizer.method, Method::Adaptive);
  EXPECT_FALSE(c.optimizer.b0.has_value());
  EXPECT_EQ(c.diagnostics.gram_every, 1u);
  EXPECT_TRUE(validate(c).empty());
}

TEST(Config, EnumeratesEveryViolation) {
  const auto v = violations_of(R"({
    "dataset": {"source": "iid", "n": 0, "d": 3, "seed": 2, "colour": "red"},
    "network": {"m": 0, "seed": 1},
    "optimizer": {"method": "sgd", "eta": -1, "max_iters": 5},
    "diagnostics": {"gram_every": 0}
  })");
  const auto has = [&](const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
  };
  EXPECT_TRUE(has("dataset.colour"));
  EXPECT_TRUE(has("dataset.n"));
  EXPECT_TRUE(has("network.m"));
  EXPECT_TRUE(has("optimizer.method"));
  EXPECT_TRUE(has("optimizer.eta"));
  EXPECT_TRUE(has("diagnostics.gram_every"));
}

TEST(Config, RequiredFieldsAndTypes) {
  const auto v = violations_of(R"({"dataset": {"source": "iid", "n": "four", "d": 3}, "optimizer": {}})");
  const auto has = [&](const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
  };
  EXPECT_TRUE(has("dataset.n"));
  EXPECT_TRUE(has("dataset.seed is required"));
  EXPECT_TRUE(has("network is required"));
  EXPECT_TRUE(has("optimizer.method is required"));
  EXPECT_TRUE(has("optimizer.max_iters is required"));
  EXPECT_FALSE(violations_of("not json").empty());
}

TEST(Config, CsvPathMustExist) {
  ExperimentConfig c = recipe("smoke");
  c.dataset.source = DatasetSource::Csv;
  c.dataset.path = "/nonexistent/data.csv";
  const auto v = validate(c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("does not exist"), std::string::npos);
}

TEST(Config, UnknownRecipe) { EXPECT_THROW(recipe("figure2"), InvalidArgument); }

TEST(Config, OutputDirectoryResolution) {
  ExperimentConfig c = recipe("smoke");
  c.output_dir = "explicit";
  EXPECT_EQ(resolve_output_dir(c), "explicit");
  c.output_dir.clear();
  ::setenv("OVERGRAD_OUT", "/tmp/from_env", 1);
  EXPECT_EQ(resolve_output_dir(c), "/tmp/from_env");
  ::unsetenv("OVERGRAD_OUT");
  EXPECT_EQ(resolve_output_dir(c), "overgrad_out");
}

TEST(Recipes, FigureRecipesMatchDocumentedSettings) {
  const auto iid = recipe("figure1_iid");
  EXPECT_EQ(iid.dataset.n, 1000u);
  EXPECT_EQ(iid.dataset.d, 200u);
  EXPECT_EQ(iid.network.m, 5000u);
  EXPECT_EQ(iid.optimizer.method, Method::GradientDescent);
  EXPECT_EQ(iid.optimizer.eta, 5e-4);
  EXPECT_EQ(iid.optimizer.max_iters, 100u);
  EXPECT_EQ(iid.diagnostics.gram_every, 1u);
  const auto cor = recipe("figure1_correlated");
  EXPECT_EQ(cor.dataset.source, DatasetSource::Correlated);
  EXPECT_EQ(cor.optimizer.eta, 5e-5);
}

TEST(RunExperiment, SmokeRecipeWritesArtifacts) {
  TempDir dir("run_smoke");
  const RunArtifacts art = run_experiment(tiny(dir.path()));
  EXPECT_TRUE(std::filesystem::exists(art.trace_csv));
  EXPECT_TRUE(std::filesystem::exists(art.summary_json));
  EXPECT_TRUE(std::filesystem::exists(art.config_echo));
  ASSERT_TRUE(art.plot_script.has_value());
  EXPECT_TRUE(std::filesystem::exists(*art.plot_script));

  const auto summary = nlohmann::json::parse(slurp(art.summary_json));
  for (const char* key : {"converged", "iterations", "final_loss", "T0_observed", "lambda0",
                          "lambda_max_Hinf", "config_echo"}) {
    EXPECT_TRUE(summary.contains(key)) << key;
  }
  EXPECT_EQ(summary["converged"].get<bool>(), art.trace.summary.converged);
  const TrainTrace back = read_trace_csv(art.trace_csv);
  EXPECT_EQ(summary["iterations"].get<std::size_t>(), back.summary.iterations);
  EXPECT_EQ(summary["final_loss"].get<double>(), back.rows.back().loss);

  const ExperimentConfig& r = art.resolved;
  EXPECT_DOUBLE_EQ(*r.optimizer.b0, 1.0);
  EXPECT_DOUBLE_EQ(*r.optimizer.alpha, 1 / std::sqrt(10.0));
}

TEST(RunExperiment, RepeatIsByteIdentical) {
  TempDir a("run_rep_a"), b("run_rep_b");
  run_experiment(tiny(a.path()));
  run_experiment(tiny(b.path()));
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
}

TEST(RunExperiment, EchoedConfigReproducesRun) {
  TempDir a("run_echo_a"), b("run_echo_b");
  const RunArtifacts first = run_experiment(tiny(a.path()));
  ExperimentConfig again = load_config(first.config_echo);
  again.output_dir = b.path();
  const RunArtifacts second = run_experiment(again);
  EXPECT_EQ(slurp(first.trace_csv), slurp(second.trace_csv));
  EXPECT_EQ(config_to_json(second.resolved), config_to_json(again));
}

TEST(RunExperiment, CsvDatasetAndCheckpoint) {
  TempDir dir("run_csv");
  save_csv(gen_iid_gaussian(6, 4, 3), dir / "d.csv");
  ExperimentConfig c = tiny(dir / "out");
  c.dataset.source = DatasetSource::Csv;
  c.dataset.path = dir / "d.csv";
  c.diagnostics.save_network = true;
  c.diagnostics.emit_plots = false;
  const RunArtifacts art = run_experiment(c);
  EXPECT_EQ(art.resolved.dataset.n, 6u);
  EXPECT_FALSE(art.plot_script.has_value());
  ASSERT_TRUE(art.network_checkpoint.has_value());
  EXPECT_EQ(load_network(*art.network_checkpoint).m(), c.network.m);
}

TEST(RunExperiment, EtaRules) {
  TempDir dir("run_eta");
  ExperimentConfig c = tiny(dir.path());
  c.optimizer.method = Method::GradientDescent;
  c.optimizer.eta_rule = EtaRule::HInfinity;
  c.optimizer.max_iters = 3;
  const RunArtifacts art = run_experiment(c);
  EXPECT_DOUBLE_EQ(art.eta, 1.0 / art.lambda_max_hinf);
  EXPECT_EQ(*art.trace.rows[0].eta_eff, art.eta);
}

TEST(RunExperiment, DivergenceIsNotAProcessFailure) {
  TempDir dir("run_div");
  ExperimentConfig c = tiny(dir.path());
  c.optimizer.method = Method::GradientDescent;
  c.optimizer.eta = 1e200;
  c.optimizer.max_iters = 20;
  const RunArtifacts art = run_experiment(c);
  EXPECT_TRUE(art.trace.summary.diverged);
  const auto summary = nlohmann::json::parse(slurp(art.summary_json));
  EXPECT_TRUE(summary["diverged"].get<bool>());
  EXPECT_FALSE(summary["converged"].get<bool>());
}

TEST(RunExperiment, InvalidConfigThrowsBeforeWriting) {
  TempDir dir("run_invalid");
  ExperimentConfig c = tiny(dir / "never");
  c.network.m = 0;
  c.optimizer.alpha = -1.0;
  try {
    run_experiment(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.violations().size(), 2u);
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "never"));
}

TEST(TraceIo, RoundTripAndBlankCells) {
  TempDir dir("trace_io");
  TrainTrace t;
  TraceRow a;
  a.k = 0;
  a.loss = 1.5;
  a.residual_norm = std::sqrt(3.0);
  a.b = 0.1;
  a.eta_eff = 0.3;
  a.lambda_min = 0.01;
  a.lambda_max = 2.0;
  a.max_drift = 0.0;
  a.flip_count = 0;
  a.grad_max_row_norm = 0.25;
  TraceRow b = a;
  b.k = 1;
  b.eta_eff.reset();
  b.lambda_min.reset();
  b.lambda_max.reset();
  b.flip_count = 17;
  t.rows = {a, b};
  write_trace_csv(t, dir / "t.csv");
  const std::string text = slurp(dir / "t.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), kTraceHeader);
  EXPECT_NE(text.find("\n1,1.5,1.7320508075688772,0.1,,,,0,17,0.25\n"), std::string::npos);
  const TrainTrace back = read_trace_csv(dir / "t.csv");
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].residual_norm, a.residual_norm);
  EXPECT_FALSE(back.rows[1].lambda_min.has_value());
  EXPECT_EQ(back.rows[1].flip_count, 17u);
}

TEST(TraceIo, RejectsWrongHeader) {
  TempDir dir("trace_bad");
  std::ofstream(dir / "t.csv") << "k,loss\n0,1\n";
  EXPECT_THROW(read_trace_csv(dir / "t.csv"), FormatError);
}

TEST(Plots, ScriptReferencesDocumentedColumns) {
  TempDir dir("plots");
  const RunArtifacts art = run_experiment(tiny(dir.path()));
  const std::string script = slurp(*art.plot_script);
  for (const char* col : {"\"k\"", "\"lambda_min_Hk\"", "\"lambda_max_Hk\"", "\"loss\""}) {
    EXPECT_NE(script.find(col), std::string::npos) << col;
  }
  for (const char* col : {"\"b_k\"", "\"eta_eff\"", "\"max_drift\"", "\"flip_count\""}) {
    EXPECT_EQ(script.find(col), std::string::npos) << col;
  }
}

TEST(Plots, ScriptSkipsBlankEigenvalueCells) {
  TempDir dir("plots_sparse");
  ExperimentConfig c = tiny(dir.path());
  c.diagnostics.gram_every = 4;
  const RunArtifacts art = run_experiment(c);
  const std::string script = slurp(*art.plot_script);
  EXPECT_NE(script.find("!= \"\""), std::string::npos);
}

TEST(Plots, Errors) {
  TempDir dir("plots_err");
  std::ofstream(dir / "empty.csv") << kTraceHeader << "\n";
  try {
    emit_plots(dir / "empty.csv", dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no rows"), std::string::npos);
  }
  std::ofstream(dir / "cols.csv") << "k,loss\n0,1\n";
  try {
    emit_plots(dir / "cols.csv", dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing columns"), std::string::npos);
  }
}

SweepConfig sweep_from(const std::string& grid) {
  ExperimentConfig base = recipe("smoke");
  base.diagnostics.emit_plots = false;
  return sweep_config_from_json("{\"template\": " + config_to_json(base) + ", \"grid\": " + grid + "}");
}

TEST(Sweep, EmptyGrid) {
  TempDir dir("sweep_empty");
  const SweepResult r = sweep(recipe("smoke"), {}, dir.path());
  EXPECT_TRUE(r.cells.empty());
  EXPECT_EQ(slurp(r.aggregate_csv), "cell,b0,eta,alpha,status,converged,iterations,final_loss,T0_observed\n");
}

TEST(Sweep, InvalidCellIsRecordedAndOthersRun) {
  TempDir dir("sweep_invalid");
  const SweepConfig sc = sweep_from(R"({"eta": [1.0, 0.0, 0.5]})");
  const SweepResult r = sweep(sc.base, sc.grid, dir.path());
  ASSERT_EQ(r.cells.size(), 3u);
  EXPECT_EQ(r.cells[0].status, CellStatus::Ok);
  EXPECT_EQ(r.cells[1].status, CellStatus::Invalid);
  EXPECT_NE(r.cells[1].message.find("optimizer.eta"), std::string::npos);
  EXPECT_EQ(r.cells[2].status, CellStatus::Ok);
  EXPECT_TRUE(std::filesystem::exists(dir / "cell_0002" / "trace.csv"));
  const std::string agg = slurp(r.aggregate_csv);
  EXPECT_NE(agg.find("\n1,,0,"), std::string::npos);
  EXPECT_NE(agg.find(",invalid,"), std::string::npos);
}

TEST(Sweep, CartesianOrder) {
  TempDir dir("sweep_order");
  const SweepConfig sc = sweep_from(R"({"b0": [0.5, 2.0], "alpha": [0.1, 0.2, 0.3]})");
  EXPECT_EQ(sc.grid.cell_count(), 6u);
  const SweepResult r = sweep(sc.base, sc.grid, dir.path());
  ASSERT_EQ(r.cells.size(), 6u);
  EXPECT_EQ(r.cells[1].b0, 0.5);
  EXPECT_EQ(r.cells[1].alpha, 0.2);
  EXPECT_EQ(r.cells[3].b0, 2.0);
  EXPECT_EQ(r.cells[3].alpha, 0.1);
  for (const auto& c : r.cells) EXPECT_EQ(c.eta, 1.0);
}

TEST(Sweep, ConfigErrors) {
  EXPECT_THROW(sweep_from(R"({"gamma": [1]})"), ConfigError);
  EXPECT_THROW(sweep_from(R"({"b0": 1})"), ConfigError);
  EXPECT_THROW(sweep_from(R"({"b0": ["x"]})"), ConfigError);
  EXPECT_THROW(sweep_config_from_json(R"({"grid": {}})"), ConfigError);
  std::vector<double> axis(101, 1.0);
  SweepGrid big{axis, axis, axis};
  EXPECT_GT(big.cell_count(), kMaxSweepCells);
  EXPECT_THROW(sweep(recipe("smoke"), big, "/tmp/never"), InvalidArgument);
}

}  // namespace
}  // namespace overgrad
