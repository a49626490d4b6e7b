// overgrad command-line driver.
//
//   overgrad gen-data --config cfg.json --out dir
//   overgrad gram     --recipe smoke --out dir
//   overgrad train    --config cfg.json [--out dir]
//   overgrad sweep    --config sweep.json --out dir
//   overgrad plots    --trace dir/trace.csv --out dir
//
// Exit codes: 0 success, 1 runtime failure, 2 bad config or arguments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "overgrad/overgrad.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string recipe;
  std::string out;
};

void add_common(CLI::App& cmd, Common& c, bool needs_config = true) {
  auto* cfg = cmd.add_option("--config", c.config, "Experiment config (JSON)");
  auto* rec = cmd.add_option("--recipe", c.recipe, "Built-in config instead of --config");
  cfg->excludes(rec);
  if (needs_config) cmd.callback([&c] {
    if (c.config.empty() && c.recipe.empty()) throw CLI::RequiredError("--config or --recipe");
  });
  cmd.add_option("--out", c.out, "Output directory");
}

overgrad::ExperimentConfig resolve(const Common& c) {
  overgrad::ExperimentConfig cfg =
      c.recipe.empty() ? overgrad::load_config(c.config) : overgrad::recipe(c.recipe);
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

void write_json(const json& doc, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << doc.dump(2) << "\n";
  if (!out) throw overgrad::FormatError("failed writing " + path.string());
}

json spectrum_json(const overgrad::SpectralSummary& s) {
  return {{"lambda_min", s.lambda_min},
          {"lambda_max", s.lambda_max},
          {"residual_min", s.residual_min},
          {"residual_max", s.residual_max},
          {"iterations_min", s.iterations_min},
          {"iterations_max", s.iterations_max},
          {"converged", s.converged}};
}

int cmd_gen_data(const Common& c) {
  const auto cfg = resolve(c);
  if (auto problems = overgrad::validate(cfg); !problems.empty()) {
    throw overgrad::ConfigError(std::move(problems));
  }
  const fs::path dir = overgrad::resolve_output_dir(cfg);
  fs::create_directories(dir);
  const auto data = overgrad::make_dataset(cfg.dataset);
  overgrad::save_csv(data, dir / "data.csv");
  std::cout << "wrote " << (dir / "data.csv").string() << " (n=" << data.n() << ", d=" << data.d()
            << ")\n";
  return 0;
}

int cmd_gram(const Common& c) {
  const auto cfg = resolve(c);
  if (auto problems = overgrad::validate(cfg); !problems.empty()) {
    throw overgrad::ConfigError(std::move(problems));
  }
  const fs::path dir = overgrad::resolve_output_dir(cfg);
  fs::create_directories(dir);

  overgrad::EigenOptions eigen;
  eigen.tol = cfg.diagnostics.eig_tol;
  eigen.max_iterations = cfg.diagnostics.eig_max_iters;
  eigen.seed = cfg.run_seed;

  const auto data = overgrad::make_dataset(cfg.dataset);
  const auto net0 = overgrad::init_network(cfg.network.m, data.d(), cfg.network.seed);
  const auto hinf = overgrad::h_infinity(data);
  const auto h0 = overgrad::h_empirical(data, net0);
  const auto s_inf = overgrad::extreme_eigenvalues(hinf, eigen);
  const auto s_0 = overgrad::extreme_eigenvalues(h0, eigen);

  overgrad::save_gram_csv(hinf, dir / "h_inf.csv");
  overgrad::save_gram_binary(hinf, dir / "h_inf.bin");
  overgrad::save_gram_csv(h0, dir / "h_0.csv");
  overgrad::save_gram_binary(h0, dir / "h_0.bin");
  write_json({{"n", data.n()}, {"m", cfg.network.m}, {"h_inf", spectrum_json(s_inf)},
              {"h_0", spectrum_json(s_0)}},
             dir / "gram.json");

  std::cout << "H_inf: lambda_min=" << s_inf.lambda_min << " lambda_max=" << s_inf.lambda_max
            << "\nH(0):  lambda_min=" << s_0.lambda_min << " lambda_max=" << s_0.lambda_max << "\n";
  return 0;
}

int cmd_train(const Common& c) {
  const auto art = overgrad::run_experiment(resolve(c));
  const auto& s = art.trace.summary;
  std::cout << "iterations=" << s.iterations << " final_loss=" << s.final_loss
            << " converged=" << (s.converged ? "true" : "false")
            << (s.diverged ? " diverged=true" : "") << "\n"
            << "wrote " << art.output_dir.string() << "\n";
  return 0;
}

int cmd_sweep(const Common& c) {
  const auto sc = overgrad::load_sweep_config(c.config);
  fs::path dir = c.out;
  if (dir.empty()) dir = overgrad::resolve_output_dir(sc.base);
  const auto result = overgrad::sweep(sc.base, sc.grid, dir);
  std::size_t ok = 0;
  for (const auto& cell : result.cells) {
    if (cell.status == overgrad::CellStatus::Ok) ++ok;
    if (!cell.message.empty()) {
      std::cerr << "cell " << cell.index << " " << overgrad::to_string(cell.status) << ": "
                << cell.message << "\n";
    }
  }
  std::cout << ok << "/" << result.cells.size() << " cells completed\n"
            << "wrote " << result.aggregate_csv.string() << "\n";
  return 0;
}

int cmd_plots(const Common& c, const std::string& trace) {
  fs::path csv = trace;
  fs::path dir = c.out;
  if (csv.empty()) {
    if (c.config.empty() && c.recipe.empty()) {
      throw CLI::RequiredError("--trace or --config");
    }
    const fs::path run_dir = overgrad::resolve_output_dir(resolve(Common{c.config, c.recipe, ""}));
    csv = run_dir / "trace.csv";
  }
  if (dir.empty()) dir = csv.parent_path().empty() ? fs::path(".") : csv.parent_path();
  fs::create_directories(dir);
  std::cout << "wrote " << overgrad::emit_plots(csv, dir).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-step training of over-parameterized two-layer ReLU networks"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  Common gen, gram, train, sweep, plots;
  std::string trace;

  add_common(*app.add_subcommand("gen-data", "Generate a dataset CSV"), gen);
  add_common(*app.add_subcommand("gram", "Compute H_inf and H(0) with their extreme eigenvalues"),
             gram);
  add_common(*app.add_subcommand("train", "Run one experiment"), train);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a grid of experiments");
  sweep_cmd->add_option("--config", sweep.config, "Sweep config (JSON)")->required();
  sweep_cmd->add_option("--out", sweep.out, "Output directory");
  auto* plots_cmd = app.add_subcommand("plots", "Emit a plotting script for a trace");
  add_common(*plots_cmd, plots, false);
  plots_cmd->add_option("--trace", trace, "Trace CSV");
  app.add_subcommand("recipes", "List built-in recipes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (threads > 0) overgrad::set_thread_count(threads);

  try {
    if (app.got_subcommand("gen-data")) return cmd_gen_data(gen);
    if (app.got_subcommand("gram")) return cmd_gram(gram);
    if (app.got_subcommand("train")) return cmd_train(train);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep);
    if (app.got_subcommand("plots")) return cmd_plots(plots, trace);
    for (const auto& name : overgrad::recipe_names()) std::cout << name << "\n";
    return 0;
  } catch (const overgrad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
