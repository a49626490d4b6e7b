#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overgrad/dataset.hpp"
#include "overgrad/network.hpp"
#include "overgrad/train.hpp"

namespace overgrad {

enum class DatasetSource { Iid, Correlated, Csv };

struct DatasetSpec {
  DatasetSource source = DatasetSource::Iid;
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  double rho = 0.0;
  LabelMode label_mode = LabelMode::Uniform;
  std::filesystem::path path;
  bool normalize = false;
};

struct NetworkSpec {
  std::size_t m = 0;
  std::uint64_t seed = 0;
};

/// Where gradient descent's step comes from.
///  Fixed      eta as given
///  HInfinity  c_eta / lambda_max(H_inf)
///  HInitial   c_eta / lambda_max(H(0))
enum class EtaRule { Fixed, HInfinity, HInitial };

struct OptimizerSpec {
  Method method = Method::Adaptive;
  BUpdate variant = BUpdate::AdaLoss;
  EtaRule eta_rule = EtaRule::Fixed;
  double eta = 1.0;
  double c_eta = 1.0;
  /// Unset values resolve to b0 = eta, alpha = 1/sqrt(n), epsilon = 1/sqrt(n).
  std::optional<double> b0;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::size_t max_iters = 1000;
};

struct DiagnosticsSpec {
  std::size_t gram_every = 1;
  std::size_t drift_every = 1;
  std::size_t flip_every = 1;
  double eig_tol = 1e-8;
  std::size_t eig_max_iters = 50000;
  std::optional<double> t0_threshold;
  bool emit_plots = true;
  bool save_network = false;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  NetworkSpec network;
  OptimizerSpec optimizer;
  DiagnosticsSpec diagnostics;
  /// Empty means $OVERGRAD_OUT, or ./overgrad_out when that is unset too.
  std::filesystem::path output_dir;
  /// Seeds the eigen-solver start vectors.
  std::uint64_t run_seed = 0;
};

/// Parses the JSON config document. Throws ConfigError listing every problem.
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

/// One message per violated field. Paths are checked for existence.
std::vector<std::string> validate(const ExperimentConfig& config);

/// Built-in configurations: "figure1_iid", "figure1_correlated", "smoke".
ExperimentConfig recipe(std::string_view name);
std::vector<std::string> recipe_names();

std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

Dataset make_dataset(const DatasetSpec& spec);

struct RunArtifacts {
  std::filesystem::path output_dir;
  std::filesystem::path trace_csv;
  std::filesystem::path summary_json;
  std::filesystem::path config_echo;
  std::optional<std::filesystem::path> plot_script;
  std::optional<std::filesystem::path> network_checkpoint;
  /// Config with defaults filled in; rerunning it reproduces the run.
  ExperimentConfig resolved;
  TrainTrace trace;
  /// Step size after applying the eta rule.
  double eta = 0.0;
  double lambda0 = 0.0;
  double lambda_max_hinf = 0.0;
};

/// generate -> init -> train -> diagnose, writing trace.csv, summary.json and
/// config.json (plus plots.py and network.bin when enabled) to the output dir.
RunArtifacts run_experiment(const ExperimentConfig& config);

}  // namespace overgrad
