#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overgrad/experiment.hpp"

namespace overgrad {

inline constexpr std::size_t kMaxSweepCells = 10000;

/// Axes left empty keep the template value. A grid with no axes has no cells.
struct SweepGrid {
  std::vector<double> b0;
  std::vector<double> eta;
  std::vector<double> alpha;

  std::size_t cell_count() const noexcept;
};

struct SweepConfig {
  ExperimentConfig base;
  SweepGrid grid;
};

/// {"template": <experiment config>, "grid": {"b0": [...], "eta": [...], "alpha": [...]}}
SweepConfig sweep_config_from_json(std::string_view text);
SweepConfig load_sweep_config(const std::filesystem::path& path);

enum class CellStatus { Ok, Invalid, Failed };

std::string_view to_string(CellStatus status);

struct SweepCell {
  std::size_t index = 0;
  double b0 = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  CellStatus status = CellStatus::Ok;
  bool converged = false;
  std::size_t iterations = 0;
  double final_loss = 0.0;
  std::optional<std::size_t> t0_observed;
  std::string message;
  std::filesystem::path output_dir;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::filesystem::path aggregate_csv;
};

/// One run per grid cell under out_dir/cell_NNNN. Invalid or failing cells are
/// recorded and the sweep continues. Writes out_dir/aggregate.csv last.
SweepResult sweep(const ExperimentConfig& base, const SweepGrid& grid,
                  const std::filesystem::path& out_dir);

}  // namespace overgrad
