#include "overgrad/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "config_json.hpp"
#include "number_format.hpp"
#include "overgrad/error.hpp"

namespace overgrad {

std::size_t SweepGrid::cell_count() const noexcept {
  if (b0.empty() && eta.empty() && alpha.empty()) return 0;
  const auto axis = [](const std::vector<double>& v) { return v.empty() ? std::size_t{1} : v.size(); };
  return axis(b0) * axis(eta) * axis(alpha);
}

std::string_view to_string(CellStatus status) {
  switch (status) {
    case CellStatus::Ok: return "ok";
    case CellStatus::Invalid: return "invalid";
    case CellStatus::Failed: return "failed";
  }
  return "failed";
}

namespace {

std::vector<double> read_axis(const detail::json& grid, const char* key,
                              std::vector<std::string>& problems) {
  std::vector<double> out;
  if (!grid.contains(key)) return out;
  const auto& arr = grid.at(key);
  if (!arr.is_array()) {
    problems.push_back(std::string("grid.") + key + " must be an array of numbers");
    return out;
  }
  for (const auto& v : arr) {
    if (!v.is_number()) {
      problems.push_back(std::string("grid.") + key + " must contain only numbers");
      return {};
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::string cell_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "cell_%04zu", index);
  return buf;
}

std::string fmt_or_blank(double v) { return std::isfinite(v) ? detail::format_double(v) : ""; }

}  // namespace

SweepConfig sweep_config_from_json(std::string_view text) {
  detail::json root;
  try {
    root = detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw ConfigError({std::string("sweep config is not valid JSON: ") + e.what()});
  }
  std::vector<std::string> problems;
  if (!root.is_object()) throw ConfigError({"sweep config must be an object"});
  for (const auto& [key, value] : root.items()) {
    if (key != "template" && key != "grid") problems.push_back(key + " is not a known field");
  }
  SweepConfig out;
  if (!root.contains("template")) {
    problems.push_back("template is required");
  } else {
    out.base = detail::config_from_object(root.at("template"), problems);
  }
  if (root.contains("grid")) {
    const auto& grid = root.at("grid");
    if (!grid.is_object()) {
      problems.push_back("grid must be an object");
    } else {
      for (const auto& [key, value] : grid.items()) {
        if (key != "b0" && key != "eta" && key != "alpha") {
          problems.push_back("grid." + key + " is not a known axis");
        }
      }
      out.grid.b0 = read_axis(grid, "b0", problems);
      out.grid.eta = read_axis(grid, "eta", problems);
      out.grid.alpha = read_axis(grid, "alpha", problems);
    }
  }
  if (out.grid.cell_count() > kMaxSweepCells) {
    problems.push_back("grid has " + std::to_string(out.grid.cell_count()) + " cells, limit is " +
                       std::to_string(kMaxSweepCells));
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return out;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open sweep config " + path.string()});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return sweep_config_from_json(buffer.str());
}

SweepResult sweep(const ExperimentConfig& base, const SweepGrid& grid,
                  const std::filesystem::path& out_dir) {
  if (grid.cell_count() > kMaxSweepCells) {
    throw InvalidArgument("sweep grid exceeds " + std::to_string(kMaxSweepCells) + " cells");
  }
  std::filesystem::create_directories(out_dir);
  SweepResult result;

  const auto values = [](const std::vector<double>& axis) {
    return axis.empty() ? std::vector<std::optional<double>>{std::nullopt}
                        : std::vector<std::optional<double>>(axis.begin(), axis.end());
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (grid.cell_count() > 0) {
    for (const auto& b0 : values(grid.b0)) {
      for (const auto& eta : values(grid.eta)) {
        for (const auto& alpha : values(grid.alpha)) {
          SweepCell cell;
          cell.index = result.cells.size();
          cell.output_dir = out_dir / cell_name(cell.index);

          ExperimentConfig cfg = base;
          cfg.output_dir = cell.output_dir;
          if (b0) cfg.optimizer.b0 = *b0;
          if (eta) {
            cfg.optimizer.eta = *eta;
            cfg.optimizer.eta_rule = EtaRule::Fixed;
          }
          if (alpha) cfg.optimizer.alpha = *alpha;

          cell.b0 = cfg.optimizer.b0.value_or(nan);
          cell.eta = cfg.optimizer.eta_rule == EtaRule::Fixed ? cfg.optimizer.eta : nan;
          cell.alpha = cfg.optimizer.alpha.value_or(nan);
          cell.final_loss = nan;

          if (auto problems = validate(cfg); !problems.empty()) {
            cell.status = CellStatus::Invalid;
            cell.message = ConfigError(problems).what();
          } else {
            try {
              const RunArtifacts art = run_experiment(cfg);
              const auto& op = art.resolved.optimizer;
              cell.b0 = op.b0.value_or(nan);
              cell.alpha = op.alpha.value_or(nan);
              cell.eta = art.eta;
              cell.converged = art.trace.summary.converged;
              cell.iterations = art.trace.summary.iterations;
              cell.final_loss = art.trace.summary.final_loss;
              cell.t0_observed = art.trace.summary.t0_observed;
            } catch (const std::exception& e) {
              cell.status = CellStatus::Failed;
              cell.message = e.what();
            }
          }
          result.cells.push_back(std::move(cell));
        }
      }
    }
  }

  result.aggregate_csv = out_dir / "aggregate.csv";
  std::ofstream out(result.aggregate_csv, std::ios::binary);
  if (!out) throw FormatError("cannot write " + result.aggregate_csv.string());
  out << "cell,b0,eta,alpha,status,converged,iterations,final_loss,T0_observed\n";
  for (const auto& c : result.cells) {
    out << c.index << ',' << fmt_or_blank(c.b0) << ',' << fmt_or_blank(c.eta) << ','
        << fmt_or_blank(c.alpha) << ',' << to_string(c.status) << ','
        << (c.converged ? 1 : 0) << ',' << c.iterations << ',' << fmt_or_blank(c.final_loss)
        << ',' << (c.t0_observed ? std::to_string(*c.t0_observed) : std::string()) << '\n';
  }
  if (!out) throw FormatError("failed writing " + result.aggregate_csv.string());
  return result;
}

}  // namespace overgrad
