#pragma once

#include <filesystem>

namespace overgrad {

/// Writes out_dir/plots.py, a matplotlib script that draws lambda_min/lambda_max
/// of H(k) and log-loss against iteration from the given trace CSV. Nothing is
/// rendered here. Throws FormatError when required columns are missing or the
/// trace has no rows.
std::filesystem::path emit_plots(const std::filesystem::path& trace_csv,
                                 const std::filesystem::path& out_dir);

}  // namespace overgrad
