#pragma once

#include <filesystem>
#include <string_view>

#include "overgrad/train.hpp"

namespace overgrad {

inline constexpr int kTraceSchemaVersion = 1;

/// Exact column order of the trace CSV.
inline constexpr std::string_view kTraceHeader =
    "k,loss,residual_norm,b_k,eta_eff,lambda_min_Hk,lambda_max_Hk,max_drift,flip_count,"
    "grad_max_row_norm";

/// Unsampled diagnostics are written as blank cells.
void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path);

/// Reads rows back. Only summary.iterations and summary.final_loss are
/// restored, since both follow from the rows.
TrainTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace overgrad
