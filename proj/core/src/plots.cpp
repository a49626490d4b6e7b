#include "overgrad/plots.hpp"

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "overgrad/error.hpp"

namespace overgrad {
namespace {

constexpr const char* kScript = R"PY(#!/usr/bin/env python3
"""Plot Gram-matrix extreme eigenvalues and training loss from an overgrad trace.

Usage: python3 plots.py [trace.csv]
"""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
TRACE = sys.argv[1] if len(sys.argv) > 1 else @TRACE@

it_eig, lam_min, lam_max = [], [], []
it_loss, loss = [], []
with open(TRACE, newline="") as fh:
    for row in csv.DictReader(fh):
        k = int(row["k"])
        # eigenvalue cells are blank on iterations where H(k) was not sampled
        if row["lambda_min_Hk"] != "" and row["lambda_max_Hk"] != "":
            it_eig.append(k)
            lam_min.append(float(row["lambda_min_Hk"]))
            lam_max.append(float(row["lambda_max_Hk"]))
        value = float(row["loss"])
        if value > 0.0:
            it_loss.append(k)
            loss.append(value)

fig, axes = plt.subplots(1, 3, figsize=(15, 4))
axes[0].plot(it_eig, lam_max, color="tab:red")
axes[0].set_xlabel("iteration")
axes[0].set_ylabel("maximum eigenvalue of H(k)")
axes[1].plot(it_eig, lam_min, color="tab:red")
axes[1].set_xlabel("iteration")
axes[1].set_ylabel("minimum eigenvalue of H(k)")
axes[2].semilogy(it_loss, loss, color="tab:blue")
axes[2].set_xlabel("iteration")
axes[2].set_ylabel("training loss")
fig.tight_layout()
out = os.path.join(HERE, "trace.png")
fig.savefig(out, dpi=120)
print("wrote", out)
)PY";

std::string python_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::filesystem::path emit_plots(const std::filesystem::path& trace_csv,
                                 const std::filesystem::path& out_dir) {
  std::ifstream in(trace_csv);
  if (!in) throw FormatError("cannot open " + trace_csv.string());
  std::string header;
  if (!std::getline(in, header)) throw FormatError(trace_csv.string() + ": no rows");

  std::vector<std::string> columns;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = header.find(',', start);
    columns.push_back(header.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  std::vector<std::string> missing;
  for (const char* required : {"k", "lambda_min_Hk", "lambda_max_Hk", "loss"}) {
    if (std::find(columns.begin(), columns.end(), required) == columns.end()) {
      missing.emplace_back(required);
    }
  }
  if (!missing.empty()) {
    std::string msg = trace_csv.string() + ": missing columns:";
    for (const auto& c : missing) msg += " " + c;
    throw FormatError(msg);
  }

  std::string line;
  bool has_row = false;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      has_row = true;
      break;
    }
  }
  if (!has_row) throw FormatError(trace_csv.string() + ": no rows");

  std::filesystem::create_directories(out_dir);
  std::string script = kScript;
  const std::string placeholder = "@TRACE@";
  script.replace(script.find(placeholder), placeholder.size(),
                 python_string(std::filesystem::absolute(trace_csv).string()));
  const auto path = out_dir / "plots.py";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << script;
  return path;
}

}  // namespace overgrad
