#include "overgrad/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "overgrad/error.hpp"
#include "overgrad/parallel.hpp"

namespace overgrad {

DriftReport drift_report(const NetworkState& net, const NetworkState& net0, bool keep_per_neuron) {
  if (net.m() != net0.m() || net.d() != net0.d()) {
    throw DimensionMismatch("drift_report: networks have different shapes");
  }
  const std::size_t m = net.m();
  Vector dist(m);
  parallel_for(0, m, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      dist[r] = std::sqrt(squared_distance(net.weights().row(r), net0.weights().row(r)));
    }
  }, 256);
  DriftReport report;
  double sum = 0.0;
  for (double v : dist) {
    report.max_drift = std::max(report.max_drift, v);
    sum += v;
  }
  report.mean_drift = std::min(sum / static_cast<double>(m), report.max_drift);
  if (keep_per_neuron) report.per_neuron = std::move(dist);
  return report;
}

FlipReport flip_report(const ActivationTable& now, const ActivationTable& initial) {
  FlipReport report;
  report.total_flips = now.differences(initial);
  report.flip_fraction =
      static_cast<double>(report.total_flips) / static_cast<double>(now.n() * now.m());
  return report;
}

FlipReport flip_report(const NetworkState& net, const NetworkState& net0, const Dataset& data) {
  if (net.m() != net0.m() || net.d() != net0.d()) {
    throw DimensionMismatch("flip_report: networks have different shapes");
  }
  return flip_report(ActivationTable(preactivations(net, data)),
                     ActivationTable(preactivations(net0, data)));
}

}  // namespace overgrad
