#pragma once

#include <cstddef>
#include <optional>

#include "overgrad/dataset.hpp"
#include "overgrad/gram.hpp"
#include "overgrad/linalg.hpp"
#include "overgrad/network.hpp"

namespace overgrad {

/// Distance of each first-layer row from its initial value.
struct DriftReport {
  double max_drift = 0.0;
  double mean_drift = 0.0;
  std::optional<Vector> per_neuron;
};

DriftReport drift_report(const NetworkState& net, const NetworkState& net0,
                         bool keep_per_neuron = false);

/// Activation-pattern changes since initialisation, summed over examples.
struct FlipReport {
  std::size_t total_flips = 0;
  double flip_fraction = 0.0;
};

FlipReport flip_report(const NetworkState& net, const NetworkState& net0, const Dataset& data);
FlipReport flip_report(const ActivationTable& now, const ActivationTable& initial);

}  // namespace overgrad
