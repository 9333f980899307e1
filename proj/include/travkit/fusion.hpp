#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "travkit/traversability.hpp"

namespace travkit {

// Running per-cell, per-channel Gaussian estimate built from successive
// measurement maps. Pure measurement updates: with zero process noise the
// posterior stddev strictly decreases with every measurement.
struct FusedState {
  GridSpec spec;
  std::vector<std::string> channels;
  std::vector<double> mu_hat;
  std::vector<double> sigma_hat;
  std::vector<std::uint8_t> observed;      // W * H
  std::vector<std::uint32_t> update_count;  // W * H

  // Per-update stddev inflation (added in quadrature before each measurement
  // update). 0 reproduces the pure filter.
  double process_noise = 0.0;

  FusedState() = default;
  FusedState(const GridSpec& s, std::vector<std::string> names);
  explicit FusedState(const FeatureDistMap& first_measurement);

  bool is_observed(int ix, int iy) const { return observed[spec.flat(ix, iy)] != 0; }
  FeatureDistMap as_dist() const;
};

// Per-channel-cell 1-D Kalman measurement update:
//   mu' = (mu_hat * sigma^2 + mu * sigma_hat^2) / (sigma_hat^2 + sigma^2)
//   sigma' = sqrt(sigma_hat^2 * sigma^2 / (sigma_hat^2 + sigma^2))
// Cells observed only by the measurement adopt it; cells the measurement
// does not observe are unchanged. The measurement must already be expressed
// in the state's frame and grid.
void kalman_update(FusedState& state, const FeatureDistMap& measurement);

}  // namespace travkit
