#pragma once

#include <cstdint>
#include <vector>

#include "travkit/feature_map.hpp"

namespace travkit {

// Fills operate per channel-cell: every non-finite entry (cell unobserved or
// channel hole) is replaced; finite entries stay bit-identical. Outputs are
// fully observed.

// Per-channel constant fill. `values` must have one entry per channel.
FeatureMap fill_constant(const FeatureMap& map, const std::vector<double>& values);

// Zero fill, the classic empty-cell placeholder.
FeatureMap fill_zero(const FeatureMap& map);

struct OracleFill {
  std::vector<double> values;       // per channel; mean of gt over the fill region
  std::vector<std::uint8_t> defined;  // 0 when the fill region was empty
};

// RMSE-minimizing constant per channel: the mean of ground truth over cells
// missing from the prediction but present in gt.
OracleFill oracle_constant(const std::vector<std::uint8_t>& pred_mask, const FeatureMap& gt);

// Harmonic fill: unknown entries solve the discrete Laplace equation with
// known entries as Dirichlet data, by Jacobi iteration (sweep-order free)
// until the largest per-cell change drops below tol or `iters` is reached.
FeatureMap fill_diffusion(const FeatureMap& map, int iters = 2000, double tol = 1e-5);

}  // namespace travkit
