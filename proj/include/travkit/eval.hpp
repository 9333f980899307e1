#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "travkit/rng.hpp"
#include "travkit/traversability.hpp"

namespace travkit {

// A channel-cell pair counts as ground truth when the gt mask is set and the
// gt value is finite.

struct RmseTriptych {
  // observed: pairs the input pointcloud observed; inpaint: pairs it did not;
  // both: every gt pair. Empty partitions stay unset instead of reading 0.
  std::optional<double> observed;
  std::optional<double> inpaint;
  std::optional<double> both;
  std::size_t n_observed = 0;
  std::size_t n_inpaint = 0;
  std::size_t n_both = 0;
};

// RMSE over channel-cell pairs, partitioned by the input-observation mask.
// The prediction must provide a finite value on every gt pair (apply a fill
// first).
RmseTriptych rmse_triptych(const FeatureMap& pred, const FeatureMap& gt,
                           const std::vector<std::uint8_t>& input_observed);

// Mean negative log-likelihood of gt under the predicted per-entry Gaussians,
// over gt pairs (the mask-normalized NLL).
double masked_nll(const FeatureMap& gt, const FeatureDistMap& dist);

// Per-feature [lo, hi] threshold sampling ranges; the default is
// [0.5 * median(gt), 2 * median(gt)] per feature, guarded away from zero.
struct ThresholdRanges {
  std::vector<std::string> features;
  std::vector<std::pair<double, double>> ranges;
};

ThresholdRanges default_threshold_ranges(const FeatureMap& gt,
                                         const std::vector<std::string>& features);

struct TravMaeResult {
  double mae_prob_mean = 0.0;
  double mae_prob_std = 0.0;
  double mae_det_mean = 0.0;
  double mae_det_std = 0.0;
  std::vector<double> mae_prob;  // per draw
  std::vector<double> mae_det;
};

// Random-threshold traversability comparison: per draw, sample f_crit per
// feature, build the binary gt map, score prob_trav(dist) and
// 1 - det_cost(det_features) against it by MAE over gt cells.
TravMaeResult trav_mae_experiment(const FeatureDistMap& dist, const FeatureMap& det_features,
                                  const FeatureMap& gt,
                                  const std::vector<std::string>& features,
                                  int n_threshold_draws, Rng& rng,
                                  const std::optional<ThresholdRanges>& ranges = std::nullopt);

}  // namespace travkit
