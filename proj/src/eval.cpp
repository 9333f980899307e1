#include "travkit/eval.hpp"

#include <algorithm>
#include <cmath>

#include "travkit/errors.hpp"

namespace travkit {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;
}

RmseTriptych rmse_triptych(const FeatureMap& pred, const FeatureMap& gt,
                           const std::vector<std::uint8_t>& input_observed) {
  detail::require(pred.spec == gt.spec, "rmse_triptych: grid specs do not match");
  detail::require(pred.channels == gt.channels, "rmse_triptych: channels do not match");
  detail::require(input_observed.size() == gt.spec.cell_count(),
                  "rmse_triptych: input mask size does not match the grid");

  const std::size_t n = gt.spec.cell_count();
  double sse_obs = 0.0, sse_inp = 0.0;
  RmseTriptych out;
  for (std::size_t c = 0; c < gt.channels.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!gt.observed[i]) continue;
      const float g = gt.values[c * n + i];
      if (!std::isfinite(g)) continue;
      const float p = pred.values[c * n + i];
      detail::require(std::isfinite(p),
                      "rmse_triptych: prediction has a non-finite value on a gt pair "
                      "(apply a fill first)");
      const double d = static_cast<double>(p) - static_cast<double>(g);
      if (input_observed[i]) {
        sse_obs += d * d;
        ++out.n_observed;
      } else {
        sse_inp += d * d;
        ++out.n_inpaint;
      }
    }
  }
  out.n_both = out.n_observed + out.n_inpaint;
  if (out.n_observed > 0)
    out.observed = std::sqrt(sse_obs / static_cast<double>(out.n_observed));
  if (out.n_inpaint > 0) out.inpaint = std::sqrt(sse_inp / static_cast<double>(out.n_inpaint));
  if (out.n_both > 0)
    out.both = std::sqrt((sse_obs + sse_inp) / static_cast<double>(out.n_both));
  return out;
}

double masked_nll(const FeatureMap& gt, const FeatureDistMap& dist) {
  detail::require(gt.spec == dist.spec, "masked_nll: grid specs do not match");
  detail::require(gt.channels == dist.channels, "masked_nll: channels do not match");
  const std::size_t n = gt.spec.cell_count();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < gt.channels.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!gt.observed[i]) continue;
      const float g = gt.values[c * n + i];
      if (!std::isfinite(g)) continue;
      const double mu = dist.mu[c * n + i];
      const double sigma = dist.sigma[c * n + i];
      detail::require(std::isfinite(mu) && sigma > 0.0,
                      "masked_nll: prediction lacks a valid Gaussian on a gt pair");
      const double z = (static_cast<double>(g) - mu) / sigma;
      sum += kHalfLog2Pi + std::log(sigma) + 0.5 * z * z;
      ++count;
    }
  }
  detail::require(count > 0, "masked_nll: no gt pairs to evaluate");
  return sum / static_cast<double>(count);
}

ThresholdRanges default_threshold_ranges(const FeatureMap& gt,
                                         const std::vector<std::string>& features) {
  constexpr double kFloor = 1e-6;  // keeps f_crit draws strictly positive
  ThresholdRanges out;
  out.features = features;
  const std::size_t n = gt.spec.cell_count();
  std::vector<double> vals;
  for (const auto& name : features) {
    const int c = gt.channel_index(name);
    detail::require(c >= 0, "gt map lacks feature channel '" + name + "'");
    vals.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (!gt.observed[i]) continue;
      const float v = gt.values[static_cast<std::size_t>(c) * n + i];
      if (std::isfinite(v)) vals.push_back(v);
    }
    detail::require(!vals.empty(), "no gt data for feature '" + name + "'");
    std::sort(vals.begin(), vals.end());
    const double median = vals[vals.size() / 2];
    out.ranges.emplace_back(std::max(0.5 * median, kFloor), std::max(2.0 * median, 2 * kFloor));
  }
  return out;
}

TravMaeResult trav_mae_experiment(const FeatureDistMap& dist, const FeatureMap& det_features,
                                  const FeatureMap& gt,
                                  const std::vector<std::string>& features,
                                  int n_threshold_draws, Rng& rng,
                                  const std::optional<ThresholdRanges>& ranges_in) {
  detail::require(n_threshold_draws >= 1, "trav_mae_experiment: need at least one draw");
  const ThresholdRanges ranges =
      ranges_in ? *ranges_in : default_threshold_ranges(gt, features);
  detail::require(ranges.features == features && ranges.ranges.size() == features.size(),
                  "trav_mae_experiment: ranges do not match the feature list");

  auto mae_vs = [](const TravMap& pred, const TravMap& truth, bool invert) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < truth.values.size(); ++i) {
      if (!truth.observed[i]) continue;
      if (!pred.observed[i]) continue;
      const double p = invert ? 1.0 - pred.values[i] : pred.values[i];
      sum += std::abs(p - static_cast<double>(truth.values[i]));
      ++count;
    }
    detail::require(count > 0, "trav_mae_experiment: no comparable cells");
    return sum / static_cast<double>(count);
  };

  TravMaeResult res;
  for (int draw = 0; draw < n_threshold_draws; ++draw) {
    std::vector<double> f_crit;
    f_crit.reserve(features.size());
    for (const auto& [lo, hi] : ranges.ranges) f_crit.push_back(rng.uniform(lo, hi));
    const TravThresholds th(features, f_crit);

    const TravMap truth = gt_trav(gt, th);
    const TravMap prob = prob_trav(dist, th);
    const TravMap det = det_cost(det_features, th);
    res.mae_prob.push_back(mae_vs(prob, truth, false));
    res.mae_det.push_back(mae_vs(det, truth, true));
  }

  auto mean_std = [](const std::vector<double>& xs, double& mean, double& stddev) {
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    stddev = std::sqrt(var / static_cast<double>(xs.size()));
  };
  mean_std(res.mae_prob, res.mae_prob_mean, res.mae_prob_std);
  mean_std(res.mae_det, res.mae_det_mean, res.mae_det_std);
  return res;
}

}  // namespace travkit
