#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "travkit/feature_map.hpp"

namespace travkit {

// Per-cell, per-channel Gaussian belief over the feature stack. Stored in
// double so repeated fusion stays exact to well below file precision.
struct FeatureDistMap {
  GridSpec spec;
  std::vector<std::string> channels;
  std::vector<double> mu;     // C * W * H, channel-major
  std::vector<double> sigma;  // same layout, > 0 where observed
  std::vector<std::uint8_t> observed;  // W * H

  FeatureDistMap() = default;
  FeatureDistMap(const GridSpec& s, std::vector<std::string> names);

  int channel_index(const std::string& name) const;
  std::size_t idx(int c, int ix, int iy) const {
    return static_cast<std::size_t>(c) * spec.cell_count() + spec.flat(ix, iy);
  }
  bool is_observed(int ix, int iy) const { return observed[spec.flat(ix, iy)] != 0; }

  void validate() const;
};

// 2C-channel grid ("<name>" mu channels, then "<name>_sigma") <-> dist map.
FeatureMap dist_to_grid(const FeatureDistMap& dist);
FeatureDistMap dist_from_grid(const FeatureMap& grid);
// Constant-sigma dist map from a plain feature map (useful as a stand-in for
// a predictive model's output).
FeatureDistMap dist_from_features(const FeatureMap& map, double sigma);

// Robot-specific critical values and (deterministic mode) weights.
// Weights are normalized to sum 1 at construction.
class TravThresholds {
 public:
  TravThresholds(std::vector<std::string> features, std::vector<double> f_crit,
                 std::vector<double> alpha = {});

  const std::vector<std::string>& features() const { return features_; }
  const std::vector<double>& f_crit() const { return f_crit_; }
  const std::vector<double>& alpha() const { return alpha_; }

 private:
  std::vector<std::string> features_;
  std::vector<double> f_crit_;
  std::vector<double> alpha_;
};

// W x H traversability values in [0, 1] with an observed mask.
struct TravMap {
  GridSpec spec;
  std::vector<float> values;
  std::vector<std::uint8_t> observed;

  TravMap() = default;
  explicit TravMap(const GridSpec& s);
  float at(int ix, int iy) const { return values[spec.flat(ix, iy)]; }
  bool is_observed(int ix, int iy) const { return observed[spec.flat(ix, iy)] != 0; }
};

FeatureMap trav_to_grid(const TravMap& map);

// Phi((x - mu) / sigma), erf-based.
double gaussian_cdf(double x, double mu, double sigma);

// Weighted threshold-relative cost sum(alpha_f * f / f_crit), clamped to
// [0, 1]. Higher = worse. Cells with a non-finite included feature come out
// unobserved.
TravMap det_cost(const FeatureMap& map, const TravThresholds& th);

// prod_f Phi((f_crit - mu) / sigma): the probability that every included
// feature lies below its critical value. Higher = more traversable.
TravMap prob_trav(const FeatureDistMap& dist, const TravThresholds& th);

// Binary: 1 when all included features are < f_crit.
TravMap gt_trav(const FeatureMap& map, const TravThresholds& th);

nlohmann::json thresholds_to_json(const TravThresholds& th);
TravThresholds thresholds_from_json(const nlohmann::json& j);
TravThresholds load_thresholds(const std::string& path);

}  // namespace travkit
