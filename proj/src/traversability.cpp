#include "travkit/traversability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "travkit/errors.hpp"

namespace travkit {

namespace {
constexpr float kUnobserved = std::numeric_limits<float>::quiet_NaN();
constexpr double kSqrt2 = 1.4142135623730950488;
}  // namespace

FeatureDistMap::FeatureDistMap(const GridSpec& s, std::vector<std::string> names)
    : spec(s), channels(std::move(names)) {
  spec.validate();
  detail::require(!channels.empty(), "dist map needs at least one channel");
  mu.assign(channels.size() * spec.cell_count(), std::numeric_limits<double>::quiet_NaN());
  sigma.assign(channels.size() * spec.cell_count(), std::numeric_limits<double>::quiet_NaN());
  observed.assign(spec.cell_count(), 0);
}

int FeatureDistMap::channel_index(const std::string& name) const {
  for (std::size_t c = 0; c < channels.size(); ++c)
    if (channels[c] == name) return static_cast<int>(c);
  return -1;
}

void FeatureDistMap::validate() const {
  spec.validate();
  detail::require(mu.size() == channels.size() * spec.cell_count() && sigma.size() == mu.size(),
                  "dist map buffers have the wrong size");
  detail::require(observed.size() == spec.cell_count(), "dist map mask has the wrong size");
  for (int ix = 0; ix < spec.width; ++ix) {
    for (int iy = 0; iy < spec.height; ++iy) {
      if (!is_observed(ix, iy)) continue;
      for (std::size_t c = 0; c < channels.size(); ++c) {
        const std::size_t i = idx(static_cast<int>(c), ix, iy);
        if (std::isnan(mu[i]) && std::isnan(sigma[i])) continue;  // channel hole
        detail::require(std::isfinite(mu[i]), "observed cell has non-finite mu");
        detail::require(std::isfinite(sigma[i]) && sigma[i] > 0.0,
                        "observed cell needs sigma > 0");
      }
    }
  }
}

FeatureMap dist_to_grid(const FeatureDistMap& dist) {
  std::vector<std::string> names = dist.channels;
  for (const auto& c : dist.channels) names.push_back(c + "_sigma");
  FeatureMap grid(dist.spec, std::move(names));
  const std::size_t n = dist.spec.cell_count();
  const std::size_t cc = dist.channels.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!dist.observed[i]) continue;
    grid.observed[i] = 1;
    for (std::size_t c = 0; c < cc; ++c) {
      grid.values[c * n + i] = static_cast<float>(dist.mu[c * n + i]);
      grid.values[(cc + c) * n + i] = static_cast<float>(dist.sigma[c * n + i]);
    }
  }
  return grid;
}

FeatureDistMap dist_from_grid(const FeatureMap& grid) {
  const std::size_t cc = grid.channels.size() / 2;
  detail::require(cc >= 1 && grid.channels.size() == 2 * cc,
                  "dist grid needs an even channel count");
  for (std::size_t c = 0; c < cc; ++c)
    detail::require(grid.channels[cc + c] == grid.channels[c] + "_sigma",
                    "dist grid channels must be mu names then matching _sigma names");
  FeatureDistMap dist(grid.spec,
                      std::vector<std::string>(grid.channels.begin(), grid.channels.begin() + cc));
  const std::size_t n = grid.spec.cell_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (!grid.observed[i]) continue;
    dist.observed[i] = 1;
    for (std::size_t c = 0; c < cc; ++c) {
      dist.mu[c * n + i] = grid.values[c * n + i];
      dist.sigma[c * n + i] = grid.values[(cc + c) * n + i];
    }
  }
  dist.validate();
  return dist;
}

FeatureDistMap dist_from_features(const FeatureMap& map, double sigma) {
  detail::require(sigma > 0.0, "dist_from_features: sigma must be > 0");
  FeatureDistMap dist(map.spec, map.channels);
  const std::size_t n = map.spec.cell_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (!map.observed[i]) continue;
    dist.observed[i] = 1;
    for (std::size_t c = 0; c < map.channels.size(); ++c) {
      const float v = map.values[c * n + i];
      if (std::isnan(v)) continue;
      dist.mu[c * n + i] = v;
      dist.sigma[c * n + i] = sigma;
    }
  }
  return dist;
}

TravThresholds::TravThresholds(std::vector<std::string> features, std::vector<double> f_crit,
                               std::vector<double> alpha)
    : features_(std::move(features)), f_crit_(std::move(f_crit)), alpha_(std::move(alpha)) {
  detail::require(!features_.empty(), "thresholds need at least one feature");
  detail::require(f_crit_.size() == features_.size(), "f_crit count must match features");
  for (double f : f_crit_) detail::require(f > 0.0, "every f_crit must be > 0");
  if (alpha_.empty()) alpha_.assign(features_.size(), 1.0);
  detail::require(alpha_.size() == features_.size(), "alpha count must match features");
  double sum = 0.0;
  for (double a : alpha_) {
    detail::require(a >= 0.0, "alpha weights must be >= 0");
    sum += a;
  }
  detail::require(sum > 0.0, "alpha weights must not all be zero");
  for (double& a : alpha_) a /= sum;
}

TravMap::TravMap(const GridSpec& s) : spec(s) {
  spec.validate();
  values.assign(spec.cell_count(), kUnobserved);
  observed.assign(spec.cell_count(), 0);
}

FeatureMap trav_to_grid(const TravMap& map) {
  FeatureMap grid(map.spec, {"traversability"});
  grid.values = map.values;
  grid.observed = map.observed;
  return grid;
}

double gaussian_cdf(double x, double mu, double sigma) {
  detail::require(sigma > 0.0, "gaussian_cdf: sigma must be > 0");
  return 0.5 * std::erfc(-(x - mu) / (sigma * kSqrt2));
}

namespace {

std::vector<int> resolve_channels(const std::vector<std::string>& have,
                                  const TravThresholds& th) {
  std::vector<int> idx;
  idx.reserve(th.features().size());
  for (const auto& name : th.features()) {
    int found = -1;
    for (std::size_t c = 0; c < have.size(); ++c)
      if (have[c] == name) found = static_cast<int>(c);
    detail::require(found >= 0, "map lacks required feature channel '" + name + "'");
    idx.push_back(found);
  }
  return idx;
}

}  // namespace

TravMap det_cost(const FeatureMap& map, const TravThresholds& th) {
  const auto chans = resolve_channels(map.channels, th);
  TravMap out(map.spec);
  for (int ix = 0; ix < map.spec.width; ++ix) {
    for (int iy = 0; iy < map.spec.height; ++iy) {
      if (!map.is_observed(ix, iy)) continue;
      double cost = 0.0;
      bool ok = true;
      for (std::size_t k = 0; k < chans.size(); ++k) {
        const float f = map.at(chans[k], ix, iy);
        if (!std::isfinite(f)) {
          ok = false;
          break;
        }
        cost += th.alpha()[k] * (static_cast<double>(f) / th.f_crit()[k]);
      }
      if (!ok) continue;
      out.observed[map.spec.flat(ix, iy)] = 1;
      out.values[map.spec.flat(ix, iy)] = static_cast<float>(std::clamp(cost, 0.0, 1.0));
    }
  }
  return out;
}

TravMap prob_trav(const FeatureDistMap& dist, const TravThresholds& th) {
  const auto chans = resolve_channels(dist.channels, th);
  TravMap out(dist.spec);
  const std::size_t n = dist.spec.cell_count();
  for (int ix = 0; ix < dist.spec.width; ++ix) {
    for (int iy = 0; iy < dist.spec.height; ++iy) {
      if (!dist.is_observed(ix, iy)) continue;
      const std::size_t cell = dist.spec.flat(ix, iy);
      double p = 1.0;
      bool ok = true;
      for (std::size_t k = 0; k < chans.size(); ++k) {
        const double mu = dist.mu[static_cast<std::size_t>(chans[k]) * n + cell];
        const double sigma = dist.sigma[static_cast<std::size_t>(chans[k]) * n + cell];
        if (!std::isfinite(mu) || !(sigma > 0.0)) {
          ok = false;
          break;
        }
        p *= gaussian_cdf(th.f_crit()[k], mu, sigma);
      }
      if (!ok) continue;
      out.observed[cell] = 1;
      out.values[cell] = static_cast<float>(p);
    }
  }
  return out;
}

TravMap gt_trav(const FeatureMap& map, const TravThresholds& th) {
  const auto chans = resolve_channels(map.channels, th);
  TravMap out(map.spec);
  for (int ix = 0; ix < map.spec.width; ++ix) {
    for (int iy = 0; iy < map.spec.height; ++iy) {
      if (!map.is_observed(ix, iy)) continue;
      bool ok = true;
      bool traversable = true;
      for (std::size_t k = 0; k < chans.size(); ++k) {
        const float f = map.at(chans[k], ix, iy);
        if (!std::isfinite(f)) {
          ok = false;
          break;
        }
        if (!(static_cast<double>(f) < th.f_crit()[k])) traversable = false;
      }
      if (!ok) continue;
      out.observed[map.spec.flat(ix, iy)] = 1;
      out.values[map.spec.flat(ix, iy)] = traversable ? 1.0f : 0.0f;
    }
  }
  return out;
}

nlohmann::json thresholds_to_json(const TravThresholds& th) {
  return nlohmann::json{
      {"features", th.features()}, {"f_crit", th.f_crit()}, {"alpha", th.alpha()}};
}

TravThresholds thresholds_from_json(const nlohmann::json& j) {
  try {
    return TravThresholds(j.at("features").get<std::vector<std::string>>(),
                          j.at("f_crit").get<std::vector<double>>(),
                          j.value("alpha", std::vector<double>{}));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("thresholds json: ") + e.what());
  }
}

TravThresholds load_thresholds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return thresholds_from_json(j);
}

}  // namespace travkit
