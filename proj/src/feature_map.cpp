#include "travkit/feature_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "travkit/errors.hpp"

namespace travkit {

namespace {
constexpr float kUnobserved = std::numeric_limits<float>::quiet_NaN();
}

void GridSpec::validate() const {
  detail::require(width >= 1 && height >= 1, "grid dimensions must be >= 1");
  detail::require(resolution > 0.0, "grid resolution must be > 0");
  detail::require(std::isfinite(origin_x) && std::isfinite(origin_y), "grid origin not finite");
}

std::optional<std::pair<int, int>> GridSpec::cell_of(double x, double y) const {
  const double fx = std::floor((x - origin_x) / resolution);
  const double fy = std::floor((y - origin_y) / resolution);
  if (fx < 0 || fx >= width || fy < 0 || fy >= height) return std::nullopt;
  return std::make_pair(static_cast<int>(fx), static_cast<int>(fy));
}

FeatureMap::FeatureMap(const GridSpec& s, std::vector<std::string> names)
    : spec(s), channels(std::move(names)) {
  spec.validate();
  detail::require(!channels.empty(), "feature map needs at least one channel");
  values.assign(channels.size() * spec.cell_count(), kUnobserved);
  observed.assign(spec.cell_count(), 0);
}

int FeatureMap::channel_index(const std::string& name) const {
  for (std::size_t c = 0; c < channels.size(); ++c)
    if (channels[c] == name) return static_cast<int>(c);
  return -1;
}

void FeatureMap::set_unobserved(int ix, int iy) {
  observed[spec.flat(ix, iy)] = 0;
  for (std::size_t c = 0; c < channels.size(); ++c)
    at(static_cast<int>(c), ix, iy) = kUnobserved;
}

void FeatureMap::validate() const {
  spec.validate();
  detail::require(values.size() == channels.size() * spec.cell_count(),
                  "feature map value buffer has the wrong size");
  detail::require(observed.size() == spec.cell_count(), "feature map mask has the wrong size");
  for (int ix = 0; ix < spec.width; ++ix) {
    for (int iy = 0; iy < spec.height; ++iy) {
      if (!is_observed(ix, iy)) {
        for (std::size_t c = 0; c < channels.size(); ++c)
          detail::require(std::isnan(at(static_cast<int>(c), ix, iy)),
                          "unobserved cell holds a value");
      }
    }
  }
}

void FeatureParams::validate() const {
  detail::require(foothold_radius > 0.0 && foothold_radius <= footprint_radius,
                  "need 0 < foothold_radius <= footprint_radius");
  detail::require(overhang_clearance > 0.0, "overhang_clearance must be > 0");
  detail::require(min_points_per_cell >= 1, "min_points_per_cell must be >= 1");
}

CellHeights rasterize(const PointCloud& cloud, const GridSpec& spec) {
  spec.validate();
  CellHeights out;
  out.spec = spec;
  out.cells.resize(spec.cell_count());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (!p.is_finite())
      throw ContractError("rasterize: non-finite point at index " + std::to_string(i));
    const auto cell = spec.cell_of(p.x, p.y);
    if (!cell) continue;
    out.cells[spec.flat(cell->first, cell->second)].push_back(p.z);
  }
  return out;
}

namespace {

// Linear interpolation between closest ranks, q in [0, 100], data ascending.
double percentile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double rank = q / 100.0 * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct PlaneFit {
  bool ok = false;
  double slope = 0.0;     // rad, angle between fitted normal and +z
  double variance = 0.0;  // population variance of residuals
};

// OLS plane through (x, y, z) samples; falls back to variance about the mean
// when fewer than 3 samples or the (x, y) support is collinear.
PlaneFit fit_plane(const std::vector<double>& xs, const std::vector<double>& ys,
                   const std::vector<double>& zs) {
  PlaneFit fit;
  const std::size_t n = xs.size();
  double xm = 0, ym = 0, zm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += xs[i];
    ym += ys[i];
    zm += zs[i];
  }
  xm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  zm /= static_cast<double>(n);

  double sxx = 0, sxy = 0, syy = 0, sxz = 0, syz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xc = xs[i] - xm;
    const double yc = ys[i] - ym;
    const double zc = zs[i] - zm;
    sxx += xc * xc;
    sxy += xc * yc;
    syy += yc * yc;
    sxz += xc * zc;
    syz += yc * zc;
  }

  const double det = sxx * syy - sxy * sxy;
  const bool degenerate =
      n < 3 || sxx <= 0.0 || syy <= 0.0 || det <= 1e-9 * sxx * syy;
  if (degenerate) {
    double var = 0;
    for (std::size_t i = 0; i < n; ++i) var += (zs[i] - zm) * (zs[i] - zm);
    fit.variance = var / static_cast<double>(n);
    return fit;
  }

  const double a = (syy * sxz - sxy * syz) / det;
  const double b = (sxx * syz - sxy * sxz) / det;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (zs[i] - zm) - a * (xs[i] - xm) - b * (ys[i] - ym);
    rss += r * r;
  }
  fit.ok = true;
  fit.slope = std::atan(std::hypot(a, b));
  fit.variance = rss / static_cast<double>(n);
  return fit;
}

}  // namespace

std::vector<std::pair<int, int>> disk_offsets(double radius, double resolution) {
  std::vector<std::pair<int, int>> offsets;
  const int reach = static_cast<int>(std::floor(radius / resolution)) + 1;
  for (int dx = -reach; dx <= reach; ++dx) {
    for (int dy = -reach; dy <= reach; ++dy) {
      if (std::hypot(dx * resolution, dy * resolution) <= radius) offsets.emplace_back(dx, dy);
    }
  }
  return offsets;
}

FeatureMap compute_features(const CellHeights& cells, const FeatureParams& params) {
  params.validate();
  const GridSpec& spec = cells.spec;
  FeatureMap map(spec, feature_channel_names());
  const int c_terrain = 0, c_elev = 1, c_step = 2;
  const int c_lslope = 3, c_lrough = 4, c_slope = 5, c_rough = 6;

  // Pass 1: per-cell percentile features.
  std::vector<double> sorted;
  for (int ix = 0; ix < spec.width; ++ix) {
    for (int iy = 0; iy < spec.height; ++iy) {
      const auto& heights = cells.cells[spec.flat(ix, iy)];
      if (heights.size() < static_cast<std::size_t>(params.min_points_per_cell)) continue;
      sorted.assign(heights.begin(), heights.end());
      std::sort(sorted.begin(), sorted.end());

      const double terrain = percentile(sorted, 1.0);
      // Drop overhangs (points well above the terrain estimate), then take
      // the 99th percentile of what is left. Floored at terrain so step
      // stays nonnegative even when the filter removes nearly everything.
      const double cutoff = terrain + params.overhang_clearance;
      auto upper = std::upper_bound(sorted.begin(), sorted.end(), cutoff);
      std::vector<double> kept(sorted.begin(), upper);
      double elevation = kept.empty() ? terrain : percentile(kept, 99.0);
      elevation = std::max(elevation, terrain);

      map.observed[spec.flat(ix, iy)] = 1;
      map.at(c_terrain, ix, iy) = static_cast<float>(terrain);
      map.at(c_elev, ix, iy) = static_cast<float>(elevation);
      map.at(c_step, ix, iy) = static_cast<float>(elevation - terrain);
    }
  }

  // Pass 2: neighborhood plane fits on the elevation channel.
  const auto foothold = disk_offsets(params.foothold_radius, spec.resolution);
  const auto footprint = disk_offsets(params.footprint_radius, spec.resolution);
  std::vector<double> xs, ys, zs;
  auto window_fit = [&](int ix, int iy, const std::vector<std::pair<int, int>>& offsets) {
    xs.clear();
    ys.clear();
    zs.clear();
    for (const auto& [dx, dy] : offsets) {
      const int nx = ix + dx;
      const int ny = iy + dy;
      if (nx < 0 || nx >= spec.width || ny < 0 || ny >= spec.height) continue;
      if (!map.is_observed(nx, ny)) continue;
      xs.push_back(spec.center_x(nx));
      ys.push_back(spec.center_y(ny));
      zs.push_back(map.at(c_elev, nx, ny));
    }
    return fit_plane(xs, ys, zs);
  };

  for (int ix = 0; ix < spec.width; ++ix) {
    for (int iy = 0; iy < spec.height; ++iy) {
      if (!map.is_observed(ix, iy)) continue;
      const PlaneFit local = window_fit(ix, iy, foothold);
      map.at(c_lslope, ix, iy) = local.ok ? static_cast<float>(local.slope) : kUnobserved;
      map.at(c_lrough, ix, iy) = static_cast<float>(local.variance);
      const PlaneFit robot = window_fit(ix, iy, footprint);
      map.at(c_slope, ix, iy) = robot.ok ? static_cast<float>(robot.slope) : kUnobserved;
      map.at(c_rough, ix, iy) = static_cast<float>(robot.variance);
    }
  }
  return map;
}

FeatureMap map_features(const PointCloud& cloud, const GridSpec& spec,
                        const FeatureParams& params) {
  return compute_features(rasterize(cloud, spec), params);
}

FeatureMap crop_and_align(const FeatureMap& global_map, const Pose& pose,
                          const GridSpec& spec) {
  spec.validate();
  GridSpec out_spec = spec;
  out_spec.ego_centered = true;
  out_spec.origin_x = -0.5 * spec.width * spec.resolution;
  out_spec.origin_y = -0.5 * spec.height * spec.resolution;

  FeatureMap out(out_spec, global_map.channels);
  const double yaw = pose.yaw();
  const double cy = std::cos(yaw);
  const double sy = std::sin(yaw);
  const double tx = pose.translation().x();
  const double ty = pose.translation().y();
  const double tz = pose.translation().z();

  std::vector<bool> is_height(global_map.channels.size());
  for (std::size_t c = 0; c < global_map.channels.size(); ++c)
    is_height[c] = global_map.channels[c] == "terrain" || global_map.channels[c] == "elevation";

  for (int ix = 0; ix < out_spec.width; ++ix) {
    const double u = out_spec.center_x(ix);
    for (int iy = 0; iy < out_spec.height; ++iy) {
      const double v = out_spec.center_y(iy);
      const double wx = cy * u - sy * v + tx;
      const double wy = sy * u + cy * v + ty;
      const auto src = global_map.spec.cell_of(wx, wy);
      if (!src || !global_map.is_observed(src->first, src->second)) continue;
      out.observed[out_spec.flat(ix, iy)] = 1;
      for (std::size_t c = 0; c < global_map.channels.size(); ++c) {
        float value = global_map.at(static_cast<int>(c), src->first, src->second);
        if (is_height[c] && !std::isnan(value))
          value = static_cast<float>(static_cast<double>(value) - tz);
        out.at(static_cast<int>(c), ix, iy) = value;
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> freespace_cells(const FeatureMap& map, double step_max,
                                          double slope_max, double footprint_radius) {
  const int c_step = map.channel_index("step");
  const int c_slope = map.channel_index("slope");
  detail::require(c_step >= 0 && c_slope >= 0, "freespace needs step and slope channels");
  const GridSpec& spec = map.spec;
  const auto offsets = disk_offsets(footprint_radius, spec.resolution);

  std::vector<std::uint8_t> free(spec.cell_count(), 0);
  for (int ix = 0; ix < spec.width; ++ix) {
    for (int iy = 0; iy < spec.height; ++iy) {
      if (!map.is_observed(ix, iy)) continue;
      const float step = map.at(c_step, ix, iy);
      const float slope = map.at(c_slope, ix, iy);
      if (!(step < step_max) || !(slope < slope_max)) continue;
      bool neighborhood_ok = true;
      for (const auto& [dx, dy] : offsets) {
        const int nx = ix + dx;
        const int ny = iy + dy;
        if (nx < 0 || nx >= spec.width || ny < 0 || ny >= spec.height ||
            !map.is_observed(nx, ny)) {
          neighborhood_ok = false;
          break;
        }
      }
      if (neighborhood_ok) free[spec.flat(ix, iy)] = 1;
    }
  }
  return free;
}

nlohmann::json grid_spec_to_json(const GridSpec& spec) {
  return nlohmann::json{{"width", spec.width},
                        {"height", spec.height},
                        {"resolution", spec.resolution},
                        {"origin", {spec.origin_x, spec.origin_y}},
                        {"ego_centered", spec.ego_centered}};
}

GridSpec grid_spec_from_json(const nlohmann::json& j) {
  GridSpec spec;
  try {
    spec.width = j.value("width", spec.width);
    spec.height = j.value("height", spec.height);
    spec.resolution = j.value("resolution", spec.resolution);
    if (j.contains("origin")) {
      const auto& o = j["origin"];
      if (!o.is_array() || o.size() != 2) throw ParseError("grid origin must be [x, y]");
      spec.origin_x = o[0].get<double>();
      spec.origin_y = o[1].get<double>();
    }
    spec.ego_centered = j.value("ego_centered", spec.ego_centered);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("grid spec json: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json feature_params_to_json(const FeatureParams& p) {
  return nlohmann::json{{"foothold_radius", p.foothold_radius},
                        {"footprint_radius", p.footprint_radius},
                        {"overhang_clearance", p.overhang_clearance},
                        {"min_points_per_cell", p.min_points_per_cell}};
}

FeatureParams feature_params_from_json(const nlohmann::json& j) {
  FeatureParams p;
  try {
    p.foothold_radius = j.value("foothold_radius", p.foothold_radius);
    p.footprint_radius = j.value("footprint_radius", p.footprint_radius);
    p.overhang_clearance = j.value("overhang_clearance", p.overhang_clearance);
    p.min_points_per_cell = j.value("min_points_per_cell", p.min_points_per_cell);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("feature params json: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace travkit
