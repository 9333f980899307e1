#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "travkit/geom.hpp"

namespace travkit {

// BEV grid geometry. Cell (ix, iy) covers the half-open square
// [origin + i*res, origin + (i+1)*res) in each axis (lower-inclusive).
struct GridSpec {
  int width = 140;   // cells along x
  int height = 140;  // cells along y
  double resolution = 0.05;  // m / cell
  double origin_x = -3.5;    // world x of cell (0,0) corner
  double origin_y = -3.5;
  bool ego_centered = false;

  void validate() const;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  // Flat index; iy varies fastest (row-major over a width x height grid).
  std::size_t flat(int ix, int iy) const {
    return static_cast<std::size_t>(ix) * height + static_cast<std::size_t>(iy);
  }
  double center_x(int ix) const { return origin_x + (ix + 0.5) * resolution; }
  double center_y(int iy) const { return origin_y + (iy + 0.5) * resolution; }
  // Cell containing (x, y), or nullopt when outside the grid.
  std::optional<std::pair<int, int>> cell_of(double x, double y) const;

  bool operator==(const GridSpec&) const = default;
};

// Canonical feature channel order.
inline const std::vector<std::string>& feature_channel_names() {
  static const std::vector<std::string> names = {
      "terrain", "elevation", "step", "local_slope", "local_rough", "slope", "rough"};
  return names;
}

// C x W x H grid of per-cell values with an observed mask. Doubles as the
// generic grid container for traversability maps and mu/sigma stacks; the
// seven-channel invariants apply to the canonical feature set only.
//
// The mask marks cells with height data. Slope/roughness channels may hold
// NaN on an observed cell when the local plane fit was degenerate; consumers
// treat a channel-cell pair as valid when the mask is set and the value is
// finite.
struct FeatureMap {
  GridSpec spec;
  std::vector<std::string> channels;
  std::vector<float> values;          // channels.size() * W * H, channel-major
  std::vector<std::uint8_t> observed;  // W * H

  FeatureMap() = default;
  FeatureMap(const GridSpec& s, std::vector<std::string> names);

  int channel_index(const std::string& name) const;  // -1 when absent
  float& at(int c, int ix, int iy) {
    return values[static_cast<std::size_t>(c) * spec.cell_count() + spec.flat(ix, iy)];
  }
  float at(int c, int ix, int iy) const {
    return values[static_cast<std::size_t>(c) * spec.cell_count() + spec.flat(ix, iy)];
  }
  bool is_observed(int ix, int iy) const { return observed[spec.flat(ix, iy)] != 0; }

  void set_unobserved(int ix, int iy);
  void validate() const;
};

struct FeatureParams {
  double foothold_radius = 0.10;     // m, local slope/rough window
  double footprint_radius = 0.50;    // m, robot-scale slope/rough window
  double overhang_clearance = 0.80;  // m above terrain; higher points ignored
  int min_points_per_cell = 1;

  void validate() const;
};

// Per-cell height lists from binning a cloud onto the grid (input order kept).
struct CellHeights {
  GridSpec spec;
  std::vector<std::vector<double>> cells;  // W * H lists
};

CellHeights rasterize(const PointCloud& cloud, const GridSpec& spec);

// Seven-channel terrain feature stack:
//   terrain     1st percentile of cell heights (linear interpolation)
//   elevation   99th percentile after dropping points more than
//               overhang_clearance above terrain, floored at terrain
//   step        elevation - terrain
//   local_slope / slope   inclination of the least-squares plane fit to the
//               elevation of observed cells within the foothold / footprint
//               radius (>= 3 cells; degenerate fit -> NaN)
//   local_rough / rough   population variance of the elevation residuals
//               about that plane (about the mean when no plane fit exists)
FeatureMap compute_features(const CellHeights& cells, const FeatureParams& params);

FeatureMap map_features(const PointCloud& cloud, const GridSpec& spec,
                        const FeatureParams& params);

// Ego-centered crop of a global map: yaw-aligned by nearest-neighbor cell
// lookup, heights ("terrain"/"elevation" channels) re-referenced by -pose.z.
// Cells the global map does not cover or observe come out unobserved.
FeatureMap crop_and_align(const FeatureMap& global_map, const Pose& pose,
                          const GridSpec& spec);

// Observed cells with step < step_max, slope < slope_max and a fully observed
// footprint neighborhood.
std::vector<std::uint8_t> freespace_cells(const FeatureMap& map, double step_max,
                                          double slope_max, double footprint_radius);

// Cell offsets (dx, dy) whose centers lie within `radius` of a cell center.
std::vector<std::pair<int, int>> disk_offsets(double radius, double resolution);

// UNRG container: magic "UNRG", u32 LE header length, JSON header {width,
// height, channels, resolution, origin, pose}, then channel-major row-major
// float32 LE values with NaN = unobserved.
void save_grid(const FeatureMap& map, const std::string& path,
               const std::optional<Pose>& pose = std::nullopt);
struct LoadedGrid {
  FeatureMap map;
  std::optional<Pose> pose;
};
LoadedGrid load_grid(const std::string& path);

nlohmann::json grid_spec_to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);
nlohmann::json feature_params_to_json(const FeatureParams& p);
FeatureParams feature_params_from_json(const nlohmann::json& j);

}  // namespace travkit
