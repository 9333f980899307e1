#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "travkit/geom.hpp"

namespace travkit {

// Spinning-lidar beam grid: n_azimuth columns over the full circle,
// n_elevation rows spanning [elevation_min, elevation_max].
struct SensorModel {
  int n_azimuth = 1024;
  int n_elevation = 128;
  double elevation_min = -0.393;  // rad
  double elevation_max = 0.393;   // rad
  double min_range = 0.0;         // m
  double max_range = 10.0;        // m

  void validate() const;

  double azimuth_step() const { return 6.283185307179586476925287 / n_azimuth; }
  double elevation_step() const { return (elevation_max - elevation_min) / n_elevation; }

  // Azimuth bin i is centered at i * azimuth_step(); a measurement exactly on
  // a bin boundary goes to the lower-index bin. Returns a value in [0, n).
  int azimuth_bin(double azimuth) const;
  // Elevation bin for a value inside [elevation_min, elevation_max]; -1 when
  // outside the span. Boundary values go to the lower-index bin except
  // elevation_min itself, which belongs to bin 0.
  int elevation_bin(double elevation) const;

  double azimuth_center(int bin) const { return bin * azimuth_step(); }
  double elevation_center(int bin) const {
    return elevation_min + (bin + 0.5) * elevation_step();
  }

  // Tightest float32 values still inside [min_range, max_range]; stored
  // ranges are clamped to these so the cast to float32 cannot push a value
  // past the double-precision bounds.
  float min_range_f() const;
  float max_range_f() const;

  bool operator==(const SensorModel&) const = default;
};

constexpr float kNoReturn = std::numeric_limits<float>::quiet_NaN();

// Range image over a SensorModel's beam grid. NO_RETURN cells hold NaN.
// Row r = elevation bin r (row 0 at elevation_min), column c = azimuth bin c.
struct DepthImage {
  SensorModel sensor;
  Pose pose;
  std::vector<float> ranges;  // n_elevation * n_azimuth, row-major

  DepthImage() = default;
  DepthImage(const SensorModel& s, const Pose& p)
      : sensor(s), pose(p),
        ranges(static_cast<std::size_t>(s.n_elevation) * s.n_azimuth, kNoReturn) {}

  float& at(int row, int col) { return ranges[static_cast<std::size_t>(row) * sensor.n_azimuth + col]; }
  float at(int row, int col) const {
    return ranges[static_cast<std::size_t>(row) * sensor.n_azimuth + col];
  }
  std::size_t finite_count() const;

  void validate() const;
};

// Projects a dense ground-truth cloud into the sensor frame at `pose`,
// bins each point to its beam cell and keeps the minimum range per cell.
// Points outside [min_range, max_range] or the elevation span are dropped.
DepthImage simulate_scan(const PointCloud& gt_cloud, const Pose& pose,
                         const SensorModel& sensor);

enum class CloudFrame { sensor, world };

// One point per finite cell, placed along the bin-center direction at the
// recorded range.
PointCloud depth_to_cloud(const DepthImage& img, CloudFrame frame);

// UNDI container: magic "UNDI", u32 LE header length, JSON header, then
// float32 LE row-major ranges with NaN encoding NO_RETURN.
void save_depth_image(const DepthImage& img, const std::string& path);
DepthImage load_depth_image(const std::string& path);

nlohmann::json sensor_to_json(const SensorModel& s);
SensorModel sensor_from_json(const nlohmann::json& j);

}  // namespace travkit
