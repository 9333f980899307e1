#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace travkit {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool is_finite() const;
};

// Unordered set of 3-D points in meters. Stored in file order; intensity and
// ring fields present in real sensor exports are parsed but discarded.
struct PointCloud {
  std::vector<Point3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Rigid transform, z-up, meters. Rotation is kept as a matrix and validated
// on construction: R^T R = I and det(R) = 1 within 1e-9.
class Pose {
 public:
  Pose();  // identity
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  // yaw about +z, then pitch about +y, then roll about +x (applied z-y-x).
  static Pose from_yaw_pitch_roll(double yaw, double pitch, double roll,
                                  const Eigen::Vector3d& translation);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  double yaw() const;

  Point3 to_world(const Point3& p) const;
  Point3 to_sensor(const Point3& p) const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

enum class TransformDirection { world_to_sensor, sensor_to_world };

// Applies R p + t (sensor_to_world) or R^T (p - t) (world_to_sensor) to every
// point. A non-finite point anywhere rejects the whole cloud.
PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose,
                           TransformDirection direction);

enum class CloudFormat { ply_binary, xyz_ascii };

// xyz_ascii: one point per line, three whitespace-separated decimals,
// '#' comment lines allowed.
// ply_binary: standard PLY, binary little-endian, element "vertex" with
// float32 x,y,z required; other scalar properties are skipped.
PointCloud load_cloud(const std::string& path, CloudFormat format);
void save_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format);

// Sniffs "ply" magic vs. text to pick the loader.
PointCloud load_cloud_auto(const std::string& path);

nlohmann::json pose_to_json(const Pose& pose);
// Accepts {"rotation": 3x3, "translation": [x,y,z]} or
// {"yaw":..,"pitch":..,"roll":..,"translation":[x,y,z]} (angles in radians).
Pose pose_from_json(const nlohmann::json& j);

}  // namespace travkit
