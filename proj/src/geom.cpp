#include "travkit/geom.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include <nlohmann/json.hpp>

#include "travkit/errors.hpp"

namespace travkit {

bool Point3::is_finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

Pose::Pose() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  const double ortho_err = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
                               .cwiseAbs()
                               .maxCoeff();
  detail::require(std::isfinite(ortho_err) && ortho_err < 1e-9,
                  "pose rotation is not orthonormal");
  detail::require(std::abs(rotation.determinant() - 1.0) < 1e-9,
                  "pose rotation determinant is not +1");
  detail::require(translation.allFinite(), "pose translation is not finite");
}

Pose Pose::from_yaw_pitch_roll(double yaw, double pitch, double roll,
                               const Eigen::Vector3d& translation) {
  const Eigen::Matrix3d r =
      (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
       Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
          .toRotationMatrix();
  return Pose(r, translation);
}

double Pose::yaw() const { return std::atan2(rotation_(1, 0), rotation_(0, 0)); }

Point3 Pose::to_world(const Point3& p) const {
  const Eigen::Vector3d v = rotation_ * Eigen::Vector3d(p.x, p.y, p.z) + translation_;
  return {v.x(), v.y(), v.z()};
}

Point3 Pose::to_sensor(const Point3& p) const {
  const Eigen::Vector3d v =
      rotation_.transpose() * (Eigen::Vector3d(p.x, p.y, p.z) - translation_);
  return {v.x(), v.y(), v.z()};
}

PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose,
                           TransformDirection direction) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (!p.is_finite()) {
      throw ContractError("transform_cloud: non-finite point at index " + std::to_string(i));
    }
    out.points.push_back(direction == TransformDirection::sensor_to_world ? pose.to_world(p)
                                                                          : pose.to_sensor(p));
  }
  return out;
}

nlohmann::json pose_to_json(const Pose& pose) {
  const auto& r = pose.rotation();
  const auto& t = pose.translation();
  return nlohmann::json{
      {"rotation",
       {{r(0, 0), r(0, 1), r(0, 2)}, {r(1, 0), r(1, 1), r(1, 2)}, {r(2, 0), r(2, 1), r(2, 2)}}},
      {"translation", {t.x(), t.y(), t.z()}}};
}

Pose pose_from_json(const nlohmann::json& j) {
  try {
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    if (j.contains("translation")) {
      const auto& jt = j.at("translation");
      if (!jt.is_array() || jt.size() != 3) throw ParseError("pose translation must be [x,y,z]");
      t = Eigen::Vector3d(jt[0].get<double>(), jt[1].get<double>(), jt[2].get<double>());
    }
    if (j.contains("rotation")) {
      const auto& jr = j.at("rotation");
      if (!jr.is_array() || jr.size() != 3) throw ParseError("pose rotation must be 3x3");
      Eigen::Matrix3d r;
      for (int i = 0; i < 3; ++i) {
        if (!jr[i].is_array() || jr[i].size() != 3) throw ParseError("pose rotation must be 3x3");
        for (int k = 0; k < 3; ++k) r(i, k) = jr[i][k].get<double>();
      }
      return Pose(r, t);
    }
    const double yaw = j.value("yaw", 0.0);
    const double pitch = j.value("pitch", 0.0);
    const double roll = j.value("roll", 0.0);
    return Pose::from_yaw_pitch_roll(yaw, pitch, roll, t);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("pose json: ") + e.what());
  }
}

}  // namespace travkit
