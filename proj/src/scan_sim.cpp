#include "travkit/scan_sim.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "travkit/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "UNDI I/O assumes a little-endian host");

namespace travkit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

void SensorModel::validate() const {
  detail::require(n_azimuth >= 1 && n_elevation >= 1, "sensor beam counts must be >= 1");
  detail::require(elevation_min < elevation_max, "sensor elevation span is empty");
  detail::require(0.0 <= min_range && min_range < max_range, "sensor range bounds invalid");
}

int SensorModel::azimuth_bin(double azimuth) const {
  const double u = azimuth / azimuth_step() + 0.5;
  // Bins are the intervals (k, k+1] in u so that boundary hits land in the
  // lower-index bin.
  long idx = static_cast<long>(std::ceil(u)) - 1;
  idx %= n_azimuth;
  if (idx < 0) idx += n_azimuth;
  return static_cast<int>(idx);
}

int SensorModel::elevation_bin(double elevation) const {
  if (elevation < elevation_min || elevation > elevation_max) return -1;
  if (elevation == elevation_min) return 0;
  const double v = (elevation - elevation_min) / elevation_step();
  long idx = static_cast<long>(std::ceil(v)) - 1;
  if (idx < 0) idx = 0;
  if (idx >= n_elevation) idx = n_elevation - 1;
  return static_cast<int>(idx);
}

float SensorModel::min_range_f() const {
  float f = static_cast<float>(min_range);
  if (static_cast<double>(f) < min_range)
    f = std::nextafterf(f, std::numeric_limits<float>::infinity());
  return f;
}

float SensorModel::max_range_f() const {
  float f = static_cast<float>(max_range);
  if (static_cast<double>(f) > max_range) f = std::nextafterf(f, 0.0f);
  return f;
}

std::size_t DepthImage::finite_count() const {
  std::size_t n = 0;
  for (float r : ranges)
    if (std::isfinite(r)) ++n;
  return n;
}

void DepthImage::validate() const {
  sensor.validate();
  detail::require(ranges.size() == static_cast<std::size_t>(sensor.n_elevation) * sensor.n_azimuth,
                  "depth image dimensions do not match its sensor");
  for (float r : ranges) {
    if (std::isnan(r)) continue;
    detail::require(r >= sensor.min_range && r <= sensor.max_range,
                    "depth image range outside [min_range, max_range]");
  }
}

DepthImage simulate_scan(const PointCloud& gt_cloud, const Pose& pose,
                         const SensorModel& sensor) {
  sensor.validate();
  detail::require(!gt_cloud.empty(), "simulate_scan: ground-truth cloud is empty");

  DepthImage img(sensor, pose);
  const float rmin_f = sensor.min_range_f();
  const float rmax_f = sensor.max_range_f();
  for (std::size_t i = 0; i < gt_cloud.points.size(); ++i) {
    const Point3& wp = gt_cloud.points[i];
    if (!wp.is_finite())
      throw ContractError("simulate_scan: non-finite point at index " + std::to_string(i));
    const Point3 p = pose.to_sensor(wp);
    const double range = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    if (range < sensor.min_range || range > sensor.max_range || range == 0.0) continue;
    const double elevation = std::asin(p.z / range);
    const int row = sensor.elevation_bin(elevation);
    if (row < 0) continue;
    const int col = sensor.azimuth_bin(std::atan2(p.y, p.x));
    float& cell = img.at(row, col);
    const float r32 = std::clamp(static_cast<float>(range), rmin_f, rmax_f);
    if (std::isnan(cell) || r32 < cell) cell = r32;
  }
  return img;
}

PointCloud depth_to_cloud(const DepthImage& img, CloudFrame frame) {
  img.validate();
  PointCloud cloud;
  cloud.points.reserve(img.finite_count());
  for (int row = 0; row < img.sensor.n_elevation; ++row) {
    const double el = img.sensor.elevation_center(row);
    const double cos_el = std::cos(el);
    const double sin_el = std::sin(el);
    for (int col = 0; col < img.sensor.n_azimuth; ++col) {
      const float r = img.at(row, col);
      if (std::isnan(r)) continue;
      const double az = img.sensor.azimuth_center(col);
      Point3 p{r * cos_el * std::cos(az), r * cos_el * std::sin(az), r * sin_el};
      if (frame == CloudFrame::world) p = img.pose.to_world(p);
      cloud.points.push_back(p);
    }
  }
  return cloud;
}

nlohmann::json sensor_to_json(const SensorModel& s) {
  return nlohmann::json{{"n_azimuth", s.n_azimuth},
                        {"n_elevation", s.n_elevation},
                        {"elevation_min", s.elevation_min},
                        {"elevation_max", s.elevation_max},
                        {"min_range", s.min_range},
                        {"max_range", s.max_range}};
}

SensorModel sensor_from_json(const nlohmann::json& j) {
  SensorModel s;
  try {
    s.n_azimuth = j.value("n_azimuth", s.n_azimuth);
    s.n_elevation = j.value("n_elevation", s.n_elevation);
    s.elevation_min = j.value("elevation_min", s.elevation_min);
    s.elevation_max = j.value("elevation_max", s.elevation_max);
    s.min_range = j.value("min_range", s.min_range);
    s.max_range = j.value("max_range", s.max_range);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sensor json: ") + e.what());
  }
  s.validate();
  return s;
}

void save_depth_image(const DepthImage& img, const std::string& path) {
  img.validate();
  nlohmann::json header = sensor_to_json(img.sensor);
  header["pose"] = pose_to_json(img.pose);
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write("UNDI", 4);
  const std::uint32_t hlen = static_cast<std::uint32_t>(hs.size());
  out.write(reinterpret_cast<const char*>(&hlen), 4);
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  out.write(reinterpret_cast<const char*>(img.ranges.data()),
            static_cast<std::streamsize>(img.ranges.size() * sizeof(float)));
  if (!out) throw IoError("write failed for " + path);
}

DepthImage load_depth_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "UNDI", 4) != 0)
    throw ParseError(path + ": bad magic, expected UNDI (byte offset 0)");
  std::uint32_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 4);
  if (in.gcount() != 4) throw ParseError(path + ": truncated header length (byte offset 4)");
  std::string hs(hlen, '\0');
  in.read(hs.data(), hlen);
  if (in.gcount() != static_cast<std::streamsize>(hlen))
    throw ParseError(path + ": truncated header (byte offset 8)");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": header is not valid JSON: " + e.what());
  }
  DepthImage img(sensor_from_json(header),
                 header.contains("pose") && !header["pose"].is_null()
                     ? pose_from_json(header["pose"])
                     : Pose());
  const std::size_t payload = img.ranges.size() * sizeof(float);
  in.read(reinterpret_cast<char*>(img.ranges.data()), static_cast<std::streamsize>(payload));
  if (in.gcount() != static_cast<std::streamsize>(payload))
    throw ParseError(path + ": truncated range payload (byte offset " +
                     std::to_string(8 + hlen + static_cast<std::size_t>(in.gcount())) + ")");
  img.validate();
  return img;
}

}  // namespace travkit
