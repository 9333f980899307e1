#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "travkit/feature_map.hpp"
#include "travkit/noising.hpp"
#include "travkit/scan_sim.hpp"

namespace travkit {

// Freespace pose sampling: uniform over cells passing the step/slope rule
// with a fully observed footprint, sensor placed sensor_height above terrain,
// yaw uniform, roll = pitch = 0.
struct PoseRule {
  double step_max = 0.2;        // m
  double slope_max = 0.35;      // rad
  double footprint_radius = 0.5;  // m, neighborhood that must be observed
  double sensor_height = 0.7;   // m above terrain
};

struct Rect {
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;
  bool contains(double x, double y) const {
    return x >= x_min && x < x_max && y >= y_min && y < y_max;
  }
};

struct DatasetSpec {
  int n_samples = 1;
  GridSpec grid;          // crop geometry for labels
  SensorModel sensor;
  NoisingConfig noising;
  PoseRule pose_rule;
  std::vector<Rect> test_regions;  // poses inside any rect are split "test"
  std::uint64_t rng_seed = 0;

  void validate() const;
};

Pose sample_pose(const FeatureMap& global_map, const PoseRule& rule, Rng& rng);

struct DatasetPair {
  PointCloud scan;   // noised single-frame cloud, sensor frame
  FeatureMap label;  // ego-centered crop of the global map
  nlohmann::json meta;
};

// One training pair: simulate -> noise -> back-project for the input,
// crop-and-align for the label. Reproducible from pair_seed alone.
DatasetPair make_pair(const PointCloud& gt_cloud, const FeatureMap& global_map,
                      const Pose& pose, const DatasetSpec& spec, std::uint64_t pair_seed);

// Writes n_samples pairs as pair_%06d/{scan.ply, label.unrg, meta.json} plus
// manifest.json. Pair i depends only on (inputs, rng_seed, i), so output
// bytes are identical across runs and worker counts.
void generate_dataset(const PointCloud& gt_cloud, const FeatureMap& global_map,
                      const DatasetSpec& spec, const std::string& out_dir, int n_threads = 1);

nlohmann::json dataset_spec_to_json(const DatasetSpec& spec);
DatasetSpec dataset_spec_from_json(const nlohmann::json& j);
DatasetSpec load_dataset_spec(const std::string& path);

}  // namespace travkit
