#pragma once

#include <cstdint>

#include "travkit/geom.hpp"

namespace travkit {

// Deterministic indoor test scene: floor, four walls, a ceiling, boxes and a
// ramp, sampled as a jittered surface grid. Extents are [-half, half] in x/y
// with the floor at z = 0.
struct SceneSpec {
  double half_extent = 4.0;    // m
  double ceiling_height = 2.5;  // m
  double point_spacing = 0.033;  // m between surface samples (~50k points)
  double jitter = 0.004;        // m of uniform per-axis jitter
  std::uint64_t seed = 7;
};

PointCloud make_test_scene(const SceneSpec& spec = {});

}  // namespace travkit
