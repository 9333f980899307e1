#include "travkit/synth.hpp"

#include <cmath>

#include "travkit/rng.hpp"

namespace travkit {

namespace {

struct Box {
  double x0, y0, x1, y1, z0, z1;
};

}  // namespace

PointCloud make_test_scene(const SceneSpec& spec) {
  Rng rng(spec.seed);
  PointCloud cloud;
  const double h = spec.half_extent;
  const double dz = spec.ceiling_height;
  const double step = spec.point_spacing;

  auto jit = [&]() { return rng.uniform(-spec.jitter, spec.jitter); };

  // Boxes sit on the floor; the ramp climbs along +x in the south-east area.
  const Box boxes[] = {
      {-2.6, -1.2, -1.6, 0.2, 0.0, 0.45},
      {0.8, 1.2, 2.2, 2.4, 0.0, 0.30},
      {-0.6, -3.0, 0.6, -2.2, 0.0, 0.60},
  };
  const Box ramp{1.0, -1.6, 3.2, -0.4, 0.0, 0.40};
  auto ramp_height = [&](double x) {
    return ramp.z1 * (x - ramp.x0) / (ramp.x1 - ramp.x0);
  };
  auto inside_box = [&](double x, double y, const Box& b) {
    return x >= b.x0 && x <= b.x1 && y >= b.y0 && y <= b.y1;
  };

  // Floor (skipped under boxes and the ramp) and box tops / ramp surface.
  for (double x = -h; x <= h; x += step) {
    for (double y = -h; y <= h; y += step) {
      const double px = x + jit();
      const double py = y + jit();
      double z = 0.0;
      bool covered = false;
      for (const auto& b : boxes) {
        if (inside_box(px, py, b)) {
          z = b.z1;
          covered = true;
          break;
        }
      }
      if (!covered && inside_box(px, py, ramp)) z = ramp_height(px);
      cloud.points.push_back({px, py, z + jit()});
    }
  }

  // Box side faces so the scene casts occlusion shadows.
  for (const auto& b : boxes) {
    for (double z = 0.0; z <= b.z1; z += step) {
      for (double x = b.x0; x <= b.x1; x += step) {
        cloud.points.push_back({x + jit(), b.y0 + jit(), z + jit()});
        cloud.points.push_back({x + jit(), b.y1 + jit(), z + jit()});
      }
      for (double y = b.y0; y <= b.y1; y += step) {
        cloud.points.push_back({b.x0 + jit(), y + jit(), z + jit()});
        cloud.points.push_back({b.x1 + jit(), y + jit(), z + jit()});
      }
    }
  }

  // Walls and ceiling (sparser; they mostly exercise the ceiling crop).
  const double wall_step = step * 2.0;
  for (double s = -h; s <= h; s += wall_step) {
    for (double z = 0.0; z <= dz; z += wall_step) {
      cloud.points.push_back({s + jit(), -h + jit(), z + jit()});
      cloud.points.push_back({s + jit(), h + jit(), z + jit()});
      cloud.points.push_back({-h + jit(), s + jit(), z + jit()});
      cloud.points.push_back({h + jit(), s + jit(), z + jit()});
    }
  }
  for (double x = -h; x <= h; x += wall_step) {
    for (double y = -h; y <= h; y += wall_step) {
      cloud.points.push_back({x + jit(), y + jit(), dz + jit()});
    }
  }

  return cloud;
}

}  // namespace travkit
