#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "travkit/rng.hpp"
#include "travkit/scan_sim.hpp"

namespace travkit {

// Boolean beam-grid mask, same layout as DepthImage::ranges.
struct BeamMask {
  int n_elevation = 0;
  int n_azimuth = 0;
  std::vector<std::uint8_t> cells;  // row-major, 1 = masked out

  bool at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * n_azimuth + col] != 0;
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

// Four-stage scan degradation: ceiling crop, robot self-hit mask,
// salt-and-pepper dropouts, linear range noise. Each stage fires with
// probability p; interval parameters are drawn uniformly per application.
struct NoisingConfig {
  double ceiling_p = 0.5;
  Interval ceiling_dz_max{0.5, 1.0};  // m above the sensor origin

  double mask_p = 0.8;
  int n_masks = 4;
  std::uint64_t mask_seed = 0x6d61736b;  // masks are procedural unless given
  std::vector<BeamMask> masks;           // optional explicit masks

  double salt_p = 1.0;
  double salt_keep_prob = 0.999;  // p_r: keep a return with this probability
  double salt_r_max = 10.0;       // replacement draw is uniform on (0, r_max)

  double range_p = 1.0;
  Interval range_m{0.001, 0.01};  // noise stddev slope (per meter of range)
  double range_c = 0.0;           // noise stddev intercept, m

  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Which stages fired and with what drawn parameters; one record per
// apply_pipeline call. Useful for dataset metadata and rate tests.
struct PipelineTrace {
  bool ceiling_fired = false;
  double ceiling_dz = 0.0;
  bool mask_fired = false;
  int mask_index = -1;
  bool salt_fired = false;
  bool range_fired = false;
  double range_m = 0.0;
};

// Removes every return whose sensor-frame z (bin-center reconstruction)
// exceeds dz_max.
DepthImage ceiling_crop(const DepthImage& img, double dz_max);

// Masked cells become NO_RETURN.
DepthImage robot_mask(const DepthImage& img, const BeamMask& mask);

// Each finite range is kept with probability keep_prob, otherwise replaced by
// a uniform draw on (0, r_max), clamped into the sensor's range bounds.
DepthImage salt_pepper(const DepthImage& img, double keep_prob, double r_max, Rng& rng);

// Adds zero-mean Gaussian noise with stddev m*r + c to each finite range,
// clamped into the sensor's range bounds.
DepthImage range_noise(const DepthImage& img, double m, double c, Rng& rng);

// Fixed stage order: ceiling crop -> robot mask -> salt-and-pepper -> range
// noise. Fully reproducible from the rng stream.
DepthImage apply_pipeline(const DepthImage& img, const NoisingConfig& cfg, Rng& rng,
                          PipelineTrace* trace = nullptr);

// Procedural stand-ins for robot self-hit masks: blobs of low-elevation rows
// over a few azimuth sectors. Deterministic in (seed, dims).
std::vector<BeamMask> make_robot_masks(int n_masks, int n_elevation, int n_azimuth,
                                       std::uint64_t seed);

nlohmann::json noising_to_json(const NoisingConfig& cfg);
NoisingConfig noising_from_json(const nlohmann::json& j);
NoisingConfig load_noising_config(const std::string& path);

}  // namespace travkit
