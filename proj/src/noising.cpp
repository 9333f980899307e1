#include "travkit/noising.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "travkit/errors.hpp"

namespace travkit {

namespace {

void require_prob(double p, const char* name) {
  detail::require(p >= 0.0 && p <= 1.0, std::string(name) + " must be in [0,1]");
}

void require_interval(const Interval& iv, const char* name) {
  detail::require(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo <= iv.hi,
                  std::string(name) + " interval is invalid");
}

Interval interval_from_json(const nlohmann::json& j, const Interval& fallback) {
  if (j.is_null()) return fallback;
  if (j.is_number()) {
    const double v = j.get<double>();
    return {v, v};
  }
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError("interval must be a number or [lo, hi]");
}

}  // namespace

void NoisingConfig::validate() const {
  require_prob(ceiling_p, "ceiling p");
  require_prob(mask_p, "mask p");
  require_prob(salt_p, "salt-pepper p");
  require_prob(salt_keep_prob, "salt-pepper keep probability");
  require_prob(range_p, "range-noise p");
  require_interval(ceiling_dz_max, "ceiling dz_max");
  detail::require(ceiling_dz_max.lo >= 0.0, "ceiling dz_max must be >= 0");
  require_interval(range_m, "range-noise m");
  detail::require(range_m.lo >= 0.0, "range-noise m must be >= 0");
  detail::require(range_c >= 0.0, "range-noise c must be >= 0");
  detail::require(salt_r_max > 0.0, "salt-pepper r_max must be > 0");
  detail::require(n_masks >= 1 || !masks.empty(), "at least one robot mask required");
}

DepthImage ceiling_crop(const DepthImage& img, double dz_max) {
  detail::require(dz_max >= 0.0, "ceiling_crop: dz_max must be >= 0");
  DepthImage out = img;
  for (int row = 0; row < img.sensor.n_elevation; ++row) {
    const double sin_el = std::sin(img.sensor.elevation_center(row));
    for (int col = 0; col < img.sensor.n_azimuth; ++col) {
      const float r = out.at(row, col);
      if (std::isnan(r)) continue;
      if (static_cast<double>(r) * sin_el > dz_max) out.at(row, col) = kNoReturn;
    }
  }
  return out;
}

DepthImage robot_mask(const DepthImage& img, const BeamMask& mask) {
  detail::require(mask.n_elevation == img.sensor.n_elevation &&
                      mask.n_azimuth == img.sensor.n_azimuth,
                  "robot_mask: mask dimensions do not match the sensor");
  DepthImage out = img;
  for (std::size_t i = 0; i < out.ranges.size(); ++i) {
    if (mask.cells[i]) out.ranges[i] = kNoReturn;
  }
  return out;
}

DepthImage salt_pepper(const DepthImage& img, double keep_prob, double r_max, Rng& rng) {
  detail::require(keep_prob >= 0.0 && keep_prob <= 1.0,
                  "salt_pepper: keep probability must be in [0,1]");
  detail::require(r_max > 0.0, "salt_pepper: r_max must be > 0");
  DepthImage out = img;
  const float rmin_f = img.sensor.min_range_f();
  const float rmax_f = img.sensor.max_range_f();
  for (float& r : out.ranges) {
    if (std::isnan(r)) continue;
    if (rng.uniform01() < keep_prob) continue;
    const double draw = rng.uniform01_open() * r_max;
    r = std::clamp(static_cast<float>(draw), rmin_f, rmax_f);
  }
  return out;
}

DepthImage range_noise(const DepthImage& img, double m, double c, Rng& rng) {
  detail::require(m >= 0.0 && c >= 0.0, "range_noise: m and c must be >= 0");
  DepthImage out = img;
  const float rmin_f = img.sensor.min_range_f();
  const float rmax_f = img.sensor.max_range_f();
  for (float& r : out.ranges) {
    if (std::isnan(r)) continue;
    const double stddev = m * static_cast<double>(r) + c;
    const double noised = static_cast<double>(r) + rng.normal(0.0, stddev);
    r = std::clamp(static_cast<float>(noised), rmin_f, rmax_f);
  }
  return out;
}

DepthImage apply_pipeline(const DepthImage& img, const NoisingConfig& cfg, Rng& rng,
                          PipelineTrace* trace) {
  cfg.validate();
  PipelineTrace t;
  DepthImage out = img;

  if (rng.uniform01() < cfg.ceiling_p) {
    t.ceiling_fired = true;
    t.ceiling_dz = rng.uniform(cfg.ceiling_dz_max.lo, cfg.ceiling_dz_max.hi);
    out = ceiling_crop(out, t.ceiling_dz);
  }

  if (rng.uniform01() < cfg.mask_p) {
    t.mask_fired = true;
    if (!cfg.masks.empty()) {
      t.mask_index = static_cast<int>(rng.uniform_index(cfg.masks.size()));
      out = robot_mask(out, cfg.masks[t.mask_index]);
    } else {
      const auto masks = make_robot_masks(cfg.n_masks, img.sensor.n_elevation,
                                          img.sensor.n_azimuth, cfg.mask_seed);
      t.mask_index = static_cast<int>(rng.uniform_index(masks.size()));
      out = robot_mask(out, masks[t.mask_index]);
    }
  }

  if (rng.uniform01() < cfg.salt_p) {
    t.salt_fired = true;
    out = salt_pepper(out, cfg.salt_keep_prob, cfg.salt_r_max, rng);
  }

  if (rng.uniform01() < cfg.range_p) {
    t.range_fired = true;
    t.range_m = rng.uniform(cfg.range_m.lo, cfg.range_m.hi);
    out = range_noise(out, t.range_m, cfg.range_c, rng);
  }

  if (trace) *trace = t;
  return out;
}

std::vector<BeamMask> make_robot_masks(int n_masks, int n_elevation, int n_azimuth,
                                       std::uint64_t seed) {
  detail::require(n_masks >= 1, "make_robot_masks: need n_masks >= 1");
  std::vector<BeamMask> masks;
  masks.reserve(static_cast<std::size_t>(n_masks));
  for (int k = 0; k < n_masks; ++k) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
    BeamMask m;
    m.n_elevation = n_elevation;
    m.n_azimuth = n_azimuth;
    m.cells.assign(static_cast<std::size_t>(n_elevation) * n_azimuth, 0);
    // 2-4 azimuth sectors of body/payload blobs rising from the bottom rows.
    const int n_blobs = 2 + static_cast<int>(rng.uniform_index(3));
    for (int b = 0; b < n_blobs; ++b) {
      const int center = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_azimuth)));
      const int half_width = std::max(1, static_cast<int>(n_azimuth * rng.uniform(0.02, 0.08)));
      const int height = std::max(1, static_cast<int>(n_elevation * rng.uniform(0.1, 0.35)));
      for (int row = 0; row < height && row < n_elevation; ++row) {
        // Taper the sector as it rises so the blob looks like a rounded body.
        const int w = std::max(1, half_width - row * half_width / (height + 1));
        for (int d = -w; d <= w; ++d) {
          int col = (center + d) % n_azimuth;
          if (col < 0) col += n_azimuth;
          m.cells[static_cast<std::size_t>(row) * n_azimuth + col] = 1;
        }
      }
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

nlohmann::json noising_to_json(const NoisingConfig& cfg) {
  return nlohmann::json{
      {"rng_seed", cfg.rng_seed},
      {"ceiling_crop", {{"p", cfg.ceiling_p}, {"dz_max", {cfg.ceiling_dz_max.lo, cfg.ceiling_dz_max.hi}}}},
      {"robot_mask", {{"p", cfg.mask_p}, {"n_masks", cfg.n_masks}, {"mask_seed", cfg.mask_seed}}},
      {"salt_pepper",
       {{"p", cfg.salt_p}, {"keep_prob", cfg.salt_keep_prob}, {"r_max", cfg.salt_r_max}}},
      {"range_noise", {{"p", cfg.range_p}, {"m", {cfg.range_m.lo, cfg.range_m.hi}}, {"c", cfg.range_c}}}};
}

NoisingConfig noising_from_json(const nlohmann::json& j) {
  NoisingConfig cfg;
  try {
    cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
    if (j.contains("ceiling_crop")) {
      const auto& s = j["ceiling_crop"];
      cfg.ceiling_p = s.value("p", cfg.ceiling_p);
      cfg.ceiling_dz_max = interval_from_json(s.value("dz_max", nlohmann::json()), cfg.ceiling_dz_max);
    }
    if (j.contains("robot_mask")) {
      const auto& s = j["robot_mask"];
      cfg.mask_p = s.value("p", cfg.mask_p);
      cfg.n_masks = s.value("n_masks", cfg.n_masks);
      cfg.mask_seed = s.value("mask_seed", cfg.mask_seed);
    }
    if (j.contains("salt_pepper")) {
      const auto& s = j["salt_pepper"];
      cfg.salt_p = s.value("p", cfg.salt_p);
      cfg.salt_keep_prob = s.value("keep_prob", cfg.salt_keep_prob);
      cfg.salt_r_max = s.value("r_max", cfg.salt_r_max);
    }
    if (j.contains("range_noise")) {
      const auto& s = j["range_noise"];
      cfg.range_p = s.value("p", cfg.range_p);
      cfg.range_m = interval_from_json(s.value("m", nlohmann::json()), cfg.range_m);
      cfg.range_c = s.value("c", cfg.range_c);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("noising config json: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

NoisingConfig load_noising_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return noising_from_json(j);
}

}  // namespace travkit
