#include "travkit/inpaint.hpp"

#include <algorithm>
#include <cmath>

#include "travkit/errors.hpp"

namespace travkit {

FeatureMap fill_constant(const FeatureMap& map, const std::vector<double>& values) {
  detail::require(values.size() == map.channels.size(),
                  "fill_constant: one value per channel required");
  FeatureMap out = map;
  const std::size_t n = map.spec.cell_count();
  for (std::size_t c = 0; c < map.channels.size(); ++c) {
    const float fill = static_cast<float>(values[c]);
    for (std::size_t i = 0; i < n; ++i) {
      float& v = out.values[c * n + i];
      if (!std::isfinite(v)) v = fill;
    }
  }
  std::fill(out.observed.begin(), out.observed.end(), 1);
  return out;
}

FeatureMap fill_zero(const FeatureMap& map) {
  return fill_constant(map, std::vector<double>(map.channels.size(), 0.0));
}

OracleFill oracle_constant(const std::vector<std::uint8_t>& pred_mask, const FeatureMap& gt) {
  detail::require(pred_mask.size() == gt.spec.cell_count(),
                  "oracle_constant: mask size does not match the gt grid");
  OracleFill out;
  out.values.assign(gt.channels.size(), 0.0);
  out.defined.assign(gt.channels.size(), 0);
  const std::size_t n = gt.spec.cell_count();
  for (std::size_t c = 0; c < gt.channels.size(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pred_mask[i]) continue;  // predicted; not part of the fill region
      if (!gt.observed[i]) continue;
      const float v = gt.values[c * n + i];
      if (!std::isfinite(v)) continue;
      sum += v;
      ++count;
    }
    if (count > 0) {
      out.values[c] = sum / static_cast<double>(count);
      out.defined[c] = 1;
    }
  }
  return out;
}

FeatureMap fill_diffusion(const FeatureMap& map, int iters, double tol) {
  detail::require(iters >= 1 && tol >= 0.0, "fill_diffusion: bad iteration parameters");
  bool any_observed = false;
  for (std::uint8_t m : map.observed) any_observed |= (m != 0);
  detail::require(any_observed, "fill_diffusion: map has no observed cells");

  FeatureMap out = map;
  const int w = map.spec.width;
  const int h = map.spec.height;
  const std::size_t n = map.spec.cell_count();

  std::vector<double> cur(n), next(n);
  std::vector<std::uint8_t> known(n);
  for (std::size_t c = 0; c < map.channels.size(); ++c) {
    const float* src = map.values.data() + c * n;

    double mean = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      known[i] = std::isfinite(src[i]) ? 1 : 0;
      if (known[i]) {
        mean += src[i];
        ++count;
      }
    }
    if (count == 0) {
      // Channel with no data anywhere (e.g. slope on a degenerate map):
      // nothing to anchor a harmonic fill, use zeros.
      std::fill(out.values.begin() + c * n, out.values.begin() + (c + 1) * n, 0.0f);
      continue;
    }
    mean /= static_cast<double>(count);
    for (std::size_t i = 0; i < n; ++i) cur[i] = known[i] ? src[i] : mean;

    for (int it = 0; it < iters; ++it) {
      double max_delta = 0.0;
      for (int ix = 0; ix < w; ++ix) {
        for (int iy = 0; iy < h; ++iy) {
          const std::size_t i = map.spec.flat(ix, iy);
          if (known[i]) {
            next[i] = cur[i];
            continue;
          }
          double sum = 0.0;
          int cnt = 0;
          if (ix > 0) sum += cur[i - static_cast<std::size_t>(h)], ++cnt;
          if (ix + 1 < w) sum += cur[i + static_cast<std::size_t>(h)], ++cnt;
          if (iy > 0) sum += cur[i - 1], ++cnt;
          if (iy + 1 < h) sum += cur[i + 1], ++cnt;
          const double v = cnt > 0 ? sum / cnt : cur[i];
          max_delta = std::max(max_delta, std::abs(v - cur[i]));
          next[i] = v;
        }
      }
      cur.swap(next);
      if (max_delta < tol) break;
    }

    float* dst = out.values.data() + c * n;
    for (std::size_t i = 0; i < n; ++i)
      if (!known[i]) dst[i] = static_cast<float>(cur[i]);
  }
  std::fill(out.observed.begin(), out.observed.end(), 1);
  return out;
}

}  // namespace travkit
