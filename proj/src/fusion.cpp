#include "travkit/fusion.hpp"

#include <cmath>
#include <limits>

#include "travkit/errors.hpp"

namespace travkit {

FusedState::FusedState(const GridSpec& s, std::vector<std::string> names)
    : spec(s), channels(std::move(names)) {
  spec.validate();
  mu_hat.assign(channels.size() * spec.cell_count(), std::numeric_limits<double>::quiet_NaN());
  sigma_hat.assign(channels.size() * spec.cell_count(),
                   std::numeric_limits<double>::quiet_NaN());
  observed.assign(spec.cell_count(), 0);
  update_count.assign(spec.cell_count(), 0);
}

FusedState::FusedState(const FeatureDistMap& first_measurement)
    : FusedState(first_measurement.spec, first_measurement.channels) {
  kalman_update(*this, first_measurement);
}

FeatureDistMap FusedState::as_dist() const {
  FeatureDistMap dist(spec, channels);
  dist.mu = mu_hat;
  dist.sigma = sigma_hat;
  dist.observed = observed;
  return dist;
}

void kalman_update(FusedState& state, const FeatureDistMap& meas) {
  detail::require(state.spec == meas.spec, "kalman_update: grid specs do not match");
  detail::require(state.channels == meas.channels, "kalman_update: channels do not match");
  meas.validate();

  const std::size_t n = state.spec.cell_count();
  const std::size_t cc = state.channels.size();
  const double q2 = state.process_noise * state.process_noise;

  for (std::size_t cell = 0; cell < n; ++cell) {
    if (!meas.observed[cell]) continue;
    bool any_channel = false;
    for (std::size_t c = 0; c < cc; ++c) {
      const std::size_t i = c * n + cell;
      const double mu = meas.mu[i];
      const double sigma = meas.sigma[i];
      if (!std::isfinite(mu) || !(sigma > 0.0)) continue;  // channel hole
      any_channel = true;

      double& mu_hat = state.mu_hat[i];
      double& sigma_hat = state.sigma_hat[i];
      if (!state.observed[cell] || !std::isfinite(mu_hat) || !(sigma_hat > 0.0)) {
        mu_hat = mu;
        sigma_hat = sigma;
        continue;
      }
      double prior_var = sigma_hat * sigma_hat + q2;
      const double meas_var = sigma * sigma;
      mu_hat = (mu_hat * meas_var + mu * prior_var) / (prior_var + meas_var);
      sigma_hat = std::sqrt(prior_var * meas_var / (prior_var + meas_var));
    }
    if (any_channel) {
      state.observed[cell] = 1;
      ++state.update_count[cell];
    }
  }
}

}  // namespace travkit
